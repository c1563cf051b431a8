#pragma once

#include "subrep/kernel.hpp"
#include "subrep/social_network.hpp"

#include <utility>
#include <vector>

namespace subrep {

struct PruneResult {
    std::vector<int> kept;
    bool fallback = false; // nobody in the pool touches R; caller scores everyone
};

// Keep candidates with positive total adjacency to R. Dropping the rest never
// loses an optimum: an isolated candidate has no coupling to the rest of the
// candidate team, so its score equals the score of R alone, which every kept
// candidate matches or beats. When the whole pool is isolated the pool is
// returned unchanged with `fallback` set.
PruneResult prune_candidates(const SocialNetwork& net, const std::vector<int>& R,
                             const std::vector<int>& pool);

// Candidate-independent precomputation for scoring teams R + {q} against the
// reference team. Product layout is candidate-side major: pair (u, v) sits at
// index u * t + v, u in [0, m) over the candidate team, v in [0, t) over the
// reference; the candidate always occupies slot u = m - 1. With that layout
// the walk system splits into
//     [ K   F  ]        K: coupling among R (candidate independent),
//     [ F^T  I ]        F: coupling of the candidate row (cheap per q),
// and the per-candidate work reduces to one t x t Schur solve against the
// stored K inverse.
struct KernelContext {
    int t = 0; // |team|
    int r = 0; // |R|
    int m = 0; // r + 1, candidate side size
    double c = 0.0;

    std::vector<std::pair<int, int>> pairs; // skill pairs (i <= j) with W != 0, row-major
    std::vector<Eigen::MatrixXd> Z;         // per pair: W(i,j) * (slice_T o A_T), t x t
    std::vector<Eigen::MatrixXd> Y;         // per pair: slice_R o A_R, m x m, candidate slot zero
    std::vector<Eigen::VectorXd> Z_row;     // Z * ones, for the convergence bound
    std::vector<Eigen::VectorXd> Y_row;     // Y * ones

    Eigen::MatrixXd K;     // (r t) x (r t): I - c sum Y x Z over non-candidate rows
    Eigen::MatrixXd K_inv; // explicit inverse, reused across every candidate
    double K_inv_sum = 0.0;
    Eigen::VectorXd K_inv_ones; // K_inv * ones

    std::vector<int> R_nodes;
    Eigen::MatrixXd A_R; // m x m, last row/col zero
    Eigen::MatrixXd L_R; // m x l, last row zero
    TeamSubgraph team_graph;
};

KernelContext build_context(const SocialNetwork& net, const std::vector<int>& team,
                            const std::vector<int>& R, const SkillRelevance& W,
                            const KernelParams& params);

// Score of team R + {q} against the reference team (same value the padded
// direct computation yields, up to roundoff). Bit-for-bit deterministic for a
// given context. Throws ConvergenceError when the candidate's walk matrix
// breaks the row-sum bound; an ill-conditioned Schur block degrades to a
// direct dense solve before giving up.
double evaluate_candidate(const KernelContext& ctx, const SocialNetwork& net, int q);

struct BestPick {
    int node = -1;
    double score = 0.0;
    bool prune_fallback = false;
    long evaluated = 0; // candidate evaluations performed
};

// One replacement round: prune V \ (team + R), score every kept candidate
// against one shared context, return the best (ties to the smallest node
// index; the result does not depend on `threads`).
BestPick fast_kernel_best(const SocialNetwork& net, const std::vector<int>& team,
                          const std::vector<int>& R, const SkillRelevance& W,
                          const KernelParams& params, int threads = 1);

} // namespace subrep
