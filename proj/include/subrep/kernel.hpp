#pragma once

#include "subrep/social_network.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace subrep {

// Decay for the random-walk series. c is fixed once per problem instance (from
// the team-vs-team reference product) and reused for every candidate so that
// scores stay comparable.
struct KernelParams {
    double c = 0.0;
    double safety = 0.9;
};

// Thrown when c times the row-sum bound of a walk matrix reaches 1: the walk
// series is no longer guaranteed to converge and scores would be meaningless.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double c, double bound)
        : std::runtime_error("walk series may diverge: c * bound = " +
                             std::to_string(c * bound) + " >= 1"),
          c(c), bound(bound) {}
    double c;
    double bound;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// max over the two orderings of the pairwise skill products:
// slice(a,b) = max(L(a,i)L(b,j), L(a,j)L(b,i)); symmetric, non-negative.
Eigen::MatrixXd edge_attribute_slice(const Eigen::MatrixXd& L, int i, int j);

// E_x = sum over skill pairs (i <= j) of W(i,j) * slice1 (x) slice2.
// Slices with W(i,j) = 0 contribute nothing and are skipped.
Eigen::MatrixXd product_attribute_matrix(const TeamSubgraph& g1, const TeamSubgraph& g2,
                                         const SkillRelevance& W);

// E_x elementwise-times (A1 (x) A2): the matrix whose Neumann series the
// kernel sums.
Eigen::MatrixXd product_walk_matrix(const TeamSubgraph& g1, const TeamSubgraph& g2,
                                    const SkillRelevance& W);

// min(max row sum, max col sum); upper bound on the spectral radius of a
// non-negative matrix.
double row_sum_bound(const Eigen::MatrixXd& M);

// Certified upper bound on the spectral radius of a non-negative matrix,
// starting from row_sum_bound and tightened with max(M^k 1)^(1/k) (valid for
// every k, exact in the limit). Stops as soon as c * bound < 1 is certified;
// returns the best bound found either way.
double refined_radius_bound(const Eigen::MatrixXd& M, double c, int max_matvecs = 64);

// Throws ConvergenceError when even the refined bound cannot certify
// c * rho(M) < 1. The decay never changes; an evaluation that cannot be
// certified fails loudly.
void require_convergent(const Eigen::MatrixXd& M, double c);

// c = safety / max(1, row_sum_bound(reference)); the all-zero reference
// degenerates to c = safety.
double choose_decay(const Eigen::MatrixXd& reference_walk_matrix, double safety);
double choose_decay(const TeamSubgraph& gt, const SkillRelevance& W, double safety);

// Random-walk kernel with uniform start/stop vectors, computed with a single
// linear solve (never an explicit inverse on this path).
double kernel(const TeamSubgraph& g1, const TeamSubgraph& g2, const SkillRelevance& W,
              const KernelParams& params);

// Team-similarity score: g1 is zero-padded to g0's size and the full inverse
// sum is divided by |g0|^4. Requires |g0| >= |g1|.
double approx_kernel(const TeamSubgraph& g0, const TeamSubgraph& g1, const SkillRelevance& W,
                     const KernelParams& params);

// Same sum without padding or size constraint, on the literal |g0|*|g1|
// product. Needed when the candidate side outgrows the reference team (the
// curvature certificate evaluates the full candidate pool at once).
double approx_kernel_literal(const TeamSubgraph& g0, const TeamSubgraph& g1,
                             const SkillRelevance& W, const KernelParams& params);

// Replacement gain g(S') = score(R + S' vs T) - score(R vs T). Normalized so
// g of the empty set is exactly zero; non-decreasing and supermodular in S'.
double score_g(const std::vector<int>& candidate_set, const ReplacementProblem& prob,
               const SocialNetwork& net, const SkillRelevance& W, const KernelParams& params);

} // namespace subrep
