#pragma once

#include "subrep/fast_replace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace subrep {

struct GreedySolution {
    std::vector<int> picks;
    std::vector<double> scores; // oracle score after each pick
    double final_score = 0.0;
    std::vector<double> round_seconds;
    long evaluations = 0;
    bool prune_fallback = false;
};

// One greedy engine for everything: an argmax oracle gets the picks so far and
// returns the next node with its score. The engine keeps no other state.
using RoundOracle = std::function<BestPick(const std::vector<int>& picked)>;

GreedySolution greedy_rounds(const RoundOracle& oracle, int k);

// Plain-set-function form: each round scans pool minus picks and takes the
// best set_score(picked + {v}), ties to the smallest node index.
GreedySolution greedy_max(const std::function<double(const std::vector<int>&)>& set_score,
                          const std::vector<int>& pool, int k);

// Greedy subteam replacement: |S| rounds of fast_kernel_best with the picked
// nodes folded into R. Scores are reported as gains g over keeping the
// shrunken team, so they start at >= 0 and never decrease.
GreedySolution reform(const SocialNetwork& net, const ReplacementProblem& prob,
                      const SkillRelevance& W, const KernelParams& params, int threads = 1);

// Data-dependent a-priori quality bound. kappa close to 0 certifies the greedy
// result is near optimal; kappa close to 1 certifies nothing.
struct CurvatureCertificate {
    double kappa = 0.0;
    int argmin_node = -1;
    std::vector<int> pool;          // the candidate set the bound refers to
    std::map<int, double> g_single; // g({v})
    std::map<int, double> g_drop;   // g(C \ {v})
    double g_full = 0.0;            // g(C)
    // true unless some v had g(C) - g(C\{v}) = 0 with g({v}) > 0
    bool valid_for_bound = true;

    double bound(double best_score) const { return (1.0 - kappa) * best_score; }
};

// kappa = 1 - min_v g({v}) / (g(C) - g(C \ {v})). Zero-over-zero ratios are
// skipped (they cannot tighten the min); a zero denominator under a positive
// numerator marks the certificate invalid. Pools larger than pool_cap are
// rejected (g(C) solves a |T| * (|R|+|C|) system); pass `pool` to bound a
// subsampled candidate set instead.
CurvatureCertificate supermodular_curvature(const SocialNetwork& net,
                                            const ReplacementProblem& prob,
                                            const SkillRelevance& W, const KernelParams& params,
                                            int pool_cap,
                                            const std::vector<int>* pool = nullptr);

struct SupermodularityCheck {
    int trials = 0;
    int violations = 0; // slack below -1e-12
    double min_slack = 0.0;
};

// Samples (S', x, y) and checks the increasing-differences inequality
// g(S'+{x,y}) - g(S'+{x}) >= g(S'+{y}) - g(S').
SupermodularityCheck check_supermodularity(const SocialNetwork& net,
                                           const ReplacementProblem& prob,
                                           const SkillRelevance& W, const KernelParams& params,
                                           int trials, std::uint64_t seed);

} // namespace subrep
