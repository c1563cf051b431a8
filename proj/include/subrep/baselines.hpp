#pragma once

#include "subrep/fast_replace.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace subrep {

struct BaselineResult {
    std::vector<int> picks;  // chosen replacements
    double final_score = 0.0; // g of the chosen set
    long evaluations = 0;     // candidate-team kernel evaluations performed
    // (leaver, replacement) per round; empty for brute force, which swaps a
    // set rather than individuals
    std::vector<std::pair<int, int>> replacements;
};

// Exact argmax of g over every size-|S| subset of V \ T, scored with the
// padded team similarity. Subsets are enumerated lexicographically and only
// strict improvements are kept, so ties go to the smallest index tuple.
// Refuses to start when C(|pool|, |S|) exceeds the budget.
BaselineResult brute_force(const SocialNetwork& net, const ReplacementProblem& prob,
                           const SkillRelevance& W, const KernelParams& params,
                           long budget = 2000000);

// Replaces a uniformly random not-yet-replaced leaver each round with the best
// single candidate; the still-present leavers stay in the candidate team.
BaselineResult iterative_replace(const SocialNetwork& net, const ReplacementProblem& prob,
                                 const SkillRelevance& W, const KernelParams& params,
                                 std::uint64_t seed, int threads = 1);

// Each round tries every not-yet-replaced leaver, finds each one's best
// candidate, and commits the (leaver, candidate) pair with the highest score;
// ties go to the smallest leaver index, then candidate index.
BaselineResult local_best(const SocialNetwork& net, const ReplacementProblem& prob,
                          const SkillRelevance& W, const KernelParams& params, int threads = 1);

} // namespace subrep
