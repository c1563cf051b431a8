#include "subrep/baselines.hpp"

#include "subrep/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace subrep {

namespace {

void require_valid(const SocialNetwork& net, const ReplacementProblem& prob, const char* who) {
    const ValidationReport rep = validate_problem(net, prob);
    if (!rep.ok)
        throw std::invalid_argument(std::string(who) + ": invalid problem: " + rep.violations.front());
}

// C(n, k) with a cap: anything beyond `limit` is reported as limit + 1
long choose_capped(long n, long k, long limit) {
    if (k < 0 || k > n) return 0;
    unsigned __int128 c = 1;
    for (long i = 1; i <= k; ++i) {
        c = c * static_cast<unsigned long>(n - k + i) / static_cast<unsigned long>(i);
        if (c > static_cast<unsigned __int128>(limit)) return limit + 1;
    }
    return static_cast<long>(c);
}

} // namespace

BaselineResult brute_force(const SocialNetwork& net, const ReplacementProblem& prob,
                           const SkillRelevance& W, const KernelParams& params, long budget) {
    require_valid(net, prob, "brute_force");
    const std::vector<int> pool = prob.candidate_pool(net); // ascending
    const int s = static_cast<int>(prob.leaving.size());
    const int n = static_cast<int>(pool.size());

    const long needed = choose_capped(n, s, budget);
    if (needed > budget)
        throw std::invalid_argument("brute_force: C(" + std::to_string(n) + "," +
                                    std::to_string(s) + ") exceeds budget " +
                                    std::to_string(budget));

    const std::vector<int> R = prob.remaining();
    const TeamSubgraph GT = extract_subgraph(net, prob.team);
    const double base = approx_kernel(GT, extract_subgraph(net, R), W, params);

    BaselineResult out;
    std::vector<int> comb(s); // positions into pool, lexicographic
    for (int i = 0; i < s; ++i) comb[i] = i;
    std::vector<int> side(R.size() + s);
    std::copy(R.begin(), R.end(), side.begin());

    bool more = true;
    double best = 0.0;
    bool have_best = false;
    while (more) {
        for (int i = 0; i < s; ++i) side[R.size() + i] = pool[comb[i]];
        const double val = approx_kernel(GT, extract_subgraph(net, side), W, params);
        ++out.evaluations;
        if (!have_best || val > best) {
            best = val;
            have_best = true;
            out.picks.assign(side.begin() + static_cast<long>(R.size()), side.end());
        }
        // advance the combination
        more = false;
        for (int i = s - 1; i >= 0; --i) {
            if (comb[i] < n - s + i) {
                ++comb[i];
                for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    out.final_score = best - base;
    return out;
}

BaselineResult iterative_replace(const SocialNetwork& net, const ReplacementProblem& prob,
                                 const SkillRelevance& W, const KernelParams& params,
                                 std::uint64_t seed, int threads) {
    require_valid(net, prob, "iterative_replace");
    Rng rng(seed);
    std::vector<int> current = prob.team;
    std::vector<int> unreplaced = prob.leaving;

    BaselineResult out;
    while (!unreplaced.empty()) {
        const auto pick_at = rng.uniform_index(unreplaced.size());
        const int p = unreplaced[pick_at];

        std::vector<int> R;
        R.reserve(current.size() - 1);
        for (int v : current)
            if (v != p) R.push_back(v);

        const BestPick pick = fast_kernel_best(net, prob.team, R, W, params, threads);
        out.evaluations += pick.evaluated;
        out.replacements.emplace_back(p, pick.node);
        out.picks.push_back(pick.node);
        *std::find(current.begin(), current.end(), p) = pick.node;
        unreplaced.erase(unreplaced.begin() + static_cast<long>(pick_at));
    }
    out.final_score = score_g(out.picks, prob, net, W, params);
    return out;
}

BaselineResult local_best(const SocialNetwork& net, const ReplacementProblem& prob,
                          const SkillRelevance& W, const KernelParams& params, int threads) {
    require_valid(net, prob, "local_best");
    std::vector<int> current = prob.team;
    std::vector<int> unreplaced = prob.leaving;
    std::sort(unreplaced.begin(), unreplaced.end());

    BaselineResult out;
    while (!unreplaced.empty()) {
        int best_p = -1;
        BestPick best;
        for (int p : unreplaced) { // ascending: ties keep the smallest leaver
            std::vector<int> R;
            R.reserve(current.size() - 1);
            for (int v : current)
                if (v != p) R.push_back(v);
            const BestPick pick = fast_kernel_best(net, prob.team, R, W, params, threads);
            out.evaluations += pick.evaluated;
            if (best_p < 0 || pick.score > best.score) {
                best_p = p;
                best = pick;
            }
        }
        out.replacements.emplace_back(best_p, best.node);
        out.picks.push_back(best.node);
        *std::find(current.begin(), current.end(), best_p) = best.node;
        unreplaced.erase(std::find(unreplaced.begin(), unreplaced.end(), best_p));
    }
    out.final_score = score_g(out.picks, prob, net, W, params);
    return out;
}

} // namespace subrep
