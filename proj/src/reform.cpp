#include "subrep/reform.hpp"

#include "subrep/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subrep {

GreedySolution greedy_rounds(const RoundOracle& oracle, int k) {
    GreedySolution sol;
    for (int round = 0; round < k; ++round) {
        const auto start = std::chrono::steady_clock::now();
        const BestPick pick = oracle(sol.picks);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        if (pick.node < 0) throw std::runtime_error("greedy round produced no pick");
        sol.picks.push_back(pick.node);
        sol.scores.push_back(pick.score);
        sol.round_seconds.push_back(took.count());
        sol.evaluations += pick.evaluated;
        sol.prune_fallback = sol.prune_fallback || pick.prune_fallback;
    }
    sol.final_score = sol.scores.empty() ? 0.0 : sol.scores.back();
    return sol;
}

GreedySolution greedy_max(const std::function<double(const std::vector<int>&)>& set_score,
                          const std::vector<int>& pool, int k) {
    if (k < 0 || static_cast<std::size_t>(k) > pool.size())
        throw std::invalid_argument("greedy_max: k exceeds the pool");
    std::vector<int> ordered = pool;
    std::sort(ordered.begin(), ordered.end());

    RoundOracle scan = [&](const std::vector<int>& picked) {
        BestPick best;
        std::vector<int> trial = picked;
        trial.push_back(-1);
        for (int v : ordered) {
            if (std::find(picked.begin(), picked.end(), v) != picked.end()) continue;
            trial.back() = v;
            const double val = set_score(trial);
            ++best.evaluated;
            if (best.node < 0 || val > best.score) { // ascending scan: ties keep smallest
                best.node = v;
                best.score = val;
            }
        }
        return best;
    };
    return greedy_rounds(scan, k);
}

GreedySolution reform(const SocialNetwork& net, const ReplacementProblem& prob,
                      const SkillRelevance& W, const KernelParams& params, int threads) {
    const ValidationReport rep = validate_problem(net, prob);
    if (!rep.ok) throw std::invalid_argument("reform: invalid problem: " + rep.violations.front());

    const std::vector<int> R0 = prob.remaining();
    const TeamSubgraph GT = extract_subgraph(net, prob.team);
    const TeamSubgraph GR = extract_subgraph(net, R0);
    const double base = approx_kernel(GT, GR, W, params);

    RoundOracle next_best = [&](const std::vector<int>& picked) {
        std::vector<int> R = R0;
        R.insert(R.end(), picked.begin(), picked.end());
        return fast_kernel_best(net, prob.team, R, W, params, threads);
    };
    GreedySolution sol = greedy_rounds(next_best, static_cast<int>(prob.leaving.size()));

    // oracle scores are team-vs-team similarities; report gains over R alone
    for (double& s : sol.scores) s -= base;
    // final score through the direct route, the one every baseline reports,
    // so cross-algorithm comparisons never mix blockwise and dense roundoff
    sol.final_score = score_g(sol.picks, prob, net, W, params);
    return sol;
}

CurvatureCertificate supermodular_curvature(const SocialNetwork& net,
                                            const ReplacementProblem& prob,
                                            const SkillRelevance& W, const KernelParams& params,
                                            int pool_cap, const std::vector<int>* pool) {
    CurvatureCertificate cert;
    cert.pool = pool ? *pool : prob.candidate_pool(net);
    std::sort(cert.pool.begin(), cert.pool.end());
    if (static_cast<int>(cert.pool.size()) > pool_cap)
        throw std::invalid_argument("supermodular_curvature: pool of " +
                                    std::to_string(cert.pool.size()) + " exceeds cap " +
                                    std::to_string(pool_cap) +
                                    "; subsample the pool and pass it explicitly");
    if (cert.pool.empty())
        throw std::invalid_argument("supermodular_curvature: empty candidate pool");

    cert.g_full = score_g(cert.pool, prob, net, W, params);

    double min_ratio = 1.0;
    bool any_ratio = false;
    for (int v : cert.pool) {
        cert.g_single[v] = score_g({v}, prob, net, W, params);
        std::vector<int> rest;
        rest.reserve(cert.pool.size() - 1);
        for (int u : cert.pool)
            if (u != v) rest.push_back(u);
        cert.g_drop[v] = rest.empty() ? 0.0 : score_g(rest, prob, net, W, params);

        const double denom = cert.g_full - cert.g_drop[v];
        const double num = cert.g_single[v];
        if (denom == 0.0) {
            if (num != 0.0) cert.valid_for_bound = false;
            continue; // 0/0: the element cannot tighten the minimum
        }
        const double ratio = num / denom;
        if (!any_ratio || ratio < min_ratio) {
            min_ratio = ratio;
            cert.argmin_node = v;
            any_ratio = true;
        }
    }
    cert.kappa = std::clamp(1.0 - min_ratio, 0.0, 1.0);
    return cert;
}

SupermodularityCheck check_supermodularity(const SocialNetwork& net,
                                           const ReplacementProblem& prob,
                                           const SkillRelevance& W, const KernelParams& params,
                                           int trials, std::uint64_t seed) {
    const std::vector<int> pool = prob.candidate_pool(net);
    const int s = static_cast<int>(prob.leaving.size());
    if (pool.size() < 2 || s < 2)
        throw std::invalid_argument("check_supermodularity: needs |S| >= 2 and two candidates");
    // sampled sets reach size s + 2 (S' up to s, plus x and y), so some
    // outgrow the team and cover the unpadded seam the curvature bound uses
    const int room = s;

    SupermodularityCheck out;
    out.trials = trials;
    out.min_slack = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    std::vector<int> deck = pool;
    for (int trial = 0; trial < trials; ++trial) {
        const int extra = static_cast<int>(
            rng.uniform_index(std::min<std::uint64_t>(room, pool.size() - 2) + 1));
        // partial Fisher-Yates: S' = deck[0..extra), then x, y
        for (int i = 0; i < extra + 2; ++i) {
            const auto j = i + rng.uniform_index(deck.size() - i);
            std::swap(deck[i], deck[j]);
        }
        std::vector<int> s_prime(deck.begin(), deck.begin() + extra);
        const int x = deck[extra];
        const int y = deck[extra + 1];

        auto with = [&](std::initializer_list<int> add) {
            std::vector<int> set = s_prime;
            set.insert(set.end(), add.begin(), add.end());
            return score_g(set, prob, net, W, params);
        };
        const double slack =
            (with({x, y}) - with({x})) - (with({y}) - with({}));
        out.min_slack = std::min(out.min_slack, slack);
        if (slack < -1e-12) ++out.violations;
    }
    return out;
}

} // namespace subrep
