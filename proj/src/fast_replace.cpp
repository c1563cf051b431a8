#include "subrep/fast_replace.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace subrep {

namespace {

// Static block partition; each index is handled by exactly one thread, so
// results are identical for every thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> crew;
    crew.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        crew.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : crew) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace

PruneResult prune_candidates(const SocialNetwork& net, const std::vector<int>& R,
                             const std::vector<int>& pool) {
    std::vector<char> in_pool(net.node_count(), 0);
    for (int q : pool) in_pool[q] = 1;
    std::vector<char> touches(net.node_count(), 0);
    for (int r : R)
        for (const auto& [nbr, w] : net.neighbors(r))
            if (w > 0.0 && in_pool[nbr]) touches[nbr] = 1;

    PruneResult res;
    for (int q : pool)
        if (touches[q]) res.kept.push_back(q);
    if (res.kept.empty()) {
        res.kept = pool;
        res.fallback = true;
    }
    return res;
}

KernelContext build_context(const SocialNetwork& net, const std::vector<int>& team,
                            const std::vector<int>& R, const SkillRelevance& W,
                            const KernelParams& params) {
    if (R.empty()) throw std::invalid_argument("build_context: R is empty");
    if (R.size() >= team.size())
        throw std::invalid_argument("build_context: candidate team would outgrow the reference");
    if (!(params.c > 0.0 && params.c < 1.0))
        throw std::invalid_argument("build_context: decay c must lie in (0, 1)");

    KernelContext ctx;
    ctx.team_graph = extract_subgraph(net, team);
    ctx.t = ctx.team_graph.size();
    ctx.r = static_cast<int>(R.size());
    ctx.m = ctx.r + 1;
    ctx.c = params.c;
    ctx.R_nodes = R;

    const int l = W.size();
    if (net.skill_count() != l)
        throw std::invalid_argument("build_context: W size does not match the skill count");

    ctx.L_R = Eigen::MatrixXd::Zero(ctx.m, l);
    for (int k = 0; k < ctx.r; ++k) ctx.L_R.row(k) = net.skills().row(R[k]);
    ctx.A_R = Eigen::MatrixXd::Zero(ctx.m, ctx.m);
    for (int a = 0; a < ctx.r; ++a)
        for (int b = 0; b < ctx.r; ++b) ctx.A_R(a, b) = net.edge_weight(R[a], R[b]);

    for (int i = 0; i < l; ++i)
        for (int j = i; j < l; ++j) {
            if (W.W(i, j) == 0.0) continue;
            ctx.pairs.emplace_back(i, j);
            ctx.Z.push_back(W.W(i, j) * edge_attribute_slice(ctx.team_graph.L, i, j)
                                            .cwiseProduct(ctx.team_graph.A));
            ctx.Y.push_back(edge_attribute_slice(ctx.L_R, i, j).cwiseProduct(ctx.A_R));
            ctx.Z_row.push_back(ctx.Z.back().rowwise().sum());
            ctx.Y_row.push_back(ctx.Y.back().rowwise().sum());
        }

    // Convergence of the candidate-independent block: cheap structured row
    // sums first (they factor per slice), power refinement on the assembled
    // matrix if those cannot certify. The decay itself never changes.
    const auto dim = static_cast<Eigen::Index>(ctx.r) * ctx.t;
    Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t p = 0; p < ctx.pairs.size(); ++p)
        walk.noalias() += kroneckerProduct(ctx.Y[p].topLeftCorner(ctx.r, ctx.r), ctx.Z[p]);

    double bound = 0.0;
    for (int u = 0; u < ctx.r; ++u)
        for (int v = 0; v < ctx.t; ++v) {
            double rs = 0.0;
            for (std::size_t p = 0; p < ctx.pairs.size(); ++p)
                rs += ctx.Y_row[p](u) * ctx.Z_row[p](v);
            bound = std::max(bound, rs);
        }
    if (ctx.c * bound >= 1.0) require_convergent(walk, ctx.c);

    ctx.K = -ctx.c * walk;
    ctx.K.diagonal().array() += 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ctx.K);
    ctx.K_inv = lu.inverse();
    const double defect =
        ((ctx.K * ctx.K_inv) - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (!std::isfinite(defect) || defect > 1e-8) {
        const double cond = ctx.K.cwiseAbs().colwise().sum().maxCoeff() *
                            ctx.K_inv.cwiseAbs().colwise().sum().maxCoeff();
        throw NumericalError("build_context: K inversion failed (defect " +
                             std::to_string(defect) + ", cond ~" + std::to_string(cond) + ")");
    }
    ctx.K_inv_sum = ctx.K_inv.sum();
    ctx.K_inv_ones = ctx.K_inv.rowwise().sum();
    return ctx;
}

namespace {

// Direct route for candidates whose Schur block is too ill-conditioned to
// trust: assemble the full block matrix and solve once against ones.
double dense_rescue(const KernelContext& ctx, const Eigen::MatrixXd& F) {
    const Eigen::Index rt = ctx.K.rows();
    const Eigen::Index dim = rt + ctx.t;
    Eigen::MatrixXd M(dim, dim);
    M.topLeftCorner(rt, rt) = ctx.K;
    M.topRightCorner(rt, ctx.t) = F;
    M.bottomLeftCorner(ctx.t, rt) = F.transpose();
    M.bottomRightCorner(ctx.t, ctx.t) = Eigen::MatrixXd::Identity(ctx.t, ctx.t);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);
    Eigen::VectorXd z = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(ones);
    const double resid = (M * z - ones).cwiseAbs().maxCoeff();
    if (!z.allFinite() || !(resid < 1e-6 * std::max(1.0, z.cwiseAbs().maxCoeff())))
        throw NumericalError("evaluate_candidate: dense rescue failed");
    return z.sum();
}

} // namespace

double evaluate_candidate(const KernelContext& ctx, const SocialNetwork& net, int q) {
    if (q < 0 || q >= net.node_count())
        throw std::invalid_argument("evaluate_candidate: node out of range");
    if (net.edge_weight(q, q) != 0.0)
        throw std::invalid_argument("evaluate_candidate: candidate has a self-loop");

    const auto& Lq = net.skills().row(q);
    Eigen::VectorXd aq(ctx.r);
    for (int k = 0; k < ctx.r; ++k) aq(k) = net.edge_weight(ctx.R_nodes[k], q);

    const std::size_t np = ctx.pairs.size();
    std::vector<Eigen::VectorXd> beta(np);
    for (std::size_t p = 0; p < np; ++p) {
        const auto [i, j] = ctx.pairs[p];
        beta[p].resize(ctx.r);
        for (int k = 0; k < ctx.r; ++k)
            beta[p](k) =
                std::max(ctx.L_R(k, i) * Lq(j), ctx.L_R(k, j) * Lq(i)) * aq(k);
    }

    // Convergence check for this candidate's product matrix: cheap structured
    // row sums first, dense power refinement only for the rare hot candidate
    // the coarse bound cannot certify. c stays frozen either way.
    Eigen::MatrixXd row_sums = Eigen::MatrixXd::Zero(ctx.m, ctx.t);
    for (std::size_t p = 0; p < np; ++p) {
        Eigen::VectorXd rs(ctx.m);
        rs.head(ctx.r) = ctx.Y_row[p].head(ctx.r) + beta[p];
        rs(ctx.m - 1) = beta[p].sum();
        row_sums.noalias() += rs * ctx.Z_row[p].transpose();
    }
    const double bound = row_sums.maxCoeff();
    if (ctx.c * bound >= 1.0) {
        const auto full = static_cast<Eigen::Index>(ctx.m) * ctx.t;
        Eigen::MatrixXd Mq = Eigen::MatrixXd::Zero(full, full);
        for (std::size_t p = 0; p < np; ++p) {
            Eigen::MatrixXd Yq = ctx.Y[p];
            Yq.row(ctx.m - 1).head(ctx.r) = beta[p].transpose();
            Yq.col(ctx.m - 1).head(ctx.r) = beta[p];
            Mq.noalias() += kroneckerProduct(Yq, ctx.Z[p]);
        }
        require_convergent(Mq, ctx.c);
    }

    const Eigen::Index rt = ctx.K.rows();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(rt, ctx.t);
    for (int k = 0; k < ctx.r; ++k) {
        auto block = F.middleRows(static_cast<Eigen::Index>(k) * ctx.t, ctx.t);
        for (std::size_t p = 0; p < np; ++p)
            if (beta[p](k) != 0.0) block.noalias() -= ctx.c * beta[p](k) * ctx.Z[p];
    }

    double total;
    const Eigen::MatrixXd G = ctx.K_inv * F;                  // K^{-1} F
    const Eigen::VectorXd a = F.transpose() * ctx.K_inv_ones; // F^T K^{-1} ones
    Eigen::MatrixXd schur = -F.transpose() * G;               // I - F^T K^{-1} F
    schur.diagonal().array() += 1.0;

    Eigen::MatrixXd rhs(ctx.t, 2);
    rhs.col(0) = a;
    rhs.col(1) = Eigen::VectorXd::Ones(ctx.t);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(schur);
    const Eigen::MatrixXd sol = lu.solve(rhs);
    const double resid = (schur * sol - rhs).cwiseAbs().maxCoeff();
    if (sol.allFinite() && resid < 1e-8 * std::max(1.0, sol.cwiseAbs().maxCoeff())) {
        const Eigen::VectorXd Sa = sol.col(0);
        const Eigen::VectorXd Sones = sol.col(1);
        // Sums of the four blocks of the inverse, contracted against ones:
        // [K^{-1} + K^{-1}F S F^T K^{-1}   -K^{-1}F S ]
        // [ -S F^T K^{-1}                    S        ]
        total = ctx.K_inv_sum + a.dot(Sa) - 2.0 * a.dot(Sones) + Sones.sum();
    } else {
        total = dense_rescue(ctx, F);
    }

    const double t = ctx.t;
    const double score = (total + static_cast<double>(ctx.t - ctx.m) * t) / (t * t * t * t);
    if (!std::isfinite(score)) throw NumericalError("evaluate_candidate: non-finite score");
    return score;
}

BestPick fast_kernel_best(const SocialNetwork& net, const std::vector<int>& team,
                          const std::vector<int>& R, const SkillRelevance& W,
                          const KernelParams& params, int threads) {
    std::vector<char> excluded(net.node_count(), 0);
    for (int v : team) excluded[v] = 1;
    for (int v : R) excluded[v] = 1;
    std::vector<int> pool;
    for (int v = 0; v < net.node_count(); ++v)
        if (!excluded[v]) pool.push_back(v);
    if (pool.empty())
        throw std::invalid_argument("fast_kernel_best: no candidates outside team and R");

    const PruneResult pruned = prune_candidates(net, R, pool);
    const KernelContext ctx = build_context(net, team, R, W, params);

    std::vector<double> scores(pruned.kept.size());
    parallel_for(pruned.kept.size(), threads,
                 [&](std::size_t i) { scores[i] = evaluate_candidate(ctx, net, pruned.kept[i]); });

    BestPick best;
    best.prune_fallback = pruned.fallback;
    best.evaluated = static_cast<long>(pruned.kept.size());
    for (std::size_t i = 0; i < pruned.kept.size(); ++i) {
        // kept is ascending, so strict improvement gives smallest-index ties
        if (best.node < 0 || scores[i] > best.score) {
            best.node = pruned.kept[i];
            best.score = scores[i];
        }
    }
    return best;
}

} // namespace subrep
