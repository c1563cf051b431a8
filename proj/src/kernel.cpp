#include "subrep/kernel.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace subrep {

namespace {

// Sum of all entries of (I - cM)^{-1}, computed from one linear solve against
// the ones vector. A residual check catches near-singular systems that the LU
// factorization itself would let through silently.
double inverse_sum_via_solve(const Eigen::MatrixXd& M, double c) {
    const auto n = M.rows();
    Eigen::MatrixXd sys = -c * M;
    sys.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd z = lu.solve(ones);
    if (!z.allFinite()) throw NumericalError("walk solve produced non-finite values");
    const double resid = (sys * z - ones).cwiseAbs().maxCoeff();
    if (!(resid < 1e-6 * std::max(1.0, z.cwiseAbs().maxCoeff())))
        throw NumericalError("walk solve residual too large: " + std::to_string(resid));
    return z.sum();
}

void check_params(const KernelParams& p) {
    // c = 0 degenerates to the identity system and is allowed
    if (!(p.c >= 0.0 && p.c < 1.0))
        throw std::invalid_argument("kernel decay c must lie in [0, 1); got " + std::to_string(p.c));
}

void check_dims(const TeamSubgraph& g1, const TeamSubgraph& g2, const SkillRelevance& W,
                bool allow_empty_second = false) {
    if (g1.L.cols() != g2.L.cols() || g1.L.cols() != W.size())
        throw std::invalid_argument("skill dimension mismatch between teams and W");
    if (g1.size() == 0 || (g2.size() == 0 && !allow_empty_second))
        throw std::invalid_argument("kernel needs non-empty teams");
}

} // namespace

Eigen::MatrixXd edge_attribute_slice(const Eigen::MatrixXd& L, int i, int j) {
    const Eigen::MatrixXd outer = L.col(i) * L.col(j).transpose();
    return outer.cwiseMax(outer.transpose());
}

Eigen::MatrixXd product_attribute_matrix(const TeamSubgraph& g1, const TeamSubgraph& g2,
                                         const SkillRelevance& W) {
    check_dims(g1, g2, W);
    const int l = W.size();
    const auto dim = static_cast<Eigen::Index>(g1.size()) * g2.size();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < l; ++i)
        for (int j = i; j < l; ++j) {
            if (W.W(i, j) == 0.0) continue;
            E.noalias() += W.W(i, j) * kroneckerProduct(edge_attribute_slice(g1.L, i, j),
                                                        edge_attribute_slice(g2.L, i, j));
        }
    return E;
}

Eigen::MatrixXd product_walk_matrix(const TeamSubgraph& g1, const TeamSubgraph& g2,
                                    const SkillRelevance& W) {
    const Eigen::MatrixXd Ax = kroneckerProduct(g1.A, g2.A);
    return product_attribute_matrix(g1, g2, W).cwiseProduct(Ax);
}

double row_sum_bound(const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return 0.0;
    const double max_row = M.cwiseAbs().rowwise().sum().maxCoeff();
    const double max_col = M.cwiseAbs().colwise().sum().maxCoeff();
    return std::min(max_row, max_col);
}

double refined_radius_bound(const Eigen::MatrixXd& M, double c, int max_matvecs) {
    double best = row_sum_bound(M);
    if (best == 0.0 || c * best < 1.0) return best;

    // Power refinement: for non-negative M, max(M^k 1) is the max row sum of
    // M^k, so its k-th root bounds the spectral radius; same with M^T for
    // column sums. Vectors are renormalized each step, the log of the true
    // magnitude is carried separately.
    const auto n = M.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    double v_log = 0.0, w_log = 0.0;
    for (int k = 1; k <= max_matvecs; ++k) {
        v = M * v;
        w = M.transpose() * w;
        const double vm = v.maxCoeff();
        const double wm = w.maxCoeff();
        if (vm <= 0.0 || wm <= 0.0) return 0.0; // nilpotent: the series is finite
        v_log += std::log(vm);
        v /= vm;
        w_log += std::log(wm);
        w /= wm;
        best = std::min(best, std::exp(std::min(v_log, w_log) / k));
        if (c * best < 1.0) return best;
    }
    return best;
}

void require_convergent(const Eigen::MatrixXd& M, double c) {
    const double bound = refined_radius_bound(M, c);
    if (c * bound >= 1.0) throw ConvergenceError(c, bound);
}

double choose_decay(const Eigen::MatrixXd& reference_walk_matrix, double safety) {
    if (!(safety > 0.0 && safety < 1.0))
        throw std::invalid_argument("safety must lie in (0, 1); got " + std::to_string(safety));
    return safety / std::max(1.0, row_sum_bound(reference_walk_matrix));
}

double choose_decay(const TeamSubgraph& gt, const SkillRelevance& W, double safety) {
    return choose_decay(product_walk_matrix(gt, gt, W), safety);
}

double kernel(const TeamSubgraph& g1, const TeamSubgraph& g2, const SkillRelevance& W,
              const KernelParams& params) {
    check_params(params);
    check_dims(g1, g2, W);
    const Eigen::MatrixXd M = product_walk_matrix(g1, g2, W);
    require_convergent(M, params.c);
    const double pairs = static_cast<double>(g1.size()) * g2.size();
    return inverse_sum_via_solve(M, params.c) / (pairs * pairs);
}

double approx_kernel(const TeamSubgraph& g0, const TeamSubgraph& g1, const SkillRelevance& W,
                     const KernelParams& params) {
    check_params(params);
    check_dims(g0, g1, W, /*allow_empty_second=*/true); // all-dummy side is fine
    const int t0 = g0.size();
    const int t1 = g1.size();
    if (t1 > t0)
        throw std::invalid_argument("approx_kernel: candidate side (" + std::to_string(t1) +
                                    ") larger than reference (" + std::to_string(t0) + ")");
    TeamSubgraph padded;
    padded.nodes = g1.nodes;
    padded.nodes.resize(t0, -1);
    padded.A = Eigen::MatrixXd::Zero(t0, t0);
    padded.A.topLeftCorner(t1, t1) = g1.A;
    padded.L = Eigen::MatrixXd::Zero(t0, g1.L.cols());
    padded.L.topRows(t1) = g1.L;

    const Eigen::MatrixXd M = product_walk_matrix(g0, padded, W);
    require_convergent(M, params.c);
    const double t = t0;
    return inverse_sum_via_solve(M, params.c) / (t * t * t * t);
}

double approx_kernel_literal(const TeamSubgraph& g0, const TeamSubgraph& g1,
                             const SkillRelevance& W, const KernelParams& params) {
    check_params(params);
    check_dims(g0, g1, W);
    const Eigen::MatrixXd M = product_walk_matrix(g0, g1, W);
    require_convergent(M, params.c);
    const double t = g0.size();
    return inverse_sum_via_solve(M, params.c) / (t * t * t * t);
}

double score_g(const std::vector<int>& candidate_set, const ReplacementProblem& prob,
               const SocialNetwork& net, const SkillRelevance& W, const KernelParams& params) {
    std::vector<int> added = candidate_set;
    std::sort(added.begin(), added.end());
    if (std::adjacent_find(added.begin(), added.end()) != added.end())
        throw std::invalid_argument("score_g: candidate set lists a node twice");
    for (int v : added)
        if (std::find(prob.team.begin(), prob.team.end(), v) != prob.team.end())
            throw std::invalid_argument("score_g: candidate " + std::to_string(v) +
                                        " is a team member");

    const std::vector<int> R = prob.remaining();
    std::vector<int> side = R;
    side.insert(side.end(), added.begin(), added.end());

    const TeamSubgraph GT = extract_subgraph(net, prob.team);
    const TeamSubgraph GR = extract_subgraph(net, R);
    const TeamSubgraph GS = extract_subgraph(net, side);

    // The keep term is always the padded score of R, so g({}) is exactly zero
    // and the baseline never moves. Sides larger than the team (curvature
    // evaluates the whole pool at once) continue with the unpadded sum, which
    // meets the padded route exactly at |side| = |team|; a moving baseline
    // would put a jump there and break supermodularity at the seam.
    const double keep = approx_kernel(GT, GR, W, params);
    if (GS.size() <= GT.size()) return approx_kernel(GT, GS, W, params) - keep;
    return approx_kernel_literal(GT, GS, W, params) - keep;
}

} // namespace subrep
