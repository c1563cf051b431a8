#include "subrep/social_network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace subrep {

SocialNetwork::SocialNetwork(std::vector<std::string> ids, std::vector<AdjRow> rows,
                             Eigen::MatrixXd skills)
    : ids_(std::move(ids)), adj_(std::move(rows)), skills_(std::move(skills)) {
    if (ids_.size() != adj_.size() || static_cast<int>(ids_.size()) != skills_.rows())
        throw std::invalid_argument("SocialNetwork: ids, adjacency and skills disagree on n");
    for (auto& row : adj_)
        std::sort(row.begin(), row.end());
    rebuild_index();
}

SocialNetwork SocialNetwork::from_dense(const Eigen::MatrixXd& A,
                                        const Eigen::MatrixXd& skills,
                                        std::vector<std::string> ids) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw std::invalid_argument("from_dense: A must be square");
    if (skills.rows() != n) throw std::invalid_argument("from_dense: skills row count != n");
    if (ids.empty()) {
        ids.reserve(n);
        for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    }
    std::vector<AdjRow> rows(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (A(i, j) != 0.0) rows[i].emplace_back(j, A(i, j));
    return SocialNetwork(std::move(ids), std::move(rows), skills);
}

SocialNetwork SocialNetwork::from_edges(std::vector<std::string> ids,
                                        const std::vector<std::tuple<int, int, double>>& edges,
                                        Eigen::MatrixXd skills) {
    const int n = static_cast<int>(ids.size());
    std::map<std::pair<int, int>, double> acc;
    for (const auto& [u, v, w] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("from_edges: node index out of range");
        auto key = std::minmax(u, v);
        acc[{key.first, key.second}] += w;
    }
    std::vector<AdjRow> rows(n);
    for (const auto& [key, w] : acc) {
        rows[key.first].emplace_back(key.second, w);
        if (key.second != key.first) rows[key.second].emplace_back(key.first, w);
    }
    return SocialNetwork(std::move(ids), std::move(rows), std::move(skills));
}

std::optional<int> SocialNetwork::index_of(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
}

double SocialNetwork::edge_weight(int u, int v) const {
    const auto& row = adj_[u];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(v, 0.0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != row.end() && it->first == v) return it->second;
    return 0.0;
}

long SocialNetwork::edge_count() const {
    long twice = 0;
    for (const auto& row : adj_) twice += static_cast<long>(row.size());
    return twice / 2;
}

void SocialNetwork::rebuild_index() {
    id_index_.clear();
    for (int i = 0; i < node_count(); ++i) {
        auto [it, fresh] = id_index_.emplace(ids_[i], i);
        (void)it;
        if (!fresh) throw std::invalid_argument("SocialNetwork: duplicate node id " + ids_[i]);
    }
}

ValidationReport validate_network(const SocialNetwork& net) {
    ValidationReport rep;
    const int n = net.node_count();
    for (int u = 0; u < n; ++u) {
        for (const auto& [v, w] : net.neighbors(u)) {
            if (!std::isfinite(w))
                rep.fail("edge (" + std::to_string(u) + "," + std::to_string(v) + ") weight not finite");
            else if (w < 0.0)
                rep.fail("edge (" + std::to_string(u) + "," + std::to_string(v) + ") weight negative");
            if (u == v && w != 0.0)
                rep.fail("node " + std::to_string(u) + " has a self-loop");
            if (net.edge_weight(v, u) != w)
                rep.fail("adjacency asymmetric at (" + std::to_string(u) + "," + std::to_string(v) + ")");
        }
    }
    const auto& L = net.skills();
    for (int i = 0; i < L.rows(); ++i)
        for (int k = 0; k < L.cols(); ++k) {
            if (!std::isfinite(L(i, k)))
                rep.fail("skill (" + std::to_string(i) + "," + std::to_string(k) + ") not finite");
            else if (L(i, k) < 0.0)
                rep.fail("skill (" + std::to_string(i) + "," + std::to_string(k) + ") negative");
        }
    return rep;
}

TeamSubgraph extract_subgraph(const SocialNetwork& net, const std::vector<int>& nodes) {
    const int t = static_cast<int>(nodes.size());
    TeamSubgraph g;
    g.nodes = nodes;
    g.A = Eigen::MatrixXd::Zero(t, t);
    g.L = Eigen::MatrixXd::Zero(t, net.skill_count());
    for (int a = 0; a < t; ++a) {
        if (nodes[a] < 0 || nodes[a] >= net.node_count())
            throw std::invalid_argument("extract_subgraph: node index out of range");
        g.L.row(a) = net.skills().row(nodes[a]);
        for (int b = 0; b < t; ++b)
            g.A(a, b) = net.edge_weight(nodes[a], nodes[b]);
    }
    return g;
}

ValidationReport validate_relevance(const Eigen::MatrixXd& W) {
    ValidationReport rep;
    if (W.rows() != W.cols()) {
        rep.fail("W is not square");
        return rep;
    }
    for (int i = 0; i < W.rows(); ++i)
        for (int j = 0; j < W.cols(); ++j) {
            if (!std::isfinite(W(i, j)))
                rep.fail("W(" + std::to_string(i) + "," + std::to_string(j) + ") not finite");
            else if (W(i, j) < 0.0)
                rep.fail("W(" + std::to_string(i) + "," + std::to_string(j) + ") negative");
            if (j < i && W(i, j) != 0.0)
                rep.fail("W(" + std::to_string(i) + "," + std::to_string(j) + ") below the diagonal");
        }
    return rep;
}

std::vector<int> ReplacementProblem::remaining() const {
    std::vector<int> r;
    r.reserve(team.size());
    for (int v : team)
        if (std::find(leaving.begin(), leaving.end(), v) == leaving.end()) r.push_back(v);
    return r;
}

std::vector<int> ReplacementProblem::candidate_pool(const SocialNetwork& net) const {
    std::vector<char> in_team(net.node_count(), 0);
    for (int v : team)
        if (v >= 0 && v < net.node_count()) in_team[v] = 1;
    std::vector<int> pool;
    pool.reserve(net.node_count() - team.size());
    for (int v = 0; v < net.node_count(); ++v)
        if (!in_team[v]) pool.push_back(v);
    return pool;
}

ValidationReport validate_problem(const SocialNetwork& net, const ReplacementProblem& prob) {
    ValidationReport rep;
    const int n = net.node_count();
    auto check_members = [&](const std::vector<int>& vs, const char* name) {
        std::vector<int> seen;
        for (int v : vs) {
            if (v < 0 || v >= n) {
                rep.fail(std::string(name) + " member " + std::to_string(v) + " not in the network");
                continue;
            }
            if (std::find(seen.begin(), seen.end(), v) != seen.end())
                rep.fail(std::string(name) + " lists node " + std::to_string(v) + " twice");
            seen.push_back(v);
        }
    };
    check_members(prob.team, "team");
    check_members(prob.leaving, "subteam");

    for (int v : prob.leaving)
        if (std::find(prob.team.begin(), prob.team.end(), v) == prob.team.end())
            rep.fail("subteam member " + std::to_string(v) + " is not on the team");

    if (prob.leaving.empty()) rep.fail("subteam is empty");
    if (prob.leaving.size() >= prob.team.size() && !prob.team.empty())
        rep.fail("subteam must be a proper subset of the team");
    const long outside = n - static_cast<long>(prob.team.size());
    if (outside < static_cast<long>(prob.leaving.size()))
        rep.fail("not enough candidates: |V \\ T| = " + std::to_string(outside) +
                 " < |S| = " + std::to_string(prob.leaving.size()));
    return rep;
}

} // namespace subrep
