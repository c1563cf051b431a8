#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace subrep {

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string msg) {
        ok = false;
        violations.push_back(std::move(msg));
    }
};

// Weighted undirected social network with one skill vector per node.
// Node ids are opaque strings; all algorithms work on dense 0-based indices.
// Adjacency rows are stored exactly as given (validation, not construction,
// decides whether the graph is well formed).
class SocialNetwork {
public:
    using AdjRow = std::vector<std::pair<int, double>>; // (neighbor, weight), sorted

    SocialNetwork() = default;
    SocialNetwork(std::vector<std::string> ids, std::vector<AdjRow> rows,
                  Eigen::MatrixXd skills);

    static SocialNetwork from_dense(const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& skills,
                                    std::vector<std::string> ids = {});

    // Builds from an undirected edge list; duplicate pairs (either orientation)
    // are summed. Used by the generators, the ingester and the TSV loader.
    static SocialNetwork from_edges(std::vector<std::string> ids,
                                    const std::vector<std::tuple<int, int, double>>& edges,
                                    Eigen::MatrixXd skills);

    int node_count() const { return static_cast<int>(adj_.size()); }
    int skill_count() const { return static_cast<int>(skills_.cols()); }

    const std::string& node_id(int v) const { return ids_[v]; }
    std::optional<int> index_of(const std::string& id) const;

    double edge_weight(int u, int v) const;
    const AdjRow& neighbors(int v) const { return adj_[v]; }
    long edge_count() const; // undirected edges

    const Eigen::MatrixXd& skills() const { return skills_; }

private:
    std::vector<std::string> ids_;
    std::vector<AdjRow> adj_;
    Eigen::MatrixXd skills_; // n x l
    std::unordered_map<std::string, int> id_index_;

    void rebuild_index();
};

// Checks symmetry, zero diagonal, non-negative finite weights and skills.
// Reports every violation with the indices involved instead of throwing.
ValidationReport validate_network(const SocialNetwork& net);

// Dense view of a node subset; `nodes` fixes the row/column order.
struct TeamSubgraph {
    std::vector<int> nodes;
    Eigen::MatrixXd A; // t x t
    Eigen::MatrixXd L; // t x l
    int size() const { return static_cast<int>(nodes.size()); }
};

TeamSubgraph extract_subgraph(const SocialNetwork& net, const std::vector<int>& nodes);

// Upper-triangular skill-pair relevance matrix (diagonal allowed).
struct SkillRelevance {
    Eigen::MatrixXd W;

    static SkillRelevance ones(int l) {
        SkillRelevance r;
        r.W = Eigen::MatrixXd::Zero(l, l);
        for (int i = 0; i < l; ++i)
            for (int j = i; j < l; ++j) r.W(i, j) = 1.0;
        return r;
    }
    int size() const { return static_cast<int>(W.rows()); }
};

ValidationReport validate_relevance(const Eigen::MatrixXd& W);

// A replacement instance: team T and the departing subteam S (both ordered).
struct ReplacementProblem {
    std::vector<int> team;    // T
    std::vector<int> leaving; // S, subset of T

    // R = T \ S with T's order preserved
    std::vector<int> remaining() const;
    // C = V \ T, ascending
    std::vector<int> candidate_pool(const SocialNetwork& net) const;
};

ValidationReport validate_problem(const SocialNetwork& net, const ReplacementProblem& prob);

} // namespace subrep
