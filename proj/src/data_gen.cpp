#include "subrep/data_gen.hpp"

#include "subrep/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace subrep {

SocialNetwork generate_ba(const BAConfig& cfg) {
    if (cfg.attach < 1) throw std::invalid_argument("generate_ba: attach must be >= 1");
    if (cfg.n <= cfg.attach) throw std::invalid_argument("generate_ba: need n > attach");
    if (cfg.skills < 1) throw std::invalid_argument("generate_ba: need at least one skill");
    if (!(cfg.rate > 0.0)) throw std::invalid_argument("generate_ba: rate must be positive");

    Rng rng(cfg.seed);

    Eigen::MatrixXd L(cfg.n, cfg.skills);
    for (int i = 0; i < cfg.n; ++i)
        for (int k = 0; k < cfg.skills; ++k) L(i, k) = rng.exponential(cfg.rate);

    std::vector<std::tuple<int, int, double>> edges;
    // each edge endpoint lands here once; picking a uniform element of the
    // list is exactly degree-proportional sampling
    std::vector<int> endpoints;

    auto add_edge = [&](int u, int v) {
        edges.emplace_back(u, v, rng.exponential(cfg.rate));
        endpoints.push_back(u);
        endpoints.push_back(v);
    };

    for (int u = 0; u < cfg.attach; ++u)
        for (int v = u + 1; v < cfg.attach; ++v) add_edge(u, v);

    std::vector<int> chosen;
    for (int v = cfg.attach; v < cfg.n; ++v) {
        chosen.clear();
        while (static_cast<int>(chosen.size()) < cfg.attach) {
            int target;
            if (endpoints.empty()) // attach = 1 start: no edges yet, fall back to uniform
                target = static_cast<int>(rng.uniform_index(v));
            else
                target = endpoints[rng.uniform_index(endpoints.size())];
            // v itself enters the endpoints list with its first edge, so a
            // later draw for the same arrival could hand back v: no loops.
            if (target == v) continue;
            if (std::find(chosen.begin(), chosen.end(), target) != chosen.end()) continue;
            chosen.push_back(target);
            add_edge(v, target);
        }
    }

    std::vector<std::string> ids;
    ids.reserve(cfg.n);
    for (int i = 0; i < cfg.n; ++i) ids.push_back(std::to_string(i));
    return SocialNetwork::from_edges(std::move(ids), edges, std::move(L));
}

IngestResult ingest_records(const std::vector<CollabRecord>& records, SkillMode mode,
                            double decay_base) {
    if (records.empty()) throw std::invalid_argument("ingest_records: empty record stream");
    if (mode == SkillMode::decay && !(decay_base > 0.0 && decay_base <= 1.0))
        throw std::invalid_argument("ingest_records: decay base must lie in (0, 1]");

    auto well_formed = [](const CollabRecord& rec) {
        if (rec.members.empty()) return false;
        if (!(rec.weight >= 0.0) || !std::isfinite(rec.weight)) return false;
        std::set<std::string> uniq(rec.members.begin(), rec.members.end());
        return uniq.size() == rec.members.size();
    };

    IngestResult out;
    std::set<std::string> member_ids;
    std::set<std::string> tag_names;
    for (const auto& rec : records) {
        if (!well_formed(rec)) {
            ++out.skipped;
            continue;
        }
        member_ids.insert(rec.members.begin(), rec.members.end());
        tag_names.insert(rec.tags.begin(), rec.tags.end());
    }
    if (member_ids.empty()) throw std::invalid_argument("ingest_records: no usable records");

    std::vector<std::string> ids(member_ids.begin(), member_ids.end()); // sorted
    out.skills.assign(tag_names.begin(), tag_names.end());
    std::map<std::string, int> node_of;
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) node_of[ids[i]] = i;
    std::map<std::string, int> col_of;
    for (int k = 0; k < static_cast<int>(out.skills.size()); ++k) col_of[out.skills[k]] = k;

    const int l = std::max<int>(1, static_cast<int>(out.skills.size()));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<int>(ids.size()), l);
    std::vector<std::tuple<int, int, double>> edges;

    for (const auto& rec : records) {
        if (!well_formed(rec)) continue;
        std::vector<int> nodes;
        nodes.reserve(rec.members.size());
        for (const auto& id : rec.members) nodes.push_back(node_of[id]);

        for (std::size_t a = 0; a < nodes.size(); ++a)
            for (std::size_t b = a + 1; b < nodes.size(); ++b)
                edges.emplace_back(nodes[a], nodes[b], rec.weight);

        for (const auto& tag : rec.tags) {
            const int col = col_of[tag];
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                const double credit = mode == SkillMode::count
                                          ? 1.0
                                          : std::pow(decay_base, static_cast<double>(k));
                L(nodes[k], col) += credit;
            }
        }
    }

    out.net = SocialNetwork::from_edges(std::move(ids), edges, std::move(L));
    return out;
}

std::vector<int> sample_team(const SocialNetwork& net, int t, TeamMode mode,
                             std::uint64_t seed) {
    const int n = net.node_count();
    if (t < 1 || t > n) throw std::invalid_argument("sample_team: t out of range");
    Rng rng(seed);

    const int attempts = 256;
    if (mode == TeamMode::connected_subgraph) {
        const int step_cap = 64 * t;
        for (int a = 0; a < attempts; ++a) {
            int cur = static_cast<int>(rng.uniform_index(n));
            std::set<int> team{cur};
            for (int step = 0; step < step_cap && static_cast<int>(team.size()) < t; ++step) {
                const auto& nbrs = net.neighbors(cur);
                if (nbrs.empty()) break;
                cur = nbrs[rng.uniform_index(nbrs.size())].first;
                team.insert(cur);
            }
            if (static_cast<int>(team.size()) == t) return {team.begin(), team.end()};
        }
        throw std::runtime_error("sample_team: no connected subgraph of size " +
                                 std::to_string(t) + " found in " + std::to_string(attempts) +
                                 " walks; the graph may be too sparse or disconnected");
    }

    // clique mode: grow from a random node through common neighbors
    for (int a = 0; a < attempts; ++a) {
        const int start = static_cast<int>(rng.uniform_index(n));
        std::vector<int> clique{start};
        std::vector<int> common;
        for (const auto& [v, w] : net.neighbors(start))
            if (w > 0.0) common.push_back(v);
        while (static_cast<int>(clique.size()) < t && !common.empty()) {
            const int next = common[rng.uniform_index(common.size())];
            clique.push_back(next);
            std::vector<int> still;
            for (int v : common)
                if (v != next && net.edge_weight(v, next) > 0.0) still.push_back(v);
            common.swap(still);
        }
        if (static_cast<int>(clique.size()) == t) {
            std::sort(clique.begin(), clique.end());
            return clique;
        }
    }
    throw std::runtime_error("sample_team: no clique of size " + std::to_string(t) +
                             " found in " + std::to_string(attempts) + " attempts");
}

std::vector<int> sample_subteam(const std::vector<int>& team, int s, std::uint64_t seed) {
    if (s < 0 || s > static_cast<int>(team.size()))
        throw std::invalid_argument("sample_subteam: s out of range");
    Rng rng(seed);
    std::vector<int> deck = team;
    for (int i = 0; i < s; ++i) {
        const auto j = i + rng.uniform_index(deck.size() - i);
        std::swap(deck[i], deck[j]);
    }
    std::vector<int> sub(deck.begin(), deck.begin() + s);
    std::sort(sub.begin(), sub.end());
    return sub;
}

} // namespace subrep
