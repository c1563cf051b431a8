#pragma once

#include "subrep/social_network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace subrep {

struct BAConfig {
    int n = 0;
    int attach = 1;    // seed clique size and edges per arriving node
    int skills = 1;    // skill vector length
    double rate = 1.0; // exponential rate for edge weights and skills
    std::uint64_t seed = 0;
};

// Preferential attachment: complete graph on the first `attach` nodes, then
// every new node links to `attach` distinct existing nodes drawn with
// probability proportional to degree. Weights and skills are exp(rate) draws.
// Same config means byte-identical output.
SocialNetwork generate_ba(const BAConfig& cfg);

struct CollabRecord {
    std::vector<std::string> members; // ordered; position drives decay credit
    std::vector<std::string> tags;
    int year = 0;
    double weight = 1.0;
};

enum class SkillMode { count, decay };

struct IngestResult {
    SocialNetwork net;
    std::vector<std::string> skills; // sorted tag union = skill column order
    int skipped = 0;                 // malformed records
};

// Builds a network out of collaboration records: one node per distinct member
// (indexed by sorted id, so shuffling the records changes nothing), edge
// weights sum record weights over co-membership pairs, and skills credit the
// record's tags to each member: `count` adds 1, `decay` adds base^(k-1) where
// k is the member's 1-based position in the record.
IngestResult ingest_records(const std::vector<CollabRecord>& records, SkillMode mode,
                            double decay_base = 0.95);

enum class TeamMode { connected_subgraph, clique };

// Seeded team sampling. connected_subgraph grows a random walk until it covers
// t nodes; clique grows a clique by random common neighbors. Both retry a
// bounded number of times and then throw with diagnostics.
std::vector<int> sample_team(const SocialNetwork& net, int t, TeamMode mode,
                             std::uint64_t seed);

// Uniform size-s subset of the team.
std::vector<int> sample_subteam(const std::vector<int>& team, int s, std::uint64_t seed);

} // namespace subrep
