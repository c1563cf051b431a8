#pragma once

#include "subrep/data_gen.hpp"
#include "subrep/social_network.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace subrep {

// %.17g: shortest text that round-trips the double exactly; every file writer
// and the bench CSVs go through this so outputs are byte-stable.
std::string format_double(double x);

struct LoadedNetwork {
    SocialNetwork net;
    SkillRelevance W;
    std::vector<std::string> skill_names;
    std::vector<std::string> warnings;
};

// Network file set: edges as TSV (src, dst, weight; undirected, duplicate
// pairs summed), skills as CSV with an `id` column plus one column per skill,
// and the skill-pair relevance matrix as a bare numeric CSV. Entries below
// the diagonal of W are zeroed with a warning. Structural problems (unknown
// ids, ragged rows, bad numbers) are rejected.
LoadedNetwork load_network_files(const std::string& edges_path, const std::string& skills_path,
                                 const std::string& w_path);

struct NetworkFilePaths {
    std::string edges;
    std::string skills;
    std::string relevance;
};

NetworkFilePaths write_network_files(const SocialNetwork& net, const SkillRelevance& W,
                                     const std::string& prefix,
                                     const std::vector<std::string>& skill_names = {});

// JSON-lines collaboration records: {"members": [...], "tags": [...],
// "year": int, "weight": number (optional, default 1)}. Lines that fail to
// parse or carry other fields/types are counted and skipped.
std::vector<CollabRecord> read_records_jsonl(std::istream& in, int* malformed_lines = nullptr);
std::vector<CollabRecord> read_records_file(const std::string& path,
                                            int* malformed_lines = nullptr);

} // namespace subrep
