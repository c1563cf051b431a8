#pragma once

#include "subrep/data_gen.hpp"
#include "subrep/social_network.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace subrep {

// Where benchmark networks come from: fresh preferential-attachment graphs per
// instance, or one fixed network loaded from files and resampled per instance.
struct BenchSource {
    enum class Type { ba, files };
    Type type = Type::ba;
    // type == ba (the seed field is ignored; instance seeds drive generation)
    BAConfig ba;
    // type == files
    std::string edges, skills, relevance;
};

struct BatchConfig {
    std::uint64_t seed = 0;
    int batch_size = 1;
    std::pair<int, int> t_range{0, 0}; // inclusive
    std::pair<int, int> s_range{0, 0}; // inclusive
    std::vector<std::string> algorithms; // execution order; subset of
                                         // {reform, iterative, local_best, brute}
    double safety = 0.9;
    TeamMode team_mode = TeamMode::connected_subgraph;
    BenchSource source;
    std::string w_mode = "ones_upper"; // or "file" (files source only)
    long brute_budget = 2000000;
    bool compute_curvature = false;
    int curvature_pool_cap = 64;
};

// Parses and validates the JSON config. Unknown keys are rejected so typos
// fail loudly. Cells with t < s + 1 are skipped at run time, but at least one
// (t, s) pair in the grid must satisfy it.
BatchConfig parse_batch_config(std::istream& in);
BatchConfig parse_batch_config_file(const std::string& path);

struct BenchPaths {
    std::string per_instance; // per_instance.csv
    std::string aggregate;    // aggregate.csv
};

struct BenchOptions {
    int threads = 1;
    // write 0 for every elapsed_s so reruns and thread-count changes produce
    // byte-identical files
    bool omit_timing = false;
    // re-parse the per-instance CSV and require the recomputed aggregate to be
    // byte-identical to the one just written
    bool self_audit = false;
};

struct BenchSummary {
    int instances = 0; // instance rows attempted (cells * batch_size)
    int rows = 0;      // per-instance CSV data rows written
    int errors = 0;    // rows with a non-empty error column
    bool audit_ok = true;
};

// Scores from different numerical routes are equal within 1e-9 relative.
bool score_close(double a, double b);

// Runs the grid serially in deterministic order (t asc, s asc, instance,
// configured algorithm order), writes both CSVs once at the end, and returns
// counts. Per-row errors are recorded in the CSV and the run continues.
BenchSummary run_bench(const BatchConfig& cfg, const BenchPaths& paths,
                       const BenchOptions& options, std::ostream* log = nullptr);

} // namespace subrep
