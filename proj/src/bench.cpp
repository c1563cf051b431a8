#include "subrep/bench.hpp"

#include "subrep/baselines.hpp"
#include "subrep/kernel.hpp"
#include "subrep/network_io.hpp"
#include "subrep/reform.hpp"
#include "subrep/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace subrep {

bool score_close(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace {

const char* const kPerInstanceHeader =
    "t,s,algorithm,instance,instance_seed,elapsed_s,score,is_optimal,evaluations,kappa,error";
const char* const kAggregateHeader =
    "t,s,algorithm,instances,errors,mean_time_s,stddev_time_s,mean_score,optimal_rate,"
    "reform_outperform_rate,mean_kappa";

const std::vector<std::string> kKnownAlgorithms = {"reform", "iterative", "local_best", "brute"};

struct InstanceRow {
    int t = 0, s = 0;
    std::string algorithm;
    int instance = 0;
    std::uint64_t instance_seed = 0;
    double elapsed = 0.0; // meaningful only when error is empty
    double score = 0.0;
    std::optional<bool> is_optimal;
    long evaluations = 0;
    std::optional<double> kappa;
    std::string error; // empty on success
};

std::string row_to_csv(const InstanceRow& r) {
    std::string line = std::to_string(r.t);
    line += ',';
    line += std::to_string(r.s);
    line += ',';
    line += r.algorithm;
    line += ',';
    line += std::to_string(r.instance);
    line += ',';
    line += std::to_string(r.instance_seed);
    if (r.error.empty()) {
        line += ',';
        line += format_double(r.elapsed);
        line += ',';
        line += format_double(r.score);
        line += ',';
        if (r.is_optimal) line += *r.is_optimal ? "1" : "0";
        line += ',';
        line += std::to_string(r.evaluations);
    } else {
        line += ",,,,";
    }
    line += ',';
    if (r.kappa) line += format_double(*r.kappa);
    line += ',';
    line += r.error;
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<InstanceRow> parse_per_instance_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kPerInstanceHeader)
        throw std::invalid_argument("per-instance CSV: unexpected header");
    std::vector<InstanceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 11)
            throw std::invalid_argument("per-instance CSV: row with " +
                                        std::to_string(f.size()) + " fields");
        InstanceRow r;
        r.t = std::stoi(f[0]);
        r.s = std::stoi(f[1]);
        r.algorithm = f[2];
        r.instance = std::stoi(f[3]);
        r.instance_seed = std::stoull(f[4]);
        r.error = f[10];
        if (r.error.empty()) {
            r.elapsed = std::stod(f[5]);
            r.score = std::stod(f[6]);
            if (!f[7].empty()) r.is_optimal = (f[7] == "1");
            r.evaluations = std::stol(f[8]);
        }
        if (!f[9].empty()) r.kappa = std::stod(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// Aggregates per (t, s, algorithm) from the per-instance rows alone, so the
// self-audit can rebuild this file from the CSV on disk and compare bytes.
std::string build_aggregate_csv(const std::vector<InstanceRow>& rows,
                                const std::vector<std::string>& algo_order) {
    const bool have_reform =
        std::find(algo_order.begin(), algo_order.end(), "reform") != algo_order.end();

    std::vector<std::pair<int, int>> cells;
    std::map<std::pair<int, int>, std::vector<const InstanceRow*>> by_cell;
    for (const auto& r : rows) {
        const std::pair<int, int> key{r.t, r.s};
        auto& bucket = by_cell[key];
        if (bucket.empty()) cells.push_back(key);
        bucket.push_back(&r);
    }

    std::string text = kAggregateHeader;
    text += '\n';
    for (const auto& cell : cells) {
        const auto& bucket = by_cell[cell];
        std::map<int, const InstanceRow*> reform_ok; // instance -> row
        for (const auto* r : bucket)
            if (r->algorithm == "reform" && r->error.empty()) reform_ok[r->instance] = r;

        for (const auto& alg : algo_order) {
            std::vector<const InstanceRow*> group;
            for (const auto* r : bucket)
                if (r->algorithm == alg) group.push_back(r);
            if (group.empty()) continue;

            int errors = 0, n_opt = 0, opt_hits = 0, n_kappa = 0;
            int pairs = 0, outperformed = 0;
            double time_sum = 0, score_sum = 0, kappa_sum = 0;
            std::vector<double> times;
            for (const auto* r : group) {
                if (!r->error.empty()) {
                    ++errors;
                } else {
                    time_sum += r->elapsed;
                    score_sum += r->score;
                    times.push_back(r->elapsed);
                    if (r->is_optimal) {
                        ++n_opt;
                        if (*r->is_optimal) ++opt_hits;
                    }
                    if (have_reform) {
                        const auto it = reform_ok.find(r->instance);
                        if (it != reform_ok.end()) {
                            ++pairs;
                            const InstanceRow* ref = it->second;
                            const bool wins = score_close(ref->score, r->score)
                                                  ? ref->elapsed < r->elapsed
                                                  : ref->score > r->score;
                            if (wins) ++outperformed;
                        }
                    }
                }
                if (r->kappa) {
                    ++n_kappa;
                    kappa_sum += *r->kappa;
                }
            }
            const int n_ok = static_cast<int>(times.size());

            std::string line = std::to_string(cell.first);
            line += ',';
            line += std::to_string(cell.second);
            line += ',';
            line += alg;
            line += ',';
            line += std::to_string(group.size());
            line += ',';
            line += std::to_string(errors);
            line += ',';
            if (n_ok > 0) {
                const double mean_t = time_sum / n_ok;
                double var = 0;
                for (const double x : times) var += (x - mean_t) * (x - mean_t);
                line += format_double(mean_t);
                line += ',';
                line += format_double(std::sqrt(var / n_ok));
                line += ',';
                line += format_double(score_sum / n_ok);
            } else {
                line += ",,";
            }
            line += ',';
            if (n_opt > 0) line += format_double(static_cast<double>(opt_hits) / n_opt);
            line += ',';
            if (pairs > 0) line += format_double(static_cast<double>(outperformed) / pairs);
            line += ',';
            if (n_kappa > 0) line += format_double(kappa_sum / n_kappa);
            text += line;
            text += '\n';
        }
    }
    return text;
}

void validate_config(const BatchConfig& cfg) {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (cfg.batch_size < 1) bad("batch_size must be >= 1");
    if (cfg.t_range.first > cfg.t_range.second) bad("t_range is empty");
    if (cfg.s_range.first > cfg.s_range.second) bad("s_range is empty");
    if (cfg.s_range.first < 2) bad("s must be >= 2");
    if (cfg.t_range.second < cfg.s_range.first + 1)
        bad("no cell satisfies t >= s + 1");
    if (cfg.algorithms.empty()) bad("algorithms must be non-empty");
    for (const auto& a : cfg.algorithms) {
        if (std::find(kKnownAlgorithms.begin(), kKnownAlgorithms.end(), a) ==
            kKnownAlgorithms.end())
            bad("unknown algorithm '" + a + "'");
        if (std::count(cfg.algorithms.begin(), cfg.algorithms.end(), a) != 1)
            bad("duplicate algorithm '" + a + "'");
    }
    if (!(cfg.safety > 0.0 && cfg.safety < 1.0)) bad("safety must be in (0, 1)");
    if (cfg.w_mode != "ones_upper" && cfg.w_mode != "file") bad("w_mode must be ones_upper or file");
    if (cfg.w_mode == "file" && cfg.source.type != BenchSource::Type::files)
        bad("w_mode file requires a files source");
    if (cfg.brute_budget < 1) bad("brute_budget must be >= 1");
    if (cfg.compute_curvature && cfg.curvature_pool_cap < 2)
        bad("curvature_pool_cap must be >= 2");
    if (cfg.source.type == BenchSource::Type::ba) {
        const auto& ba = cfg.source.ba;
        if (ba.attach < 1 || ba.n <= ba.attach || ba.skills < 1 || !(ba.rate > 0))
            bad("ba source needs attach >= 1, n > attach, skills >= 1, rate > 0");
    } else {
        if (cfg.source.edges.empty() || cfg.source.skills.empty() || cfg.source.relevance.empty())
            bad("files source needs edges, skills and relevance paths");
    }
}

} // namespace

BatchConfig parse_batch_config(std::istream& in) {
    const auto j = nlohmann::json::parse(in, nullptr, false);
    auto bad = [](const std::string& msg) -> void {
        throw std::invalid_argument("config: " + msg);
    };
    if (j.is_discarded() || !j.is_object()) bad("not a JSON object");

    static const std::vector<std::string> known = {
        "seed",      "batch_size", "t_range",      "s_range",
        "algorithms", "safety",    "team_mode",    "source",
        "w_mode",    "brute_budget", "compute_curvature", "curvature_pool_cap"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            bad("unknown key '" + it.key() + "'");
    for (const auto& key : {"seed", "batch_size", "t_range", "s_range", "algorithms", "source"})
        if (!j.contains(key)) bad(std::string("missing key '") + key + "'");

    BatchConfig cfg;
    if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    if (!j["batch_size"].is_number_integer()) bad("batch_size must be an integer");
    cfg.batch_size = j["batch_size"].get<int>();

    auto parse_range = [&](const char* key) -> std::pair<int, int> {
        const auto& r = j[key];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
            !r[1].is_number_integer())
            bad(std::string(key) + " must be [lo, hi]");
        return {r[0].get<int>(), r[1].get<int>()};
    };
    cfg.t_range = parse_range("t_range");
    cfg.s_range = parse_range("s_range");

    if (!j["algorithms"].is_array()) bad("algorithms must be an array");
    for (const auto& a : j["algorithms"]) {
        if (!a.is_string()) bad("algorithms must be strings");
        cfg.algorithms.push_back(a.get<std::string>());
    }

    if (j.contains("safety")) {
        if (!j["safety"].is_number()) bad("safety must be a number");
        cfg.safety = j["safety"].get<double>();
    }
    if (j.contains("team_mode")) {
        const auto mode = j["team_mode"].is_string() ? j["team_mode"].get<std::string>() : "";
        if (mode == "connected_subgraph")
            cfg.team_mode = TeamMode::connected_subgraph;
        else if (mode == "clique")
            cfg.team_mode = TeamMode::clique;
        else
            bad("team_mode must be connected_subgraph or clique");
    }
    if (j.contains("w_mode")) {
        if (!j["w_mode"].is_string()) bad("w_mode must be a string");
        cfg.w_mode = j["w_mode"].get<std::string>();
    }
    if (j.contains("brute_budget")) {
        if (!j["brute_budget"].is_number_integer()) bad("brute_budget must be an integer");
        cfg.brute_budget = j["brute_budget"].get<long>();
    }
    if (j.contains("compute_curvature")) {
        if (!j["compute_curvature"].is_boolean()) bad("compute_curvature must be a boolean");
        cfg.compute_curvature = j["compute_curvature"].get<bool>();
    }
    if (j.contains("curvature_pool_cap")) {
        if (!j["curvature_pool_cap"].is_number_integer()) bad("curvature_pool_cap must be an integer");
        cfg.curvature_pool_cap = j["curvature_pool_cap"].get<int>();
    }

    const auto& src = j["source"];
    if (!src.is_object() || !src.contains("type") || !src["type"].is_string())
        bad("source must be an object with a type");
    const auto type = src["type"].get<std::string>();
    if (type == "ba") {
        cfg.source.type = BenchSource::Type::ba;
        static const std::vector<std::string> ba_keys = {"type", "n", "attach", "skills", "rate"};
        for (auto it = src.begin(); it != src.end(); ++it)
            if (std::find(ba_keys.begin(), ba_keys.end(), it.key()) == ba_keys.end())
                bad("unknown source key '" + it.key() + "'");
        if (!src.contains("n") || !src["n"].is_number_integer()) bad("ba source needs integer n");
        cfg.source.ba.n = src["n"].get<int>();
        if (src.contains("attach")) {
            if (!src["attach"].is_number_integer()) bad("attach must be an integer");
            cfg.source.ba.attach = src["attach"].get<int>();
        }
        if (src.contains("skills")) {
            if (!src["skills"].is_number_integer()) bad("skills must be an integer");
            cfg.source.ba.skills = src["skills"].get<int>();
        }
        if (src.contains("rate")) {
            if (!src["rate"].is_number()) bad("rate must be a number");
            cfg.source.ba.rate = src["rate"].get<double>();
        }
    } else if (type == "files") {
        cfg.source.type = BenchSource::Type::files;
        static const std::vector<std::string> file_keys = {"type", "edges", "skills", "relevance"};
        for (auto it = src.begin(); it != src.end(); ++it)
            if (std::find(file_keys.begin(), file_keys.end(), it.key()) == file_keys.end())
                bad("unknown source key '" + it.key() + "'");
        for (const auto& key : {"edges", "skills", "relevance"}) {
            if (!src.contains(key) || !src[key].is_string())
                bad(std::string("files source needs string '") + key + "'");
        }
        cfg.source.edges = src["edges"].get<std::string>();
        cfg.source.skills = src["skills"].get<std::string>();
        cfg.source.relevance = src["relevance"].get<std::string>();
    } else {
        bad("source type must be ba or files");
    }

    validate_config(cfg);
    return cfg;
}

BatchConfig parse_batch_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return parse_batch_config(in);
}

BenchSummary run_bench(const BatchConfig& cfg, const BenchPaths& paths,
                       const BenchOptions& options, std::ostream* log) {
    validate_config(cfg);
    if (options.threads < 1) throw std::invalid_argument("threads must be >= 1");

    std::optional<LoadedNetwork> fixed;
    if (cfg.source.type == BenchSource::Type::files) {
        fixed = load_network_files(cfg.source.edges, cfg.source.skills, cfg.source.relevance);
        if (log)
            for (const auto& w : fixed->warnings) *log << "warning: " << w << '\n';
    }

    int kappa_slot = 0;
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
        if (cfg.algorithms[i] == "reform") kappa_slot = static_cast<int>(i);

    BenchSummary summary;
    std::vector<InstanceRow> rows;

    for (int t = cfg.t_range.first; t <= cfg.t_range.second; ++t) {
        for (int s = cfg.s_range.first; s <= cfg.s_range.second; ++s) {
            if (t < s + 1) continue;
            int cell_errors = 0;
            for (int k = 0; k < cfg.batch_size; ++k) {
                const std::uint64_t inst_seed =
                    mix_seed(cfg.seed, static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k));
                ++summary.instances;

                SocialNetwork generated;
                const SocialNetwork* net = nullptr;
                SkillRelevance W;
                ReplacementProblem prob;
                KernelParams params;
                params.safety = cfg.safety;
                std::string setup_error;
                try {
                    if (cfg.source.type == BenchSource::Type::ba) {
                        BAConfig ba = cfg.source.ba;
                        ba.seed = mix_seed(inst_seed, 101);
                        generated = generate_ba(ba);
                        net = &generated;
                    } else {
                        net = &fixed->net;
                    }
                    W = cfg.w_mode == "file" ? fixed->W : SkillRelevance::ones(net->skill_count());
                    prob.team = sample_team(*net, t, cfg.team_mode, mix_seed(inst_seed, 202));
                    prob.leaving = sample_subteam(prob.team, s, mix_seed(inst_seed, 303));
                    const auto rep = validate_problem(*net, prob);
                    if (!rep.ok)
                        setup_error = "rejected";
                    else
                        params.c = choose_decay(extract_subgraph(*net, prob.team), W, cfg.safety);
                } catch (const ConvergenceError&) {
                    setup_error = "convergence";
                } catch (const NumericalError&) {
                    setup_error = "numerical";
                } catch (const std::invalid_argument&) {
                    setup_error = "rejected";
                } catch (const std::runtime_error&) {
                    setup_error = "sampling";
                }

                struct Outcome {
                    double elapsed = 0, score = 0;
                    long evaluations = 0;
                    std::string error;
                };
                std::vector<Outcome> outcomes(cfg.algorithms.size());

                for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                    auto& out = outcomes[a];
                    if (!setup_error.empty()) {
                        out.error = setup_error;
                        continue;
                    }
                    const auto& alg = cfg.algorithms[a];
                    try {
                        const auto t0 = std::chrono::steady_clock::now();
                        if (alg == "reform") {
                            const auto sol = reform(*net, prob, W, params, options.threads);
                            out.score = sol.final_score;
                            out.evaluations = sol.evaluations;
                        } else if (alg == "iterative") {
                            const auto r = iterative_replace(*net, prob, W, params,
                                                             mix_seed(inst_seed, 7),
                                                             options.threads);
                            out.score = r.final_score;
                            out.evaluations = r.evaluations;
                        } else if (alg == "local_best") {
                            const auto r = local_best(*net, prob, W, params, options.threads);
                            out.score = r.final_score;
                            out.evaluations = r.evaluations;
                        } else {
                            const auto r = brute_force(*net, prob, W, params, cfg.brute_budget);
                            out.score = r.final_score;
                            out.evaluations = r.evaluations;
                        }
                        out.elapsed =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
                    } catch (const ConvergenceError& e) {
                        out.error = "convergence";
                        if (log) *log << alg << " t=" << t << " s=" << s << " k=" << k << ": "
                                      << e.what() << '\n';
                    } catch (const NumericalError& e) {
                        out.error = "numerical";
                        if (log) *log << alg << " t=" << t << " s=" << s << " k=" << k << ": "
                                      << e.what() << '\n';
                    } catch (const std::invalid_argument& e) {
                        out.error = "rejected";
                        if (log) *log << alg << " t=" << t << " s=" << s << " k=" << k << ": "
                                      << e.what() << '\n';
                    } catch (const std::exception& e) {
                        out.error = "failed";
                        if (log) *log << alg << " t=" << t << " s=" << s << " k=" << k << ": "
                                      << e.what() << '\n';
                    }
                }

                std::optional<double> kappa;
                if (cfg.compute_curvature && setup_error.empty()) {
                    try {
                        auto pool = prob.candidate_pool(*net);
                        std::optional<std::vector<int>> sub;
                        if (static_cast<int>(pool.size()) > cfg.curvature_pool_cap)
                            sub = sample_subteam(pool, cfg.curvature_pool_cap,
                                                 mix_seed(inst_seed, 9));
                        const auto cert =
                            supermodular_curvature(*net, prob, W, params, cfg.curvature_pool_cap,
                                                   sub ? &*sub : nullptr);
                        kappa = cert.kappa;
                    } catch (const std::exception& e) {
                        if (log)
                            *log << "curvature failed (t=" << t << " s=" << s << " k=" << k
                                 << "): " << e.what() << '\n';
                    }
                }

                const Outcome* brute = nullptr;
                for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
                    if (cfg.algorithms[a] == "brute" && outcomes[a].error.empty())
                        brute = &outcomes[a];

                for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                    const auto& out = outcomes[a];
                    InstanceRow r;
                    r.t = t;
                    r.s = s;
                    r.algorithm = cfg.algorithms[a];
                    r.instance = k;
                    r.instance_seed = inst_seed;
                    r.error = out.error;
                    if (out.error.empty()) {
                        r.elapsed = options.omit_timing ? 0.0 : out.elapsed;
                        r.score = out.score;
                        r.evaluations = out.evaluations;
                        if (brute)
                            r.is_optimal = out.score >= brute->score ||
                                           score_close(out.score, brute->score);
                    } else {
                        ++cell_errors;
                        ++summary.errors;
                    }
                    if (static_cast<int>(a) == kappa_slot) r.kappa = kappa;
                    rows.push_back(std::move(r));
                }
            }
            if (log)
                *log << "t=" << t << " s=" << s << ": " << cfg.batch_size << " instances, "
                     << cell_errors << " error rows\n";
        }
    }

    std::string per_text = kPerInstanceHeader;
    per_text += '\n';
    for (const auto& r : rows) {
        per_text += row_to_csv(r);
        per_text += '\n';
    }
    const std::string agg_text = build_aggregate_csv(rows, cfg.algorithms);

    {
        std::ofstream out(paths.per_instance, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write " + paths.per_instance);
        out << per_text;
    }
    {
        std::ofstream out(paths.aggregate, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write " + paths.aggregate);
        out << agg_text;
    }
    summary.rows = static_cast<int>(rows.size());

    if (options.self_audit) {
        std::ifstream in(paths.per_instance);
        if (!in) throw std::invalid_argument("cannot reopen " + paths.per_instance);
        const auto reparsed = parse_per_instance_csv(in);
        summary.audit_ok = build_aggregate_csv(reparsed, cfg.algorithms) == agg_text;
        if (log && !summary.audit_ok) *log << "self-audit: aggregate mismatch\n";
    }
    return summary;
}

} // namespace subrep
