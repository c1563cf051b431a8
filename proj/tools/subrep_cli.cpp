#include "subrep/baselines.hpp"
#include "subrep/bench.hpp"
#include "subrep/data_gen.hpp"
#include "subrep/kernel.hpp"
#include "subrep/network_io.hpp"
#include "subrep/reform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace subrep;

// The full ValidationReport is printed before this is thrown, so the handler
// at the bottom of main only has to set the exit code.
struct ReportedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void print_report(const ValidationReport& rep) {
    for (const auto& v : rep.violations) std::cerr << "invalid: " << v << '\n';
}

std::vector<std::string> names_of(const SocialNetwork& net, const std::vector<int>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (const int v : idx) out.push_back(net.node_id(v));
    return out;
}

struct Instance {
    LoadedNetwork loaded;
    ReplacementProblem prob;
    KernelParams params;
};

Instance load_instance(const std::string& edges, const std::string& skills,
                       const std::string& w, const std::vector<std::string>& team_ids,
                       const std::vector<std::string>& out_ids, double safety) {
    Instance inst;
    inst.loaded = load_network_files(edges, skills, w);
    for (const auto& msg : inst.loaded.warnings) std::cerr << "warning: " << msg << '\n';

    ValidationReport rep = validate_network(inst.loaded.net);
    for (const auto& v : validate_relevance(inst.loaded.W.W).violations) rep.fail(v);

    auto to_index = [&](const std::vector<std::string>& ids, std::vector<int>& out,
                        const char* what) {
        for (const auto& id : ids) {
            const auto idx = inst.loaded.net.index_of(id);
            if (!idx)
                rep.fail(std::string(what) + " id '" + id + "' is not in the network");
            else
                out.push_back(*idx);
        }
    };
    to_index(team_ids, inst.prob.team, "team");
    to_index(out_ids, inst.prob.leaving, "out-of");
    if (rep.ok)
        for (const auto& v : validate_problem(inst.loaded.net, inst.prob).violations) rep.fail(v);
    if (!rep.ok) {
        print_report(rep);
        throw ReportedError("invalid input");
    }
    inst.params.safety = safety;
    inst.params.c =
        choose_decay(extract_subgraph(inst.loaded.net, inst.prob.team), inst.loaded.W, safety);
    return inst;
}

int run_replace(const Instance& inst, const std::string& algorithm, bool bound, int pool_cap,
                std::uint64_t seed, int threads, bool as_json) {
    const auto& net = inst.loaded.net;
    std::vector<int> picks;
    double final_score = 0;
    long evaluations = 0;
    std::vector<std::pair<int, int>> replacements;
    std::vector<double> gains;
    bool prune_fallback = false;

    if (algorithm == "reform") {
        const auto sol = reform(net, inst.prob, inst.loaded.W, inst.params, threads);
        picks = sol.picks;
        final_score = sol.final_score;
        evaluations = sol.evaluations;
        gains = sol.scores;
        prune_fallback = sol.prune_fallback;
    } else if (algorithm == "iterative") {
        const auto r = iterative_replace(net, inst.prob, inst.loaded.W, inst.params, seed, threads);
        picks = r.picks;
        final_score = r.final_score;
        evaluations = r.evaluations;
        replacements = r.replacements;
    } else if (algorithm == "local_best") {
        const auto r = local_best(net, inst.prob, inst.loaded.W, inst.params, threads);
        picks = r.picks;
        final_score = r.final_score;
        evaluations = r.evaluations;
        replacements = r.replacements;
    } else {
        const auto r = brute_force(net, inst.prob, inst.loaded.W, inst.params);
        picks = r.picks;
        final_score = r.final_score;
        evaluations = r.evaluations;
    }

    std::optional<CurvatureCertificate> cert;
    if (bound) cert = supermodular_curvature(net, inst.prob, inst.loaded.W, inst.params, pool_cap);

    if (as_json) {
        json out;
        out["algorithm"] = algorithm;
        out["picks"] = names_of(net, picks);
        out["final_score"] = final_score;
        out["evaluations"] = evaluations;
        out["c"] = inst.params.c;
        if (!gains.empty()) out["round_gains"] = gains;
        if (prune_fallback) out["prune_fallback"] = true;
        if (!replacements.empty()) {
            json reps = json::array();
            for (const auto& [leaver, pick] : replacements)
                reps.push_back({{"out", net.node_id(leaver)}, {"in", net.node_id(pick)}});
            out["replacements"] = reps;
        }
        if (cert)
            out["bound"] = {{"kappa", cert->kappa},
                            {"factor", 1.0 - cert->kappa},
                            {"pool_size", cert->pool.size()},
                            {"valid", cert->valid_for_bound}};
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    std::cout << "replacement:";
    for (const int v : picks) std::cout << ' ' << net.node_id(v);
    std::cout << '\n';
    std::cout << "final score: " << format_double(final_score) << '\n';
    for (std::size_t i = 0; i < gains.size(); ++i)
        std::cout << "round " << i + 1 << ": " << net.node_id(picks[i]) << "  gain so far "
                  << format_double(gains[i]) << '\n';
    for (const auto& [leaver, pick] : replacements)
        std::cout << "replaced " << net.node_id(leaver) << " -> " << net.node_id(pick) << '\n';
    std::cout << "evaluations: " << evaluations << '\n';
    std::cout << "decay c: " << format_double(inst.params.c) << '\n';
    if (prune_fallback) std::cout << "note: pruning removed every candidate; full pool used\n";
    if (cert) {
        std::cout << "curvature kappa: " << format_double(cert->kappa)
                  << (cert->valid_for_bound ? "" : " (certificate not valid for a bound)") << '\n';
        std::cout << "bound: greedy score >= " << format_double(1.0 - cert->kappa)
                  << " * optimum over " << cert->pool.size() << " candidates\n";
    }
    (void)seed;
    return 0;
}

int run_curvature(const Instance& inst, int pool_cap, int subsample, std::uint64_t seed,
                  bool as_json) {
    const auto& net = inst.loaded.net;
    auto pool = inst.prob.candidate_pool(net);
    bool subsampled = false;
    if (subsample > 0 && subsample < static_cast<int>(pool.size())) {
        pool = sample_subteam(pool, subsample, seed);
        subsampled = true;
    }
    const auto cert = supermodular_curvature(net, inst.prob, inst.loaded.W, inst.params, pool_cap,
                                             subsampled ? &pool : nullptr);

    if (as_json) {
        json out;
        out["kappa"] = cert.kappa;
        out["factor"] = 1.0 - cert.kappa;
        out["pool_size"] = cert.pool.size();
        out["subsampled"] = subsampled;
        out["g_full"] = cert.g_full;
        out["valid_for_bound"] = cert.valid_for_bound;
        if (cert.argmin_node >= 0) out["argmin"] = net.node_id(cert.argmin_node);
        std::cout << out.dump(2) << '\n';
        return 0;
    }

    std::cout << "pool size: " << cert.pool.size() << (subsampled ? " (subsampled)" : "") << '\n';
    std::cout << "kappa: " << format_double(cert.kappa) << '\n';
    if (cert.argmin_node >= 0)
        std::cout << "tightest candidate: " << net.node_id(cert.argmin_node) << '\n';
    std::cout << "g over the whole pool: " << format_double(cert.g_full) << '\n';
    std::cout << "valid for bound: " << (cert.valid_for_bound ? "yes" : "no") << '\n';
    std::cout << "bound: greedy score >= " << format_double(1.0 - cert.kappa) << " * optimum\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"subteam replacement toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double safety = 0.9;
    int threads = 1;
    bool as_json = false;
    app.add_option("--seed", seed, "seed for randomized components")->capture_default_str();
    app.add_option("--safety", safety, "walk decay safety factor, in (0, 1)")
        ->capture_default_str();
    app.add_option("--threads", threads, "worker threads for candidate scans")
        ->capture_default_str();
    app.add_flag("--json", as_json, "print results as JSON");

    auto* rep = app.add_subcommand("replace", "solve one replacement instance");
    rep->fallthrough();
    std::string edges, skills, wpath, algorithm = "reform";
    std::vector<std::string> team_ids, out_ids;
    bool bound = false;
    int pool_cap = 64;
    rep->add_option("--edges", edges, "edge list TSV")->required();
    rep->add_option("--skills", skills, "per-node skills CSV")->required();
    rep->add_option("--W", wpath, "skill-pair relevance CSV")->required();
    rep->add_option("--team", team_ids, "team node ids, comma separated")
        ->delimiter(',')
        ->required();
    rep->add_option("--out-of", out_ids, "departing node ids, comma separated")
        ->delimiter(',')
        ->required();
    rep->add_option("--algorithm", algorithm, "reform | iterative | local_best | brute")
        ->check(CLI::IsMember({"reform", "iterative", "local_best", "brute"}))
        ->capture_default_str();
    rep->add_flag("--bound", bound, "also print the curvature quality bound");
    rep->add_option("--pool-cap", pool_cap, "largest pool the bound will evaluate")
        ->capture_default_str();

    auto* curv = app.add_subcommand("curvature", "curvature certificate for an instance");
    curv->fallthrough();
    std::string c_edges, c_skills, c_wpath;
    std::vector<std::string> c_team_ids, c_out_ids;
    int c_pool_cap = 64, c_subsample = 0;
    curv->add_option("--edges", c_edges, "edge list TSV")->required();
    curv->add_option("--skills", c_skills, "per-node skills CSV")->required();
    curv->add_option("--W", c_wpath, "skill-pair relevance CSV")->required();
    curv->add_option("--team", c_team_ids, "team node ids")->delimiter(',')->required();
    curv->add_option("--out-of", c_out_ids, "departing node ids")->delimiter(',')->required();
    curv->add_option("--pool-cap", c_pool_cap, "largest pool the bound will evaluate")
        ->capture_default_str();
    curv->add_option("--subsample", c_subsample,
                     "bound a seeded random subpool of this size instead of the full pool");

    auto* gen = app.add_subcommand("gen", "generate a preferential-attachment network");
    gen->fallthrough();
    int g_n = 0, g_attach = 1, g_skills = 1;
    double g_rate = 1.0;
    std::string g_out;
    gen->add_option("--n", g_n, "number of nodes")->required();
    gen->add_option("--attach", g_attach, "edges per arriving node")->capture_default_str();
    gen->add_option("--skills", g_skills, "skill vector length")->capture_default_str();
    gen->add_option("--rate", g_rate, "exponential rate for weights and skills")
        ->capture_default_str();
    gen->add_option("--out", g_out, "output path prefix")->required();

    auto* ing = app.add_subcommand("ingest", "build a network from collaboration records");
    ing->fallthrough();
    std::string i_records, i_mode = "count", i_out;
    double i_decay_base = 0.95;
    ing->add_option("--records", i_records, "JSONL records file")->required();
    ing->add_option("--skill-mode", i_mode, "count | decay")
        ->check(CLI::IsMember({"count", "decay"}))
        ->capture_default_str();
    ing->add_option("--decay-base", i_decay_base, "per-position decay base, in (0, 1]")
        ->capture_default_str();
    ing->add_option("--out", i_out, "output path prefix")->required();

    auto* ben = app.add_subcommand("bench", "run a batch experiment grid");
    ben->fallthrough();
    std::string b_config, b_out_dir;
    bool b_omit_timing = false, b_self_audit = false, b_timing_serial = false;
    ben->add_option("--config", b_config, "batch config JSON")->required();
    ben->add_option("--out-dir", b_out_dir, "directory for the CSV outputs")->required();
    ben->add_flag("--omit-timing", b_omit_timing,
                  "write 0 for elapsed_s so outputs are byte-reproducible");
    ben->add_flag("--self-audit", b_self_audit,
                  "recompute the aggregate CSV from the per-instance CSV and compare");
    ben->add_flag("--timing-serial", b_timing_serial,
                  "accepted for compatibility; instances always run one at a time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (rep->parsed()) {
            const auto inst = load_instance(edges, skills, wpath, team_ids, out_ids, safety);
            return run_replace(inst, algorithm, bound, pool_cap, seed, threads, as_json);
        }
        if (curv->parsed()) {
            const auto inst =
                load_instance(c_edges, c_skills, c_wpath, c_team_ids, c_out_ids, safety);
            return run_curvature(inst, c_pool_cap, c_subsample, seed, as_json);
        }
        if (gen->parsed()) {
            BAConfig cfg;
            cfg.n = g_n;
            cfg.attach = g_attach;
            cfg.skills = g_skills;
            cfg.rate = g_rate;
            cfg.seed = seed;
            const auto net = generate_ba(cfg);
            const auto W = SkillRelevance::ones(net.skill_count());
            const auto paths = write_network_files(net, W, g_out);
            const long m = net.edge_count();
            const double density =
                2.0 * static_cast<double>(m) /
                (static_cast<double>(net.node_count()) * (net.node_count() - 1));
            if (as_json) {
                const json out{{"n", net.node_count()},
                               {"edges", m},
                               {"density", density},
                               {"files",
                                {{"edges", paths.edges},
                                 {"skills", paths.skills},
                                 {"relevance", paths.relevance}}}};
                std::cout << out.dump(2) << '\n';
            } else {
                std::cout << "nodes: " << net.node_count() << '\n'
                          << "edges: " << m << '\n'
                          << "density: " << format_double(density) << '\n'
                          << "wrote " << paths.edges << ' ' << paths.skills << ' '
                          << paths.relevance << '\n';
            }
            return 0;
        }
        if (ing->parsed()) {
            int malformed = 0;
            const auto records = read_records_file(i_records, &malformed);
            const auto mode = i_mode == "count" ? SkillMode::count : SkillMode::decay;
            const auto res = ingest_records(records, mode, i_decay_base);
            const auto W = SkillRelevance::ones(res.net.skill_count());
            const auto paths = write_network_files(res.net, W, i_out, res.skills);
            if (as_json) {
                const json out{{"nodes", res.net.node_count()},
                               {"edges", res.net.edge_count()},
                               {"skills", res.skills},
                               {"skipped_records", res.skipped},
                               {"malformed_lines", malformed},
                               {"files",
                                {{"edges", paths.edges},
                                 {"skills", paths.skills},
                                 {"relevance", paths.relevance}}}};
                std::cout << out.dump(2) << '\n';
            } else {
                std::cout << "nodes: " << res.net.node_count() << '\n'
                          << "edges: " << res.net.edge_count() << '\n'
                          << "skills: " << res.skills.size() << '\n'
                          << "skipped records: " << res.skipped << " (plus " << malformed
                          << " malformed lines)" << '\n'
                          << "wrote " << paths.edges << ' ' << paths.skills << ' '
                          << paths.relevance << '\n';
            }
            return 0;
        }
        if (ben->parsed()) {
            const auto cfg = parse_batch_config_file(b_config);
            std::filesystem::create_directories(b_out_dir);
            const BenchPaths paths{b_out_dir + "/per_instance.csv", b_out_dir + "/aggregate.csv"};
            BenchOptions options;
            options.threads = threads;
            options.omit_timing = b_omit_timing;
            options.self_audit = b_self_audit;
            const auto summary = run_bench(cfg, paths, options, &std::cerr);
            if (as_json) {
                const json out{{"instances", summary.instances},
                               {"rows", summary.rows},
                               {"errors", summary.errors},
                               {"audit_ok", summary.audit_ok},
                               {"per_instance", paths.per_instance},
                               {"aggregate", paths.aggregate}};
                std::cout << out.dump(2) << '\n';
            } else {
                std::cout << "instances: " << summary.instances << '\n'
                          << "rows: " << summary.rows << '\n'
                          << "error rows: " << summary.errors << '\n'
                          << "wrote " << paths.per_instance << " and " << paths.aggregate << '\n';
                if (b_self_audit)
                    std::cout << "self-audit: " << (summary.audit_ok ? "ok" : "MISMATCH") << '\n';
            }
            return summary.audit_ok ? 0 : 3;
        }
    } catch (const ReportedError&) {
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
