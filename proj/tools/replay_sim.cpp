// Copyright (c) the replay-sim authors.
// SPDX-License-Identifier: Apache-2.0
//
// replay-sim: derive event-flow graphs from versioned GUI models, generate
// test suites, classify their replayability across versions, and report.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "replaysim/replaysim.hpp"

namespace fs = std::filesystem;
using namespace replaysim;

namespace {

struct GlobalOpts {
    bool lenient = false;
    unsigned workers = 1;

    bool strict() const {
        if (lenient) return false;
        const char* env = std::getenv("REPLAY_SIM_STRICT");
        return !(env && std::string(env) == "0");
    }
};

std::string strip_json_suffix(const std::string& path) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return path.substr(0, path.size() - 5);
    return path;
}

// Outputs may not overwrite inputs.
int check_distinct_output(const std::string& out, std::initializer_list<std::string> inputs) {
    for (const auto& in : inputs) {
        std::error_code ec;
        bool same = !in.empty() && fs::exists(in) && fs::exists(out) &&
                    fs::equivalent(in, out, ec) && !ec;
        if (in == out || same) {
            std::cerr << "usage error: output path \"" << out << "\" is also an input\n"
                      << "choose an output path distinct from every input\n";
            return 2;
        }
    }
    return 0;
}

void ensure_parent_dir(const std::string& path) {
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

// ---------------------------------------------------------------------------
// derive-efg
// ---------------------------------------------------------------------------

int run_derive_efg(const GlobalOpts& g, const std::string& model_path, const std::string& out) {
    GuiModel model = load_gui_model(model_path, g.strict());
    EventFlowGraph efg = derive_efg(model);
    ensure_parent_dir(out);
    write_efg(efg, out);
    std::cout << out << ": " << efg.event_count() << " events, " << efg.edge_count() << " edges\n";
    return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int run_generate(const GlobalOpts& g, const std::string& model_path, bool length2_all,
                 const std::vector<int>& random_lengths, std::uint64_t count, std::uint64_t seed,
                 const std::string& out) {
    GuiModel model = load_gui_model(model_path, g.strict());
    EventFlowGraph efg = derive_efg(model);
    const std::string& label = model.version_label;

    struct Planned {
        TestSuite suite;
        std::string suffix;
    };
    std::vector<Planned> planned;
    if (length2_all) planned.push_back({generate_all_length2(efg, label), "all2"});
    for (int length : random_lengths)
        planned.push_back({generate_random(efg, length, count,
                                           derive_group_seed(seed, label, length), label),
                           "rand" + std::to_string(length)});

    if (planned.size() == 1) {
        ensure_parent_dir(out);
        write_suite_group(label, planned[0].suite.groups[0], out);
        std::cout << out << ": " << planned[0].suite.groups[0].cases.size() << " cases\n";
    } else {
        std::string stem = strip_json_suffix(out);
        for (const auto& p : planned) {
            std::string path = stem + "." + p.suffix + ".json";
            ensure_parent_dir(path);
            write_suite_group(label, p.suite.groups[0], path);
            std::cout << path << ": " << p.suite.groups[0].cases.size() << " cases\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int run_synth(const GlobalOpts& g, const std::string& model_path, const std::string& script_path,
              const std::string& out_model, const std::string& out_mapping) {
    GuiModel model = load_gui_model(model_path, g.strict());
    MutationScript script = load_mutation_script(script_path, g.strict());
    auto [next, mapping] = mutate(model, script.ops, script.new_label);
    ensure_parent_dir(out_model);
    write_gui_model(next, out_model);
    ensure_parent_dir(out_mapping);
    write_mapping(mapping, out_mapping);
    std::cout << out_model << ": version " << next.version_label << ", " << mapping.pairs.size()
              << " mapped widgets\n";
    return 0;
}

// ---------------------------------------------------------------------------
// classify / chain
// ---------------------------------------------------------------------------

int run_classify(const GlobalOpts& g, const std::string& old_path, const std::string& new_path,
                 const std::string& map_path, const std::string& suite_path,
                 const std::string& out) {
    VersionContext oldv(load_gui_model(old_path, g.strict()));
    VersionContext newv(load_gui_model(new_path, g.strict()));
    EquivalenceMapping mapping = load_mapping(map_path, oldv.model, newv.model, g.strict());
    TestSuite suite = load_suite_group(suite_path, g.strict());
    if (suite.origin_version != oldv.model.version_label)
        throw VersionMismatch("suite originates from \"" + suite.origin_version +
                              "\" but the old model is \"" + oldv.model.version_label + "\"");

    std::string jsonl;
    std::size_t n = 0;
    for (const auto& group : suite.groups) {
        auto records =
            classify_group_pair(group, suite.origin_version, oldv, newv, mapping, g.workers);
        jsonl += records_to_jsonl(records);
        n += records.size();
    }
    ensure_parent_dir(out);
    replaysim::detail::write_file(out, jsonl);
    std::cout << out << ": " << n << " records\n";
    return 0;
}

int run_chain(const GlobalOpts& g, const std::string& manifest_path, const std::string& suite_path,
              const std::string& out) {
    ChainContext chain(load_chain(manifest_path, g.strict()));
    TestSuite suite = load_suite_group(suite_path, g.strict());
    if (suite.origin_version != chain.versions.front().model.version_label)
        throw VersionMismatch("suite originates from \"" + suite.origin_version +
                              "\" but the chain starts at \"" +
                              chain.versions.front().model.version_label + "\"");

    std::string jsonl;
    std::size_t n = 0;
    for (const auto& group : suite.groups) {
        classify_group_chain(group, chain, 0, g.workers,
                             [&](const TestCase& tc, const std::vector<Category>& cats) {
                                 for (std::size_t k = 0; k < cats.size(); ++k) {
                                     ClassificationRecord r{
                                         tc.case_id, suite.origin_version,
                                         chain.versions[k + 1].model.version_label, group.length,
                                         cats[k]};
                                     jsonl += record_to_jsonl(r);
                                     jsonl += '\n';
                                     ++n;
                                 }
                             });
    }
    ensure_parent_dir(out);
    replaysim::detail::write_file(out, jsonl);
    std::cout << out << ": " << n << " records\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

std::vector<TestSuite> load_suites_dir(const std::string& dir, bool strict) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no suite files (*.json) found in " + dir);

    std::map<std::string, TestSuite> by_version;
    for (const auto& path : files) {
        TestSuite loaded = load_suite_group(path, strict);
        by_version[loaded.origin_version].merge(std::move(loaded));
    }
    std::vector<TestSuite> out;
    for (auto& [label, suite] : by_version) out.push_back(std::move(suite));
    return out;
}

int run_report(const GlobalOpts& g, const std::string& mode, const std::string& manifest_path,
               const std::string& suites_dir, const std::string& format, const std::string& out) {
    ChainContext chain(load_chain(manifest_path, g.strict()));
    std::vector<TestSuite> suites = load_suites_dir(suites_dir, g.strict());

    auto dists = mode == "cross" ? cross_sectional(chain, suites, g.workers)
                                 : longitudinal(chain, suites, g.workers);
    ensure_parent_dir(out);
    emit_report(dists, format == "csv" ? ReportFormat::CSV : ReportFormat::SVG, out);
    std::cout << out << ": " << dists.size() << " distribution rows\n";
    return 0;
}

// ---------------------------------------------------------------------------
// all: generate + classify + report per seed, with replication means
// ---------------------------------------------------------------------------

int run_all(const GlobalOpts& g, const std::string& manifest_path, const std::string& outdir,
            bool length2_all, const std::vector<int>& random_lengths, std::uint64_t count,
            const std::vector<std::uint64_t>& seeds, bool svg) {
    ChainContext chain(load_chain(manifest_path, g.strict()));
    GenerationParams params;
    params.length2_all = length2_all;
    params.random_lengths = random_lengths;
    params.count = count;

    std::vector<std::vector<CategoryDistribution>> cross_runs, long_runs;
    for (auto seed : seeds) {
        auto suites = generate_suites(chain, params, seed);
        std::string suite_dir = outdir + "/suites/seed" + std::to_string(seed);
        fs::create_directories(suite_dir);
        for (const auto& suite : suites)
            for (const auto& group : suite.groups) {
                std::string name = suite.origin_version + "." +
                                   (group.seed ? "rand" + std::to_string(group.length) : "all2") +
                                   ".json";
                write_suite_group(suite.origin_version, group, suite_dir + "/" + name);
            }

        cross_runs.push_back(cross_sectional(chain, suites, g.workers));
        long_runs.push_back(longitudinal(chain, suites, g.workers));
        std::string tag = "seed" + std::to_string(seed);
        emit_report(cross_runs.back(), ReportFormat::CSV, outdir + "/cross." + tag + ".csv");
        emit_report(long_runs.back(), ReportFormat::CSV, outdir + "/long." + tag + ".csv");
    }

    const auto& cross_final = seeds.size() > 1 ? mean_distributions(cross_runs) : cross_runs[0];
    const auto& long_final = seeds.size() > 1 ? mean_distributions(long_runs) : long_runs[0];
    if (seeds.size() > 1) {
        emit_report(cross_final, ReportFormat::CSV, outdir + "/cross.mean.csv");
        emit_report(long_final, ReportFormat::CSV, outdir + "/long.mean.csv");
    }
    if (svg) {
        emit_report(cross_final, ReportFormat::SVG, outdir + "/cross.svg");
        emit_report(long_final, ReportFormat::SVG, outdir + "/long.svg");
    }
    std::cout << outdir << ": " << seeds.size() << " seed run(s), "
              << (chain.size() - 1) << " version pairs\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GUI test-case replayability simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_flag("--lenient", g.lenient,
                 "accept unknown keys in input files (REPLAY_SIM_STRICT=0 does the same)");
    app.add_option("--workers", g.workers, "worker threads; affects wall time only")
        ->check(CLI::PositiveNumber);

    // derive-efg
    auto* cmd_efg = app.add_subcommand("derive-efg", "derive the event-flow graph of a model");
    std::string efg_model, efg_out;
    cmd_efg->add_option("model", efg_model, "GUI model file")->required();
    cmd_efg->add_option("-o,--out", efg_out, "output EFG JSON")->required();

    // generate
    auto* cmd_gen = app.add_subcommand("generate", "generate test suites for one model");
    std::string gen_model, gen_out;
    bool gen_all2 = false;
    std::vector<int> gen_lengths;
    std::uint64_t gen_count = 10000, gen_seed = 0;
    cmd_gen->add_option("model", gen_model, "GUI model file")->required();
    cmd_gen->add_flag("--length2-all", gen_all2, "all valid length-2 cases (one per EFG edge)");
    auto* gen_rand = cmd_gen->add_option("--random", gen_lengths,
                                         "random-walk case lengths (e.g. --random 3,4,5)")
                         ->delimiter(',')
                         ->check(CLI::Range(2, 5));
    cmd_gen->add_option("--count", gen_count, "random cases per length (default 10000)");
    auto* gen_seed_opt =
        cmd_gen->add_option("--seed", gen_seed, "base seed; required with --random");
    gen_rand->needs(gen_seed_opt);
    cmd_gen->add_option("-o,--out", gen_out, "output path (stem when several groups)")->required();

    // synth
    auto* cmd_synth = app.add_subcommand("synth", "apply a mutation script to a model");
    std::string synth_model, synth_script, synth_out, synth_map;
    cmd_synth->add_option("model", synth_model, "GUI model file")->required();
    cmd_synth->add_option("--script", synth_script, "mutation script JSON")->required();
    cmd_synth->add_option("-o,--out", synth_out, "output model file")->required();
    cmd_synth->add_option("-m,--mapping", synth_map, "output ground-truth mapping file")
        ->required();

    // classify
    auto* cmd_cls = app.add_subcommand("classify", "classify a suite against the next version");
    std::string cls_old, cls_new, cls_map, cls_suite, cls_out;
    cmd_cls->add_option("--old", cls_old, "old model file")->required();
    cmd_cls->add_option("--new", cls_new, "new model file")->required();
    cmd_cls->add_option("--map", cls_map, "equivalence mapping file")->required();
    cmd_cls->add_option("--suite", cls_suite, "suite file generated for the old model")
        ->required();
    cmd_cls->add_option("-o,--out", cls_out, "output JSONL records")->required();

    // chain
    auto* cmd_chain = app.add_subcommand("chain", "classify a suite along a whole version chain");
    std::string chain_manifest, chain_suite, chain_out;
    cmd_chain->add_option("--manifest", chain_manifest, "chain manifest JSON")->required();
    cmd_chain->add_option("--suite", chain_suite, "suite file for the chain's first version")
        ->required();
    cmd_chain->add_option("-o,--out", chain_out, "output JSONL records")->required();

    // report
    auto* cmd_rep = app.add_subcommand("report", "aggregate suites into a CSV or SVG report");
    std::string rep_mode, rep_manifest, rep_suites, rep_format = "csv", rep_out;
    cmd_rep->add_option("--mode", rep_mode, "cross | long")
        ->required()
        ->check(CLI::IsMember({"cross", "long"}));
    cmd_rep->add_option("--manifest", rep_manifest, "chain manifest JSON")->required();
    cmd_rep->add_option("--suites", rep_suites, "directory of suite files")->required();
    cmd_rep->add_option("--format", rep_format, "csv | svg")
        ->check(CLI::IsMember({"csv", "svg"}));
    cmd_rep->add_option("-o,--out", rep_out, "output file")->required();

    // all
    auto* cmd_all = app.add_subcommand("all", "end-to-end: generate, classify, report");
    std::string all_manifest, all_outdir;
    bool all_no_length2 = false, all_svg = false;
    std::vector<int> all_lengths{3, 4, 5};
    std::uint64_t all_count = 10000;
    std::vector<std::uint64_t> all_seeds;
    cmd_all->add_option("--manifest", all_manifest, "chain manifest JSON")->required();
    cmd_all->add_option("--outdir", all_outdir, "output directory")->required();
    cmd_all->add_option("--lengths", all_lengths, "random case lengths")
        ->delimiter(',')
        ->check(CLI::Range(2, 5));
    cmd_all->add_option("--count", all_count, "random cases per length (default 10000)");
    cmd_all->add_option("--seeds", all_seeds, "seeds, one replication run each")
        ->delimiter(',')
        ->required();
    cmd_all->add_flag("--no-length2", all_no_length2, "skip the exhaustive length-2 suite");
    cmd_all->add_flag("--svg", all_svg, "also emit SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n"
                  << "run 'replay-sim --help' or 'replay-sim <subcommand> --help' for usage\n";
        return 2;
    }

    try {
        if (cmd_efg->parsed()) {
            if (int rc = check_distinct_output(efg_out, {efg_model})) return rc;
            return run_derive_efg(g, efg_model, efg_out);
        }
        if (cmd_gen->parsed()) {
            if (!gen_all2 && gen_lengths.empty()) {
                std::cerr << "usage error: nothing to generate\n"
                          << "pass --length2-all and/or --random <lengths> --seed <seed>\n";
                return 2;
            }
            if (int rc = check_distinct_output(gen_out, {gen_model})) return rc;
            return run_generate(g, gen_model, gen_all2, gen_lengths, gen_count, gen_seed, gen_out);
        }
        if (cmd_synth->parsed()) {
            if (int rc = check_distinct_output(synth_out, {synth_model, synth_script})) return rc;
            if (int rc = check_distinct_output(synth_map, {synth_model, synth_script, synth_out}))
                return rc;
            return run_synth(g, synth_model, synth_script, synth_out, synth_map);
        }
        if (cmd_cls->parsed()) {
            if (int rc = check_distinct_output(cls_out, {cls_old, cls_new, cls_map, cls_suite}))
                return rc;
            return run_classify(g, cls_old, cls_new, cls_map, cls_suite, cls_out);
        }
        if (cmd_chain->parsed()) {
            if (int rc = check_distinct_output(chain_out, {chain_manifest, chain_suite}))
                return rc;
            return run_chain(g, chain_manifest, chain_suite, chain_out);
        }
        if (cmd_rep->parsed()) {
            if (int rc = check_distinct_output(rep_out, {rep_manifest})) return rc;
            return run_report(g, rep_mode, rep_manifest, rep_suites, rep_format, rep_out);
        }
        if (cmd_all->parsed())
            return run_all(g, all_manifest, all_outdir, !all_no_length2, all_lengths, all_count,
                           all_seeds, all_svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
