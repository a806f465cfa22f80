// Command-line front end: gate-block libraries, succession graphs, dataset
// preparation, evolution runs and bundle reports.

#include "mqne/errors.hpp"
#include "mqne/run.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace mqne;

int cmd_library(int k, const std::string &mode, int cutoff, bool no_empty,
                bool count_only, std::size_t max_blocks, const std::string &out) {
    LibrarySpec spec;
    spec.k = k;
    spec.mode = library_mode_from_string(mode);
    spec.cutoff = cutoff;
    spec.include_empty_block = !no_empty;
    const auto count = count_closed_form(spec);
    std::cout << count << "\n";
    if (count_only) {
        return 0;
    }
    try {
        const BlockLibrary lib = enumerate_library(spec, max_blocks);
        if (!out.empty()) {
            write_library(out, lib);
            std::cerr << "wrote " << lib.size() << " blocks to " << out << "\n";
        }
    } catch (const ResourceLimitError &e) {
        std::cerr << "refusing to enumerate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int cmd_graph(const std::string &library_file, bool include_empty,
              std::size_t max_nodes, int threads, const std::string &out) {
    const BlockLibrary lib = read_library(library_file);
    const BlockGraph graph = build_graph(lib, !include_empty, max_nodes, threads);
    std::cout << "nodes=" << graph.node_count() << " edges=" << graph.edge_count()
              << "\n";
    if (!out.empty()) {
        write_graph(out, graph);
        std::cerr << "wrote graph to " << out << "\n";
    }
    return 0;
}

int cmd_dataset(const RunConfig &cfg, const std::string &out) {
    Dataset ds = prepare_dataset(cfg);
    write_dataset_cache(out, ds);
    const auto counts = ds.partition_counts();
    std::cout << "samples=" << ds.samples.size() << " train=" << counts[0]
              << " validation=" << counts[1] << " test=" << counts[2]
              << " cache_hash=" << fnv_file_hex(out) << "\n";
    return 0;
}

int cmd_report(const std::string &bundle_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(bundle_dir);
    std::ifstream mf(dir / "manifest.json");
    if (!mf) {
        throw IoError("no manifest.json under " + bundle_dir);
    }
    nlohmann::json manifest = nlohmann::json::parse(mf);
    std::cout << "task:        " << manifest["config"]["task"].get<std::string>()
              << "\nalgorithm:   "
              << manifest["config"]["algorithm"].get<std::string>()
              << "\nseed:        " << manifest["config"]["seed"]
              << "\nstatus:      " << manifest["result"]["status"].get<std::string>()
              << "\nbest:        " << manifest["result"]["best_fitness"]
              << "\ngenerations: " << manifest["result"]["generations"] << "\n";

    std::ifstream gens(dir / "generations.csv");
    if (gens) {
        std::string line;
        std::getline(gens, line); // header
        std::map<int, std::pair<double, int>> best; // gen -> (best, count)
        while (std::getline(gens, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            const auto c3 = line.find(',', c2 + 1);
            const int gen = std::stoi(line.substr(0, c1));
            const double fit = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
            auto &[b, n] = best[gen];
            b = std::max(b, fit);
            ++n;
        }
        std::cout << "generation  population  best_fitness\n";
        for (const auto &[gen, stats] : best) {
            std::printf("%-11d %-11d %.6f\n", gen, stats.second, stats.first);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Markovian quantum neuroevolution toolkit"};
    app.require_subcommand(1);

    // library
    auto *lib_cmd = app.add_subcommand("library", "Enumerate a gate-block library");
    int lib_k = 9;
    std::string lib_mode = "full";
    int lib_cutoff = 0;
    bool lib_no_empty = false, lib_count_only = false;
    std::size_t lib_max = kDefaultMaxBlocks;
    std::string lib_out;
    lib_cmd->add_option("--qubits", lib_k, "Qubit count")->required();
    lib_cmd->add_option("--mode", lib_mode, "full|cutoff|minimal|nonadjacent");
    lib_cmd->add_option("--cutoff", lib_cutoff, "Max CRx gates (cutoff mode)");
    lib_cmd->add_flag("--no-empty", lib_no_empty, "Exclude the all-identity block");
    lib_cmd->add_flag("--count-only", lib_count_only,
                      "Print the closed-form count and stop");
    lib_cmd->add_option("--max-blocks", lib_max, "Enumeration size limit");
    lib_cmd->add_option("-o,--output", lib_out, "Library file to write");

    // graph
    auto *graph_cmd = app.add_subcommand("graph", "Build the succession graph");
    std::string graph_lib, graph_out;
    bool graph_include_empty = false;
    std::size_t graph_max = kDefaultMaxGraphNodes;
    int graph_threads = 1;
    graph_cmd->add_option("--library", graph_lib, "Library file")->required();
    graph_cmd->add_flag("--include-empty", graph_include_empty,
                        "Keep the all-identity block as a node");
    graph_cmd->add_option("--max-nodes", graph_max, "Node count limit");
    graph_cmd->add_option("--threads", graph_threads, "Row-parallel workers");
    graph_cmd->add_option("-o,--output", graph_out, "Adjacency-list file to write");

    // dataset
    auto *ds_cmd = app.add_subcommand("dataset", "Prepare and cache a dataset");
    std::string ds_task, ds_out = "dataset.mqds";
    int ds_spins = 8;
    std::size_t ds_samples = 2000;
    std::string ds_images, ds_labels, ds_csv, ds_digits = "1,9";
    std::vector<std::size_t> ds_split;
    std::uint64_t ds_seed = 1;
    ds_cmd->add_option("task", ds_task, "spt|mnist|cancer")->required();
    ds_cmd->add_option("--n,--spins", ds_spins, "Spin count (spt)");
    ds_cmd->add_option("--samples", ds_samples, "Sample count (spt)");
    ds_cmd->add_option("--images", ds_images, "IDX image file (mnist)");
    ds_cmd->add_option("--labels", ds_labels, "IDX label file (mnist)");
    ds_cmd->add_option("--digits", ds_digits, "Two digits, e.g. 1,9 (mnist)");
    ds_cmd->add_option("--csv", ds_csv, "WDBC csv file (cancer)");
    ds_cmd->add_option("--split", ds_split, "train val test counts")
        ->expected(3);
    ds_cmd->add_option("--seed", ds_seed, "Split shuffle seed");
    ds_cmd->add_option("-o,--output", ds_out, "Cache file to write");

    // evolve
    auto *ev_cmd = app.add_subcommand("evolve", "Run an evolution experiment");
    std::string ev_config, ev_baseline, ev_output;
    int ev_threads = 0;
    std::uint64_t ev_seed = 0;
    bool ev_seed_given = false;
    ev_cmd->add_option("--config", ev_config, "JSON run config")->required();
    ev_cmd->add_option("--baseline", ev_baseline,
                       "Override algorithm (e.g. 'genetic')");
    ev_cmd->add_option("--output-dir", ev_output, "Override output directory");
    ev_cmd->add_option("--threads", ev_threads, "Override worker count");
    ev_cmd->add_option("--seed", ev_seed, "Override master seed")
        ->each([&](const std::string &) { ev_seed_given = true; });

    // report
    auto *rep_cmd = app.add_subcommand("report", "Summarize a run bundle");
    std::string rep_dir;
    rep_cmd->add_option("bundle", rep_dir, "Bundle directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (lib_cmd->parsed()) {
            return cmd_library(lib_k, lib_mode, lib_cutoff, lib_no_empty,
                               lib_count_only, lib_max, lib_out);
        }
        if (graph_cmd->parsed()) {
            return cmd_graph(graph_lib, graph_include_empty, graph_max,
                             graph_threads, graph_out);
        }
        if (ds_cmd->parsed()) {
            RunConfig cfg;
            cfg.task = ds_task;
            cfg.seed = ds_seed;
            cfg.seed_set = true;
            cfg.spt_spins = ds_spins;
            cfg.spt_samples = ds_samples;
            cfg.mnist_images = ds_images;
            cfg.mnist_labels = ds_labels;
            cfg.cancer_csv = ds_csv;
            const auto comma = ds_digits.find(',');
            if (comma == std::string::npos) {
                throw IoError("--digits wants two comma-separated digits");
            }
            cfg.mnist_digits = {std::stoi(ds_digits.substr(0, comma)),
                                std::stoi(ds_digits.substr(comma + 1))};
            if (!ds_split.empty()) {
                cfg.split_counts = {ds_split[0], ds_split[1], ds_split[2]};
            }
            cfg.validate();
            return cmd_dataset(cfg, ds_out);
        }
        if (ev_cmd->parsed()) {
            RunConfig cfg = RunConfig::from_file(ev_config);
            if (!ev_baseline.empty()) {
                cfg.algorithm = ev_baseline;
            }
            if (!ev_output.empty()) {
                cfg.output_dir = ev_output;
            }
            if (ev_threads > 0) {
                cfg.threads = ev_threads;
            }
            if (ev_seed_given) {
                cfg.seed = ev_seed;
                cfg.seed_set = true;
            }
            const RunOutcome out = run_evolve(cfg);
            std::cout << "status=" << (out.status == RunStatus::ThresholdReached
                                           ? "threshold"
                                           : "budget")
                      << " best_fitness=" << out.best_fitness
                      << " generations=" << out.generations
                      << " evaluations=" << out.evaluations << "\n"
                      << "manifest: " << out.manifest_file << "\n";
            return static_cast<int>(out.status);
        }
        if (rep_cmd->parsed()) {
            return cmd_report(rep_dir);
        }
    } catch (const mqne::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
