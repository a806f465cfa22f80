#pragma once

#include "mqne/evolution.hpp"
#include "mqne/io.hpp"

#include <string>

namespace mqne {

/// Exit codes of the `evolve` command.
enum class RunStatus : int {
    ThresholdReached = 0,
    BudgetExhausted = 3,
};

/**
 * One experiment = one JSON config file (schema v1, documented in the
 * README). Every field has a default; flags on the CLI override file values.
 * The master seed is mandatory so no run ever seeds from the clock.
 */
struct RunConfig {
    /// Sentinel start node meaning "the all-rotations block, resolved after
    /// the graph is built".
    static constexpr std::uint32_t kStartAllRotations = UINT32_MAX;

    RunConfig() { mqne.start.block = kStartAllRotations; }

    int version = 1;
    std::string task = "spt"; // spt | mnist | cancer
    std::string algorithm = "mqne"; // mqne | genetic
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output_dir = "run-out";
    int threads = 1;

    // library / graph
    int qubits = 0; // 0 = derived from the task
    LibraryMode library_mode = LibraryMode::Full;
    int cutoff = 0;
    bool exclude_empty = true;

    // dataset source (one of)
    std::string dataset_cache;
    int spt_spins = 8;
    std::size_t spt_samples = 2000;
    double spt_lambda_min = 0.0;
    double spt_lambda_max = 2.0;
    std::string mnist_images, mnist_labels;
    std::array<int, 2> mnist_digits = {1, 9};
    std::string cancer_csv;
    std::array<std::size_t, 3> split_counts = {0, 0, 0}; // 0,0,0 = task default

    MqneConfig mqne;
    GeneticConfig genetic;

    static RunConfig from_json_text(const std::string &text);
    static RunConfig from_file(const std::string &file);
    std::string to_json_text() const; // fully resolved echo for the manifest

    int resolved_qubits() const;
    std::array<std::size_t, 3> resolved_split() const;
    void validate() const;
};

struct RunOutcome {
    RunStatus status = RunStatus::BudgetExhausted;
    double best_fitness = 0;
    int generations = 0;
    std::size_t evaluations = 0;
    std::string manifest_file;
};

/// Prepares (or loads) the dataset named by the config.
Dataset prepare_dataset(const RunConfig &cfg);

/**
 * Runs the configured experiment end to end and writes the report bundle
 * into cfg.output_dir: manifest.json, generations.csv, best_history.csv,
 * best_path.txt, best_model.txt. The manifest records the resolved config,
 * seed streams, library/graph/dataset content hashes and one content hash
 * per emitted file, so a bundle can be re-derived bit-identically.
 */
RunOutcome run_evolve(const RunConfig &cfg);

} // namespace mqne
