#pragma once

#include "mqne/block_graph.hpp"
#include "mqne/trainer.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mqne {

/**
 * Graph-walk evolution configuration. Generation 1 holds `offspring` random
 * paths of `init_length` nodes; each later generation extends every survivor
 * with `offspring` independent random segments of `segment_length` nodes.
 * The run stops when the best fitness reaches `fitness_threshold` or after
 * `max_generations` generations. The schedules optionally override the
 * per-generation offspring/survivor counts.
 */
struct MqneConfig {
    int offspring = 5;              // n_i
    int survivors = 1;              // t_i
    int init_length = 5;            // l
    int segment_length = 2;         // l'
    double fitness_threshold = 1.0; // f_c
    int max_generations = 10;       // g_c
    StartPolicy start;
    TrainConfig train;
    std::uint64_t master_seed = 0;
    std::vector<int> offspring_schedule;
    std::vector<int> survivors_schedule;

    int offspring_at(int generation) const;
    int survivors_at(int generation) const;
    void validate() const;
};

struct IndividualLog {
    Path path; // graph path, or raw block sequence for the genetic baseline
    int param_count = 0;
    int rot_gates = 0;
    int crx_gates = 0;
    double fitness = 0;
    bool failed = false;
};

struct GenerationLog {
    int generation = 0;
    std::vector<IndividualLog> individuals;
    double best_fitness = 0;
    double best_so_far = 0;
    double wall_time_s = 0;
};

struct MqneResult {
    TrainedModel best_model;
    Path best_path;
    double best_fitness = 0;
    bool reached_threshold = false;
    std::size_t evaluations = 0;
    std::vector<GenerationLog> logs;
};

/**
 * The full evolution loop: sample, compile, train, score on the Validation
 * partition, select, extend. Training failures (non-finite loss) score
 * fitness 0 and are flagged in the logs rather than aborting the run. All
 * randomness derives from cfg.master_seed; a repeated run reproduces the
 * logs exactly for any thread count.
 */
MqneResult run_mqne(const BlockGraph &graph, const Dataset &data,
                    const MqneConfig &cfg);

using BlockSequence = std::vector<std::uint32_t>;

/// One-point crossover on raw block sequences: o1 = c1[..cut1] + c2[cut2..],
/// o2 = c2[..cut2] + c1[cut1..]. Connection rules are deliberately not
/// enforced. Throws std::out_of_range when a cut exceeds its sequence.
std::pair<BlockSequence, BlockSequence>
crossover(const BlockSequence &c1, const BlockSequence &c2, std::size_t cut1,
          std::size_t cut2);

/// Independently replaces each position, with probability p, by a uniformly
/// random different non-empty library block.
BlockSequence mutation(const BlockSequence &c, double p, const BlockLibrary &lib,
                       RngStream &rng);

struct GeneticConfig {
    int population = 9; // n_i
    int survivors = 3;  // t_i
    double mutation_prob = 0.1;
    int circuit_length = 5;
    double fitness_threshold = 1.0;
    int max_generations = 10;
    long max_evaluations = 0; ///< optional total evaluation cap; 0 = unlimited
    TrainConfig train;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct GeneticResult {
    TrainedModel best_model;
    BlockSequence best_sequence;
    double best_fitness = 0;
    bool reached_threshold = false;
    std::size_t evaluations = 0;
    std::vector<GenerationLog> logs;
};

/**
 * Baseline search over raw block sequences (no graph, no connection rules):
 * random initial population, then per generation crossover of random
 * survivor pairs followed by mutation. Deterministic under master_seed.
 */
GeneticResult run_genetic(const BlockLibrary &lib, const Dataset &data,
                          const GeneticConfig &cfg);

} // namespace mqne
