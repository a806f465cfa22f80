#include "mqne/evolution.hpp"

#include "mqne/errors.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace mqne {

int MqneConfig::offspring_at(int generation) const {
    const std::size_t i = std::size_t(generation - 1);
    return i < offspring_schedule.size() ? offspring_schedule[i] : offspring;
}

int MqneConfig::survivors_at(int generation) const {
    const std::size_t i = std::size_t(generation - 1);
    return i < survivors_schedule.size() ? survivors_schedule[i] : survivors;
}

void MqneConfig::validate() const {
    for (int g = 1; g <= max_generations; ++g) {
        if (offspring_at(g) < 1 || survivors_at(g) < 1 ||
            survivors_at(g) >= offspring_at(g)) {
            throw std::invalid_argument(
                "MqneConfig: need 1 <= survivors < offspring in every generation");
        }
    }
    if (init_length < 1 || segment_length < 1) {
        throw std::invalid_argument("MqneConfig: path lengths must be >= 1");
    }
    if (fitness_threshold < 0 || fitness_threshold > 1) {
        throw std::invalid_argument("MqneConfig: fitness_threshold must be in [0,1]");
    }
    if (max_generations < 1) {
        throw std::invalid_argument("MqneConfig: max_generations must be >= 1");
    }
    train.validate();
}

namespace {

struct Evaluated {
    TrainedModel model;
    double fitness = 0;
    bool failed = false;
};

/// Train one circuit and score it on the Validation partition; a training
/// failure scores 0 instead of aborting the run.
Evaluated evaluate_individual(const ParamCircuit &circuit, const Dataset &data,
                              const TrainConfig &cfg,
                              const AngleVector *inherited_prefix) {
    Evaluated out;
    try {
        out.model = train(circuit, data, cfg, inherited_prefix);
        out.fitness = fitness(out.model, data, Partition::Validation,
                              cfg.threads).fitness;
    } catch (const TrainError &) {
        out.model.circuit = circuit;
        out.model.theta = initial_angles(circuit, cfg, inherited_prefix);
        out.fitness = 0;
        out.failed = true;
    }
    return out;
}

/// Survivor selection: best fitness first, ties resolved by lower index.
std::vector<std::size_t> select_top(const std::vector<double> &fitness, int count) {
    std::vector<std::size_t> order(fitness.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fitness[a] > fitness[b];
    });
    order.resize(std::min<std::size_t>(order.size(), std::size_t(count)));
    return order;
}

IndividualLog log_of(const ParamCircuit &circuit, const Path &path,
                     const Evaluated &ev) {
    IndividualLog log;
    log.path = path;
    log.param_count = circuit.param_count();
    log.rot_gates = circuit.rot_gates;
    log.crx_gates = circuit.crx_gates;
    log.fitness = ev.fitness;
    log.failed = ev.failed;
    return log;
}

} // namespace

MqneResult run_mqne(const BlockGraph &graph, const Dataset &data,
                    const MqneConfig &cfg) {
    cfg.validate();
    const BlockLibrary &lib = graph.library();

    MqneResult result;
    result.best_fitness = -1.0; // first evaluated individual always takes over
    std::vector<Path> population;
    std::vector<Evaluated> evaluated;
    std::vector<double> fitnesses;

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        const auto t0 = std::chrono::steady_clock::now();
        const int n = cfg.offspring_at(gen);

        std::vector<Path> next;
        std::vector<const AngleVector *> parents;
        if (gen == 1) {
            for (int i = 0; i < n; ++i) {
                RngStream rng = derive_stream(cfg.master_seed, "path", 1, i);
                next.push_back(random_path(graph, std::size_t(cfg.init_length),
                                           cfg.start, rng));
                parents.push_back(nullptr);
            }
        } else {
            const auto survivors = select_top(fitnesses, cfg.survivors_at(gen - 1));
            for (std::size_t s = 0; s < survivors.size(); ++s) {
                for (int i = 0; i < n; ++i) {
                    RngStream rng = derive_stream(cfg.master_seed, "path", gen,
                                                  s * std::size_t(n) + i);
                    next.push_back(extend_path(graph, population[survivors[s]],
                                               std::size_t(cfg.segment_length), rng));
                    parents.push_back(&evaluated[survivors[s]].model.theta);
                }
            }
        }

        std::vector<Evaluated> next_eval(next.size());
        std::vector<double> next_fitness(next.size());
        GenerationLog glog;
        glog.generation = gen;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const ParamCircuit circuit = compile_path(next[i], lib);
            TrainConfig tc = cfg.train;
            tc.shuffle_seed = derive_seed(cfg.master_seed, "batch", gen, i);
            tc.init_seed = tc.init_policy == InitPolicy::FixedSeed
                               ? derive_seed(cfg.master_seed, "theta-fixed")
                               : derive_seed(cfg.master_seed, "theta", gen, i);
            const AngleVector *prefix =
                tc.init_policy == InitPolicy::Inherit ? parents[i] : nullptr;
            next_eval[i] = evaluate_individual(circuit, data, tc, prefix);
            next_fitness[i] = next_eval[i].fitness;
            ++result.evaluations;
            glog.individuals.push_back(log_of(circuit, next[i], next_eval[i]));
            if (next_fitness[i] > result.best_fitness) {
                result.best_fitness = next_fitness[i];
                result.best_model = next_eval[i].model;
                result.best_path = next[i];
            }
        }

        population = std::move(next);
        evaluated = std::move(next_eval);
        fitnesses = std::move(next_fitness);

        const double gen_best =
            *std::max_element(fitnesses.begin(), fitnesses.end());
        glog.best_fitness = gen_best;
        glog.best_so_far = result.best_fitness;
        glog.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result.logs.push_back(std::move(glog));

        if (gen_best >= cfg.fitness_threshold) {
            result.reached_threshold = true;
            break;
        }
    }
    return result;
}

std::pair<BlockSequence, BlockSequence>
crossover(const BlockSequence &c1, const BlockSequence &c2, std::size_t cut1,
          std::size_t cut2) {
    if (cut1 > c1.size() || cut2 > c2.size()) {
        throw std::out_of_range("crossover: cut outside sequence");
    }
    BlockSequence o1(c1.begin(), c1.begin() + cut1);
    o1.insert(o1.end(), c2.begin() + cut2, c2.end());
    BlockSequence o2(c2.begin(), c2.begin() + cut2);
    o2.insert(o2.end(), c1.begin() + cut1, c1.end());
    return {std::move(o1), std::move(o2)};
}

namespace {

std::uint32_t random_nonempty_block(const BlockLibrary &lib, RngStream &rng) {
    const auto empty = lib.empty_index();
    for (;;) {
        const auto i = std::uint32_t(rng.uniform_index(lib.size()));
        if (!empty || i != *empty) {
            return i;
        }
    }
}

} // namespace

BlockSequence mutation(const BlockSequence &c, double p, const BlockLibrary &lib,
                       RngStream &rng) {
    if (p < 0 || p > 1) {
        throw std::invalid_argument("mutation: probability out of [0,1]");
    }
    BlockSequence out = c;
    for (std::uint32_t &node : out) {
        if (rng.uniform_real() < p) {
            std::uint32_t replacement = node;
            while (replacement == node) {
                replacement = random_nonempty_block(lib, rng);
            }
            node = replacement;
        }
    }
    return out;
}

void GeneticConfig::validate() const {
    if (population < 2 || survivors < 1 || survivors >= population) {
        throw std::invalid_argument(
            "GeneticConfig: need 1 <= survivors < population");
    }
    if (circuit_length < 1) {
        throw std::invalid_argument("GeneticConfig: circuit_length must be >= 1");
    }
    if (mutation_prob < 0 || mutation_prob > 1) {
        throw std::invalid_argument("GeneticConfig: mutation_prob out of [0,1]");
    }
    if (fitness_threshold < 0 || fitness_threshold > 1) {
        throw std::invalid_argument("GeneticConfig: fitness_threshold out of [0,1]");
    }
    if (max_generations < 1) {
        throw std::invalid_argument("GeneticConfig: max_generations must be >= 1");
    }
    train.validate();
}

GeneticResult run_genetic(const BlockLibrary &lib, const Dataset &data,
                          const GeneticConfig &cfg) {
    cfg.validate();
    GeneticResult result;
    result.best_fitness = -1.0;

    auto compile_sequence = [&](const BlockSequence &seq) {
        std::vector<GateBlock> blocks;
        blocks.reserve(seq.size());
        for (std::uint32_t n : seq) {
            blocks.push_back(lib.block(n));
        }
        ParamCircuit c = compile_blocks(lib.spec().k, std::move(blocks));
        c.source_path = seq;
        return c;
    };

    std::vector<BlockSequence> population;
    std::vector<double> fitnesses;

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t budget_left =
            cfg.max_evaluations > 0
                ? std::size_t(cfg.max_evaluations) - result.evaluations
                : std::size_t(cfg.population);

        std::vector<BlockSequence> next;
        if (gen == 1) {
            for (int i = 0; i < cfg.population && next.size() < budget_left; ++i) {
                RngStream rng = derive_stream(cfg.master_seed, "ga-init", i);
                BlockSequence seq(std::size_t(cfg.circuit_length));
                for (std::uint32_t &n : seq) {
                    n = random_nonempty_block(lib, rng);
                }
                next.push_back(std::move(seq));
            }
        } else {
            const auto survivors = select_top(fitnesses, cfg.survivors);
            RngStream ops = derive_stream(cfg.master_seed, "ga-ops", gen);
            while (next.size() < std::size_t(cfg.population) &&
                   next.size() < budget_left) {
                std::size_t a = ops.uniform_index(survivors.size());
                std::size_t b = ops.uniform_index(survivors.size());
                if (survivors.size() > 1) {
                    while (b == a) {
                        b = ops.uniform_index(survivors.size());
                    }
                }
                const BlockSequence &p1 = population[survivors[a]];
                const BlockSequence &p2 = population[survivors[b]];
                auto [o1, o2] = crossover(p1, p2, ops.uniform_index(p1.size() + 1),
                                          ops.uniform_index(p2.size() + 1));
                next.push_back(mutation(o1, cfg.mutation_prob, lib, ops));
                if (next.size() < std::size_t(cfg.population) &&
                    next.size() < budget_left) {
                    next.push_back(mutation(o2, cfg.mutation_prob, lib, ops));
                }
            }
        }
        if (next.empty()) {
            break; // evaluation budget exhausted
        }

        GenerationLog glog;
        glog.generation = gen;
        std::vector<double> next_fitness(next.size());
        std::vector<Evaluated> next_eval(next.size());
        for (std::size_t i = 0; i < next.size(); ++i) {
            const ParamCircuit circuit = compile_sequence(next[i]);
            TrainConfig tc = cfg.train;
            tc.shuffle_seed = derive_seed(cfg.master_seed, "ga-batch", gen, i);
            tc.init_seed = tc.init_policy == InitPolicy::FixedSeed
                               ? derive_seed(cfg.master_seed, "theta-fixed")
                               : derive_seed(cfg.master_seed, "ga-theta", gen, i);
            next_eval[i] = evaluate_individual(circuit, data, tc, nullptr);
            next_fitness[i] = next_eval[i].fitness;
            ++result.evaluations;
            Path as_path;
            as_path.nodes = next[i];
            glog.individuals.push_back(log_of(circuit, as_path, next_eval[i]));
            if (next_fitness[i] > result.best_fitness) {
                result.best_fitness = next_fitness[i];
                result.best_model = next_eval[i].model;
                result.best_sequence = next[i];
            }
        }

        population = std::move(next);
        fitnesses = std::move(next_fitness);

        const double gen_best =
            *std::max_element(fitnesses.begin(), fitnesses.end());
        glog.best_fitness = gen_best;
        glog.best_so_far = result.best_fitness;
        glog.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result.logs.push_back(std::move(glog));

        if (gen_best >= cfg.fitness_threshold) {
            result.reached_threshold = true;
            break;
        }
        if (cfg.max_evaluations > 0 &&
            result.evaluations >= std::size_t(cfg.max_evaluations)) {
            break;
        }
    }
    return result;
}

} // namespace mqne
