#pragma once

#include "mqne/datasets.hpp"
#include "mqne/simulator.hpp"

#include <cstdint>

namespace mqne {

/// Clamp added inside the logs of the cross-entropy loss so exact 0/1
/// probabilities stay finite.
inline constexpr double kLossClamp = 1e-12;

/// Cross-entropy of the readout probabilities against a one-hot label:
/// -a1 log(g1 + eps) - a2 log(g2 + eps).
double loss(double g1, double g2, const std::array<double, 2> &label);

/// Decision rule: class 0 when g1 >= g2 (ties resolve to class 0), else 1.
int predict(double g1, double g2);

enum class InitPolicy : std::uint8_t {
    RandomPerRun, ///< angles uniform in [0, 2pi) from this run's seed
    FixedSeed,    ///< angles are the prefix of one fixed seed stream, so a
                  ///< longer circuit reuses a shorter circuit's angles
    Inherit       ///< prefix copied from a parent's trained angles, new
                  ///< angles start at 0 (identity gates)
};

std::string to_string(InitPolicy p);
InitPolicy init_policy_from_string(const std::string &s);

struct TrainConfig {
    double learning_rate = 0.0015;
    int batch_size = 30;
    int epochs = 200;
    long max_updates = 0; ///< optional cap on optimizer steps; 0 = epochs only
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    InitPolicy init_policy = InitPolicy::RandomPerRun;
    std::uint64_t init_seed = 0;
    std::uint64_t shuffle_seed = 0;
    int threads = 1;

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0;
    double train_acc = 0;
    double val_loss = 0;
    double val_acc = 0;
};

struct TrainedModel {
    ParamCircuit circuit;
    AngleVector theta;
    std::vector<EpochStats> history;
};

struct FitnessReport {
    double fitness = 0;
    Partition partition = Partition::Validation;
    std::size_t correct = 0;
    std::size_t total = 0;
};

/// Initial angle vector for a circuit under the config's policy.
/// `inherited_prefix` is required by InitPolicy::Inherit and ignored
/// otherwise; it must not be longer than the circuit's parameter count.
AngleVector initial_angles(const ParamCircuit &circuit, const TrainConfig &cfg,
                           const AngleVector *inherited_prefix = nullptr);

/**
 * Mini-batch Adam on the clamped cross-entropy over the Train partition.
 * Per-sample gradients within a batch are evaluated in parallel and reduced
 * in sample order, so the result is bit-identical for any thread count.
 * Records per-epoch train stats (running means over the epoch's batches) and
 * full validation stats. Throws TrainError with the epoch/batch when the
 * loss goes non-finite.
 */
TrainedModel train(const ParamCircuit &circuit, const Dataset &data,
                   const TrainConfig &cfg,
                   const AngleVector *inherited_prefix = nullptr);

/// Classification accuracy of the trained model over a partition.
FitnessReport fitness(const TrainedModel &model, const Dataset &data,
                      Partition partition, int threads = 1);

/// Mean loss and accuracy of (circuit, theta) over a partition.
std::pair<double, double> evaluate(const ParamCircuit &circuit,
                                   const AngleVector &theta, const Dataset &data,
                                   Partition partition, int threads = 1);

} // namespace mqne
