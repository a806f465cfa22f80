#include "mqne/trainer.hpp"

#include "mqne/errors.hpp"
#include "mqne/parallel.hpp"
#include "mqne/rng.hpp"

#include <cmath>
#include <tuple>

namespace mqne {

double loss(double g1, double g2, const std::array<double, 2> &label) {
    return -label[0] * std::log(g1 + kLossClamp) -
           label[1] * std::log(g2 + kLossClamp);
}

int predict(double g1, double g2) { return g1 >= g2 ? 0 : 1; }

std::string to_string(InitPolicy p) {
    switch (p) {
    case InitPolicy::RandomPerRun:
        return "random";
    case InitPolicy::FixedSeed:
        return "fixed";
    case InitPolicy::Inherit:
        return "inherit";
    }
    return "?";
}

InitPolicy init_policy_from_string(const std::string &s) {
    if (s == "random") {
        return InitPolicy::RandomPerRun;
    }
    if (s == "fixed") {
        return InitPolicy::FixedSeed;
    }
    if (s == "inherit") {
        return InitPolicy::Inherit;
    }
    throw std::invalid_argument("unknown init policy: " + s);
}

void TrainConfig::validate() const {
    if (learning_rate <= 0) {
        throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    }
    if (epochs < 0 || max_updates < 0) {
        throw std::invalid_argument("TrainConfig: negative budget");
    }
}

AngleVector initial_angles(const ParamCircuit &circuit, const TrainConfig &cfg,
                           const AngleVector *inherited_prefix) {
    const std::size_t n = std::size_t(circuit.param_count());
    AngleVector theta(n, 0.0);
    switch (cfg.init_policy) {
    case InitPolicy::RandomPerRun:
    case InitPolicy::FixedSeed: {
        RngStream rng = derive_stream(cfg.init_seed, "theta");
        for (double &t : theta) {
            t = rng.uniform_angle();
        }
        break;
    }
    case InitPolicy::Inherit: {
        if (inherited_prefix == nullptr) {
            // no parent yet (first generation): fall back to per-run random
            RngStream rng = derive_stream(cfg.init_seed, "theta");
            for (double &t : theta) {
                t = rng.uniform_angle();
            }
            break;
        }
        if (inherited_prefix->size() > n) {
            throw DimensionError("initial_angles: inherited prefix longer than "
                                 "the circuit's parameter count");
        }
        std::copy(inherited_prefix->begin(), inherited_prefix->end(), theta.begin());
        break;
    }
    }
    return theta;
}

namespace {

struct EncodedSamples {
    std::vector<StateVector> states;
    std::vector<std::array<double, 2>> labels;
};

EncodedSamples encode_partition(const ParamCircuit &circuit, const Dataset &data,
                                Partition partition) {
    EncodedSamples out;
    for (std::size_t i : data.indices(partition)) {
        const Sample &s = data.samples[i];
        out.states.push_back(
            amplitude_encode(s.features, data.data_qubits, circuit.k));
        out.labels.push_back(s.label);
    }
    return out;
}

std::pair<double, double> evaluate_encoded(const ParamCircuit &circuit,
                                           const AngleVector &theta,
                                           const EncodedSamples &enc, int threads) {
    const std::size_t n = enc.states.size();
    std::vector<double> losses(n);
    std::vector<std::uint8_t> correct(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const StateVector out = apply_circuit(circuit, theta, enc.states[i]);
        const auto g = readout_probs(out, circuit.k);
        losses[i] = loss(g[0], g[1], enc.labels[i]);
        const int cls = enc.labels[i][0] == 1.0 ? 0 : 1;
        correct[i] = predict(g[0], g[1]) == cls;
    });
    double loss_sum = 0;
    std::size_t n_correct = 0;
    for (std::size_t i = 0; i < n; ++i) { // fixed reduction order
        loss_sum += losses[i];
        n_correct += correct[i];
    }
    return {loss_sum / double(n), double(n_correct) / double(n)};
}

} // namespace

TrainedModel train(const ParamCircuit &circuit, const Dataset &data,
                   const TrainConfig &cfg, const AngleVector *inherited_prefix) {
    cfg.validate();
    if (circuit.k != data.data_qubits + 1) {
        throw DimensionError("train: circuit has " + std::to_string(circuit.k) +
                             " qubits, dataset wants " +
                             std::to_string(data.data_qubits) + " + 1 readout");
    }
    const EncodedSamples train_set = encode_partition(circuit, data, Partition::Train);
    const EncodedSamples val_set =
        encode_partition(circuit, data, Partition::Validation);
    if (train_set.states.empty()) {
        throw DataError("train: empty train partition");
    }

    TrainedModel model;
    model.circuit = circuit;
    model.theta = initial_angles(circuit, cfg, inherited_prefix);

    const std::size_t n_params = model.theta.size();
    AngleVector m(n_params, 0.0), v(n_params, 0.0), grad(n_params, 0.0);
    long updates = 0;
    double beta1_t = 1.0, beta2_t = 1.0;

    RngStream shuffle_rng = derive_stream(cfg.shuffle_seed, "shuffle");
    std::vector<std::size_t> order(train_set.states.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::vector<LossGrad> slots(std::size_t(cfg.batch_size));

    bool out_of_budget = false;
    for (int epoch = 1; epoch <= cfg.epochs && !out_of_budget; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0;
        std::size_t epoch_correct = 0, epoch_seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += std::size_t(cfg.batch_size)) {
            const std::size_t bs =
                std::min(order.size() - start, std::size_t(cfg.batch_size));
            parallel_for(bs, cfg.threads, [&](std::size_t b) {
                const std::size_t s = order[start + b];
                slots[b] = loss_and_gradient(circuit, model.theta,
                                             train_set.states[s],
                                             train_set.labels[s]);
            });
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0;
            for (std::size_t b = 0; b < bs; ++b) { // fixed reduction order
                batch_loss += slots[b].loss;
                for (std::size_t p = 0; p < n_params; ++p) {
                    grad[p] += slots[b].grad[p];
                }
                epoch_correct += predict(slots[b].g1, slots[b].g2) ==
                                 (train_set.labels[order[start + b]][0] == 1.0 ? 0 : 1);
            }
            batch_loss /= double(bs);
            if (!std::isfinite(batch_loss)) {
                throw TrainError("train: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(start / std::size_t(cfg.batch_size)));
            }
            epoch_loss += batch_loss * double(bs);
            epoch_seen += bs;

            // Adam
            ++updates;
            beta1_t *= cfg.beta1;
            beta2_t *= cfg.beta2;
            const double inv_bs = 1.0 / double(bs);
            for (std::size_t p = 0; p < n_params; ++p) {
                const double g = grad[p] * inv_bs;
                m[p] = cfg.beta1 * m[p] + (1 - cfg.beta1) * g;
                v[p] = cfg.beta2 * v[p] + (1 - cfg.beta2) * g * g;
                const double mhat = m[p] / (1 - beta1_t);
                const double vhat = v[p] / (1 - beta2_t);
                model.theta[p] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            }
            if (cfg.max_updates > 0 && updates >= cfg.max_updates) {
                out_of_budget = true;
                break;
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / double(epoch_seen);
        stats.train_acc = double(epoch_correct) / double(epoch_seen);
        if (!val_set.states.empty()) {
            std::tie(stats.val_loss, stats.val_acc) =
                evaluate_encoded(circuit, model.theta, val_set, cfg.threads);
        }
        model.history.push_back(stats);
    }
    return model;
}

FitnessReport fitness(const TrainedModel &model, const Dataset &data,
                      Partition partition, int threads) {
    const EncodedSamples enc = encode_partition(model.circuit, data, partition);
    if (enc.states.empty()) {
        throw DataError("fitness: empty partition " + to_string(partition));
    }
    std::vector<std::uint8_t> correct(enc.states.size());
    parallel_for(enc.states.size(), threads, [&](std::size_t i) {
        const StateVector out = apply_circuit(model.circuit, model.theta, enc.states[i]);
        const auto g = readout_probs(out, model.circuit.k);
        const int cls = enc.labels[i][0] == 1.0 ? 0 : 1;
        correct[i] = predict(g[0], g[1]) == cls;
    });
    FitnessReport report;
    report.partition = partition;
    report.total = enc.states.size();
    for (std::uint8_t c : correct) {
        report.correct += c;
    }
    report.fitness = double(report.correct) / double(report.total);
    return report;
}

std::pair<double, double> evaluate(const ParamCircuit &circuit,
                                   const AngleVector &theta, const Dataset &data,
                                   Partition partition, int threads) {
    const EncodedSamples enc = encode_partition(circuit, data, partition);
    if (enc.states.empty()) {
        throw DataError("evaluate: empty partition " + to_string(partition));
    }
    return evaluate_encoded(circuit, theta, enc, threads);
}

} // namespace mqne
