// End-to-end acceptance suite. Every criterion prints one PASS/FAIL line;
// run the whole binary or a single criterion via --test-case="criterion 04*".

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mqne/evolution.hpp"
#include "mqne/io.hpp"
#include "mqne/run.hpp"
#include "mqne/trainer.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace mqne;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

void report(int criterion, bool pass, const std::string &what, double seconds) {
    std::printf("[acceptance] criterion %02d %s: %s (%.1f s)\n", criterion,
                pass ? "PASS" : "FAIL", what.c_str(), seconds);
    std::fflush(stdout);
}

BlockLibrary full_library(int k) {
    LibrarySpec s;
    s.k = k;
    return enumerate_library(s);
}

Dataset spt_dataset(int spins, std::size_t samples,
                    std::array<std::size_t, 3> counts, std::uint64_t seed) {
    ClusterIsingSpec spec;
    spec.spins = spins;
    spec.lambdas = ClusterIsingSpec::even_grid(samples);
    Dataset ds = gen_cluster_ising(spec);
    split(ds, counts, seed);
    return ds;
}

// The image corpus for criteria 9/10: real IDX files when MQNE_MNIST_DIR is
// set, otherwise a procedurally drawn stand-in written in the same format.
struct DigitCorpus {
    Dataset data;
    bool real = false;
};

DigitCorpus digit_corpus(std::size_t n_train, std::size_t n_val) {
    DigitCorpus corpus;
    if (const char *dir = std::getenv("MQNE_MNIST_DIR")) {
        const std::string images = std::string(dir) + "/train-images-idx3-ubyte";
        const std::string labels = std::string(dir) + "/train-labels-idx1-ubyte";
        if (std::filesystem::exists(images) && std::filesystem::exists(labels)) {
            corpus.data = load_mnist(images, labels);
            corpus.real = true;
        }
    }
    if (!corpus.real) {
        const std::string dir = testutil::scratch_dir("acceptance_digits");
        const auto files =
            testutil::write_synthetic_digits(dir, n_train + n_val + 100, 424242);
        corpus.data = load_mnist(files.images, files.labels);
    }
    split(corpus.data, {n_train, n_val, 0}, 777);
    return corpus;
}

} // namespace

TEST_CASE("criterion 01: library sizes equal the closed form, k = 1..9") {
    Timer t;
    bool pass = true;
    for (int k = 1; k <= 9; ++k) {
        LibrarySpec s;
        s.k = k;
        const std::uint64_t expected = count_closed_form(s);
        const std::size_t enumerated = enumerate_library(s).size();
        CHECK(enumerated == expected);
        pass = pass && enumerated == expected;
        if (k == 7) {
            CHECK(enumerated == 896);
            pass = pass && enumerated == 896;
        }
        if (k == 9) {
            CHECK(enumerated == 6688);
            pass = pass && enumerated == 6688;
        }
    }
    pass = pass && t.seconds() < 10.0;
    CHECK(t.seconds() < 10.0);
    report(1, pass, "library counts, incl. 896 @ k=7 and 6688 @ k=9", t.seconds());
}

TEST_CASE("criterion 02: count recurrence holds exactly for k = 2..8") {
    Timer t;
    bool pass = true;
    for (int k = 2; k <= 8; ++k) {
        LibrarySpec a, b, c;
        a.k = k + 1;
        b.k = k;
        c.k = k - 1;
        const bool ok = count_closed_form(a) ==
                        2 * count_closed_form(b) + 2 * count_closed_form(c);
        CHECK(ok);
        pass = pass && ok;
    }
    pass = pass && t.seconds() < 1.0;
    report(2, pass, "f(k+1) = 2 f(k) + 2 f(k-1)", t.seconds());
}

TEST_CASE("criterion 03: connection rules are sound") {
    Timer t;
    bool pass = true;
    for (int k = 2; k <= 4; ++k) {
        const BlockLibrary lib = full_library(k);
        const BlockGraph g = build_graph(lib);
        for (std::uint32_t x = 0; x < lib.size(); ++x) {
            for (std::uint32_t y = 0; y < lib.size(); ++y) {
                const bool expected =
                    g.active(x) && g.active(y) && x != y &&
                    testutil::oracle_allowed(lib.block(x), lib.block(y));
                if (g.edge(x, y) != expected) {
                    pass = false;
                }
            }
        }
    }
    CHECK(pass);

    const BlockGraph g7 = build_graph(full_library(7));
    RngStream rng(31337);
    const StartPolicy start = StartPolicy::all_rotations(g7.library());
    std::size_t violations = 0;
    for (int i = 0; i < 5000; ++i) {
        const Path p = random_path(g7, 5, start, rng);
        violations += !validate_path(g7, p);
    }
    for (int i = 0; i < 5000; ++i) {
        Path p = random_path(g7, 2, StartPolicy::uniform_random(), rng);
        p = extend_path(g7, p, 4, rng);
        for (std::size_t i2 = 1; i2 < p.nodes.size(); ++i2) {
            violations += !testutil::oracle_allowed(
                g7.library().block(p.nodes[i2 - 1]), g7.library().block(p.nodes[i2]));
        }
    }
    CHECK(violations == 0);
    pass = pass && violations == 0 && t.seconds() < 60.0;
    report(3, pass, "adjacency == brute force (k<=4); 10^4 paths clean (k=7)",
           t.seconds());
}

TEST_CASE("criterion 04: simulator identities, unitarity and gradients") {
    Timer t;
    bool pass = true;

    // zero-angle gates act as the identity within 1e-12
    const BlockGraph g9 = build_graph(full_library(9));
    RngStream rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const Path p = random_path(g9, 4, StartPolicy::uniform_random(), rng);
        const ParamCircuit c = compile_path(p, g9.library());
        const StateVector in = testutil::random_state(9, rng);
        const StateVector out =
            apply_circuit(c, AngleVector(std::size_t(c.param_count()), 0.0), in);
        for (std::size_t i = 0; i < in.amps.size(); ++i) {
            if (std::abs(out.amps[i] - in.amps[i]) > 1e-12) {
                pass = false;
            }
        }
    }
    CHECK(pass);

    // norm preservation over 100 random nine-qubit circuits
    for (int trial = 0; trial < 100; ++trial) {
        const Path p = random_path(g9, 5, StartPolicy::uniform_random(), rng);
        const ParamCircuit c = compile_path(p, g9.library());
        const AngleVector theta = testutil::random_angles(c.param_count(), rng);
        const StateVector out =
            apply_circuit(c, theta, testutil::random_state(9, rng));
        const bool ok = std::abs(out.norm() - 1.0) <= 1e-10;
        CHECK(ok);
        pass = pass && ok;
    }

    // analytic gradient vs central finite differences, 50 instances
    double max_err = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const Path p = random_path(g9, 2, StartPolicy::uniform_random(), rng);
        const ParamCircuit c = compile_path(p, g9.library());
        const AngleVector theta = testutil::random_angles(c.param_count(), rng);
        const StateVector in = testutil::random_state(9, rng);
        const std::array<double, 2> label =
            trial % 2 ? std::array<double, 2>{0, 1} : std::array<double, 2>{1, 0};
        const AngleVector analytic = gradient(c, theta, in, label);
        const AngleVector fd =
            testutil::finite_difference_gradient(c, theta, in, label, 1e-5);
        double scale = 1.0;
        for (double v : fd) {
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t i = 0; i < fd.size(); ++i) {
            max_err = std::max(max_err, std::abs(analytic[i] - fd[i]) / scale);
        }
    }
    CHECK(max_err <= 1e-5);
    pass = pass && max_err <= 1e-5 && t.seconds() < 120.0;
    report(4, pass, "identity/unitarity/gradient checks", t.seconds());
}

TEST_CASE("criterion 05: parameter count identity") {
    Timer t;
    std::vector<GateBlock> blocks;
    for (int i = 0; i < 6; ++i) {
        blocks.push_back(make_block(9, {Gate::crx(1, 2), Gate::crx(3, 4),
                                        Gate::crx(5, 6), Gate::crx(7, 8),
                                        Gate::rot(9)}));
    }
    std::vector<Gate> rots;
    for (int q = 1; q <= 9; ++q) {
        rots.push_back(Gate::rot(q));
    }
    blocks.push_back(make_block(9, rots));
    blocks.push_back(make_block(9, {Gate::rot(1), Gate::rot(2), Gate::rot(3),
                                    Gate::rot(4), Gate::rot(5), Gate::rot(6),
                                    Gate::rot(7)}));
    const ParamCircuit c = compile_blocks(9, blocks);
    bool pass = c.rot_gates == 22 && c.crx_gates == 24 && c.param_count() == 90;
    CHECK(pass);

    const BlockGraph g = build_graph(full_library(5));
    RngStream rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const ParamCircuit rc = compile_path(
            random_path(g, 4, StartPolicy::uniform_random(), rng), g.library());
        const bool ok = rc.param_count() == 3 * rc.rot_gates + rc.crx_gates &&
                        int(rc.prims.size()) == rc.param_count();
        CHECK(ok);
        pass = pass && ok;
    }
    report(5, pass, "param_count = 3#Rot + #CRx; 22/24 circuit has 90", t.seconds());
}

TEST_CASE("criterion 06: cluster-Ising generation") {
    Timer t;
    const GroundState gs = cluster_ising_ground(8, 0.0);
    bool pass = std::abs(gs.energy - (-8.0)) <= 1e-9;
    CHECK(std::abs(gs.energy - (-8.0)) <= 1e-9);

    // Hermitian exactly (and real)
    const auto h = cluster_ising_hamiltonian(8, 1.3);
    const std::size_t dim = 256;
    for (std::size_t r = 0; r < dim && pass; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (h[r * dim + c] != std::conj(h[c * dim + r])) {
                pass = false;
                break;
            }
        }
    }
    CHECK(pass);

    ClusterIsingSpec spec;
    spec.spins = 8;
    spec.lambdas = ClusterIsingSpec::even_grid(2000);
    const Dataset ds = gen_cluster_ising(spec);
    bool labels_ok = ds.samples.size() == 2000;
    for (const Sample &s : ds.samples) {
        const std::array<double, 2> expected =
            s.metadata < 1.0 ? std::array<double, 2>{1, 0}
                             : std::array<double, 2>{0, 1};
        labels_ok = labels_ok && s.label == expected;
    }
    // the flip happens exactly once on the sorted grid
    int flips = 0;
    for (std::size_t i = 1; i < ds.samples.size(); ++i) {
        flips += ds.samples[i].label != ds.samples[i - 1].label;
    }
    labels_ok = labels_ok && flips == 1;
    CHECK(labels_ok);
    pass = pass && labels_ok && t.seconds() < 60.0;
    CHECK(t.seconds() < 60.0);
    report(6, pass, "energy -8 at lambda=0; Hermitian; labels flip at 1.0",
           t.seconds());
}

TEST_CASE("criterion 07: zero-angle extension preserves every prediction") {
    Timer t;
    Dataset ds = spt_dataset(8, 60, {40, 20, 0}, 2026);
    const BlockGraph g = build_graph(full_library(9));
    const StartPolicy start = StartPolicy::all_rotations(g.library());
    RngStream rng(7007);

    TrainConfig tc;
    tc.epochs = 10;
    tc.batch_size = 10;
    tc.init_seed = 1;
    tc.shuffle_seed = 2;

    bool pass = true;
    for (int trial = 0; trial < 3; ++trial) {
        const Path p = random_path(g, 3, start, rng);
        const ParamCircuit c = compile_path(p, g.library());
        const TrainedModel m = train(c, ds, tc);

        const Path longer = extend_path(g, p, 2, rng);
        const ParamCircuit c2 = compile_path(longer, g.library());
        AngleVector theta2 = m.theta;
        theta2.resize(std::size_t(c2.param_count()), 0.0);

        for (std::size_t i : ds.indices(Partition::Validation)) {
            const StateVector in =
                amplitude_encode(ds.samples[i].features, ds.data_qubits, c.k);
            const auto p1 = readout_probs(apply_circuit(c, m.theta, in), c.k);
            const auto p2 = readout_probs(apply_circuit(c2, theta2, in), c2.k);
            if (p1[0] != p2[0] ||
                predict(p1[0], p1[1]) != predict(p2[0], p2[1])) {
                pass = false;
            }
        }
    }
    CHECK(pass);
    pass = pass && t.seconds() < 60.0;
    report(7, pass, "coverage: extended circuits reproduce predictions exactly",
           t.seconds());
}

TEST_CASE("criterion 08: desk-scale SPT search") {
    Timer t;
    Dataset ds = spt_dataset(8, 400, {320, 80, 0}, 909);
    const BlockGraph g = build_graph(full_library(9));

    MqneConfig cfg;
    cfg.offspring = 5;
    cfg.survivors = 1;
    cfg.init_length = 3;
    cfg.segment_length = 2;
    cfg.fitness_threshold = 0.95;
    cfg.max_generations = 6;
    cfg.start = StartPolicy::all_rotations(g.library());
    cfg.train.learning_rate = 0.0015;
    cfg.train.batch_size = 20;
    cfg.train.epochs = 100;

    int successes = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        cfg.master_seed = seed;
        const MqneResult res = run_mqne(g, ds, cfg);
        std::printf("[acceptance]   spt seed %llu: best fitness %.4f after %zu "
                    "generations (%zu evaluations)\n",
                    static_cast<unsigned long long>(seed), res.best_fitness,
                    res.logs.size(), res.evaluations);
        std::fflush(stdout);
        successes += res.best_fitness >= 0.95;
    }
    const bool pass = successes >= 2 && t.seconds() < 1800.0;
    CHECK(successes >= 2);
    CHECK(t.seconds() < 1800.0);
    report(8, pass,
           "SPT fitness >= 0.95 in " + std::to_string(successes) + "/3 seeds",
           t.seconds());
}

TEST_CASE("criterion 09 10: desk-scale digit search and genetic baseline") {
    Timer t;
    DigitCorpus corpus = digit_corpus(500, 200);
    std::printf("[acceptance]   digit corpus: %s (%zu samples)\n",
                corpus.real ? "real IDX files" : "synthetic stand-in",
                corpus.data.samples.size());
    const BlockGraph g = build_graph(full_library(9));

    MqneConfig cfg;
    cfg.offspring = 5;
    cfg.survivors = 1;
    cfg.init_length = 5;
    cfg.segment_length = 2;
    cfg.fitness_threshold = 0.90;
    cfg.max_generations = 6;
    cfg.start = StartPolicy::all_rotations(g.library());
    cfg.train.learning_rate = 0.0015;
    cfg.train.batch_size = 30;
    cfg.train.epochs = 200;

    GeneticConfig gc;
    gc.population = 5;
    gc.survivors = 2;
    gc.mutation_prob = 0.15;
    gc.circuit_length = 5;
    gc.fitness_threshold = 1.0; // spend the whole budget
    gc.max_generations = 1000;
    gc.train = cfg.train;

    int mqne_successes = 0;
    int baseline_not_better = 0;
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        cfg.master_seed = seed;
        const MqneResult res = run_mqne(g, corpus.data, cfg);
        std::printf("[acceptance]   digits seed %llu: mqne best %.4f after %zu "
                    "generations (%zu evaluations)\n",
                    static_cast<unsigned long long>(seed), res.best_fitness,
                    res.logs.size(), res.evaluations);
        std::fflush(stdout);
        mqne_successes += res.best_fitness >= 0.90;

        gc.master_seed = seed;
        gc.max_evaluations = long(res.evaluations); // equal circuit budget
        const GeneticResult ga = run_genetic(g.library(), corpus.data, gc);
        std::printf("[acceptance]   digits seed %llu: genetic best %.4f "
                    "(%zu evaluations)\n",
                    static_cast<unsigned long long>(seed), ga.best_fitness,
                    ga.evaluations);
        std::fflush(stdout);
        baseline_not_better += ga.best_fitness <= res.best_fitness + 0.02;
    }
    const bool pass9 = mqne_successes >= 2 && t.seconds() < 7200.0;
    CHECK(mqne_successes >= 2);
    CHECK(t.seconds() < 7200.0);
    report(9, pass9,
           "digit fitness >= 0.90 in " + std::to_string(mqne_successes) +
               "/3 seeds" + (corpus.real ? "" : " (synthetic corpus)"),
           t.seconds());

    const bool pass10 = baseline_not_better >= 2;
    CHECK(baseline_not_better >= 2);
    report(10, pass10,
           "genetic baseline within +0.02 of MQNE in " +
               std::to_string(baseline_not_better) + "/3 paired seeds",
           t.seconds());
}

TEST_CASE("criterion 11: bundles are byte-identical across thread counts") {
    Timer t;
    const std::string dir = testutil::scratch_dir("acceptance_determinism");

    RunConfig cfg;
    cfg.task = "spt";
    cfg.seed = 4242;
    cfg.seed_set = true;
    cfg.spt_spins = 8;
    cfg.spt_samples = 80;
    cfg.split_counts = {60, 20, 0};
    cfg.mqne.offspring = 3;
    cfg.mqne.survivors = 1;
    cfg.mqne.init_length = 2;
    cfg.mqne.segment_length = 1;
    cfg.mqne.max_generations = 2;
    cfg.mqne.fitness_threshold = 1.0;
    cfg.mqne.train.epochs = 8;
    cfg.mqne.train.batch_size = 10;

    auto read = [](const std::string &f) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    cfg.output_dir = dir + "/t1";
    cfg.threads = 1;
    run_evolve(cfg);
    cfg.output_dir = dir + "/t4";
    cfg.threads = 4;
    run_evolve(cfg);

    const bool pass =
        read(dir + "/t1/generations.csv") == read(dir + "/t4/generations.csv") &&
        read(dir + "/t1/best_history.csv") == read(dir + "/t4/best_history.csv") &&
        read(dir + "/t1/best_model.txt") == read(dir + "/t4/best_model.txt");
    CHECK(pass);
    report(11, pass, "metrics identical for 1 vs 4 worker threads", t.seconds());
}
