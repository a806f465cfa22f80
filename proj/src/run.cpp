#include "mqne/run.hpp"

#include "mqne/errors.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace mqne {

using nlohmann::json;

namespace {

TrainConfig train_from_json(const json &j, TrainConfig base) {
    if (j.contains("learning_rate")) {
        base.learning_rate = j["learning_rate"].get<double>();
    }
    if (j.contains("batch_size")) {
        base.batch_size = j["batch_size"].get<int>();
    }
    if (j.contains("epochs")) {
        base.epochs = j["epochs"].get<int>();
    }
    if (j.contains("max_updates")) {
        base.max_updates = j["max_updates"].get<long>();
    }
    if (j.contains("beta1")) {
        base.beta1 = j["beta1"].get<double>();
    }
    if (j.contains("beta2")) {
        base.beta2 = j["beta2"].get<double>();
    }
    if (j.contains("adam_eps")) {
        base.adam_eps = j["adam_eps"].get<double>();
    }
    if (j.contains("init")) {
        base.init_policy = init_policy_from_string(j["init"].get<std::string>());
    }
    return base;
}

json train_to_json(const TrainConfig &t) {
    json j;
    j["learning_rate"] = t.learning_rate;
    j["batch_size"] = t.batch_size;
    j["epochs"] = t.epochs;
    j["max_updates"] = t.max_updates;
    j["beta1"] = t.beta1;
    j["beta2"] = t.beta2;
    j["adam_eps"] = t.adam_eps;
    j["init"] = to_string(t.init_policy);
    return j;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw IoError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("version")) {
            cfg.version = j["version"].get<int>();
        }
        if (cfg.version != 1) {
            throw IoError("config: unsupported version " +
                          std::to_string(cfg.version));
        }
        if (j.contains("task")) {
            cfg.task = j["task"].get<std::string>();
        }
        if (j.contains("algorithm")) {
            cfg.algorithm = j["algorithm"].get<std::string>();
        }
        if (j.contains("seed")) {
            cfg.seed = j["seed"].get<std::uint64_t>();
            cfg.seed_set = true;
        }
        if (j.contains("output_dir")) {
            cfg.output_dir = j["output_dir"].get<std::string>();
        }
        if (j.contains("threads")) {
            cfg.threads = j["threads"].get<int>();
        }
        if (j.contains("library")) {
            const json &l = j["library"];
            if (l.contains("qubits")) {
                cfg.qubits = l["qubits"].get<int>();
            }
            if (l.contains("mode")) {
                cfg.library_mode =
                    library_mode_from_string(l["mode"].get<std::string>());
            }
            if (l.contains("cutoff")) {
                cfg.cutoff = l["cutoff"].get<int>();
            }
        }
        if (j.contains("graph") && j["graph"].contains("exclude_empty")) {
            cfg.exclude_empty = j["graph"]["exclude_empty"].get<bool>();
        }
        if (j.contains("dataset")) {
            const json &d = j["dataset"];
            if (d.contains("cache")) {
                cfg.dataset_cache = d["cache"].get<std::string>();
            }
            if (d.contains("spt")) {
                const json &s = d["spt"];
                if (s.contains("spins")) {
                    cfg.spt_spins = s["spins"].get<int>();
                }
                if (s.contains("samples")) {
                    cfg.spt_samples = s["samples"].get<std::size_t>();
                }
                if (s.contains("lambda_min")) {
                    cfg.spt_lambda_min = s["lambda_min"].get<double>();
                }
                if (s.contains("lambda_max")) {
                    cfg.spt_lambda_max = s["lambda_max"].get<double>();
                }
            }
            if (d.contains("mnist")) {
                const json &m = d["mnist"];
                cfg.mnist_images = m.value("images", cfg.mnist_images);
                cfg.mnist_labels = m.value("labels", cfg.mnist_labels);
                if (m.contains("digits")) {
                    cfg.mnist_digits = {m["digits"][0].get<int>(),
                                        m["digits"][1].get<int>()};
                }
            }
            if (d.contains("cancer") && d["cancer"].contains("csv")) {
                cfg.cancer_csv = d["cancer"]["csv"].get<std::string>();
            }
            if (d.contains("split")) {
                cfg.split_counts = {d["split"][0].get<std::size_t>(),
                                    d["split"][1].get<std::size_t>(),
                                    d["split"][2].get<std::size_t>()};
            }
        }
        if (j.contains("mqne")) {
            const json &m = j["mqne"];
            if (m.contains("offspring")) {
                cfg.mqne.offspring = m["offspring"].get<int>();
            }
            if (m.contains("survivors")) {
                cfg.mqne.survivors = m["survivors"].get<int>();
            }
            if (m.contains("init_length")) {
                cfg.mqne.init_length = m["init_length"].get<int>();
            }
            if (m.contains("segment_length")) {
                cfg.mqne.segment_length = m["segment_length"].get<int>();
            }
            if (m.contains("fitness_threshold")) {
                cfg.mqne.fitness_threshold = m["fitness_threshold"].get<double>();
            }
            if (m.contains("max_generations")) {
                cfg.mqne.max_generations = m["max_generations"].get<int>();
            }
            if (m.contains("offspring_schedule")) {
                cfg.mqne.offspring_schedule =
                    m["offspring_schedule"].get<std::vector<int>>();
            }
            if (m.contains("survivors_schedule")) {
                cfg.mqne.survivors_schedule =
                    m["survivors_schedule"].get<std::vector<int>>();
            }
            if (m.contains("start")) {
                const json &s = m["start"];
                if (s.is_string() && s.get<std::string>() == "all_rotations") {
                    cfg.mqne.start.kind = StartPolicy::Kind::FixedBlock;
                    cfg.mqne.start.block = UINT32_MAX; // resolved after build
                } else if (s.is_string() && s.get<std::string>() == "random") {
                    cfg.mqne.start = StartPolicy::uniform_random();
                } else if (s.is_object() && s.contains("fixed")) {
                    cfg.mqne.start = StartPolicy::fixed(s["fixed"].get<std::uint32_t>());
                } else {
                    throw IoError("config: bad mqne.start");
                }
            }
        }
        if (j.contains("genetic")) {
            const json &g = j["genetic"];
            if (g.contains("population")) {
                cfg.genetic.population = g["population"].get<int>();
            }
            if (g.contains("survivors")) {
                cfg.genetic.survivors = g["survivors"].get<int>();
            }
            if (g.contains("mutation_prob")) {
                cfg.genetic.mutation_prob = g["mutation_prob"].get<double>();
            }
            if (g.contains("circuit_length")) {
                cfg.genetic.circuit_length = g["circuit_length"].get<int>();
            }
            if (g.contains("fitness_threshold")) {
                cfg.genetic.fitness_threshold = g["fitness_threshold"].get<double>();
            }
            if (g.contains("max_generations")) {
                cfg.genetic.max_generations = g["max_generations"].get<int>();
            }
            if (g.contains("max_evaluations")) {
                cfg.genetic.max_evaluations = g["max_evaluations"].get<long>();
            }
        }
        if (j.contains("train")) {
            cfg.mqne.train = train_from_json(j["train"], cfg.mqne.train);
            cfg.genetic.train = cfg.mqne.train;
        }
    } catch (const json::exception &e) {
        throw IoError(std::string("config field error: ") + e.what());
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string &file) {
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot open config file: " + file);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return from_json_text(os.str());
}

int RunConfig::resolved_qubits() const {
    if (qubits > 0) {
        return qubits;
    }
    if (task == "mnist") {
        return 9; // 256 pixels + readout
    }
    if (task == "cancer") {
        return 7; // 30 features in 64 amplitudes + readout
    }
    return spt_spins + 1;
}

std::array<std::size_t, 3> RunConfig::resolved_split() const {
    if (split_counts[0] + split_counts[1] + split_counts[2] > 0) {
        return split_counts;
    }
    if (task == "mnist") {
        return {2000, 500, 0};
    }
    if (task == "cancer") {
        return {400, 169, 0};
    }
    const std::size_t train = spt_samples * 4 / 5;
    return {train, spt_samples - train, 0};
}

void RunConfig::validate() const {
    if (!seed_set) {
        throw IoError("config: a master seed is mandatory (no clock seeding)");
    }
    if (task != "spt" && task != "mnist" && task != "cancer") {
        throw IoError("config: unknown task '" + task + "'");
    }
    if (algorithm != "mqne" && algorithm != "genetic") {
        throw IoError("config: unknown algorithm '" + algorithm + "'");
    }
    if (task == "mnist" && dataset_cache.empty() &&
        (mnist_images.empty() || mnist_labels.empty())) {
        throw IoError("config: mnist task needs dataset.mnist.images/labels "
                      "or a dataset.cache");
    }
    if (task == "cancer" && dataset_cache.empty() && cancer_csv.empty()) {
        throw IoError("config: cancer task needs dataset.cancer.csv or a "
                      "dataset.cache");
    }
    if (threads < 1) {
        throw IoError("config: threads must be >= 1");
    }
}

std::string RunConfig::to_json_text() const {
    json j;
    j["version"] = version;
    j["task"] = task;
    j["algorithm"] = algorithm;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["threads"] = threads;
    j["library"] = {{"qubits", resolved_qubits()},
                    {"mode", to_string(library_mode)},
                    {"cutoff", cutoff}};
    j["graph"] = {{"exclude_empty", exclude_empty}};
    json d;
    if (!dataset_cache.empty()) {
        d["cache"] = dataset_cache;
    } else if (task == "spt") {
        d["spt"] = {{"spins", spt_spins},
                    {"samples", spt_samples},
                    {"lambda_min", spt_lambda_min},
                    {"lambda_max", spt_lambda_max}};
    } else if (task == "mnist") {
        d["mnist"] = {{"images", mnist_images},
                      {"labels", mnist_labels},
                      {"digits", {mnist_digits[0], mnist_digits[1]}}};
    } else {
        d["cancer"] = {{"csv", cancer_csv}};
    }
    const auto sp = resolved_split();
    d["split"] = {sp[0], sp[1], sp[2]};
    j["dataset"] = d;
    if (algorithm == "mqne") {
        json m;
        m["offspring"] = mqne.offspring;
        m["survivors"] = mqne.survivors;
        m["init_length"] = mqne.init_length;
        m["segment_length"] = mqne.segment_length;
        m["fitness_threshold"] = mqne.fitness_threshold;
        m["max_generations"] = mqne.max_generations;
        if (!mqne.offspring_schedule.empty()) {
            m["offspring_schedule"] = mqne.offspring_schedule;
        }
        if (!mqne.survivors_schedule.empty()) {
            m["survivors_schedule"] = mqne.survivors_schedule;
        }
        m["start"] = mqne.start.kind == StartPolicy::Kind::UniformRandom
                         ? json("random")
                         : mqne.start.block == UINT32_MAX
                               ? json("all_rotations")
                               : json({{"fixed", mqne.start.block}});
        j["mqne"] = m;
        j["train"] = train_to_json(mqne.train);
    } else {
        json g;
        g["population"] = genetic.population;
        g["survivors"] = genetic.survivors;
        g["mutation_prob"] = genetic.mutation_prob;
        g["circuit_length"] = genetic.circuit_length;
        g["fitness_threshold"] = genetic.fitness_threshold;
        g["max_generations"] = genetic.max_generations;
        g["max_evaluations"] = genetic.max_evaluations;
        j["genetic"] = g;
        j["train"] = train_to_json(genetic.train);
    }
    return j.dump(2);
}

Dataset prepare_dataset(const RunConfig &cfg) {
    Dataset ds;
    if (!cfg.dataset_cache.empty()) {
        ds = read_dataset_cache(cfg.dataset_cache);
    } else if (cfg.task == "spt") {
        ClusterIsingSpec spec;
        spec.spins = cfg.spt_spins;
        spec.lambdas = ClusterIsingSpec::even_grid(cfg.spt_samples,
                                                   cfg.spt_lambda_min,
                                                   cfg.spt_lambda_max);
        ds = gen_cluster_ising(spec, cfg.threads);
    } else if (cfg.task == "mnist") {
        ds = load_mnist(cfg.mnist_images, cfg.mnist_labels, cfg.mnist_digits);
    } else {
        ds = load_wdbc(cfg.cancer_csv);
    }
    const auto counts = ds.partition_counts();
    if (counts[0] == 0) { // cached datasets may already carry a split
        split(ds, cfg.resolved_split(), derive_seed(cfg.seed, "split"));
    }
    return ds;
}

RunOutcome run_evolve(const RunConfig &cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    LibrarySpec lspec;
    lspec.k = cfg.resolved_qubits();
    lspec.mode = cfg.library_mode;
    lspec.cutoff = cfg.cutoff;
    BlockLibrary lib = enumerate_library(lspec);
    const std::string lib_text = library_to_text(lib);

    Dataset data = prepare_dataset(cfg);

    json manifest;
    manifest["schema"] = "mqne-manifest-v1";
    manifest["config"] = json::parse(cfg.to_json_text());
    manifest["seed_streams"] = {"split",   "path", "batch",   "theta",
                                "theta-fixed", "ga-init", "ga-ops", "ga-batch",
                                "ga-theta"};
    manifest["library"] = {{"k", lspec.k},
                           {"mode", to_string(lspec.mode)},
                           {"count", lib.size()},
                           {"hash", fnv_hex(lib_text)}};
    manifest["dataset"] = {{"samples", data.samples.size()},
                           {"data_qubits", data.data_qubits},
                           {"provenance", json::parse(data.provenance.empty()
                                                          ? "{}"
                                                          : data.provenance)}};

    RunOutcome outcome;
    std::vector<GenerationLog> logs;
    TrainedModel best_model;
    Path best_path;
    bool reached = false;

    if (cfg.algorithm == "mqne") {
        BlockGraph graph = build_graph(std::move(lib), cfg.exclude_empty,
                                       kDefaultMaxGraphNodes, cfg.threads);
        manifest["graph"] = {{"nodes", graph.node_count()},
                             {"edges", graph.edge_count()}};
        MqneConfig mc = cfg.mqne;
        mc.master_seed = cfg.seed;
        mc.train.threads = cfg.threads;
        if (mc.start.kind == StartPolicy::Kind::FixedBlock &&
            mc.start.block == UINT32_MAX) {
            mc.start = StartPolicy::all_rotations(graph.library());
        }
        const MqneResult res = run_mqne(graph, data, mc);
        logs = res.logs;
        best_model = res.best_model;
        best_path = res.best_path;
        reached = res.reached_threshold;
        outcome.best_fitness = res.best_fitness;
        outcome.evaluations = res.evaluations;
    } else {
        GeneticConfig gc = cfg.genetic;
        gc.master_seed = cfg.seed;
        gc.train.threads = cfg.threads;
        const GeneticResult res = run_genetic(lib, data, gc);
        logs = res.logs;
        best_model = res.best_model;
        best_path.nodes = res.best_sequence;
        reached = res.reached_threshold;
        outcome.best_fitness = res.best_fitness;
        outcome.evaluations = res.evaluations;
    }
    outcome.status =
        reached ? RunStatus::ThresholdReached : RunStatus::BudgetExhausted;
    outcome.generations = int(logs.size());

    const fs::path dir(cfg.output_dir);
    write_generations_csv((dir / "generations.csv").string(), logs);
    write_history_csv((dir / "best_history.csv").string(), best_model);
    write_path((dir / "best_path.txt").string(), best_path);
    write_model((dir / "best_model.txt").string(), best_model);

    manifest["result"] = {{"status", reached ? "threshold" : "budget"},
                          {"best_fitness", outcome.best_fitness},
                          {"generations", outcome.generations},
                          {"evaluations", outcome.evaluations},
                          {"best_path", best_path.to_string()}};
    json outputs;
    for (const char *name :
         {"generations.csv", "best_history.csv", "best_path.txt", "best_model.txt"}) {
        outputs[name] = fnv_file_hex((dir / name).string());
    }
    manifest["outputs"] = outputs;

    const std::string manifest_file = (dir / "manifest.json").string();
    std::ofstream mf(manifest_file, std::ios::binary);
    if (!mf) {
        throw IoError("cannot write manifest: " + manifest_file);
    }
    mf << manifest.dump(2) << "\n";
    outcome.manifest_file = manifest_file;
    return outcome;
}

} // namespace mqne
