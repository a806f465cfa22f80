#include "mqne/io.hpp"

#include "mqne/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mqne {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open: " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string &path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write: " + path);
    }
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

std::vector<int> parse_int_list(const std::string &s, const std::string &context) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception &) {
            throw IoError(context + ": bad integer '" + tok + "'");
        }
    }
    return out;
}

} // namespace

std::string fnv_file_hex(const std::string &path) { return fnv_hex(slurp(path)); }

// ---------------------------------------------------------------------------
// library

std::string library_to_text(const BlockLibrary &lib) {
    std::ostringstream os;
    const LibrarySpec &spec = lib.spec();
    os << "k=" << spec.k << " mode=" << to_string(spec.mode);
    if (spec.mode == LibraryMode::Cutoff) {
        os << " cutoff=" << spec.cutoff;
    }
    os << " include_empty=" << (spec.include_empty_block ? 1 : 0)
       << " count=" << lib.size() << "\n";
    for (std::size_t i = 0; i < lib.size(); ++i) {
        os << lib.encoding(i).to_string() << "\n";
    }
    return os.str();
}

BlockLibrary library_from_text(const std::string &text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) {
        throw IoError("library file: missing header");
    }
    LibrarySpec spec;
    std::size_t count = 0;
    {
        std::stringstream hs(header);
        std::string kv;
        bool have_k = false, have_mode = false;
        while (hs >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw IoError("library header: bad field '" + kv + "'");
            }
            const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "k") {
                spec.k = std::stoi(val);
                have_k = true;
            } else if (key == "mode") {
                spec.mode = library_mode_from_string(val);
                have_mode = true;
            } else if (key == "cutoff") {
                spec.cutoff = std::stoi(val);
            } else if (key == "include_empty") {
                spec.include_empty_block = val != "0";
            } else if (key == "count") {
                count = std::stoul(val);
            } else {
                throw IoError("library header: unknown field '" + key + "'");
            }
        }
        if (!have_k || !have_mode) {
            throw IoError("library header: k and mode are required");
        }
    }

    std::vector<GateBlock> blocks;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto semi = line.find(';');
        if (semi == std::string::npos) {
            throw IoError("library line " + std::to_string(lineno) +
                          ": missing ';'");
        }
        EncodingVector v;
        v.k = spec.k;
        for (int part : parse_int_list(line.substr(0, semi),
                                       "library line " + std::to_string(lineno))) {
            v.entries.push_back(part);
        }
        for (int part : parse_int_list(line.substr(semi + 1),
                                       "library line " + std::to_string(lineno))) {
            v.entries.push_back(part);
        }
        blocks.push_back(decode_vector(v, spec.adjacent_only()));
    }
    BlockLibrary lib(spec, std::move(blocks));
    if (count != 0 && lib.size() != count) {
        throw IoError("library file: header count " + std::to_string(count) +
                      " != " + std::to_string(lib.size()) + " vectors");
    }
    return lib;
}

void write_library(const std::string &file, const BlockLibrary &lib) {
    spit(file, library_to_text(lib));
}

BlockLibrary read_library(const std::string &file) {
    return library_from_text(slurp(file));
}

// ---------------------------------------------------------------------------
// graph

std::string graph_to_text(const BlockGraph &graph) {
    std::ostringstream os;
    os << "nodes=" << graph.node_count() << " edges=" << graph.edge_count()
       << "\n";
    for (std::uint32_t node : graph.active_nodes()) {
        os << node << ":";
        for (std::uint32_t s : graph.successors(node)) {
            os << " " << s;
        }
        os << "\n";
    }
    return os.str();
}

void write_graph(const std::string &file, const BlockGraph &graph) {
    spit(file, graph_to_text(graph));
}

// ---------------------------------------------------------------------------
// paths

Path parse_path(const std::string &text) {
    Path p;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        if (tok == "->") {
            continue;
        }
        try {
            p.nodes.push_back(std::uint32_t(std::stoul(tok)));
        } catch (const std::exception &) {
            throw IoError("parse_path: bad token '" + tok + "'");
        }
    }
    if (p.nodes.empty()) {
        throw IoError("parse_path: empty path");
    }
    return p;
}

void write_path(const std::string &file, const Path &path) {
    spit(file, path.to_string() + "\n");
}

Path read_path(const std::string &file) { return parse_path(slurp(file)); }

// ---------------------------------------------------------------------------
// models

void write_model(const std::string &file, const TrainedModel &model) {
    std::ostringstream os;
    os << "mqne-model v1\n";
    os << "k=" << model.circuit.k << " params=" << model.theta.size() << "\n";
    Path p;
    p.nodes = model.circuit.source_path;
    os << "path: " << p.to_string() << "\n";
    for (double t : model.theta) {
        os << format_double(t) << "\n";
    }
    spit(file, os.str());
}

ModelFile read_model(const std::string &file) {
    std::istringstream in(slurp(file));
    std::string line;
    if (!std::getline(in, line) || line != "mqne-model v1") {
        throw IoError("model file: bad header: " + file);
    }
    ModelFile m;
    std::size_t params = 0;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "k=%d params=%zu", &m.k, &params) != 2) {
        throw IoError("model file: bad size line");
    }
    if (!std::getline(in, line) || line.rfind("path: ", 0) != 0) {
        throw IoError("model file: missing path line");
    }
    m.path = parse_path(line.substr(6));
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        double v = 0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc()) {
            throw IoError("model file: bad angle '" + line + "'");
        }
        m.theta.push_back(v);
    }
    if (m.theta.size() != params) {
        throw IoError("model file: angle count mismatch");
    }
    return m;
}

// ---------------------------------------------------------------------------
// CSV

std::string history_to_csv(const TrainedModel &model) {
    std::ostringstream os;
    os << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const EpochStats &e : model.history) {
        os << e.epoch << "," << format_double(e.train_loss) << ","
           << format_double(e.train_acc) << "," << format_double(e.val_loss) << ","
           << format_double(e.val_acc) << "\n";
    }
    return os.str();
}

void write_history_csv(const std::string &file, const TrainedModel &model) {
    spit(file, history_to_csv(model));
}

std::string generations_to_csv(const std::vector<GenerationLog> &logs) {
    std::ostringstream os;
    os << "generation,individual,fitness,failed,param_count,rot_gates,crx_gates,"
          "depth,best_in_generation,best_so_far,path\n";
    for (const GenerationLog &g : logs) {
        for (std::size_t i = 0; i < g.individuals.size(); ++i) {
            const IndividualLog &ind = g.individuals[i];
            os << g.generation << "," << i << "," << format_double(ind.fitness)
               << "," << (ind.failed ? 1 : 0) << "," << ind.param_count << ","
               << ind.rot_gates << "," << ind.crx_gates << ","
               << ind.path.nodes.size() << "," << format_double(g.best_fitness)
               << "," << format_double(g.best_so_far) << "," << ind.path.to_string()
               << "\n";
        }
    }
    return os.str();
}

void write_generations_csv(const std::string &file,
                           const std::vector<GenerationLog> &logs) {
    spit(file, generations_to_csv(logs));
}

// ---------------------------------------------------------------------------
// dataset cache

namespace {

constexpr char kCacheMagic[4] = {'M', 'Q', 'D', 'S'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T> void put(std::string &out, const T &v) {
    const char *p = reinterpret_cast<const char *>(&v);
    out.append(p, sizeof(T));
}

template <typename T>
T take(const std::string &in, std::size_t &at, const std::string &file) {
    if (at + sizeof(T) > in.size()) {
        throw IoError("dataset cache truncated: " + file);
    }
    T v;
    std::memcpy(&v, in.data() + at, sizeof(T));
    at += sizeof(T);
    return v;
}

} // namespace

void write_dataset_cache(const std::string &file, const Dataset &dataset) {
    const std::size_t flen =
        dataset.samples.empty() ? 0 : dataset.samples.front().features.size();
    std::string out;
    out.append(kCacheMagic, 4);
    put(out, kCacheVersion);
    put(out, std::uint32_t(dataset.data_qubits));
    put(out, std::uint32_t(flen));
    put(out, std::uint64_t(dataset.samples.size()));
    for (const Sample &s : dataset.samples) {
        if (s.features.size() != flen) {
            throw IoError("dataset cache: ragged feature vectors");
        }
        put(out, std::uint8_t(s.label_class()));
        put(out, std::uint8_t(s.partition));
        put(out, s.metadata);
        for (double f : s.features) {
            put(out, f);
        }
    }
    spit(file, out);
    spit(file + ".json",
         dataset.provenance.empty() ? std::string("{}") : dataset.provenance);
}

Dataset read_dataset_cache(const std::string &file) {
    const std::string in = slurp(file);
    std::size_t at = 0;
    if (in.size() < 4 || std::memcmp(in.data(), kCacheMagic, 4) != 0) {
        throw IoError("dataset cache: bad magic: " + file);
    }
    at = 4;
    const auto version = take<std::uint32_t>(in, at, file);
    if (version != kCacheVersion) {
        throw IoError("dataset cache: unsupported version " +
                      std::to_string(version));
    }
    Dataset ds;
    ds.data_qubits = int(take<std::uint32_t>(in, at, file));
    const auto flen = take<std::uint32_t>(in, at, file);
    const auto count = take<std::uint64_t>(in, at, file);
    ds.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Sample s;
        const auto cls = take<std::uint8_t>(in, at, file);
        s.label = cls == 0 ? std::array<double, 2>{1, 0} : std::array<double, 2>{0, 1};
        s.partition = Partition(take<std::uint8_t>(in, at, file));
        s.metadata = take<double>(in, at, file);
        s.features.resize(flen);
        for (std::uint32_t f = 0; f < flen; ++f) {
            s.features[f] = take<double>(in, at, file);
        }
        ds.samples.push_back(std::move(s));
    }
    if (at != in.size()) {
        throw IoError("dataset cache: trailing bytes: " + file);
    }
    std::ifstream side(file + ".json", std::ios::binary);
    if (side) {
        std::ostringstream os;
        os << side.rdbuf();
        ds.provenance = os.str();
    }
    return ds;
}

} // namespace mqne
