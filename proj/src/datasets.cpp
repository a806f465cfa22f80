#include "mqne/datasets.hpp"

#include "mqne/errors.hpp"
#include "mqne/parallel.hpp"
#include "mqne/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace mqne {

std::string to_string(Partition p) {
    switch (p) {
    case Partition::None:
        return "none";
    case Partition::Train:
        return "train";
    case Partition::Validation:
        return "validation";
    case Partition::Test:
        return "test";
    }
    return "?";
}

std::vector<std::size_t> Dataset::indices(Partition p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].partition == p) {
            out.push_back(i);
        }
    }
    return out;
}

std::array<std::size_t, 3> Dataset::partition_counts() const {
    std::array<std::size_t, 3> c{0, 0, 0};
    for (const Sample &s : samples) {
        switch (s.partition) {
        case Partition::Train:
            ++c[0];
            break;
        case Partition::Validation:
            ++c[1];
            break;
        case Partition::Test:
            ++c[2];
            break;
        case Partition::None:
            break;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// IDX / MNIST

namespace {

std::uint32_t read_be32(std::istream &in, const std::string &file) {
    unsigned char b[4];
    in.read(reinterpret_cast<char *>(b), 4);
    if (!in) {
        throw IoError("truncated IDX file: " + file);
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

} // namespace

std::vector<double> downscale_bilinear(const std::vector<double> &image, int h,
                                       int w, int out_h, int out_w) {
    if (image.size() != std::size_t(h) * std::size_t(w)) {
        throw DimensionError("downscale_bilinear: image size mismatch");
    }
    std::vector<double> out(std::size_t(out_h) * out_w);
    const double sy = double(h) / out_h;
    const double sx = double(w) / out_w;
    for (int r = 0; r < out_h; ++r) {
        // pixel-center mapping, clamped at the borders
        double y = (r + 0.5) * sy - 0.5;
        y = std::clamp(y, 0.0, double(h - 1));
        const int y0 = int(y);
        const int y1 = std::min(y0 + 1, h - 1);
        const double fy = y - y0;
        for (int c = 0; c < out_w; ++c) {
            double x = (c + 0.5) * sx - 0.5;
            x = std::clamp(x, 0.0, double(w - 1));
            const int x0 = int(x);
            const int x1 = std::min(x0 + 1, w - 1);
            const double fx = x - x0;
            const double top = image[std::size_t(y0) * w + x0] * (1 - fx) +
                               image[std::size_t(y0) * w + x1] * fx;
            const double bot = image[std::size_t(y1) * w + x0] * (1 - fx) +
                               image[std::size_t(y1) * w + x1] * fx;
            out[std::size_t(r) * out_w + c] = top * (1 - fy) + bot * fy;
        }
    }
    return out;
}

Dataset load_mnist(const std::string &image_file, const std::string &label_file,
                   std::array<int, 2> digits) {
    std::ifstream imgs(image_file, std::ios::binary);
    if (!imgs) {
        throw IoError("cannot open image file: " + image_file);
    }
    if (read_be32(imgs, image_file) != 0x00000803u) {
        throw IoError("bad magic in image file: " + image_file);
    }
    const std::uint32_t n_images = read_be32(imgs, image_file);
    const std::uint32_t rows = read_be32(imgs, image_file);
    const std::uint32_t cols = read_be32(imgs, image_file);

    std::ifstream labs(label_file, std::ios::binary);
    if (!labs) {
        throw IoError("cannot open label file: " + label_file);
    }
    if (read_be32(labs, label_file) != 0x00000801u) {
        throw IoError("bad magic in label file: " + label_file);
    }
    const std::uint32_t n_labels = read_be32(labs, label_file);
    if (n_labels != n_images) {
        throw DataError("image/label count mismatch: " + std::to_string(n_images) +
                        " vs " + std::to_string(n_labels));
    }

    Dataset ds;
    ds.data_qubits = 8; // 16*16 = 256 amplitudes
    std::vector<unsigned char> pix(std::size_t(rows) * cols);
    std::vector<double> img(pix.size());
    std::size_t kept[2] = {0, 0};
    for (std::uint32_t i = 0; i < n_images; ++i) {
        imgs.read(reinterpret_cast<char *>(pix.data()), std::streamsize(pix.size()));
        if (!imgs) {
            throw IoError("truncated IDX file: " + image_file);
        }
        char lab_raw;
        labs.read(&lab_raw, 1);
        if (!labs) {
            throw IoError("truncated IDX file: " + label_file);
        }
        const int label = int(static_cast<unsigned char>(lab_raw));
        if (label != digits[0] && label != digits[1]) {
            continue;
        }
        for (std::size_t p = 0; p < pix.size(); ++p) {
            img[p] = pix[p] / 255.0;
        }
        Sample s;
        s.features = downscale_bilinear(img, int(rows), int(cols), 16, 16);
        s.metadata = label;
        if (label == digits[0]) {
            s.label = {1, 0};
            ++kept[0];
        } else {
            s.label = {0, 1};
            ++kept[1];
        }
        ds.samples.push_back(std::move(s));
    }

    nlohmann::json prov;
    prov["source"] = "mnist-idx";
    prov["image_file"] = image_file;
    prov["label_file"] = label_file;
    prov["digits"] = {digits[0], digits[1]};
    prov["class_counts"] = {kept[0], kept[1]};
    prov["image_size"] = {16, 16};
    ds.provenance = prov.dump();
    return ds;
}

// ---------------------------------------------------------------------------
// WDBC

Dataset load_wdbc(const std::string &csv_file) {
    std::ifstream in(csv_file);
    if (!in) {
        throw IoError("cannot open csv file: " + csv_file);
    }
    constexpr int kFeatures = 30;
    Dataset ds;
    ds.data_qubits = 6; // 30 features padded to 64 amplitudes
    std::string line;
    std::size_t row = 0;
    std::size_t counts[2] = {0, 0};
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',')) {
            throw DataError("wdbc row " + std::to_string(row) + ": missing id");
        }
        if (!std::getline(ss, field, ',')) {
            throw DataError("wdbc row " + std::to_string(row) + ": missing diagnosis");
        }
        Sample s;
        if (field == "M") {
            s.label = {1, 0};
            ++counts[0];
        } else if (field == "B") {
            s.label = {0, 1};
            ++counts[1];
        } else {
            throw DataError("wdbc row " + std::to_string(row) +
                            ": unknown diagnosis '" + field + "'");
        }
        s.features.reserve(kFeatures);
        for (int f = 0; f < kFeatures; ++f) {
            if (!std::getline(ss, field, ',')) {
                throw DataError("wdbc row " + std::to_string(row) + ": only " +
                                std::to_string(f) + " of 30 features");
            }
            try {
                std::size_t pos = 0;
                s.features.push_back(std::stod(field, &pos));
                if (pos != field.size()) {
                    throw std::invalid_argument(field);
                }
            } catch (const std::exception &) {
                throw DataError("wdbc row " + std::to_string(row) +
                                ": bad numeric field '" + field + "'");
            }
        }
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) {
        throw DataError("wdbc file has no rows: " + csv_file);
    }

    // Per-feature min-max normalization over the whole file; a zero-range
    // column maps to 0.
    std::vector<double> lo(kFeatures, std::numeric_limits<double>::infinity());
    std::vector<double> hi(kFeatures, -std::numeric_limits<double>::infinity());
    for (const Sample &s : ds.samples) {
        for (int f = 0; f < kFeatures; ++f) {
            lo[f] = std::min(lo[f], s.features[f]);
            hi[f] = std::max(hi[f], s.features[f]);
        }
    }
    for (Sample &s : ds.samples) {
        for (int f = 0; f < kFeatures; ++f) {
            const double range = hi[f] - lo[f];
            s.features[f] = range > 0 ? (s.features[f] - lo[f]) / range : 0.0;
        }
    }

    nlohmann::json prov;
    prov["source"] = "wdbc-csv";
    prov["csv_file"] = csv_file;
    prov["rows"] = ds.samples.size();
    prov["class_counts"] = {counts[0], counts[1]};
    prov["feature_min"] = lo;
    prov["feature_max"] = hi;
    ds.provenance = prov.dump();
    return ds;
}

// ---------------------------------------------------------------------------
// Cluster-Ising ground states

std::vector<double> ClusterIsingSpec::even_grid(std::size_t n, double lo, double hi) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + (double(i) + 0.5) * (hi - lo) / double(n);
    }
    return grid;
}

void ClusterIsingSpec::validate() const {
    if (spins < 3 || spins > 12) {
        throw std::invalid_argument("ClusterIsingSpec: spins must be in [3, 12]");
    }
    for (double l : lambdas) {
        if (l < 0) {
            throw std::invalid_argument("ClusterIsingSpec: lambda must be >= 0");
        }
    }
}

namespace {

// Site j (1-based, mod N) flags bit (N - j): site 1 is the most significant
// bit, matching the simulator's qubit convention. Every term has real matrix
// elements (the two Y phases multiply to +-1), so the matrix is built real
// symmetric and the eigensolver runs on the real path.
Eigen::MatrixXd cluster_ising_matrix(int n, double lambda) {
    if (n < 3 || n > 12) {
        throw std::invalid_argument("cluster_ising: spins must be in [3, 12]");
    }
    const std::size_t dim = std::size_t(1) << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(Eigen::Index(dim), Eigen::Index(dim));
    auto bit_of_site = [n](int site) {
        const int s = ((site - 1) % n + n) % n; // 0-based site
        return std::size_t(1) << (n - 1 - s);
    };
    for (std::size_t b = 0; b < dim; ++b) {
        for (int j = 1; j <= n; ++j) {
            // -X_{j-1} Z_j X_{j+1}: flips neighbors, sign from Z.
            {
                const std::size_t flip = bit_of_site(j - 1) | bit_of_site(j + 1);
                const double zsign = (b & bit_of_site(j)) ? -1.0 : 1.0;
                h(Eigen::Index(b ^ flip), Eigen::Index(b)) += -zsign;
            }
            // +lambda Y_j Y_{j+1}: flips both, phase -1 when the bits agree.
            {
                const std::size_t b1 = bit_of_site(j), b2 = bit_of_site(j + 1);
                const bool same = ((b & b1) != 0) == ((b & b2) != 0);
                h(Eigen::Index(b ^ (b1 | b2)), Eigen::Index(b)) +=
                    lambda * (same ? -1.0 : 1.0);
            }
        }
    }
    return h;
}

} // namespace

std::vector<std::complex<double>> cluster_ising_hamiltonian(int spins,
                                                            double lambda) {
    const Eigen::MatrixXd h = cluster_ising_matrix(spins, lambda);
    std::vector<std::complex<double>> out(std::size_t(h.rows()) * h.cols());
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            out[std::size_t(r) * h.cols() + c] = h(r, c);
        }
    }
    return out;
}

GroundState cluster_ising_ground(int spins, double lambda) {
    const Eigen::MatrixXd h = cluster_ising_matrix(spins, lambda);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const auto &evals = solver.eigenvalues();
    Eigen::VectorXd ground = solver.eigenvectors().col(0);

    GroundState gs;
    gs.energy = evals(0);
    gs.gap = evals.size() > 1 ? evals(1) - evals(0) : 0.0;

    // Fix the global phase: largest-magnitude amplitude real positive (first
    // such index on near-ties, which keeps the features deterministic).
    Eigen::Index arg = 0;
    double best = -1;
    for (Eigen::Index a = 0; a < ground.size(); ++a) {
        const double m = std::abs(ground(a));
        if (m > best + 1e-15) {
            best = m;
            arg = a;
        }
    }
    if (ground(arg) < 0) {
        ground = -ground;
    }

    gs.amplitudes.resize(std::size_t(ground.size()));
    for (Eigen::Index a = 0; a < ground.size(); ++a) {
        gs.amplitudes[std::size_t(a)] = ground(a);
    }
    return gs;
}

Dataset gen_cluster_ising(const ClusterIsingSpec &spec, int threads) {
    spec.validate();
    const int n = spec.spins;

    Dataset ds;
    ds.data_qubits = n;
    ds.samples.resize(spec.lambdas.size());
    std::vector<double> energies(spec.lambdas.size());
    std::vector<std::uint8_t> degenerate(spec.lambdas.size(), 0);

    parallel_for(spec.lambdas.size(), threads, [&](std::size_t i) {
        const double lambda = spec.lambdas[i];
        GroundState gs = cluster_ising_ground(n, lambda);
        energies[i] = gs.energy;
        degenerate[i] = gs.gap < 1e-10;

        Sample &s = ds.samples[i];
        s.features = std::move(gs.amplitudes);
        s.metadata = lambda;
        s.label = lambda < 1.0 ? std::array<double, 2>{1, 0}
                               : std::array<double, 2>{0, 1};
    });

    nlohmann::json prov;
    prov["source"] = "cluster-ising";
    prov["spins"] = n;
    prov["boundary"] = "periodic";
    prov["lambda_count"] = spec.lambdas.size();
    if (!spec.lambdas.empty()) {
        prov["lambda_min"] = *std::min_element(spec.lambdas.begin(), spec.lambdas.end());
        prov["lambda_max"] = *std::max_element(spec.lambdas.begin(), spec.lambdas.end());
    }
    std::vector<double> warn;
    for (std::size_t i = 0; i < degenerate.size(); ++i) {
        if (degenerate[i]) {
            warn.push_back(spec.lambdas[i]);
        }
    }
    prov["degenerate_lambdas"] = warn;
    prov["ground_energies_head"] =
        std::vector<double>(energies.begin(),
                            energies.begin() + std::min<std::size_t>(4, energies.size()));
    ds.provenance = prov.dump();
    return ds;
}

void split(Dataset &dataset, std::array<std::size_t, 3> counts, std::uint64_t seed) {
    const std::size_t total = counts[0] + counts[1] + counts[2];
    if (total > dataset.samples.size()) {
        throw DataError("split: requested " + std::to_string(total) +
                        " samples, dataset has " +
                        std::to_string(dataset.samples.size()));
    }
    std::vector<std::size_t> order(dataset.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    RngStream rng = derive_stream(seed, "split");
    rng.shuffle(order);
    for (Sample &s : dataset.samples) {
        s.partition = Partition::None;
    }
    std::size_t at = 0;
    const Partition parts[3] = {Partition::Train, Partition::Validation,
                                Partition::Test};
    for (int p = 0; p < 3; ++p) {
        for (std::size_t i = 0; i < counts[p]; ++i) {
            dataset.samples[order[at++]].partition = parts[p];
        }
    }
}

} // namespace mqne
