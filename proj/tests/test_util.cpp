#include "test_util.hpp"

#include "mqne/trainer.hpp"

#include <cmath>

namespace testutil {

double fd_loss(const mqne::ParamCircuit &circuit, const mqne::AngleVector &theta,
               const mqne::StateVector &input, const std::array<double, 2> &label) {
    const mqne::StateVector out = mqne::apply_circuit(circuit, theta, input);
    const auto g = mqne::readout_probs(out, circuit.k);
    return mqne::loss(g[0], g[1], label);
}

namespace {

void put_be32(std::ofstream &out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char *>(b), 4);
}

// Soft-edged line segment stamped into a 28x28 canvas.
void draw_segment(std::vector<double> &img, double x0, double y0, double x1,
                  double y1, double thickness, double intensity) {
    for (int r = 0; r < 28; ++r) {
        for (int c = 0; c < 28; ++c) {
            const double px = c, py = r;
            const double dx = x1 - x0, dy = y1 - y0;
            const double len2 = dx * dx + dy * dy;
            double t = len2 > 0 ? ((px - x0) * dx + (py - y0) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double qx = x0 + t * dx, qy = y0 + t * dy;
            const double d = std::hypot(px - qx, py - qy);
            const double v = intensity * std::clamp(1.5 - d / thickness, 0.0, 1.0);
            img[std::size_t(r) * 28 + c] = std::max(img[std::size_t(r) * 28 + c],
                                                    std::min(v, 1.0));
        }
    }
}

void draw_ring(std::vector<double> &img, double cx, double cy, double radius,
               double thickness, double intensity) {
    for (int r = 0; r < 28; ++r) {
        for (int c = 0; c < 28; ++c) {
            const double d = std::abs(std::hypot(c - cx, r - cy) - radius);
            const double v = intensity * std::clamp(1.5 - d / thickness, 0.0, 1.0);
            img[std::size_t(r) * 28 + c] = std::max(img[std::size_t(r) * 28 + c],
                                                    std::min(v, 1.0));
        }
    }
}

} // namespace

void write_idx_images(const std::string &file,
                      const std::vector<std::vector<unsigned char>> &images,
                      int rows, int cols) {
    std::ofstream out(file, std::ios::binary);
    put_be32(out, 0x00000803u);
    put_be32(out, std::uint32_t(images.size()));
    put_be32(out, std::uint32_t(rows));
    put_be32(out, std::uint32_t(cols));
    for (const auto &img : images) {
        out.write(reinterpret_cast<const char *>(img.data()),
                  std::streamsize(img.size()));
    }
}

void write_idx_labels(const std::string &file,
                      const std::vector<unsigned char> &labels) {
    std::ofstream out(file, std::ios::binary);
    put_be32(out, 0x00000801u);
    put_be32(out, std::uint32_t(labels.size()));
    out.write(reinterpret_cast<const char *>(labels.data()),
              std::streamsize(labels.size()));
}

IdxFiles write_synthetic_digits(const std::string &dir, std::size_t count,
                                std::uint64_t seed) {
    mqne::RngStream rng(seed);
    std::vector<std::vector<unsigned char>> images;
    std::vector<unsigned char> labels;
    images.reserve(count);
    labels.reserve(count);

    for (std::size_t i = 0; i < count; ++i) {
        const bool is_nine = rng.uniform_real() < 0.5;
        std::vector<double> img(28 * 28, 0.0);
        const double jx = (rng.uniform_real() - 0.5) * 6.0;  // horizontal shift
        const double jy = (rng.uniform_real() - 0.5) * 3.0;  // vertical shift
        const double slant = (rng.uniform_real() - 0.5) * 4.0;
        const double thick = 1.1 + rng.uniform_real() * 1.4;
        const double bright = 0.75 + rng.uniform_real() * 0.25;
        if (is_nine) {
            const double cx = 13.5 + jx, cy = 9.5 + jy;
            const double radius = 3.5 + rng.uniform_real() * 1.5;
            draw_ring(img, cx, cy, radius, thick, bright);
            draw_segment(img, cx + radius, cy, cx + radius + slant * 0.5, 22.0 + jy,
                         thick, bright);
        } else {
            const double top_x = 14.0 + jx + slant, bot_x = 14.0 + jx - slant;
            draw_segment(img, top_x, 5.0 + jy, bot_x, 23.0 + jy, thick, bright);
            if (rng.uniform_real() < 0.5) { // optional serif
                draw_segment(img, top_x - 3.0, 8.0 + jy, top_x, 5.0 + jy,
                             thick * 0.8, bright);
            }
        }
        std::vector<unsigned char> bytes(28 * 28);
        for (std::size_t p = 0; p < bytes.size(); ++p) {
            const double noise = rng.uniform_real() * 0.12;
            bytes[p] = static_cast<unsigned char>(
                std::clamp(img[p] + noise, 0.0, 1.0) * 255.0);
        }
        images.push_back(std::move(bytes));
        labels.push_back(is_nine ? 9 : 1);
    }

    IdxFiles files;
    files.images = (std::filesystem::path(dir) / "digits-images-idx3-ubyte").string();
    files.labels = (std::filesystem::path(dir) / "digits-labels-idx1-ubyte").string();
    write_idx_images(files.images, images, 28, 28);
    write_idx_labels(files.labels, labels);
    return files;
}

} // namespace testutil
