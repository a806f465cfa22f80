#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace mqne {

enum class Partition : std::uint8_t { None = 0, Train = 1, Validation = 2, Test = 3 };

std::string to_string(Partition p);

/// One labeled sample. The label is a one-hot pair; metadata carries the
/// coupling lambda (spin datasets) or the source digit (image datasets).
struct Sample {
    std::vector<double> features;
    std::array<double, 2> label = {1, 0};
    double metadata = 0;
    Partition partition = Partition::None;

    int label_class() const { return label[0] == 1.0 ? 0 : 1; }
};

struct Dataset {
    std::vector<Sample> samples;
    int data_qubits = 0;
    std::string provenance; // JSON text

    std::vector<std::size_t> indices(Partition p) const;
    std::array<std::size_t, 3> partition_counts() const; // train, val, test
};

/**
 * Periodic cluster-Ising chain
 *   H(lambda) = -sum_j X_{j-1} Z_j X_{j+1} + lambda sum_j Y_j Y_{j+1}
 * on `spins` sites (indices mod N). Ground states below lambda = 1 sit in the
 * SPT cluster phase, above it in the antiferromagnetic phase.
 */
struct ClusterIsingSpec {
    int spins = 8;
    std::vector<double> lambdas;

    /// Midpoint grid of n values over (lo, hi); never hits the endpoints or
    /// the critical point 1.0, and balances the two phases for (0, 2).
    static std::vector<double> even_grid(std::size_t n, double lo = 0.0,
                                         double hi = 2.0);
    void validate() const;
};

/**
 * Loads the standard IDX image/label pair, keeps only the two digits, resizes
 * 28x28 -> 16x16 by bilinear interpolation, scales pixels to [0,1] and
 * flattens row-major to 256 features. Label digits[0] -> (1,0),
 * digits[1] -> (0,1). Throws IoError on bad magic / truncation and DataError
 * on image/label count mismatch.
 */
Dataset load_mnist(const std::string &image_file, const std::string &label_file,
                   std::array<int, 2> digits = {1, 9});

/**
 * Loads the breast-cancer CSV (id, diagnosis M|B, 30 real features per row).
 * Each feature column is min-max normalized to [0,1] over the whole file
 * (all-equal columns normalize to 0). M -> (1,0), B -> (0,1). Throws
 * DataError with the offending row number on parse errors or an unknown
 * diagnosis.
 */
Dataset load_wdbc(const std::string &csv_file);

/// Dense cluster-Ising Hamiltonian, row-major 2^spins x 2^spins. The matrix
/// is Hermitian (in fact real symmetric: the Y Y products are real).
std::vector<std::complex<double>> cluster_ising_hamiltonian(int spins,
                                                            double lambda);

struct GroundState {
    double energy = 0;
    double gap = 0; ///< distance to the second eigenvalue
    std::vector<double> amplitudes; ///< phase-fixed, real
};

/// Lowest eigenpair of H(lambda) with the global phase fixed so the
/// largest-magnitude amplitude is real positive.
GroundState cluster_ising_ground(int spins, double lambda);

/**
 * Dense exact diagonalization of H(lambda) for every lambda in the spec.
 * Features are the 2^N ground-state amplitudes with the global phase fixed
 * so the largest-magnitude amplitude is real positive (the Hamiltonian is
 * real symmetric, so the phase-fixed state is real). Label (1,0) for
 * lambda < 1, else (0,1). Near-degenerate ground spaces (gap < 1e-10) are
 * recorded in the provenance as warnings; the eigensolver's first vector is
 * kept.
 */
Dataset gen_cluster_ising(const ClusterIsingSpec &spec, int threads = 1);

/// Seeded shuffle, then contiguous assignment of (train, validation, test)
/// counts; leftover samples stay unpartitioned. Throws DataError when the
/// counts exceed the sample count.
void split(Dataset &dataset, std::array<std::size_t, 3> counts, std::uint64_t seed);

/// Bilinear resize of a row-major h x w image; preserves constants.
std::vector<double> downscale_bilinear(const std::vector<double> &image, int h,
                                       int w, int out_h, int out_w);

} // namespace mqne
