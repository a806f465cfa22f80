#pragma once

#include "mqne/block_graph.hpp"

#include <array>
#include <complex>
#include <vector>

namespace mqne {

using Complex = std::complex<double>;
using AngleVector = std::vector<double>;

/**
 * Exact statevector over 2^k basis states.
 *
 * Basis convention (fixed throughout): qubit 1 is the most significant bit
 * of the state index, so qubit q addresses bit (k - q) and the last qubit is
 * the least significant bit.
 */
struct StateVector {
    int k = 0;
    std::vector<Complex> amps;

    static StateVector zero_state(int k);
    static StateVector basis(int k, std::size_t index);
    double norm() const;
};

/**
 * Flattened primitive gate with exactly one angle slot. A Rot block gate
 * expands to Rz, Rx, Rz on its qubit (applied in that order); a CRx applies
 * Rx(angle) on `qubit` when `control` reads 1.
 */
struct PrimGate {
    enum class Kind : std::uint8_t { Rz, Rx, CRx };
    Kind kind = Kind::Rz;
    std::uint8_t qubit = 0;
    std::uint8_t control = 0; // CRx only
};

/**
 * A compiled sequence of gate-blocks. Gates preserve block order; within a
 * block the (disjoint, commuting) gates follow the canonical block order.
 * param_count = 3 * #Rot + #CRx, one angle per primitive gate in order.
 */
struct ParamCircuit {
    int k = 0;
    std::vector<GateBlock> blocks;
    std::vector<PrimGate> prims;
    std::vector<std::uint32_t> source_path; // node labels; empty if ad hoc
    int rot_gates = 0;
    int crx_gates = 0;

    int param_count() const { return 3 * rot_gates + crx_gates; }
    int depth() const { return int(blocks.size()); }
};

/// Compiles a block sequence directly (no connection-rule checks).
ParamCircuit compile_blocks(int k, std::vector<GateBlock> blocks);

/// Compiles the path's blocks in order. Throws std::out_of_range on a node
/// label outside the library.
ParamCircuit compile_path(const Path &path, const BlockLibrary &lib);

/**
 * Gate semantics:
 *   Rz(a) = diag(e^{-ia/2}, e^{+ia/2})
 *   Rx(a) = cos(a/2) I - i sin(a/2) X
 *   CRx(c,t;a) applies Rx(a) on t where c reads |1>
 * Every gate is unitary, so the norm is preserved; all gates reduce to the
 * identity at angle 0.
 */
void apply_circuit_in_place(const ParamCircuit &circuit, const AngleVector &theta,
                            StateVector &state);
StateVector apply_circuit(const ParamCircuit &circuit, const AngleVector &theta,
                          const StateVector &input);

/**
 * Zero-pads `features` to 2^data_qubits, L2-normalizes, and tensors |0> onto
 * the readout qubit(s); the readout qubit is the last (highest-index) qubit.
 * Throws DataError for an all-zero feature vector and DimensionError when
 * the features exceed 2^data_qubits or no readout qubit remains.
 */
StateVector amplitude_encode(const std::vector<double> &features, int data_qubits,
                             int total_qubits);

/// (g1, g2): probability of reading `qubit` (1-based) as 0 resp. 1.
std::array<double, 2> readout_probs(const StateVector &state, int qubit);

struct LossGrad {
    double loss = 0;
    double g1 = 0;
    double g2 = 0;
    AngleVector grad;
};

/**
 * Loss, readout probabilities and the exact d(loss)/d(theta) for one sample
 * under the clamped cross-entropy loss on the last qubit. One forward pass
 * plus one reverse sweep over the circuit, O(#gates * 2^k); mathematically
 * equal to the parameter-shift values for these gates.
 */
LossGrad loss_and_gradient(const ParamCircuit &circuit, const AngleVector &theta,
                           const StateVector &input,
                           const std::array<double, 2> &label);

/// Gradient-only convenience wrapper around loss_and_gradient.
AngleVector gradient(const ParamCircuit &circuit, const AngleVector &theta,
                     const StateVector &input, const std::array<double, 2> &label);

} // namespace mqne
