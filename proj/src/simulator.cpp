#include "mqne/simulator.hpp"

#include "mqne/errors.hpp"
#include "mqne/trainer.hpp"

#include <cmath>

namespace mqne {

StateVector StateVector::zero_state(int k) { return basis(k, 0); }

StateVector StateVector::basis(int k, std::size_t index) {
    if (k < 1 || k > 24) {
        throw std::invalid_argument("StateVector: k out of range");
    }
    StateVector s;
    s.k = k;
    s.amps.assign(std::size_t(1) << k, Complex(0, 0));
    s.amps.at(index) = Complex(1, 0);
    return s;
}

double StateVector::norm() const {
    double n = 0;
    for (const Complex &a : amps) {
        n += std::norm(a);
    }
    return std::sqrt(n);
}

namespace {

// Bit position of 1-based qubit q in a k-qubit index (qubit 1 = MSB).
inline int bit_of(int k, int q) { return k - q; }

void apply_rz(Complex *s, int k, int q, double angle) {
    const std::size_t dim = std::size_t(1) << k;
    const double c = std::cos(angle / 2), sn = std::sin(angle / 2);
    const Complex p0(c, -sn), p1(c, sn);
    const std::size_t stride = std::size_t(1) << bit_of(k, q);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            s[i] *= p0;
            s[i + stride] *= p1;
        }
    }
}

// a' = cos a - i sin b ; b' = -i sin a + cos b, written out in reals.
inline void rx_pair(Complex &a, Complex &b, double c, double sn) {
    const double ar = a.real(), ai = a.imag();
    const double br = b.real(), bi = b.imag();
    a = Complex(c * ar + sn * bi, c * ai - sn * br);
    b = Complex(c * br + sn * ai, c * bi - sn * ar);
}

void apply_rx(Complex *s, int k, int q, double angle) {
    const std::size_t dim = std::size_t(1) << k;
    const double c = std::cos(angle / 2), sn = std::sin(angle / 2);
    const std::size_t stride = std::size_t(1) << bit_of(k, q);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            rx_pair(s[i], s[i + stride], c, sn);
        }
    }
}

void apply_crx(Complex *s, int k, int control, int target, double angle) {
    const std::size_t dim = std::size_t(1) << k;
    const double c = std::cos(angle / 2), sn = std::sin(angle / 2);
    const std::size_t cbit = std::size_t(1) << bit_of(k, control);
    const std::size_t tbit = std::size_t(1) << bit_of(k, target);
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) {
            rx_pair(s[i], s[i | tbit], c, sn);
        }
    }
}

void apply_prim(Complex *s, int k, const PrimGate &g, double angle) {
    switch (g.kind) {
    case PrimGate::Kind::Rz:
        apply_rz(s, k, g.qubit, angle);
        break;
    case PrimGate::Kind::Rx:
        apply_rx(s, k, g.qubit, angle);
        break;
    case PrimGate::Kind::CRx:
        apply_crx(s, k, g.control, g.qubit, angle);
        break;
    }
}

// Im( <mu| P |psi> ) for the gate generator P: Z for Rz, X for Rx, and
// |1><1|_c (x) X_t for CRx. This is the reverse-sweep gradient term.
double generator_overlap(const PrimGate &g, int k, const Complex *mu,
                         const Complex *psi) {
    const std::size_t dim = std::size_t(1) << k;
    Complex acc(0, 0);
    switch (g.kind) {
    case PrimGate::Kind::Rz: {
        const std::size_t qbit = std::size_t(1) << bit_of(k, g.qubit);
        for (std::size_t i = 0; i < dim; ++i) {
            const double sign = (i & qbit) ? -1.0 : 1.0;
            acc += std::conj(mu[i]) * (sign * psi[i]);
        }
        break;
    }
    case PrimGate::Kind::Rx: {
        const std::size_t qbit = std::size_t(1) << bit_of(k, g.qubit);
        for (std::size_t i = 0; i < dim; ++i) {
            acc += std::conj(mu[i]) * psi[i ^ qbit];
        }
        break;
    }
    case PrimGate::Kind::CRx: {
        const std::size_t cbit = std::size_t(1) << bit_of(k, g.control);
        const std::size_t tbit = std::size_t(1) << bit_of(k, g.qubit);
        for (std::size_t i = 0; i < dim; ++i) {
            if (i & cbit) {
                acc += std::conj(mu[i]) * psi[i ^ tbit];
            }
        }
        break;
    }
    }
    return acc.imag();
}

} // namespace

ParamCircuit compile_blocks(int k, std::vector<GateBlock> blocks) {
    ParamCircuit c;
    c.k = k;
    for (const GateBlock &b : blocks) {
        if (b.k != k) {
            throw DimensionError("compile_blocks: block qubit count mismatch");
        }
        for (const Gate &g : b.gates) {
            if (g.kind == GateKind::Rot) {
                c.prims.push_back({PrimGate::Kind::Rz, std::uint8_t(g.qubit), 0});
                c.prims.push_back({PrimGate::Kind::Rx, std::uint8_t(g.qubit), 0});
                c.prims.push_back({PrimGate::Kind::Rz, std::uint8_t(g.qubit), 0});
                ++c.rot_gates;
            } else {
                c.prims.push_back({PrimGate::Kind::CRx, std::uint8_t(g.target),
                                   std::uint8_t(g.control)});
                ++c.crx_gates;
            }
        }
    }
    c.blocks = std::move(blocks);
    return c;
}

ParamCircuit compile_path(const Path &path, const BlockLibrary &lib) {
    std::vector<GateBlock> blocks;
    blocks.reserve(path.nodes.size());
    for (std::uint32_t n : path.nodes) {
        if (n >= lib.size()) {
            throw std::out_of_range("compile_path: node " + std::to_string(n) +
                                    " outside library of size " +
                                    std::to_string(lib.size()));
        }
        blocks.push_back(lib.block(n));
    }
    ParamCircuit c = compile_blocks(lib.spec().k, std::move(blocks));
    c.source_path = path.nodes;
    return c;
}

void apply_circuit_in_place(const ParamCircuit &circuit, const AngleVector &theta,
                            StateVector &state) {
    if (state.k != circuit.k) {
        throw DimensionError("apply_circuit: state/circuit qubit mismatch");
    }
    if (int(theta.size()) != circuit.param_count()) {
        throw DimensionError("apply_circuit: expected " +
                             std::to_string(circuit.param_count()) +
                             " angles, got " + std::to_string(theta.size()));
    }
    Complex *s = state.amps.data();
    for (std::size_t j = 0; j < circuit.prims.size(); ++j) {
        apply_prim(s, circuit.k, circuit.prims[j], theta[j]);
    }
}

StateVector apply_circuit(const ParamCircuit &circuit, const AngleVector &theta,
                          const StateVector &input) {
    StateVector out = input;
    apply_circuit_in_place(circuit, theta, out);
    return out;
}

StateVector amplitude_encode(const std::vector<double> &features, int data_qubits,
                             int total_qubits) {
    if (data_qubits < 1 || total_qubits <= data_qubits) {
        throw DimensionError("amplitude_encode: need data_qubits >= 1 and at "
                             "least one readout qubit");
    }
    const std::size_t data_dim = std::size_t(1) << data_qubits;
    if (features.size() > data_dim) {
        throw DimensionError("amplitude_encode: " + std::to_string(features.size()) +
                             " features exceed 2^" + std::to_string(data_qubits));
    }
    double sq = 0;
    for (double f : features) {
        sq += f * f;
    }
    if (sq == 0) {
        throw DataError("amplitude_encode: all-zero feature vector");
    }
    const double inv = 1.0 / std::sqrt(sq);
    StateVector s;
    s.k = total_qubits;
    s.amps.assign(std::size_t(1) << total_qubits, Complex(0, 0));
    const int readout_bits = total_qubits - data_qubits;
    for (std::size_t i = 0; i < features.size(); ++i) {
        s.amps[i << readout_bits] = Complex(features[i] * inv, 0);
    }
    return s;
}

std::array<double, 2> readout_probs(const StateVector &state, int qubit) {
    if (qubit < 1 || qubit > state.k) {
        throw std::out_of_range("readout_probs: qubit out of range");
    }
    const std::size_t qbit = std::size_t(1) << bit_of(state.k, qubit);
    double g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        ((i & qbit) ? g2 : g1) += std::norm(state.amps[i]);
    }
    return {g1, g2};
}

LossGrad loss_and_gradient(const ParamCircuit &circuit, const AngleVector &theta,
                           const StateVector &input,
                           const std::array<double, 2> &label) {
    LossGrad out;
    out.grad.assign(theta.size(), 0.0);

    StateVector psi = apply_circuit(circuit, theta, input);
    const int k = circuit.k;
    const auto probs = readout_probs(psi, k);
    out.g1 = probs[0];
    out.g2 = probs[1];
    out.loss = loss(out.g1, out.g2, label);
    if (circuit.prims.empty()) {
        return out;
    }

    // lambda_i = dL/d(conj(psi_i)) = c * psi_i with c depending on the
    // readout bit; then sweep gates in reverse, keeping
    //   psi = state after gate j,  mu = adjoint-propagated lambda,
    // and accumulate dL/dtheta_j = Im(<mu| P_j |psi>).
    const double c1 = -label[0] / (out.g1 + kLossClamp);
    const double c2 = -label[1] / (out.g2 + kLossClamp);
    const std::size_t last_bit = 1; // last qubit = least significant bit
    StateVector mu;
    mu.k = k;
    mu.amps.resize(psi.amps.size());
    for (std::size_t i = 0; i < psi.amps.size(); ++i) {
        mu.amps[i] = ((i & last_bit) ? c2 : c1) * psi.amps[i];
    }

    Complex *ps = psi.amps.data();
    Complex *ms = mu.amps.data();
    for (std::size_t j = circuit.prims.size(); j-- > 0;) {
        const PrimGate &g = circuit.prims[j];
        out.grad[j] = generator_overlap(g, k, ms, ps);
        if (j > 0) {
            apply_prim(ps, k, g, -theta[j]);
            apply_prim(ms, k, g, -theta[j]);
        }
    }
    return out;
}

AngleVector gradient(const ParamCircuit &circuit, const AngleVector &theta,
                     const StateVector &input, const std::array<double, 2> &label) {
    return loss_and_gradient(circuit, theta, input, label).grad;
}

} // namespace mqne
