#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmv/circuit.hpp"
#include "groupmv/rng.hpp"
#include "groupmv/tableau.hpp"

namespace groupmv {

struct NoiseModel {
    double p_1q = 0.0;  // depolarizing after each single-qubit gate
    double p_2q = 0.0;  // depolarizing after each CX
    double p_ro = 0.0;  // classical bit-flip on a recorded measurement
    bool enabled = true;
    // Readout error normally does not apply to the measurement inside a
    // reset (unconditional reset hardware does not read out); flip for
    // sensitivity analysis.
    bool reset_reads_noisy = false;

    void check() const {
        for (double p : {p_1q, p_2q, p_ro})
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise probability out of range");
    }

    bool active() const { return enabled && (p_1q > 0 || p_2q > 0 || p_ro > 0); }
    double eff_1q() const { return enabled ? p_1q : 0.0; }
    double eff_2q() const { return enabled ? p_2q : 0.0; }
    double eff_ro() const { return enabled ? p_ro : 0.0; }
};

enum class MeasureBasis { Z, X };

struct ShotRecord {
    std::vector<std::uint8_t> mid_bits;    // circuit's own classical bits
    std::vector<std::uint8_t> final_bits;  // appended end-of-circuit measurement
    MeasureBasis basis = MeasureBasis::Z;
};

namespace detail {

// Uniform non-identity Pauli on one qubit.
inline void inject_pauli_1q(Tableau& t, int q, Rng& rng) {
    switch (uniform_int(rng, 3)) {
        case 0: t.apply_x(q); break;
        case 1: t.apply_z(q); break;
        default:
            t.apply_x(q);
            t.apply_z(q);
            break;
    }
}

// Uniform non-identity two-qubit Pauli (15 choices).
inline void inject_pauli_2q(Tableau& t, int a, int b, Rng& rng) {
    int p = 1 + uniform_int(rng, 15);
    auto apply = [&](int q, int code) {
        if (code == 1) t.apply_x(q);
        else if (code == 2) t.apply_z(q);
        else if (code == 3) {
            t.apply_x(q);
            t.apply_z(q);
        }
    };
    apply(a, p & 3);
    apply(b, (p >> 2) & 3);
}

}  // namespace detail

// Executes one shot. The tableau always keeps the true post-measurement
// state; readout error corrupts only the recorded bit, and feedforward
// evaluates on the recorded (possibly corrupted) bits. Bits listed in
// flip_clbits are inverted deterministically after recording — the fault
// injection hook used by the tolerance tests.
inline std::vector<std::uint8_t> run_shot_bits(const DynamicCircuit& c, const NoiseModel& nm,
                                               Rng& rng,
                                               const std::set<int>& flip_clbits = {}) {
    nm.check();
    Tableau t(c.num_qubits);
    std::vector<std::int8_t> bits(c.num_clbits, -1);
    const double p1 = nm.eff_1q();
    const double p2 = nm.eff_2q();
    const double pro = nm.eff_ro();
    for (const auto& op : c.ops) {
        switch (op.kind) {
            case OpKind::H:
                t.apply_h(op.q0);
                if (p1 > 0 && bernoulli(rng, p1)) detail::inject_pauli_1q(t, op.q0, rng);
                break;
            case OpKind::X:
                t.apply_x(op.q0);
                if (p1 > 0 && bernoulli(rng, p1)) detail::inject_pauli_1q(t, op.q0, rng);
                break;
            case OpKind::Z:
                t.apply_z(op.q0);
                if (p1 > 0 && bernoulli(rng, p1)) detail::inject_pauli_1q(t, op.q0, rng);
                break;
            case OpKind::S:
                t.apply_s(op.q0);
                if (p1 > 0 && bernoulli(rng, p1)) detail::inject_pauli_1q(t, op.q0, rng);
                break;
            case OpKind::CX:
                t.apply_cx(op.q0, op.q1);
                if (p2 > 0 && bernoulli(rng, p2)) detail::inject_pauli_2q(t, op.q0, op.q1, rng);
                break;
            case OpKind::Measure: {
                int true_outcome = t.measure_z(op.q0, rng);
                int recorded = true_outcome;
                if (pro > 0 && bernoulli(rng, pro)) recorded ^= 1;
                if (flip_clbits.count(op.clbit)) recorded ^= 1;
                bits[op.clbit] = static_cast<std::int8_t>(recorded);
                break;
            }
            case OpKind::Reset: {
                int outcome = t.measure_z(op.q0, rng);
                if (nm.reset_reads_noisy && pro > 0 && bernoulli(rng, pro)) outcome ^= 1;
                if (outcome) t.apply_x(op.q0);
                break;
            }
            case OpKind::CondX:
                if (op.cond->eval(bits)) {
                    t.apply_x(op.q0);
                    if (p1 > 0 && bernoulli(rng, p1)) detail::inject_pauli_1q(t, op.q0, rng);
                }
                break;
        }
    }
    std::vector<std::uint8_t> out(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] > 0 ? 1 : 0;
    return out;
}

// Basis-change + full measurement layer appended to a circuit. The final
// measurements land in fresh classical bits [c.num_clbits, c.num_clbits+n).
inline DynamicCircuit with_final_measurement(const DynamicCircuit& c, MeasureBasis basis) {
    DynamicCircuit full = c;
    if (basis == MeasureBasis::X)
        for (int q = 0; q < full.num_qubits; ++q) full.append(Operation::h(q));
    for (int q = 0; q < full.num_qubits; ++q)
        full.append(Operation::measure(q, full.num_clbits + q));
    full.num_clbits += full.num_qubits;
    return full;
}

inline ShotRecord run_shot(const DynamicCircuit& c, const NoiseModel& nm, MeasureBasis basis,
                           Rng& rng, const std::set<int>& flip_clbits = {}) {
    DynamicCircuit full = with_final_measurement(c, basis);
    auto bits = run_shot_bits(full, nm, rng, flip_clbits);
    ShotRecord rec;
    rec.basis = basis;
    rec.mid_bits.assign(bits.begin(), bits.begin() + c.num_clbits);
    rec.final_bits.assign(bits.begin() + c.num_clbits, bits.end());
    return rec;
}

// `shots` independent shots with per-shot derived seeds; deterministic and
// order-independent given `seed`.
inline std::vector<ShotRecord> run_shots(const DynamicCircuit& c, const NoiseModel& nm,
                                         MeasureBasis basis, int shots, std::uint64_t seed,
                                         const std::set<int>& flip_clbits = {}) {
    if (shots < 1) throw std::invalid_argument("need at least one shot");
    auto violations = c.validate();
    if (!violations.empty())
        throw std::invalid_argument("invalid circuit: " + violations.front());
    DynamicCircuit full = with_final_measurement(c, basis);
    std::vector<ShotRecord> records(shots);
    for (int s = 0; s < shots; ++s) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        auto bits = run_shot_bits(full, nm, rng, flip_clbits);
        ShotRecord& rec = records[s];
        rec.basis = basis;
        rec.mid_bits.assign(bits.begin(), bits.begin() + c.num_clbits);
        rec.final_bits.assign(bits.begin() + c.num_clbits, bits.end());
    }
    return records;
}

// Raw-shot text dump: one line per shot, `basis mid_bits final_bits`.
inline std::string dump_shots(const std::vector<ShotRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += rec.basis == MeasureBasis::Z ? 'Z' : 'X';
        out += ' ';
        if (rec.mid_bits.empty()) out += '-';
        for (auto b : rec.mid_bits) out += static_cast<char>('0' + b);
        out += ' ';
        for (auto b : rec.final_bits) out += static_cast<char>('0' + b);
        out += '\n';
    }
    return out;
}

}  // namespace groupmv
