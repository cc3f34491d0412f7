#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmv/circuit.hpp"

namespace groupmv {

// Brute-force complex-amplitude simulator used as a verification oracle.
// Qubit q maps to bit q of the amplitude index.
class DenseOracle {
public:
    static constexpr int kMaxQubits = 12;

    struct Branch {
        std::vector<std::int8_t> bits;  // recorded classical bits (after any flips)
        double probability = 1.0;
        std::vector<std::complex<double>> state;
    };

    // Runs the circuit projecting every random measurement onto the outcome
    // given in forced_bits (indexed by clbit). Bits in flip_clbits are
    // inverted after recording: the state keeps the true outcome while
    // feedforward sees the corrupted value.
    static Branch run(const DynamicCircuit& c,
                      const std::map<int, int>& forced_bits = {},
                      const std::set<int>& flip_clbits = {}) {
        check_size(c);
        Branch br;
        br.bits.assign(c.num_clbits, -1);
        br.state.assign(std::size_t{1} << c.num_qubits, {0.0, 0.0});
        br.state[0] = 1.0;
        for (const auto& op : c.ops) apply_op(c, op, br, forced_bits, flip_clbits);
        return br;
    }

    // Enumerates every measurement-outcome branch with nonzero probability.
    static std::vector<Branch> enumerate_branches(const DynamicCircuit& c,
                                                  const std::set<int>& flip_clbits = {}) {
        check_size(c);
        std::vector<Branch> done;
        Branch init;
        init.bits.assign(c.num_clbits, -1);
        init.state.assign(std::size_t{1} << c.num_qubits, {0.0, 0.0});
        init.state[0] = 1.0;
        recurse(c, 0, std::move(init), flip_clbits, done);
        return done;
    }

    // Outcome distribution over the full classical record, summed across
    // branches.
    static std::map<std::string, double> distribution(const DynamicCircuit& c) {
        std::map<std::string, double> dist;
        for (const auto& br : enumerate_branches(c)) {
            std::string key;
            for (auto b : br.bits) key.push_back(b > 0 ? '1' : '0');
            dist[key] += br.probability;
        }
        return dist;
    }

    // |<GHZ_n|psi>|^2 for the n-qubit GHZ state (|0..0> + |1..1>)/sqrt(2).
    static double ghz_overlap(const std::vector<std::complex<double>>& state) {
        std::complex<double> amp =
            (state.front() + state.back()) / std::sqrt(2.0);
        return std::norm(amp);
    }

private:
    static void check_size(const DynamicCircuit& c) {
        if (c.num_qubits > kMaxQubits)
            throw std::invalid_argument("dense oracle supports at most 12 qubits");
        auto violations = c.validate();
        if (!violations.empty())
            throw std::invalid_argument("invalid circuit: " + violations.front());
    }

    static void apply_h(std::vector<std::complex<double>>& s, int q) {
        const double inv = 1.0 / std::sqrt(2.0);
        std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!(i & bit)) {
                auto a = s[i], b = s[i | bit];
                s[i] = inv * (a + b);
                s[i | bit] = inv * (a - b);
            }
    }

    static void apply_x(std::vector<std::complex<double>>& s, int q) {
        std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!(i & bit)) std::swap(s[i], s[i | bit]);
    }

    static void apply_z(std::vector<std::complex<double>>& s, int q) {
        std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i & bit) s[i] = -s[i];
    }

    static void apply_s_gate(std::vector<std::complex<double>>& s, int q) {
        std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i & bit) s[i] *= std::complex<double>(0.0, 1.0);
    }

    static void apply_cx(std::vector<std::complex<double>>& s, int control, int target) {
        std::size_t cb = std::size_t{1} << control;
        std::size_t tb = std::size_t{1} << target;
        for (std::size_t i = 0; i < s.size(); ++i)
            if ((i & cb) && !(i & tb)) std::swap(s[i], s[i | tb]);
    }

    static double prob_of(const std::vector<std::complex<double>>& s, int q, int value) {
        std::size_t bit = std::size_t{1} << q;
        double p = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (static_cast<int>((i & bit) != 0) == value) p += std::norm(s[i]);
        return p;
    }

    static void project(std::vector<std::complex<double>>& s, int q, int value, double prob) {
        std::size_t bit = std::size_t{1} << q;
        double scale = 1.0 / std::sqrt(prob);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (static_cast<int>((i & bit) != 0) == value)
                s[i] *= scale;
            else
                s[i] = 0.0;
        }
    }

    static constexpr double kTol = 1e-12;

    static void apply_op(const DynamicCircuit& c, const Operation& op, Branch& br,
                         const std::map<int, int>& forced_bits,
                         const std::set<int>& flip_clbits) {
        switch (op.kind) {
            case OpKind::H: apply_h(br.state, op.q0); break;
            case OpKind::X: apply_x(br.state, op.q0); break;
            case OpKind::Z: apply_z(br.state, op.q0); break;
            case OpKind::S: apply_s_gate(br.state, op.q0); break;
            case OpKind::CX: apply_cx(br.state, op.q0, op.q1); break;
            case OpKind::Measure: {
                double p0 = prob_of(br.state, op.q0, 0);
                int outcome;
                if (p0 > 1.0 - kTol) outcome = 0;
                else if (p0 < kTol) outcome = 1;
                else {
                    auto it = forced_bits.find(op.clbit);
                    if (it == forced_bits.end())
                        throw std::invalid_argument(
                            "random measurement outcome requires a forced bit for c" +
                            std::to_string(op.clbit));
                    outcome = it->second;
                }
                double p = outcome ? 1.0 - p0 : p0;
                if (p < kTol) throw std::invalid_argument("forced branch has probability 0");
                project(br.state, op.q0, outcome, p);
                br.probability *= p;
                br.bits[op.clbit] =
                    static_cast<std::int8_t>(outcome ^ (flip_clbits.count(op.clbit) ? 1 : 0));
                break;
            }
            case OpKind::Reset: {
                double p0 = prob_of(br.state, op.q0, 0);
                if (p0 > 1.0 - kTol) {
                    project(br.state, op.q0, 0, p0);
                } else if (p0 < kTol) {
                    project(br.state, op.q0, 1, 1.0 - p0);
                    apply_x(br.state, op.q0);
                } else {
                    throw std::invalid_argument(
                        "dense oracle only supports reset of a determined qubit");
                }
                break;
            }
            case OpKind::CondX:
                if (op.cond->eval(br.bits)) apply_x(br.state, op.q0);
                break;
        }
    }

    static void recurse(const DynamicCircuit& c, std::size_t next_op, Branch br,
                        const std::set<int>& flip_clbits, std::vector<Branch>& done) {
        for (std::size_t i = next_op; i < c.ops.size(); ++i) {
            const auto& op = c.ops[i];
            if (op.kind == OpKind::Measure) {
                double p0 = prob_of(br.state, op.q0, 0);
                bool rand_outcome = p0 > kTol && p0 < 1.0 - kTol;
                if (rand_outcome) {
                    for (int outcome : {0, 1}) {
                        Branch child = br;
                        double p = outcome ? 1.0 - p0 : p0;
                        project(child.state, op.q0, outcome, p);
                        child.probability *= p;
                        child.bits[op.clbit] = static_cast<std::int8_t>(
                            outcome ^ (flip_clbits.count(op.clbit) ? 1 : 0));
                        recurse(c, i + 1, std::move(child), flip_clbits, done);
                    }
                    return;
                }
            }
            apply_op(c, op, br, {{op.clbit, 0}}, flip_clbits);
        }
        done.push_back(std::move(br));
    }
};

}  // namespace groupmv
