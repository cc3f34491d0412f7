#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmv/circuit.hpp"
#include "groupmv/mitigation.hpp"
#include "groupmv/rng.hpp"
#include "groupmv/sim.hpp"

namespace groupmv {

// Two-setting entanglement witness W = (P_0...0 + P_1...1 + <X^n>)/2;
// values above 1/2 certify genuine n-partite entanglement.
struct WitnessEstimate {
    int n = 0;
    double p0 = 0.0;
    double p1 = 0.0;
    double x_expect = 0.0;
    double w = 0.0;
    double std_err = 0.0;
    bool mitigated = false;
};

struct FidelityEstimate {
    double f = 0.0;
    double f_raw = 0.0;  // before clipping to [0, 1]
    double std_err = 0.0;
    int num_stabilizers_sampled = 0;
    int shots_per_stabilizer = 0;
};

namespace detail {

inline Histogram final_bits_histogram(const std::vector<ShotRecord>& records) {
    Histogram h;
    for (const auto& rec : records) h[rec.final_bits] += 1.0;
    return h;
}

}  // namespace detail

// Witness from Z-basis and X-basis shot records. Mitigation applies to the
// final readout only; mid-circuit bits are never touched, which is exactly
// the error channel majority voting is meant to absorb.
inline WitnessEstimate estimate_witness(const std::vector<ShotRecord>& z_records,
                                        const std::vector<ShotRecord>& x_records,
                                        const NoiseModel& nm, bool mitigate) {
    if (z_records.empty() || x_records.empty())
        throw std::invalid_argument("witness needs both Z and X basis records");
    const int n = static_cast<int>(z_records.front().final_bits.size());
    if (static_cast<int>(x_records.front().final_bits.size()) != n)
        throw std::invalid_argument("basis record qubit counts differ");

    const double p_ro = nm.eff_ro();
    const bool do_mitigate = mitigate && p_ro > 0.0;

    auto z_hist = detail::final_bits_histogram(z_records);
    auto x_hist = detail::final_bits_histogram(x_records);
    Histogram z_quasi =
        do_mitigate ? mitigate_readout(z_hist, p_ro) : mitigate_readout(z_hist, 0.0);
    Histogram x_quasi =
        do_mitigate ? mitigate_readout(x_hist, p_ro) : mitigate_readout(x_hist, 0.0);

    const std::vector<std::uint8_t> zeros(n, 0), ones(n, 1);
    double p0 = z_quasi.count(zeros) ? z_quasi.at(zeros) : 0.0;
    double p1 = z_quasi.count(ones) ? z_quasi.at(ones) : 0.0;
    double x_expect = 0.0;
    for (const auto& [bits, q] : x_quasi) {
        int parity = 0;
        for (auto b : bits) parity ^= b;
        x_expect += (parity ? -1.0 : 1.0) * q;
    }

    WitnessEstimate est;
    est.n = n;
    est.mitigated = do_mitigate;
    // Quasi-probabilities are clipped only here, at the reporting boundary.
    est.p0 = std::clamp(p0, 0.0, 1.0);
    est.p1 = std::clamp(p1, 0.0, 1.0);
    est.x_expect = std::clamp(x_expect, -1.0, 1.0);
    est.w = (est.p0 + est.p1 + est.x_expect) / 2.0;

    const double sz = static_cast<double>(z_records.size());
    const double sx = static_cast<double>(x_records.size());
    double var = est.p0 * (1.0 - est.p0) / sz + est.p1 * (1.0 - est.p1) / sz +
                 (1.0 - est.x_expect * est.x_expect) / sx;
    est.std_err = 0.5 * std::sqrt(var);
    return est;
}

// Element of the GHZ stabilizer group: (X^n)^x_type times Z on z_support,
// normalized to a +/-1 sign with per-qubit Paulis in {I, X, Y, Z}.
struct GhzStabilizerElement {
    int n = 0;
    bool x_type = false;
    std::vector<int> z_support;  // ascending
    int sign = 1;

    char pauli_at(int q) const {
        bool z = std::binary_search(z_support.begin(), z_support.end(), q);
        if (x_type && z) return 'Y';
        if (x_type) return 'X';
        return z ? 'Z' : 'I';
    }

    bool identity() const { return !x_type && z_support.empty(); }

    std::vector<int> support() const {
        if (x_type) {
            std::vector<int> all(n);
            for (int q = 0; q < n; ++q) all[q] = q;
            return all;
        }
        return z_support;
    }

    std::string to_string() const {
        std::string s = sign < 0 ? "-" : "+";
        for (int q = 0; q < n; ++q) s.push_back(pauli_at(q));
        return s;
    }
};

// Uniform sample from the 2^n-element stabilizer group generated by X^n and
// the Z_i Z_{i+1} chain. Multiplying X into Z on a qubit gives -iY, so an
// X-type element picks up (-1)^(|z_support|/2); z_support is always even.
inline GhzStabilizerElement sample_ghz_stabilizer(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("need at least two qubits");
    GhzStabilizerElement el;
    el.n = n;
    el.x_type = flip_coin(rng);
    std::vector<char> in_support(n, 0);
    for (int i = 1; i < n; ++i)
        if (flip_coin(rng)) {
            in_support[i - 1] ^= 1;
            in_support[i] ^= 1;
        }
    for (int q = 0; q < n; ++q)
        if (in_support[q]) el.z_support.push_back(q);
    el.sign = (el.x_type && (el.z_support.size() / 2) % 2 == 1) ? -1 : 1;
    return el;
}

// Direct fidelity estimation by stabilizer sampling: F is the average
// measured expectation of uniformly sampled GHZ stabilizer elements. Each
// element is measured by rotating its per-qubit basis onto Z (X via H,
// Y via S.S.S then H) and averaging sign * (-1)^parity over its support.
inline FidelityEstimate estimate_fidelity(const DynamicCircuit& c, const NoiseModel& nm,
                                          int m_elements, int shots_per_element,
                                          std::uint64_t seed, bool mitigate = true) {
    if (m_elements < 1) throw std::invalid_argument("need at least one element");
    if (shots_per_element < 1) throw std::invalid_argument("need at least one shot");
    const int n = c.num_qubits;
    const double p_ro = nm.eff_ro();

    std::vector<double> values(m_elements);
    for (int j = 0; j < m_elements; ++j) {
        Rng rng = make_rng(derive_seed(seed, j, 0));
        auto el = sample_ghz_stabilizer(n, rng);
        if (el.identity()) {
            values[j] = 1.0;
            continue;
        }
        DynamicCircuit meas = c;
        for (int q = 0; q < n; ++q) {
            char pauli = el.pauli_at(q);
            if (pauli == 'X') {
                meas.append(Operation::h(q));
            } else if (pauli == 'Y') {
                meas.append(Operation::s(q));
                meas.append(Operation::s(q));
                meas.append(Operation::s(q));
                meas.append(Operation::h(q));
            }
        }
        auto records = run_shots(meas, nm, MeasureBasis::Z, shots_per_element,
                                 derive_seed(seed, j, 1));

        auto support = el.support();
        Histogram hist;
        for (const auto& rec : records) {
            std::vector<std::uint8_t> bits;
            bits.reserve(support.size());
            for (int q : support) bits.push_back(rec.final_bits[q]);
            hist[bits] += 1.0;
        }
        Histogram quasi = (mitigate && p_ro > 0.0) ? mitigate_readout(hist, p_ro)
                                                   : mitigate_readout(hist, 0.0);
        double expect = 0.0;
        for (const auto& [bits, q] : quasi) {
            int parity = 0;
            for (auto b : bits) parity ^= b;
            expect += (parity ? -1.0 : 1.0) * q;
        }
        values[j] = el.sign * expect;
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= m_elements;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);

    FidelityEstimate est;
    est.f_raw = mean;
    est.f = std::clamp(mean, 0.0, 1.0);
    est.std_err = m_elements > 1 ? std::sqrt(var / (m_elements - 1) / m_elements) : 0.0;
    est.num_stabilizers_sampled = m_elements;
    est.shots_per_stabilizer = shots_per_element;
    return est;
}

struct Aggregate {
    double mean = 0.0;
    double std_dev = 0.0;
    int count = 0;
};

inline Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("nothing to aggregate");
    Aggregate a;
    a.count = static_cast<int>(values.size());
    for (double v : values) a.mean += v;
    a.mean /= a.count;
    if (a.count > 1) {
        double var = 0.0;
        for (double v : values) var += (v - a.mean) * (v - a.mean);
        a.std_dev = std::sqrt(var / (a.count - 1));
    }
    return a;
}

}  // namespace groupmv
