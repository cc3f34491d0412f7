#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace groupmv {

using Histogram = std::map<std::vector<std::uint8_t>, double>;

namespace detail {

// Dense symmetric matvec over the observed subspace: A[s][t] depends only on
// the Hamming distance between packed bitstrings.
class ReducedConfusion {
public:
    ReducedConfusion(const std::vector<std::vector<std::uint8_t>>& strings, int n_bits,
                     double p_ro)
        : n_(static_cast<int>(strings.size())), words_((n_bits + 63) / 64) {
        packed_.assign(static_cast<size_t>(n_) * words_, 0);
        for (int i = 0; i < n_; ++i)
            for (int b = 0; b < n_bits; ++b)
                if (strings[i][b])
                    packed_[static_cast<size_t>(i) * words_ + b / 64] |= 1ULL << (b % 64);
        weight_.resize(n_bits + 1);
        for (int d = 0; d <= n_bits; ++d)
            weight_[d] = std::pow(p_ro, d) * std::pow(1.0 - p_ro, n_bits - d);
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n_; ++i) {
            const std::uint64_t* row_i = &packed_[static_cast<size_t>(i) * words_];
            double acc = 0.0;
            for (int j = 0; j < n_; ++j) {
                const std::uint64_t* row_j = &packed_[static_cast<size_t>(j) * words_];
                int d = 0;
                for (int w = 0; w < words_; ++w) d += std::popcount(row_i[w] ^ row_j[w]);
                acc += weight_[d] * x[j];
            }
            y[i] = acc;
        }
    }

private:
    int n_;
    int words_;
    std::vector<std::uint64_t> packed_;
    std::vector<double> weight_;
};

}  // namespace detail

// M3-style readout mitigation: the confusion matrix restricted to the
// observed bitstrings (entries prod_i A_{b_i b'_i} for the symmetric
// per-qubit flip channel) has each column renormalized to sum to one over
// the observed subspace, keeping it stochastic, and is then inverted
// iteratively. With S_t the raw column sums, the normalized system
// (A diag(1/S)) x = c reduces to the symmetric solve A z = c followed by
// x = S * z, so conjugate gradients applies (the raw restriction of the
// tensor-product matrix is symmetric positive definite). The solve runs to
// a 1e-6 relative residual. Outputs are quasi-probabilities: negative
// entries are kept. When the observed set covers the full space the column
// sums are exactly one and the normalization is a no-op.
inline Histogram mitigate_readout(const Histogram& counts, double p_ro) {
    if (p_ro < 0.0 || p_ro >= 0.5)
        throw std::invalid_argument("readout error rate must be in [0, 0.5)");
    if (counts.empty()) throw std::invalid_argument("empty histogram");

    double total = 0.0;
    for (const auto& [s, c] : counts) total += c;
    if (total <= 0.0) throw std::invalid_argument("histogram has no weight");

    Histogram result;
    if (p_ro == 0.0) {
        for (const auto& [s, c] : counts) result[s] = c / total;
        return result;
    }

    const int n_bits = static_cast<int>(counts.begin()->first.size());
    std::vector<std::vector<std::uint8_t>> strings;
    std::vector<double> c;
    for (const auto& [s, cnt] : counts) {
        if (static_cast<int>(s.size()) != n_bits)
            throw std::invalid_argument("inconsistent bitstring lengths");
        strings.push_back(s);
        c.push_back(cnt / total);
    }

    detail::ReducedConfusion mat(strings, n_bits, p_ro);
    const int n = static_cast<int>(strings.size());
    std::vector<double> col_sums(n);
    {
        std::vector<double> ones(n, 1.0);
        mat.apply(ones, col_sums);  // symmetric, so row sums = column sums
    }
    std::vector<double> x = c, r(n), p(n), ap(n);

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };

    mat.apply(x, ap);
    for (int i = 0; i < n; ++i) r[i] = c[i] - ap[i];
    p = r;
    double rr = dot(r, r);
    const double target = 1e-12 * dot(c, c);  // (1e-6 relative residual)^2
    const int max_iters = 500;
    for (int iter = 0; iter < max_iters && rr > target; ++iter) {
        mat.apply(p, ap);
        double alpha = rr / dot(p, ap);
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }

    for (int i = 0; i < n; ++i) result[strings[i]] = col_sums[i] * x[i];
    return result;
}

}  // namespace groupmv
