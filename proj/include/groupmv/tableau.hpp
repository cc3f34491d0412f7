#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "groupmv/rng.hpp"

namespace groupmv {

// Aaronson-Gottesman stabilizer tableau with bit-packed rows.
//
// Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers; one extra
// scratch row is used for deterministic-measurement phase accumulation.
// Initial state is |0...0>: destabilizer i = X_i, stabilizer i = Z_i.
class Tableau {
public:
    explicit Tableau(int n) : n_(n), words_((n + 63) / 64) {
        if (n < 1) throw std::invalid_argument("tableau needs at least one qubit");
        x_.assign((2 * n_ + 1) * words_, 0);
        z_.assign((2 * n_ + 1) * words_, 0);
        r_.assign(2 * n_ + 1, 0);
        for (int i = 0; i < n_; ++i) {
            set_bit(x_, i, i);
            set_bit(z_, i + n_, i);
        }
    }

    int num_qubits() const { return n_; }

    void apply_h(int q) {
        check_qubit(q);
        for (int i = 0; i < 2 * n_; ++i) {
            std::uint64_t xb = get_bit(x_, i, q);
            std::uint64_t zb = get_bit(z_, i, q);
            r_[i] ^= static_cast<std::uint8_t>(xb & zb);
            if (xb != zb) {
                flip_bit(x_, i, q);
                flip_bit(z_, i, q);
            }
        }
    }

    void apply_s(int q) {
        check_qubit(q);
        for (int i = 0; i < 2 * n_; ++i) {
            std::uint64_t xb = get_bit(x_, i, q);
            std::uint64_t zb = get_bit(z_, i, q);
            r_[i] ^= static_cast<std::uint8_t>(xb & zb);
            if (xb) flip_bit(z_, i, q);
        }
    }

    void apply_x(int q) {
        check_qubit(q);
        for (int i = 0; i < 2 * n_; ++i) r_[i] ^= static_cast<std::uint8_t>(get_bit(z_, i, q));
    }

    void apply_z(int q) {
        check_qubit(q);
        for (int i = 0; i < 2 * n_; ++i) r_[i] ^= static_cast<std::uint8_t>(get_bit(x_, i, q));
    }

    void apply_cx(int control, int target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) throw std::invalid_argument("CX control equals target");
        for (int i = 0; i < 2 * n_; ++i) {
            std::uint64_t xc = get_bit(x_, i, control);
            std::uint64_t zc = get_bit(z_, i, control);
            std::uint64_t xt = get_bit(x_, i, target);
            std::uint64_t zt = get_bit(z_, i, target);
            r_[i] ^= static_cast<std::uint8_t>(xc & zt & (xt ^ zc ^ 1ULL));
            if (xc) flip_bit(x_, i, target);
            if (zt) flip_bit(z_, i, control);
        }
    }

    bool measurement_is_random(int q) const {
        return find_unstable(q) >= 0;
    }

    // Standard Z measurement. A deterministic outcome consumes no
    // randomness and leaves the tableau untouched.
    int measure_z(int q, Rng& rng) {
        check_qubit(q);
        int p = find_unstable(q);
        if (p < 0) return deterministic_outcome(q);
        for (int i = 0; i < 2 * n_; ++i)
            if (i != p && get_bit(x_, i, q)) row_mult(i, p);
        copy_row(p - n_, p);
        zero_row(p);
        set_bit(z_, p, q);
        int outcome = flip_coin(rng) ? 1 : 0;
        r_[p] = static_cast<std::uint8_t>(outcome);
        return outcome;
    }

    // Measure + conditional X using the true outcome.
    void reset(int q, Rng& rng) {
        if (measure_z(q, rng)) apply_x(q);
    }

    // Symplectic sanity check: stabilizers pairwise commute, destabilizer i
    // anticommutes exactly with stabilizer i.
    bool symplectic_ok() const {
        for (int i = 0; i < 2 * n_; ++i)
            for (int j = i + 1; j < 2 * n_; ++j) {
                bool anti = rows_anticommute(i, j);
                bool expected = (j == i + n_);
                if (anti != expected) return false;
            }
        return true;
    }

private:
    int n_;
    int words_;
    std::vector<std::uint64_t> x_, z_;
    std::vector<std::uint8_t> r_;

    void check_qubit(int q) const {
        if (q < 0 || q >= n_) throw std::invalid_argument("qubit index out of range");
    }

    std::uint64_t get_bit(const std::vector<std::uint64_t>& m, int row, int col) const {
        return (m[static_cast<size_t>(row) * words_ + col / 64] >> (col % 64)) & 1ULL;
    }
    void set_bit(std::vector<std::uint64_t>& m, int row, int col) {
        m[static_cast<size_t>(row) * words_ + col / 64] |= 1ULL << (col % 64);
    }
    void flip_bit(std::vector<std::uint64_t>& m, int row, int col) {
        m[static_cast<size_t>(row) * words_ + col / 64] ^= 1ULL << (col % 64);
    }

    // Smallest stabilizer row with X support on q, or -1.
    int find_unstable(int q) const {
        for (int i = n_; i < 2 * n_; ++i)
            if (get_bit(x_, i, q)) return i;
        return -1;
    }

    int deterministic_outcome(int q) {
        int scratch = 2 * n_;
        zero_row(scratch);
        for (int i = 0; i < n_; ++i)
            if (get_bit(x_, i, q)) row_mult(scratch, i + n_);
        return r_[scratch];
    }

    void zero_row(int row) {
        for (int w = 0; w < words_; ++w) {
            x_[static_cast<size_t>(row) * words_ + w] = 0;
            z_[static_cast<size_t>(row) * words_ + w] = 0;
        }
        r_[row] = 0;
    }

    void copy_row(int dst, int src) {
        for (int w = 0; w < words_; ++w) {
            x_[static_cast<size_t>(dst) * words_ + w] = x_[static_cast<size_t>(src) * words_ + w];
            z_[static_cast<size_t>(dst) * words_ + w] = z_[static_cast<size_t>(src) * words_ + w];
        }
        r_[dst] = r_[src];
    }

    // Row h <- row i * row h with exact phase tracking (the AG "rowsum").
    // The per-qubit phase contributions are accumulated word-parallel.
    void row_mult(int h, int i) {
        long long phase = 2LL * r_[h] + 2LL * r_[i];
        for (int w = 0; w < words_; ++w) {
            std::uint64_t x1 = x_[static_cast<size_t>(i) * words_ + w];
            std::uint64_t z1 = z_[static_cast<size_t>(i) * words_ + w];
            std::uint64_t x2 = x_[static_cast<size_t>(h) * words_ + w];
            std::uint64_t z2 = z_[static_cast<size_t>(h) * words_ + w];
            std::uint64_t plus = (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2) |
                                 (x1 & z1 & ~x2 & z2);
            std::uint64_t minus = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) |
                                  (~x1 & z1 & x2 & z2);
            phase += std::popcount(plus);
            phase -= std::popcount(minus);
            x_[static_cast<size_t>(h) * words_ + w] = x1 ^ x2;
            z_[static_cast<size_t>(h) * words_ + w] = z1 ^ z2;
        }
        phase &= 3;
        r_[h] = static_cast<std::uint8_t>(phase >> 1);  // phase is 0 or 2 mod 4
    }

    bool rows_anticommute(int i, int j) const {
        int parity = 0;
        for (int w = 0; w < words_; ++w) {
            std::uint64_t xi = x_[static_cast<size_t>(i) * words_ + w];
            std::uint64_t zi = z_[static_cast<size_t>(i) * words_ + w];
            std::uint64_t xj = x_[static_cast<size_t>(j) * words_ + w];
            std::uint64_t zj = z_[static_cast<size_t>(j) * words_ + w];
            parity ^= std::popcount((xi & zj) ^ (zi & xj)) & 1;
        }
        return parity != 0;
    }
};

}  // namespace groupmv
