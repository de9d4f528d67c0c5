#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hshift/rng.hpp"

namespace hshift {

/// Bit-packed vector over GF(2).
class Gf2Vec {
  public:
    Gf2Vec() = default;
    explicit Gf2Vec(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

    void set(std::size_t i, bool v) {
        std::uint64_t bit = 1ULL << (i & 63);
        if (v) {
            words_[i >> 6] |= bit;
        } else {
            words_[i >> 6] &= ~bit;
        }
    }

    void xor_with(const Gf2Vec& other);

    bool any() const;
    std::size_t popcount() const;
    std::vector<std::size_t> ones() const;

    bool operator==(const Gf2Vec& other) const = default;

  private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Linear system over GF(2): `rows x cols` coefficient matrix plus a
/// right-hand-side column (all zero unless set). Row storage is bit-packed
/// with the rhs folded in as one extra bit so elimination XORs whole rows.
///
/// After echelonize() the matrix is in reduced row echelon form: each pivot
/// column has exactly one set bit, rank() + free_cols().size() == cols().
class Gf2System {
  public:
    Gf2System(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool at(std::size_t r, std::size_t c) const { return row_bits_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { row_bits_[r].set(c, v); }

    bool rhs(std::size_t r) const { return row_bits_[r].get(cols_); }
    void set_rhs(std::size_t r, bool v) { row_bits_[r].set(cols_, v); }

    /// Row r of the coefficient matrix := bits (rhs untouched).
    void set_row(std::size_t r, const Gf2Vec& bits);

    /// In-place reduced row echelon form. Pivot choice is leftmost nonzero
    /// column, topmost unused row, so results are deterministic.
    void echelonize();

    bool echelonized() const { return echelonized_; }
    std::size_t rank() const;
    const std::vector<std::size_t>& pivot_cols() const;
    const std::vector<std::size_t>& free_cols() const;

    /// False iff some row reads 0 = 1.
    bool consistent() const;

    /// True iff `candidate` satisfies every equation including the rhs.
    bool satisfies(const Gf2Vec& candidate) const;

    /// Unique solution of a consistent full-rank system (rank == cols).
    Gf2Vec solve_unique() const;

    /// Uniform draw from the nonzero solutions of a homogeneous system:
    /// uniform nonzero assignment of the k free variables, back-substituted.
    /// Each nonzero solution has probability exactly 1/(2^k - 1).
    Gf2Vec sample_uniform_solution(Rng& rng) const;

    /// Homogeneous solution determined by an assignment of the free columns
    /// (given in free_cols() order).
    Gf2Vec back_substitute(const std::vector<bool>& free_assignment) const;

  private:
    void require_echelonized(const char* op) const;

    std::size_t rows_;
    std::size_t cols_;
    std::vector<Gf2Vec> row_bits_; // width cols_ + 1, last bit is rhs
    bool echelonized_ = false;
    std::size_t rank_ = 0;
    std::vector<std::size_t> pivot_cols_;
    std::vector<std::size_t> free_cols_;
};

} // namespace hshift
