#include "hshift/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace hshift {

void Gf2Vec::xor_with(const Gf2Vec& other) {
    if (other.size_ != size_) {
        throw std::invalid_argument("Gf2Vec::xor_with: size mismatch");
    }
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] ^= other.words_[w];
    }
}

bool Gf2Vec::any() const {
    for (std::uint64_t w : words_) {
        if (w != 0) {
            return true;
        }
    }
    return false;
}

std::size_t Gf2Vec::popcount() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::vector<std::size_t> Gf2Vec::ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i) {
        if (get(i)) {
            out.push_back(i);
        }
    }
    return out;
}

Gf2System::Gf2System(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_bits_(rows, Gf2Vec(cols + 1)) {}

void Gf2System::set_row(std::size_t r, const Gf2Vec& bits) {
    if (bits.size() != cols_) {
        throw std::invalid_argument("Gf2System::set_row: width mismatch");
    }
    bool keep_rhs = row_bits_[r].get(cols_);
    Gf2Vec fresh(cols_ + 1);
    for (std::size_t c = 0; c < cols_; ++c) {
        fresh.set(c, bits.get(c));
    }
    fresh.set(cols_, keep_rhs);
    row_bits_[r] = fresh;
    echelonized_ = false;
}

void Gf2System::echelonize() {
    rank_ = 0;
    pivot_cols_.clear();
    free_cols_.clear();

    std::size_t next_row = 0;
    for (std::size_t col = 0; col < cols_ && next_row < rows_; ++col) {
        std::size_t pivot = next_row;
        while (pivot < rows_ && !row_bits_[pivot].get(col)) {
            ++pivot;
        }
        if (pivot == rows_) {
            continue;
        }
        std::swap(row_bits_[next_row], row_bits_[pivot]);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r != next_row && row_bits_[r].get(col)) {
                row_bits_[r].xor_with(row_bits_[next_row]);
            }
        }
        pivot_cols_.push_back(col);
        ++next_row;
    }
    rank_ = pivot_cols_.size();

    std::size_t p = 0;
    for (std::size_t col = 0; col < cols_; ++col) {
        if (p < pivot_cols_.size() && pivot_cols_[p] == col) {
            ++p;
        } else {
            free_cols_.push_back(col);
        }
    }
    echelonized_ = true;
}

void Gf2System::require_echelonized(const char* op) const {
    if (!echelonized_) {
        throw std::logic_error(std::string(op) + ": echelonize() first");
    }
}

std::size_t Gf2System::rank() const {
    require_echelonized("Gf2System::rank");
    return rank_;
}

const std::vector<std::size_t>& Gf2System::pivot_cols() const {
    require_echelonized("Gf2System::pivot_cols");
    return pivot_cols_;
}

const std::vector<std::size_t>& Gf2System::free_cols() const {
    require_echelonized("Gf2System::free_cols");
    return free_cols_;
}

bool Gf2System::consistent() const {
    require_echelonized("Gf2System::consistent");
    for (std::size_t r = rank_; r < rows_; ++r) {
        if (row_bits_[r].get(cols_)) {
            return false;
        }
    }
    return true;
}

bool Gf2System::satisfies(const Gf2Vec& candidate) const {
    if (candidate.size() != cols_) {
        throw std::invalid_argument("Gf2System::satisfies: width mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        bool acc = false;
        for (std::size_t c = 0; c < cols_; ++c) {
            acc ^= row_bits_[r].get(c) && candidate.get(c);
        }
        if (acc != row_bits_[r].get(cols_)) {
            return false;
        }
    }
    return true;
}

Gf2Vec Gf2System::solve_unique() const {
    require_echelonized("Gf2System::solve_unique");
    if (rank_ != cols_) {
        throw std::logic_error("Gf2System::solve_unique: system is not full rank");
    }
    if (!consistent()) {
        throw std::logic_error("Gf2System::solve_unique: inconsistent system");
    }
    Gf2Vec solution(cols_);
    for (std::size_t r = 0; r < rank_; ++r) {
        solution.set(pivot_cols_[r], row_bits_[r].get(cols_));
    }
    return solution;
}

Gf2Vec Gf2System::back_substitute(const std::vector<bool>& free_assignment) const {
    require_echelonized("Gf2System::back_substitute");
    if (free_assignment.size() != free_cols_.size()) {
        throw std::invalid_argument("Gf2System::back_substitute: assignment size mismatch");
    }
    Gf2Vec solution(cols_);
    for (std::size_t k = 0; k < free_cols_.size(); ++k) {
        solution.set(free_cols_[k], free_assignment[k]);
    }
    // In RREF each pivot row reads pivot + (free columns) = rhs.
    for (std::size_t r = 0; r < rank_; ++r) {
        bool acc = row_bits_[r].get(cols_);
        for (std::size_t k = 0; k < free_cols_.size(); ++k) {
            acc ^= row_bits_[r].get(free_cols_[k]) && free_assignment[k];
        }
        solution.set(pivot_cols_[r], acc);
    }
    return solution;
}

Gf2Vec Gf2System::sample_uniform_solution(Rng& rng) const {
    require_echelonized("Gf2System::sample_uniform_solution");
    for (std::size_t r = 0; r < rows_; ++r) {
        if (row_bits_[r].get(cols_)) {
            throw std::invalid_argument("Gf2System::sample_uniform_solution: system must be homogeneous");
        }
    }
    std::size_t k = free_cols_.size();
    if (k == 0) {
        throw std::invalid_argument("Gf2System::sample_uniform_solution: only the zero solution exists");
    }
    if (k > 62) {
        throw std::invalid_argument("Gf2System::sample_uniform_solution: too many free columns");
    }
    std::uint64_t pattern = 1 + rng.below((1ULL << k) - 1);
    std::vector<bool> assignment(k);
    for (std::size_t i = 0; i < k; ++i) {
        assignment[i] = (pattern >> i) & 1ULL;
    }
    return back_substitute(assignment);
}

} // namespace hshift
