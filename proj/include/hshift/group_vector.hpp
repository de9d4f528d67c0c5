#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hshift/gf2.hpp"
#include "hshift/rng.hpp"

namespace hshift {

/// Element of Z_{2^t}^n. Coordinates are machine words reduced by an explicit
/// modulus mask; t ("modulus_log") is carried with the value and arithmetic
/// never mixes mismatched t or n.
class GroupVector {
  public:
    GroupVector() = default;
    GroupVector(std::size_t n, int modulus_log);
    GroupVector(std::vector<std::uint32_t> coords, int modulus_log);
    GroupVector(std::initializer_list<std::uint32_t> coords, int modulus_log)
        : GroupVector(std::vector<std::uint32_t>(coords), modulus_log) {}

    static GroupVector uniform(std::size_t n, int modulus_log, Rng& rng);

    std::size_t size() const { return coords_.size(); }
    int modulus_log() const { return modulus_log_; }
    std::uint32_t modulus() const { return 1u << modulus_log_; }

    std::uint32_t operator[](std::size_t i) const { return coords_[i]; }
    std::span<const std::uint32_t> coords() const { return coords_; }

    bool is_zero() const;
    bool all_even() const;

    /// Same coordinates read in Z_{2^T}^n. Widening keeps values; narrowing
    /// reduces mod 2^T.
    GroupVector with_modulus_log(int t) const;

    /// Coordinatewise v * 2^k mod 2^t.
    GroupVector shifted_left(int k) const;

    /// Flat index sum(v_i * 2^{t*i}); histogram cell and table key.
    std::uint64_t flat_index() const;
    static GroupVector from_flat_index(std::uint64_t index, std::size_t n, int modulus_log);

    std::string to_string() const;

    bool operator==(const GroupVector& other) const = default;

  private:
    std::vector<std::uint32_t> coords_;
    int modulus_log_ = 0;
};

constexpr int kMaxModulusLog = 30;

/// Coordinatewise u + sign * v mod 2^t. sign must be +1 or -1.
GroupVector vec_add(const GroupVector& u, const GroupVector& v, int sign);

/// sum(u_i * s_i) mod 2^t.
std::uint32_t inner_product_mod(const GroupVector& u, const GroupVector& s);

/// Coordinatewise parity.
Gf2Vec reduce_mod2(const GroupVector& u);

/// Coordinatewise v_i / 2, reinterpreted in Z_{2^{t-1}}^n. Every coordinate
/// must be even and t >= 2; an odd coordinate here means the sieve combined a
/// non-dependence, so it throws rather than rounding.
GroupVector halve(const GroupVector& v);

/// Signs realized by a combination chain: entries over {-1, 0, +1}, one per
/// batch slot, nonzero exactly on the selected slots.
struct CoefficientVector {
    std::vector<std::int8_t> entries;

    bool any() const {
        for (std::int8_t e : entries) {
            if (e != 0) {
                return true;
            }
        }
        return false;
    }
};

} // namespace hshift
