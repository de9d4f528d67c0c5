#pragma once

#include <cstdint>
#include <string>

#include "hshift/group_vector.hpp"

namespace hshift {

namespace testing {
struct Inspector;
}

class Oracle;

/// One hidden shift problem over Z_{2^t}^n: a secret shift s and an injective
/// l-bit encoding enc, defining f_0(x) = enc(x) and f_1(x) = enc(x - s).
/// The secret and the encoding key are private; everything a solver may see
/// goes through Oracle.
///
/// enc is a seeded Feistel permutation of l-bit strings applied to the flat
/// index of x, so codewords are injective and carry no visible structure.
class HiddenShiftInstance {
  public:
    /// Secret drawn uniformly from the seed. l must satisfy n*t <= l <= 63.
    static HiddenShiftInstance random(std::size_t n, int t, int l, std::uint64_t seed);

    /// Fixed secret; encoding still derived from the seed.
    static HiddenShiftInstance with_secret(std::size_t n, int t, int l, std::uint64_t seed,
                                           GroupVector secret);

    std::size_t n() const { return n_; }
    int t() const { return t_; }
    int l() const { return l_; }
    std::uint64_t seed() const { return seed_; }
    bool secret_is_derived() const { return secret_is_derived_; }

    std::uint64_t domain_size_log2() const { return static_cast<std::uint64_t>(n_) * t_; }

    /// Instance file serialization. The secret is written only when
    /// `with_secret` is set; files round-trip byte exactly.
    std::string to_file_text(bool with_secret) const;
    static HiddenShiftInstance from_file_text(const std::string& text);

    bool operator==(const HiddenShiftInstance& other) const;

  private:
    HiddenShiftInstance(std::size_t n, int t, int l, std::uint64_t seed, GroupVector secret,
                        bool derived);

    std::uint64_t encode(const GroupVector& x) const;

    friend class Oracle;
    friend struct testing::Inspector;

    std::size_t n_;
    int t_;
    int l_;
    std::uint64_t seed_;
    GroupVector secret_;
    bool secret_is_derived_;
    std::uint64_t enc_key_;
};

} // namespace hshift
