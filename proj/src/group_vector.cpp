#include "hshift/group_vector.hpp"

#include <stdexcept>

namespace hshift {

namespace {

void check_modulus_log(int t) {
    if (t < 0 || t > kMaxModulusLog) {
        throw std::invalid_argument("GroupVector: modulus_log out of range");
    }
}

std::uint32_t mask_of(int t) {
    return (t >= 32) ? 0xffffffffu : ((1u << t) - 1);
}

void check_same_shape(const GroupVector& a, const GroupVector& b, const char* op) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch");
    }
    if (a.modulus_log() != b.modulus_log()) {
        throw std::invalid_argument(std::string(op) + ": modulus mismatch");
    }
}

} // namespace

GroupVector::GroupVector(std::size_t n, int modulus_log)
    : coords_(n, 0), modulus_log_(modulus_log) {
    check_modulus_log(modulus_log);
}

GroupVector::GroupVector(std::vector<std::uint32_t> coords, int modulus_log)
    : coords_(std::move(coords)), modulus_log_(modulus_log) {
    check_modulus_log(modulus_log);
    std::uint32_t m = mask_of(modulus_log);
    for (std::uint32_t c : coords_) {
        if (c > m) {
            throw std::invalid_argument("GroupVector: coordinate exceeds modulus");
        }
    }
}

GroupVector GroupVector::uniform(std::size_t n, int modulus_log, Rng& rng) {
    check_modulus_log(modulus_log);
    std::vector<std::uint32_t> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = static_cast<std::uint32_t>(rng.below(1ULL << modulus_log));
    }
    return GroupVector(std::move(coords), modulus_log);
}

bool GroupVector::is_zero() const {
    for (std::uint32_t c : coords_) {
        if (c != 0) {
            return false;
        }
    }
    return true;
}

bool GroupVector::all_even() const {
    for (std::uint32_t c : coords_) {
        if (c & 1u) {
            return false;
        }
    }
    return true;
}

GroupVector GroupVector::with_modulus_log(int t) const {
    check_modulus_log(t);
    std::uint32_t m = mask_of(t);
    std::vector<std::uint32_t> coords(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        coords[i] = coords_[i] & m;
    }
    return GroupVector(std::move(coords), t);
}

GroupVector GroupVector::shifted_left(int k) const {
    if (k < 0) {
        throw std::invalid_argument("GroupVector::shifted_left: negative shift");
    }
    std::uint32_t m = mask_of(modulus_log_);
    std::vector<std::uint32_t> coords(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        coords[i] = (k >= 32) ? 0 : ((coords_[i] << k) & m);
    }
    return GroupVector(std::move(coords), modulus_log_);
}

std::uint64_t GroupVector::flat_index() const {
    if (static_cast<std::size_t>(modulus_log_) * coords_.size() > 63) {
        throw std::invalid_argument("GroupVector::flat_index: group too large to index");
    }
    std::uint64_t idx = 0;
    for (std::size_t i = coords_.size(); i-- > 0;) {
        idx = (idx << modulus_log_) | coords_[i];
    }
    return idx;
}

GroupVector GroupVector::from_flat_index(std::uint64_t index, std::size_t n, int modulus_log) {
    check_modulus_log(modulus_log);
    std::uint32_t m = mask_of(modulus_log);
    std::vector<std::uint32_t> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = static_cast<std::uint32_t>(index) & m;
        index >>= modulus_log;
    }
    if (index != 0) {
        throw std::invalid_argument("GroupVector::from_flat_index: index out of range");
    }
    return GroupVector(std::move(coords), modulus_log);
}

std::string GroupVector::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i != 0) {
            out += ",";
        }
        out += std::to_string(coords_[i]);
    }
    out += ") mod 2^" + std::to_string(modulus_log_);
    return out;
}

GroupVector vec_add(const GroupVector& u, const GroupVector& v, int sign) {
    check_same_shape(u, v, "vec_add");
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("vec_add: sign must be +1 or -1");
    }
    std::uint32_t m = mask_of(u.modulus_log());
    std::vector<std::uint32_t> coords(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::uint32_t rhs = (sign > 0) ? v[i] : ((0u - v[i]) & m);
        coords[i] = (u[i] + rhs) & m;
    }
    return GroupVector(std::move(coords), u.modulus_log());
}

std::uint32_t inner_product_mod(const GroupVector& u, const GroupVector& s) {
    check_same_shape(u, s, "inner_product_mod");
    std::uint64_t m = mask_of(u.modulus_log());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc = (acc + static_cast<std::uint64_t>(u[i]) * s[i]) & m;
    }
    return static_cast<std::uint32_t>(acc);
}

Gf2Vec reduce_mod2(const GroupVector& u) {
    Gf2Vec bits(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        bits.set(i, u[i] & 1u);
    }
    return bits;
}

GroupVector halve(const GroupVector& v) {
    if (v.modulus_log() < 2) {
        throw std::invalid_argument("halve: modulus_log must be at least 2");
    }
    std::vector<std::uint32_t> coords(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] & 1u) {
            throw std::invalid_argument("halve: odd coordinate (combination was not a mod-2 dependence)");
        }
        coords[i] = v[i] >> 1;
    }
    return GroupVector(std::move(coords), v.modulus_log() - 1);
}

} // namespace hshift
