#include "hshift/instance.hpp"

#include <stdexcept>

#include <json.hpp>

namespace hshift {

namespace {

constexpr std::uint64_t kSecretStream = 0x5ec7;
constexpr std::uint64_t kEncKeyStream = 0xe11c;
constexpr int kFeistelRounds = 8;

std::uint64_t low_mask(int bits) {
    return (bits >= 64) ? ~0ULL : ((1ULL << bits) - 1);
}

/// Keyed permutation of l-bit strings: an unbalanced Feistel network whose
/// half sizes swap each round, so any even round count is a bijection.
std::uint64_t feistel_permute(std::uint64_t v, int bits, std::uint64_t key) {
    if (bits == 1) {
        return v ^ (key & 1ULL);
    }
    int a = bits / 2;
    int b = bits - a;
    std::uint64_t left = v >> b;
    std::uint64_t right = v & low_mask(b);
    for (int round = 0; round < kFeistelRounds; ++round) {
        std::uint64_t f = splitmix64(right ^ key ^ (0xa076bc9d3f64e21bULL * (round + 1)));
        std::uint64_t next_left = right;
        std::uint64_t next_right = left ^ (f & low_mask(a));
        left = next_left;
        right = next_right;
        std::swap(a, b);
    }
    return (left << b) | right;
}

void validate_shape(std::size_t n, int t, int l) {
    if (n < 1) {
        throw std::invalid_argument("instance: n must be at least 1");
    }
    if (t < 1 || t > kMaxModulusLog) {
        throw std::invalid_argument("instance: t out of range");
    }
    std::uint64_t needed = static_cast<std::uint64_t>(n) * t;
    if (static_cast<std::uint64_t>(l) < needed) {
        throw std::invalid_argument("instance: l too small for an injective encoding (need l >= n*t)");
    }
    if (l > 63) {
        throw std::invalid_argument("instance: l must be at most 63 (codewords are 64-bit words)");
    }
}

} // namespace

HiddenShiftInstance::HiddenShiftInstance(std::size_t n, int t, int l, std::uint64_t seed,
                                         GroupVector secret, bool derived)
    : n_(n),
      t_(t),
      l_(l),
      seed_(seed),
      secret_(std::move(secret)),
      secret_is_derived_(derived),
      enc_key_(derive_seed(seed, kEncKeyStream)) {}

HiddenShiftInstance HiddenShiftInstance::random(std::size_t n, int t, int l, std::uint64_t seed) {
    validate_shape(n, t, l);
    Rng rng(derive_seed(seed, kSecretStream));
    GroupVector secret = GroupVector::uniform(n, t, rng);
    return HiddenShiftInstance(n, t, l, seed, std::move(secret), true);
}

HiddenShiftInstance HiddenShiftInstance::with_secret(std::size_t n, int t, int l,
                                                     std::uint64_t seed, GroupVector secret) {
    validate_shape(n, t, l);
    if (secret.size() != n || secret.modulus_log() != t) {
        throw std::invalid_argument("instance: secret shape mismatch");
    }
    return HiddenShiftInstance(n, t, l, seed, std::move(secret), false);
}

std::uint64_t HiddenShiftInstance::encode(const GroupVector& x) const {
    return feistel_permute(x.flat_index(), l_, enc_key_);
}

bool HiddenShiftInstance::operator==(const HiddenShiftInstance& other) const {
    return n_ == other.n_ && t_ == other.t_ && l_ == other.l_ && seed_ == other.seed_ &&
           secret_ == other.secret_;
}

std::string HiddenShiftInstance::to_file_text(bool with_secret) const {
    nlohmann::ordered_json doc;
    doc["schema"] = "hshift-instance";
    doc["schema_version"] = 1;
    doc["n"] = n_;
    doc["t"] = t_;
    doc["l"] = l_;
    doc["seed"] = seed_;
    if (with_secret) {
        doc["s"] = std::vector<std::uint32_t>(secret_.coords().begin(), secret_.coords().end());
    }
    return doc.dump(2) + "\n";
}

HiddenShiftInstance HiddenShiftInstance::from_file_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("instance file: invalid JSON: ") + e.what());
    }
    if (doc.value("schema", "") != "hshift-instance") {
        throw std::invalid_argument("instance file: missing or wrong schema tag");
    }
    if (doc.value("schema_version", 0) != 1) {
        throw std::invalid_argument("instance file: unsupported schema_version");
    }
    std::size_t n = doc.at("n").get<std::size_t>();
    int t = doc.at("t").get<int>();
    int l = doc.at("l").get<int>();
    std::uint64_t seed = doc.at("seed").get<std::uint64_t>();
    if (!doc.contains("s")) {
        return random(n, t, l, seed);
    }
    auto coords = doc.at("s").get<std::vector<std::uint32_t>>();
    GroupVector secret(std::move(coords), t);
    HiddenShiftInstance derived = random(n, t, l, seed);
    if (derived.secret_ == secret) {
        return derived; // a self-check file for a seed-derived instance
    }
    return with_secret(n, t, l, seed, std::move(secret));
}

} // namespace hshift
