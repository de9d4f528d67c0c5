#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hshift/instance.hpp"

namespace hshift {

/// A token was fed back into the device after it had already been combined,
/// measured or discarded. Simulated states are consumed exactly once.
class TokenReuseError : public std::logic_error {
  public:
    explicit TokenReuseError(const std::string& what) : std::logic_error(what) {}
};

/// Handle to one simulated qubit (|0> + e^{2*pi*i*theta/2^m}|1>)/sqrt(2).
/// The label and modulus are public; theta lives inside the Oracle and is
/// never readable through the solver-facing API.
struct PhaseToken {
    std::uint64_t id = 0;
    GroupVector label;
    int modulus_log = 0;

    bool valid() const { return id != 0; }
};

/// Handle to one simulated coset state (|x>|0> + |x+s>|1>)/sqrt(2); x stays
/// hidden until a transform-and-measure turns it into a PhaseToken.
struct CosetToken {
    std::uint64_t id = 0;

    bool valid() const { return id != 0; }
};

struct CombineResult {
    int sign = 0; // +1: labels added, -1: subtracted (observed second-qubit outcome)
    PhaseToken token;
};

/// Reindexing of the problem chosen by the solver once it knows the shift
/// mod 2^level: the device works over Z_{2^{t-level}}^n with the oracle pair
/// x -> f(2^level * x + i * known, i). Public data only; the solver builds
/// these from its own measurement results.
struct Descent {
    int level = 0;
    GroupVector known; // candidate for s mod 2^level, held mod 2^t
};

/// Per-instance instrumentation. peak_live_phase_tokens is a true high-water
/// mark: combine and measure consume their inputs before creating output, so
/// it matches the buffer occupancy bound with no transient above it.
struct SieveReport {
    std::uint64_t oracle_queries = 0;
    std::uint64_t qft_units = 0; // (n * t_level)^2 accounted per Fourier transform
    std::uint64_t phase_tokens_created = 0;
    std::uint64_t phase_tokens_consumed = 0;
    std::uint64_t live_phase_tokens = 0;
    std::uint64_t peak_live_phase_tokens = 0;
    std::uint64_t coset_tokens_created = 0;
    std::uint64_t coset_tokens_consumed = 0;
    std::vector<std::uint64_t> per_level_consumed;
    std::string outcome; // "", "success" or "rank-deficient"
};

/// Simulates the quantum side of one hidden shift instance. Exposes exactly
/// what a physical device would reveal: classical labels, measurement
/// outcomes and combination signs. Hidden phases are tracked as exact
/// residues; the Born rule is evaluated only at measurement time.
///
/// Not thread-safe: one oracle serves one logical thread. Independent trials
/// use independent oracles and may run fully in parallel.
class Oracle {
  public:
    /// Device randomness (collapse outcomes, combination signs) is seeded
    /// from the instance seed, so a given instance replays identically.
    explicit Oracle(HiddenShiftInstance instance);
    Oracle(HiddenShiftInstance instance, std::uint64_t device_seed);

    std::size_t n() const { return inst_.n(); }
    int t() const { return inst_.t(); }
    int l() const { return inst_.l(); }
    const HiddenShiftInstance& instance() const { return inst_; }

    /// f(x, branch): enc(x) for branch 0, enc(x - s) for branch 1. One oracle
    /// query.
    std::uint64_t f_eval(const GroupVector& x, int branch);

    /// Prepare, query and Fourier-sample one phase state: uniform label u
    /// over Z_{2^t}^n with hidden theta = <u, s>. One oracle query plus one
    /// QFT. The intermediate codeword measurement only collapses onto a
    /// uniform x, so its value is discarded.
    std::pair<GroupVector, PhaseToken> sample_phase_state();

    /// Same, run against the descended oracle pair described by `d`: labels
    /// are uniform over Z_{2^{t-level}}^n. If d.known does not match the
    /// secret mod 2^level the two branches decohere and the returned qubit
    /// is a computational basis state; every later measurement of it is a
    /// fair coin and only final verification can tell.
    std::pair<GroupVector, PhaseToken> sample_phase_state(const Descent& d);

    /// CNOT both qubits together and measure the second one: consumes both
    /// tokens, yields a token labelled a.label + sign * b.label. The sign is
    /// reported because the second-qubit outcome is observed.
    CombineResult combine(PhaseToken a, PhaseToken b);

    /// Measure in the +/- basis. Consumes the token; returns 1 (the "-"
    /// outcome) with probability sin^2(pi * theta / 2^m).
    int measure_pm(PhaseToken tok);

    /// Measure and ignore: releases a token that will not be used.
    void discard(PhaseToken tok);

    /// One coset state from the stream. One oracle query.
    CosetToken sample_coset_state();

    /// Apply |x>|i> -> |x - i*s_known>|i>, then QFT and measure the label:
    /// consumes the coset token, yields a phase token with hidden
    /// theta = <u, s - s_known> mod 2^t.
    std::pair<GroupVector, PhaseToken> shift_and_transform(CosetToken ctok,
                                                           const GroupVector& s_known);

    SieveReport report() const { return stats_; }
    void record_level_consumption(std::size_t level, std::uint64_t count);
    void record_outcome(const std::string& outcome) { stats_.outcome = outcome; }

  private:
    friend struct testing::Inspector;

    // Hidden single-qubit state: an exact phase numerator, or a collapsed
    // computational bit when a non-promise descent broke the superposition.
    struct HiddenQubit {
        bool collapsed = false;
        std::uint32_t value = 0; // theta residue, or the basis bit
        int modulus_log = 0;
        bool live = false;
    };

    PhaseToken new_phase_token(const GroupVector& label, HiddenQubit state);
    HiddenQubit take_qubit(const PhaseToken& tok, const char* op);
    GroupVector take_coset(const CosetToken& tok, const char* op);

    HiddenShiftInstance inst_;
    Rng device_rng_;
    std::unordered_map<std::uint64_t, HiddenQubit> qubits_;
    std::unordered_map<std::uint64_t, GroupVector> coset_prep_;
    std::uint64_t next_id_ = 1;
    SieveReport stats_;
};

} // namespace hshift
