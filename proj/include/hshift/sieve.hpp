#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hshift/oracle.hpp"

namespace hshift {

/// A sieve-level entry: the level-j working label u^{(j)} (the token's label
/// with j halvings applied) together with the token it describes.
struct LabeledToken {
    GroupVector label;
    PhaseToken token;
};

/// Demand-driven supplier of labeled tokens. Stages pull from upstream only
/// when a downstream consumer asks, which is what keeps the number of live
/// states bounded.
class PhaseSource {
  public:
    virtual ~PhaseSource() = default;
    virtual LabeledToken next() = 0;
};

/// Base supplier: fresh phase states from the device, optionally through a
/// descent. Counts how many states it handed out.
class DeviceSampler final : public PhaseSource {
  public:
    DeviceSampler(Oracle& oracle, Descent descent);
    explicit DeviceSampler(Oracle& oracle);

    LabeledToken next() override;
    std::uint64_t pulled() const { return pulled_; }

  private:
    Oracle& oracle_;
    Descent descent_;
    std::uint64_t pulled_ = 0;
};

/// Base supplier for the coset-stream variant: each pull takes one coset
/// state and runs it through the known-shift transform.
class CosetPhaseSampler final : public PhaseSource {
  public:
    CosetPhaseSampler(Oracle& oracle, GroupVector s_known);

    LabeledToken next() override;
    std::uint64_t pulled() const { return pulled_; }

  private:
    Oracle& oracle_;
    GroupVector s_known_;
    std::uint64_t pulled_ = 0;
};

/// Nonzero coefficient pattern a in {0,1}^{count} with sum(a_i * u_i) = 0
/// mod 2, drawn uniformly from the solution set. With n+1 vectors over Z_2^n
/// a dependence always exists. Re-randomizes on every call.
Gf2Vec find_dependence(std::span<const GroupVector> labels, Rng& rng);

struct ChainResult {
    GroupVector label; // realized sum(eps_i * u_i) in the working modulus
    PhaseToken token;
    CoefficientVector coeffs; // per input entry; first is always +1
};

/// Left-fold of Oracle::combine over the selection, ascending order, first
/// sign pinned to +1. All inputs are consumed; a single entry passes through
/// untouched. The result label is even coordinatewise whenever the selection
/// came from a mod-2 dependence.
ChainResult combine_chain(Oracle& oracle, std::vector<LabeledToken> selected);

/// One sieve stage: pulls batches of n+1 level-j pairs, finds a dependence,
/// combines the selected tokens, discards the rest of the batch, halves the
/// label and emits a level-(j+1) pair.
class LevelStage final : public PhaseSource {
  public:
    LevelStage(Oracle& oracle, PhaseSource& upstream, std::size_t level, Rng& rng);

    LabeledToken next() override;
    std::size_t level() const { return buffer_.level; }
    std::size_t capacity() const { return buffer_.capacity; }

  private:
    struct LevelBuffer {
        std::size_t level = 0;
        std::size_t capacity = 0; // n + 1
        std::vector<LabeledToken> entries;
    };

    Oracle& oracle_;
    PhaseSource& upstream_;
    Rng& rng_;
    LevelBuffer buffer_;
};

struct SieveOutput {
    std::vector<LabeledToken> finals;
    std::uint64_t base_states_pulled = 0;
};

/// Stack `levels` stages over `base` and pull `count` outputs. Each output
/// costs exactly (n+1)^levels base states; live phase states stay within
/// n*levels + count at all times.
SieveOutput run_sieve(Oracle& oracle, PhaseSource& base, int levels, std::size_t count, Rng& rng);

} // namespace hshift
