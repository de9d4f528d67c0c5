#include "hshift/sieve.hpp"

#include <stdexcept>

namespace hshift {

DeviceSampler::DeviceSampler(Oracle& oracle, Descent descent)
    : oracle_(oracle), descent_(std::move(descent)) {}

DeviceSampler::DeviceSampler(Oracle& oracle)
    : DeviceSampler(oracle, Descent{0, GroupVector(oracle.n(), oracle.t())}) {}

LabeledToken DeviceSampler::next() {
    ++pulled_;
    auto [u, tok] = oracle_.sample_phase_state(descent_);
    return LabeledToken{u, tok};
}

CosetPhaseSampler::CosetPhaseSampler(Oracle& oracle, GroupVector s_known)
    : oracle_(oracle), s_known_(std::move(s_known)) {}

LabeledToken CosetPhaseSampler::next() {
    ++pulled_;
    CosetToken ctok = oracle_.sample_coset_state();
    auto [u, tok] = oracle_.shift_and_transform(ctok, s_known_);
    return LabeledToken{u, tok};
}

Gf2Vec find_dependence(std::span<const GroupVector> labels, Rng& rng) {
    if (labels.empty()) {
        throw std::invalid_argument("find_dependence: no vectors given");
    }
    std::size_t n = labels[0].size();
    for (const GroupVector& u : labels) {
        if (u.size() != n) {
            throw std::invalid_argument("find_dependence: dimension mismatch");
        }
    }
    // One equation per coordinate, one column per vector.
    Gf2System system(n, labels.size());
    for (std::size_t col = 0; col < labels.size(); ++col) {
        for (std::size_t row = 0; row < n; ++row) {
            system.set(row, col, labels[col][row] & 1u);
        }
    }
    system.echelonize();
    return system.sample_uniform_solution(rng);
}

ChainResult combine_chain(Oracle& oracle, std::vector<LabeledToken> selected) {
    if (selected.empty()) {
        throw std::invalid_argument("combine_chain: empty selection");
    }
    ChainResult result{selected[0].label, selected[0].token, CoefficientVector{{1}}};
    for (std::size_t i = 1; i < selected.size(); ++i) {
        CombineResult step = oracle.combine(result.token, selected[i].token);
        result.token = step.token;
        result.label = vec_add(result.label, selected[i].label, step.sign);
        result.coeffs.entries.push_back(static_cast<std::int8_t>(step.sign));
    }
    return result;
}

LevelStage::LevelStage(Oracle& oracle, PhaseSource& upstream, std::size_t level, Rng& rng)
    : oracle_(oracle), upstream_(upstream), rng_(rng) {
    buffer_.level = level;
    buffer_.capacity = oracle.n() + 1;
}

LabeledToken LevelStage::next() {
    buffer_.entries.clear();
    while (buffer_.entries.size() < buffer_.capacity) {
        buffer_.entries.push_back(upstream_.next());
    }

    std::vector<GroupVector> labels;
    labels.reserve(buffer_.entries.size());
    for (const LabeledToken& e : buffer_.entries) {
        labels.push_back(e.label);
    }
    Gf2Vec dependence = find_dependence(labels, rng_);

    std::vector<LabeledToken> selected;
    for (std::size_t i = 0; i < buffer_.entries.size(); ++i) {
        if (dependence.get(i)) {
            selected.push_back(std::move(buffer_.entries[i]));
        } else {
            // The whole batch is spent either way: the next dependence must
            // see a fresh independent sample or the emitted labels drift off
            // uniform.
            oracle_.discard(buffer_.entries[i].token);
        }
    }
    oracle_.record_level_consumption(buffer_.level, buffer_.entries.size());
    buffer_.entries.clear();

    ChainResult chain = combine_chain(oracle_, std::move(selected));
    return LabeledToken{halve(chain.label), chain.token};
}

namespace {

class CountingSource final : public PhaseSource {
  public:
    explicit CountingSource(PhaseSource& inner) : inner_(inner) {}

    LabeledToken next() override {
        ++pulled_;
        return inner_.next();
    }

    std::uint64_t pulled() const { return pulled_; }

  private:
    PhaseSource& inner_;
    std::uint64_t pulled_ = 0;
};

} // namespace

SieveOutput run_sieve(Oracle& oracle, PhaseSource& base, int levels, std::size_t count, Rng& rng) {
    if (levels < 0) {
        throw std::invalid_argument("run_sieve: negative level count");
    }
    CountingSource counter(base);
    std::vector<std::unique_ptr<LevelStage>> stages;
    stages.reserve(static_cast<std::size_t>(levels));
    PhaseSource* top = &counter;
    for (int j = 0; j < levels; ++j) {
        stages.push_back(std::make_unique<LevelStage>(oracle, *top, static_cast<std::size_t>(j), rng));
        top = stages.back().get();
    }

    SieveOutput out;
    out.finals.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.finals.push_back(top->next());
    }
    out.base_states_pulled = counter.pulled();
    return out;
}

} // namespace hshift
