#include "hshift/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hshift {

namespace {

constexpr std::uint64_t kDeviceStream = 0xd401;

std::uint32_t mod_mask(int t) {
    return (1u << t) - 1;
}

} // namespace

Oracle::Oracle(HiddenShiftInstance instance)
    : Oracle(std::move(instance), 0) {}

Oracle::Oracle(HiddenShiftInstance instance, std::uint64_t device_seed)
    : inst_(std::move(instance)),
      device_rng_(device_seed != 0 ? device_seed : derive_seed(inst_.seed(), kDeviceStream)) {}

std::uint64_t Oracle::f_eval(const GroupVector& x, int branch) {
    if (x.size() != inst_.n() || x.modulus_log() != inst_.t()) {
        throw std::invalid_argument("Oracle::f_eval: argument shape mismatch");
    }
    if (branch != 0 && branch != 1) {
        throw std::invalid_argument("Oracle::f_eval: branch must be 0 or 1");
    }
    ++stats_.oracle_queries;
    if (branch == 0) {
        return inst_.encode(x);
    }
    return inst_.encode(vec_add(x, inst_.secret_, -1));
}

PhaseToken Oracle::new_phase_token(const GroupVector& label, HiddenQubit state) {
    state.live = true;
    std::uint64_t id = next_id_++;
    qubits_.emplace(id, state);
    ++stats_.phase_tokens_created;
    ++stats_.live_phase_tokens;
    if (stats_.live_phase_tokens > stats_.peak_live_phase_tokens) {
        stats_.peak_live_phase_tokens = stats_.live_phase_tokens;
    }
    return PhaseToken{id, label, state.modulus_log};
}

Oracle::HiddenQubit Oracle::take_qubit(const PhaseToken& tok, const char* op) {
    auto it = qubits_.find(tok.id);
    if (tok.id == 0 || it == qubits_.end() || !it->second.live) {
        throw TokenReuseError(std::string(op) + ": token already consumed or never issued");
    }
    HiddenQubit state = it->second;
    qubits_.erase(it);
    ++stats_.phase_tokens_consumed;
    --stats_.live_phase_tokens;
    return state;
}

GroupVector Oracle::take_coset(const CosetToken& tok, const char* op) {
    auto it = coset_prep_.find(tok.id);
    if (tok.id == 0 || it == coset_prep_.end()) {
        throw TokenReuseError(std::string(op) + ": coset token already consumed or never issued");
    }
    GroupVector x = std::move(it->second);
    coset_prep_.erase(it);
    ++stats_.coset_tokens_consumed;
    return x;
}

std::pair<GroupVector, PhaseToken> Oracle::sample_phase_state() {
    return sample_phase_state(Descent{0, GroupVector(inst_.n(), inst_.t())});
}

std::pair<GroupVector, PhaseToken> Oracle::sample_phase_state(const Descent& d) {
    int t = inst_.t();
    if (d.level < 0 || d.level >= t) {
        throw std::invalid_argument("Oracle::sample_phase_state: descent level out of range");
    }
    if (d.known.size() != inst_.n() || d.known.modulus_log() != t) {
        throw std::invalid_argument("Oracle::sample_phase_state: descent shape mismatch");
    }
    int t_level = t - d.level;

    ++stats_.oracle_queries;
    stats_.qft_units +=
        static_cast<std::uint64_t>(inst_.n()) * t_level * inst_.n() * t_level;

    GroupVector u = GroupVector::uniform(inst_.n(), t_level, device_rng_);

    // Consistent descent: both branches survive the codeword measurement and
    // the qubit is an exact phase state for the residual shift.
    bool consistent = true;
    std::uint32_t level_mask = (d.level == 0) ? 0 : mod_mask(d.level);
    for (std::size_t i = 0; i < inst_.n(); ++i) {
        if (((inst_.secret_[i] ^ d.known[i]) & level_mask) != 0) {
            consistent = false;
            break;
        }
    }

    HiddenQubit state;
    state.modulus_log = t_level;
    if (consistent) {
        std::vector<std::uint32_t> residual(inst_.n());
        for (std::size_t i = 0; i < inst_.n(); ++i) {
            std::uint32_t diff = (inst_.secret_[i] - d.known[i]) & mod_mask(t);
            residual[i] = (diff >> d.level) & mod_mask(t_level);
        }
        GroupVector s_eff(std::move(residual), t_level);
        state.collapsed = false;
        state.value = inner_product_mod(u, s_eff);
    } else {
        // The two branches hit disjoint codeword sets, so the measurement
        // collapses onto a single branch.
        state.collapsed = true;
        state.value = device_rng_.coin() ? 1 : 0;
    }
    PhaseToken tok = new_phase_token(u, state);
    return {u, tok};
}

CombineResult Oracle::combine(PhaseToken a, PhaseToken b) {
    if (a.id == b.id) {
        throw TokenReuseError("Oracle::combine: a token cannot be combined with itself");
    }
    HiddenQubit qa = take_qubit(a, "Oracle::combine");
    HiddenQubit qb = take_qubit(b, "Oracle::combine");
    if (qa.modulus_log != qb.modulus_log || a.label.size() != b.label.size()) {
        throw std::invalid_argument("Oracle::combine: modulus or dimension mismatch");
    }
    int m = qa.modulus_log;
    std::uint32_t mask = mod_mask(m);

    // CNOT then measure the second qubit. The observed outcome maps to the
    // reported sign: outcome 0 keeps theta_a + theta_b, outcome 1 leaves
    // theta_a - theta_b.
    int outcome;
    HiddenQubit out;
    out.modulus_log = m;
    if (!qa.collapsed && !qb.collapsed) {
        outcome = device_rng_.coin() ? 1 : 0;
        out.collapsed = false;
        out.value = (outcome == 0) ? ((qa.value + qb.value) & mask)
                                   : ((qa.value - qb.value) & mask);
    } else if (!qa.collapsed && qb.collapsed) {
        outcome = device_rng_.coin() ? 1 : 0;
        out.collapsed = true;
        out.value = static_cast<std::uint32_t>(outcome) ^ qb.value;
    } else if (qa.collapsed && !qb.collapsed) {
        outcome = device_rng_.coin() ? 1 : 0;
        out.collapsed = true;
        out.value = qa.value;
    } else {
        outcome = static_cast<int>(qa.value ^ qb.value);
        out.collapsed = true;
        out.value = qa.value;
    }

    int sign = (outcome == 0) ? 1 : -1;
    GroupVector label = vec_add(a.label, b.label, sign);
    PhaseToken tok = new_phase_token(label, out);
    return CombineResult{sign, tok};
}

int Oracle::measure_pm(PhaseToken tok) {
    HiddenQubit q = take_qubit(tok, "Oracle::measure_pm");
    if (q.collapsed) {
        return device_rng_.coin() ? 1 : 0;
    }
    std::uint32_t modulus = 1u << q.modulus_log;
    if (q.value == 0) {
        return 0;
    }
    if (2 * q.value == modulus) {
        return 1;
    }
    double p_minus = std::sin(std::numbers::pi * q.value / modulus);
    p_minus *= p_minus;
    return device_rng_.unit() < p_minus ? 1 : 0;
}

void Oracle::discard(PhaseToken tok) {
    take_qubit(tok, "Oracle::discard");
}

CosetToken Oracle::sample_coset_state() {
    ++stats_.oracle_queries;
    GroupVector x = GroupVector::uniform(inst_.n(), inst_.t(), device_rng_);
    std::uint64_t id = next_id_++;
    coset_prep_.emplace(id, std::move(x));
    ++stats_.coset_tokens_created;
    return CosetToken{id};
}

std::pair<GroupVector, PhaseToken> Oracle::shift_and_transform(CosetToken ctok,
                                                               const GroupVector& s_known) {
    if (s_known.size() != inst_.n() || s_known.modulus_log() != inst_.t()) {
        throw std::invalid_argument("Oracle::shift_and_transform: shape mismatch");
    }
    take_coset(ctok, "Oracle::shift_and_transform");

    int t = inst_.t();
    stats_.qft_units += static_cast<std::uint64_t>(inst_.n()) * t * inst_.n() * t;

    // After |x>|i> -> |x - i*s_known>|i> the branches differ by s - s_known,
    // so the Fourier-sampled qubit carries theta = <u, s - s_known>. The
    // prepared x only fixes a global phase and drops out.
    GroupVector u = GroupVector::uniform(inst_.n(), t, device_rng_);
    GroupVector residual = vec_add(inst_.secret_, s_known, -1);

    HiddenQubit state;
    state.modulus_log = t;
    state.collapsed = false;
    state.value = inner_product_mod(u, residual);
    PhaseToken tok = new_phase_token(u, state);
    return {u, tok};
}

void Oracle::record_level_consumption(std::size_t level, std::uint64_t count) {
    if (stats_.per_level_consumed.size() <= level) {
        stats_.per_level_consumed.resize(level + 1, 0);
    }
    stats_.per_level_consumed[level] += count;
}

} // namespace hshift
