#include "hshift/inspect.hpp"

#include <stdexcept>

namespace hshift::testing {

const GroupVector& Inspector::secret(const HiddenShiftInstance& inst) {
    return inst.secret_;
}

GroupVector Inspector::effective_shift(const Oracle& oracle, const Descent& d) {
    const GroupVector& s = oracle.inst_.secret_;
    int t = oracle.inst_.t();
    int t_level = t - d.level;
    if (t_level <= 0) {
        throw std::invalid_argument("Inspector::effective_shift: level exhausts the modulus");
    }
    std::vector<std::uint32_t> residual(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::uint32_t diff = (s[i] - d.known[i]) & ((1u << t) - 1);
        if (d.level > 0 && (diff & ((1u << d.level) - 1)) != 0) {
            throw std::invalid_argument("Inspector::effective_shift: descent inconsistent with secret");
        }
        residual[i] = (diff >> d.level) & ((1u << t_level) - 1);
    }
    return GroupVector(std::move(residual), t_level);
}

bool Inspector::token_live(const Oracle& oracle, const PhaseToken& tok) {
    auto it = oracle.qubits_.find(tok.id);
    return it != oracle.qubits_.end() && it->second.live;
}

bool Inspector::token_collapsed(const Oracle& oracle, const PhaseToken& tok) {
    auto it = oracle.qubits_.find(tok.id);
    if (it == oracle.qubits_.end()) {
        throw std::invalid_argument("Inspector::token_collapsed: token is not live");
    }
    return it->second.collapsed;
}

std::uint32_t Inspector::token_theta(const Oracle& oracle, const PhaseToken& tok) {
    auto it = oracle.qubits_.find(tok.id);
    if (it == oracle.qubits_.end()) {
        throw std::invalid_argument("Inspector::token_theta: token is not live");
    }
    if (it->second.collapsed) {
        throw std::invalid_argument("Inspector::token_theta: token is a collapsed basis state");
    }
    return it->second.value;
}

const GroupVector& Inspector::coset_hidden_x(const Oracle& oracle, const CosetToken& tok) {
    auto it = oracle.coset_prep_.find(tok.id);
    if (it == oracle.coset_prep_.end()) {
        throw std::invalid_argument("Inspector::coset_hidden_x: token is not live");
    }
    return it->second;
}

PhaseToken Inspector::mint_phase_token(Oracle& oracle, const GroupVector& label) {
    const GroupVector& s = oracle.inst_.secret_;
    GroupVector s_at = s.with_modulus_log(label.modulus_log());
    return mint_phase_token(oracle, label, inner_product_mod(label, s_at));
}

PhaseToken Inspector::mint_phase_token(Oracle& oracle, const GroupVector& label,
                                       std::uint32_t theta) {
    Oracle::HiddenQubit state;
    state.collapsed = false;
    state.modulus_log = label.modulus_log();
    state.value = theta & ((1u << label.modulus_log()) - 1);
    return oracle.new_phase_token(label, state);
}

} // namespace hshift::testing
