#pragma once

#include "hshift/oracle.hpp"

namespace hshift::testing {

/// Privileged access to oracle-private state, for tests and validators only.
/// Production solving code must not include this header; the solver library
/// compiles against the public Oracle surface alone.
struct Inspector {
    static const GroupVector& secret(const HiddenShiftInstance& inst);

    /// Residual shift (s - known) / 2^level seen by the descended device.
    /// Throws if the descent is inconsistent with the secret.
    static GroupVector effective_shift(const Oracle& oracle, const Descent& d);

    static bool token_live(const Oracle& oracle, const PhaseToken& tok);
    static bool token_collapsed(const Oracle& oracle, const PhaseToken& tok);
    static std::uint32_t token_theta(const Oracle& oracle, const PhaseToken& tok);
    static const GroupVector& coset_hidden_x(const Oracle& oracle, const CosetToken& tok);

    /// Forge a phase token with theta = <label, s> (what sampling would have
    /// produced had the device drawn exactly this label).
    static PhaseToken mint_phase_token(Oracle& oracle, const GroupVector& label);

    /// Forge a phase token with an arbitrary hidden phase.
    static PhaseToken mint_phase_token(Oracle& oracle, const GroupVector& label,
                                       std::uint32_t theta);
};

} // namespace hshift::testing
