#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hshift/sieve.hpp"

namespace hshift {

/// One linear constraint on the unknown bits: <indicator, x> = parity over
/// GF(2). indicator is the mod-2 reduction of a final sieve label, parity the
/// +/- measurement outcome of its token.
struct ParityEquation {
    Gf2Vec indicator;
    int parity = 0;
};

/// Measure every final pair in the +/- basis. Consumes all tokens.
std::vector<ParityEquation> collect_equations(Oracle& oracle, std::vector<LabeledToken> finals);

/// Unique GF(2) solution of the equations, as a vector over Z_2. Empty when
/// the indicators do not reach rank n (or the system is inconsistent, which
/// only a non-promise oracle can produce); the caller restarts the attempt.
std::optional<GroupVector> solve_mod2(std::size_t n, std::span<const ParityEquation> equations);

/// Extend a descent by one solved level: the device drops to modulus
/// 2^{t-level-1} and the hidden shift becomes (s - known')/2^{level+1}.
/// A wrong bits argument is accepted; it yields a non-promise descended
/// oracle that only final verification can expose.
Descent descend(const Descent& d, const GroupVector& bits, int t);

struct AttemptTrace {
    int rounds_run = 0;
    int rounds_full_rank = 0;
    bool succeeded = false;
};

/// One full pass of t rounds (sieve, measure, solve, descend). Returns the
/// reconstructed shift, or nothing as soon as one round comes up rank
/// deficient. The per-attempt success probability is at least
/// (1 - 2^-t)^t >= 1/2.
std::optional<GroupVector> solve_attempt(Oracle& oracle, Rng& rng, AttemptTrace* trace = nullptr);

/// Coset-stream variant of one attempt: round i transforms fresh coset
/// states with the shift known so far and sieves only t-i-1 levels.
std::optional<GroupVector> solve_coset_attempt(Oracle& oracle, Rng& rng,
                                               AttemptTrace* trace = nullptr);

struct SolveResult {
    bool ok = false;
    GroupVector s;
    int attempts_used = 0;
    bool verified = false;
    SieveReport report;
};

/// Spot-check f(x, 0) == f(x + s, 1); exhaustive when the domain has at most
/// 2^10 elements, otherwise `samples` random probes.
bool verify_shift(Oracle& oracle, const GroupVector& s, Rng& rng, int samples = 32);

/// Recover the hidden shift with failure probability at most epsilon: up to
/// ceil(log2(1/epsilon)) attempts, each verified against the oracle before
/// being returned.
SolveResult solve(Oracle& oracle, double epsilon, Rng& rng);

/// Same contract, driven entirely by the coset-state stream.
SolveResult solve_coset(Oracle& oracle, double epsilon, Rng& rng);

} // namespace hshift
