#include "hshift/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace hshift {

std::vector<ParityEquation> collect_equations(Oracle& oracle, std::vector<LabeledToken> finals) {
    std::vector<ParityEquation> equations;
    equations.reserve(finals.size());
    for (LabeledToken& pair : finals) {
        ParityEquation eq;
        eq.indicator = reduce_mod2(pair.label);
        eq.parity = oracle.measure_pm(pair.token);
        equations.push_back(std::move(eq));
    }
    return equations;
}

std::optional<GroupVector> solve_mod2(std::size_t n, std::span<const ParityEquation> equations) {
    if (equations.size() < n) {
        throw std::invalid_argument("solve_mod2: need at least n equations");
    }
    Gf2System system(equations.size(), n);
    for (std::size_t r = 0; r < equations.size(); ++r) {
        if (equations[r].indicator.size() != n) {
            throw std::invalid_argument("solve_mod2: indicator width mismatch");
        }
        system.set_row(r, equations[r].indicator);
        system.set_rhs(r, equations[r].parity != 0);
    }
    system.echelonize();
    if (system.rank() < n || !system.consistent()) {
        return std::nullopt;
    }
    Gf2Vec bits = system.solve_unique();
    std::vector<std::uint32_t> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = bits.get(i) ? 1u : 0u;
    }
    return GroupVector(std::move(coords), 1);
}

Descent descend(const Descent& d, const GroupVector& bits, int t) {
    if (bits.modulus_log() != 1) {
        throw std::invalid_argument("descend: bits must be a vector over Z_2");
    }
    if (d.known.size() != bits.size() || d.known.modulus_log() != t) {
        throw std::invalid_argument("descend: shape mismatch");
    }
    if (d.level >= t) {
        throw std::invalid_argument("descend: already at full depth");
    }
    GroupVector lifted = bits.with_modulus_log(t).shifted_left(d.level);
    return Descent{d.level + 1, vec_add(d.known, lifted, 1)};
}

namespace {

std::optional<GroupVector> run_rounds(Oracle& oracle, Rng& rng, AttemptTrace* trace,
                                      bool coset_stream) {
    std::size_t n = oracle.n();
    int t = oracle.t();
    std::size_t finals_per_round = n + static_cast<std::size_t>(t);

    Descent d{0, GroupVector(n, t)};
    for (int round = 0; round < t; ++round) {
        int levels = t - round - 1;
        SieveOutput out;
        if (coset_stream) {
            CosetPhaseSampler base(oracle, d.known);
            out = run_sieve(oracle, base, levels, finals_per_round, rng);
        } else {
            DeviceSampler base(oracle, d);
            out = run_sieve(oracle, base, levels, finals_per_round, rng);
        }
        std::vector<ParityEquation> equations = collect_equations(oracle, std::move(out.finals));
        if (trace) {
            ++trace->rounds_run;
        }
        std::optional<GroupVector> bits = solve_mod2(n, equations);
        if (!bits) {
            return std::nullopt;
        }
        if (trace) {
            ++trace->rounds_full_rank;
        }
        d = descend(d, *bits, t);
    }
    if (trace) {
        trace->succeeded = true;
    }
    return d.known;
}

} // namespace

std::optional<GroupVector> solve_attempt(Oracle& oracle, Rng& rng, AttemptTrace* trace) {
    return run_rounds(oracle, rng, trace, false);
}

std::optional<GroupVector> solve_coset_attempt(Oracle& oracle, Rng& rng, AttemptTrace* trace) {
    return run_rounds(oracle, rng, trace, true);
}

bool verify_shift(Oracle& oracle, const GroupVector& s, Rng& rng, int samples) {
    std::size_t n = oracle.n();
    int t = oracle.t();
    std::uint64_t bits = oracle.instance().domain_size_log2();
    if (bits <= 10) {
        std::uint64_t domain = 1ULL << bits;
        for (std::uint64_t idx = 0; idx < domain; ++idx) {
            GroupVector x = GroupVector::from_flat_index(idx, n, t);
            if (oracle.f_eval(x, 0) != oracle.f_eval(vec_add(x, s, 1), 1)) {
                return false;
            }
        }
        return true;
    }
    for (int i = 0; i < samples; ++i) {
        GroupVector x = GroupVector::uniform(n, t, rng);
        if (oracle.f_eval(x, 0) != oracle.f_eval(vec_add(x, s, 1), 1)) {
            return false;
        }
    }
    return true;
}

namespace {

SolveResult solve_impl(Oracle& oracle, double epsilon, Rng& rng, bool coset_stream) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("solve: epsilon must lie in (0, 1)");
    }
    // Each attempt succeeds with probability >= 1/2, so ceil(log2(1/eps))
    // attempts push the failure probability below epsilon.
    int budget = static_cast<int>(std::ceil(std::log2(1.0 / epsilon)));
    if (budget < 1) {
        budget = 1;
    }

    SolveResult result;
    for (int attempt = 0; attempt < budget; ++attempt) {
        ++result.attempts_used;
        std::optional<GroupVector> candidate =
            coset_stream ? solve_coset_attempt(oracle, rng) : solve_attempt(oracle, rng);
        if (!candidate) {
            continue;
        }
        if (verify_shift(oracle, *candidate, rng)) {
            result.ok = true;
            result.verified = true;
            result.s = *candidate;
            oracle.record_outcome("success");
            result.report = oracle.report();
            return result;
        }
    }
    oracle.record_outcome("rank-deficient");
    result.report = oracle.report();
    return result;
}

} // namespace

SolveResult solve(Oracle& oracle, double epsilon, Rng& rng) {
    return solve_impl(oracle, epsilon, rng, false);
}

SolveResult solve_coset(Oracle& oracle, double epsilon, Rng& rng) {
    return solve_impl(oracle, epsilon, rng, true);
}

} // namespace hshift
