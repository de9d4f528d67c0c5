#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hshift/solver.hpp"

namespace hshift {

/// Upper regularized incomplete gamma Q(a, x); the chi-square survival
/// function is Q(dof/2, stat/2).
double regularized_gamma_q(double a, double x);

/// Pearson statistic of `cells` against the uniform distribution.
double chi_square_uniform(std::span<const std::uint64_t> cells);

/// p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_p_value(double statistic, std::uint64_t dof);

/// Two-sample homogeneity statistic for equal-length histograms; dof is
/// cells - 1.
double chi_square_homogeneity(std::span<const std::uint64_t> a,
                              std::span<const std::uint64_t> b);

struct UniformityResult {
    std::vector<std::uint64_t> cells;
    std::uint64_t trials = 0;
    double chi_square = 0.0;
    std::uint64_t dof = 0;
    double p_value = 0.0;
    double significance = 0.0;
    bool pass = false;
};

/// Ground truth by table scan: the unique s with f0(x) = f1(x + s) for all x.
/// Tables are codewords indexed by flat x; domain at most 2^16. Throws
/// PromiseViolationError when no shift or more than one fits.
class PromiseViolationError : public std::runtime_error {
  public:
    explicit PromiseViolationError(const std::string& what) : std::runtime_error(what) {}
};

GroupVector brute_force_shift(std::span<const std::uint64_t> f0_table,
                              std::span<const std::uint64_t> f1_table, std::size_t n, int t);

/// Draw n+1 uniform vectors from Z_{2^t}^n, pick a uniform nonzero mod-2
/// dependence, optionally flip each selected coefficient's sign with a fair
/// coin, and histogram sum(a_i u_i)/2 over Z_{2^{t-1}}^n.
UniformityResult combination_uniformity_trial(std::size_t n, int t, std::uint64_t trials,
                                              Rng& rng, double significance,
                                              bool with_signs = true);

/// Same harness over Z_{p^t}^n for a small prime p: dependence mod p,
/// coefficients lifted to {-(p-1), ..., p-1}, histogram of sum/p over
/// Z_{p^{t-1}}^n.
UniformityResult combination_uniformity_trial_mod_p(int p, int t, std::size_t n,
                                                    std::uint64_t trials, Rng& rng,
                                                    double significance);

/// Cell counts of the combination output distribution, for homogeneity
/// cross-checks between harnesses.
std::vector<std::uint64_t> combination_cells(std::size_t n, int t, std::uint64_t trials, Rng& rng,
                                             bool with_signs);
std::vector<std::uint64_t> combination_cells_mod_p(int p, int t, std::size_t n,
                                                   std::uint64_t trials, Rng& rng);

/// Empirical frequency of the + sign over `trials` combinations of fresh
/// token pairs.
double sign_balance_trial(Oracle& oracle, std::uint64_t trials);

struct SuccessBoundResult {
    std::uint64_t attempts = 0;
    std::uint64_t attempts_succeeded = 0;
    std::uint64_t rounds = 0;
    std::uint64_t rounds_full_rank = 0;
    double per_round_rate = 0.0;
    double per_attempt_rate = 0.0;
};

/// Fresh random instances, one solve attempt each; measures how often a
/// round reaches rank n and how often a whole attempt survives all t rounds.
SuccessBoundResult success_bound_trial(std::size_t n, int t, std::uint64_t attempts,
                                       std::uint64_t root_seed);

// --- validation suite -------------------------------------------------------

struct SuiteConfig {
    std::uint64_t seed = 1;
    double significance = 0.01; // Bonferroni-divided across chi-square checks
    std::string only;           // substring filter on check names; empty = all
    std::uint64_t trial_scale = 1;
    int jobs = 1;
};

struct SuiteEntry {
    std::string name;
    bool is_chi_square = false;
    bool pass = false;
    double statistic = 0.0;
    std::uint64_t dof = 0;
    double p_value = 0.0;
    double threshold = 0.0;
    double observed = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string detail;
};

struct SuiteReport {
    bool pass = false;
    double significance = 0.0;
    std::size_t bonferroni_m = 0;
    std::vector<SuiteEntry> entries;
};

/// Run every validator (or the --only subset) with per-check seeds derived
/// from the root seed. Checks are independent and may run on worker threads;
/// results come back sorted by declaration order.
SuiteReport run_validation_suite(const SuiteConfig& config);

} // namespace hshift
