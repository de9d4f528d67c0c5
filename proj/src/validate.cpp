#include "hshift/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace hshift {

// --- chi-square -------------------------------------------------------------

namespace {

// Regularized lower incomplete gamma by power series; converges for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 2000000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by continued fraction; for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 2000000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::fabs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) {
            break;
        }
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) {
        throw std::invalid_argument("regularized_gamma_q: domain error");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return 1.0 - gamma_p_series(a, x);
    }
    return gamma_q_cf(a, x);
}

double chi_square_uniform(std::span<const std::uint64_t> cells) {
    if (cells.empty()) {
        throw std::invalid_argument("chi_square_uniform: no cells");
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : cells) {
        total += c;
    }
    if (total == 0) {
        throw std::invalid_argument("chi_square_uniform: empty histogram");
    }
    double expected = static_cast<double>(total) / static_cast<double>(cells.size());
    double stat = 0.0;
    for (std::uint64_t c : cells) {
        double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

double chi_square_p_value(double statistic, std::uint64_t dof) {
    if (dof == 0) {
        throw std::invalid_argument("chi_square_p_value: zero degrees of freedom");
    }
    return regularized_gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

double chi_square_homogeneity(std::span<const std::uint64_t> a,
                              std::span<const std::uint64_t> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("chi_square_homogeneity: cell shape mismatch");
    }
    double total_a = 0.0;
    double total_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total_a += static_cast<double>(a[i]);
        total_b += static_cast<double>(b[i]);
    }
    double total = total_a + total_b;
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double col = static_cast<double>(a[i] + b[i]);
        if (col == 0.0) {
            continue;
        }
        double ea = col * total_a / total;
        double eb = col * total_b / total;
        double da = static_cast<double>(a[i]) - ea;
        double db = static_cast<double>(b[i]) - eb;
        stat += da * da / ea + db * db / eb;
    }
    return stat;
}

// --- ground truth -----------------------------------------------------------

GroupVector brute_force_shift(std::span<const std::uint64_t> f0_table,
                              std::span<const std::uint64_t> f1_table, std::size_t n, int t) {
    std::uint64_t domain = 1ULL << (static_cast<std::uint64_t>(n) * t);
    if (f0_table.size() != domain || f1_table.size() != domain) {
        throw std::invalid_argument("brute_force_shift: table size mismatch");
    }
    if (domain > (1ULL << 16)) {
        throw std::invalid_argument("brute_force_shift: domain too large");
    }

    // f0(0) = f1(s) pins the candidates; injective f1 gives at most one.
    std::vector<GroupVector> verified;
    for (std::uint64_t cand = 0; cand < domain; ++cand) {
        if (f1_table[cand] != f0_table[0]) {
            continue;
        }
        GroupVector s = GroupVector::from_flat_index(cand, n, t);
        bool ok = true;
        for (std::uint64_t xi = 0; xi < domain && ok; ++xi) {
            GroupVector x = GroupVector::from_flat_index(xi, n, t);
            ok = f0_table[xi] == f1_table[vec_add(x, s, 1).flat_index()];
        }
        if (ok) {
            verified.push_back(std::move(s));
        }
    }
    if (verified.empty()) {
        throw PromiseViolationError("brute_force_shift: no shift matches the tables");
    }
    if (verified.size() > 1) {
        throw PromiseViolationError("brute_force_shift: shift is not unique");
    }
    return verified[0];
}

// --- combination uniformity harnesses ----------------------------------------

std::vector<std::uint64_t> combination_cells(std::size_t n, int t, std::uint64_t trials, Rng& rng,
                                             bool with_signs) {
    if (t < 2) {
        throw std::invalid_argument("combination_cells: t must be at least 2");
    }
    std::uint64_t cell_bits = static_cast<std::uint64_t>(n) * (t - 1);
    if (cell_bits > 12) {
        throw std::invalid_argument("combination_cells: too many cells to histogram");
    }
    std::vector<std::uint64_t> cells(1ULL << cell_bits, 0);

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::vector<GroupVector> us;
        us.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            us.push_back(GroupVector::uniform(n, t, rng));
        }
        Gf2Vec pattern = find_dependence(us, rng);
        GroupVector sum(n, t);
        for (std::size_t i = 0; i <= n; ++i) {
            if (!pattern.get(i)) {
                continue;
            }
            int sign = (with_signs && rng.coin()) ? -1 : 1;
            sum = vec_add(sum, us[i], sign);
        }
        ++cells[halve(sum).flat_index()];
    }
    return cells;
}

namespace {

UniformityResult finish_uniformity(std::vector<std::uint64_t> cells, std::uint64_t trials,
                                   double significance) {
    UniformityResult result;
    result.trials = trials;
    result.chi_square = chi_square_uniform(cells);
    result.dof = cells.size() - 1;
    result.p_value = chi_square_p_value(result.chi_square, result.dof);
    result.significance = significance;
    result.pass = result.p_value >= significance;
    result.cells = std::move(cells);
    return result;
}

void check_trials_per_cell(std::uint64_t trials, std::size_t cells) {
    if (trials < 50 * cells) {
        throw std::invalid_argument("uniformity trial: need at least 50 trials per cell");
    }
}

} // namespace

UniformityResult combination_uniformity_trial(std::size_t n, int t, std::uint64_t trials,
                                              Rng& rng, double significance, bool with_signs) {
    std::vector<std::uint64_t> cells = combination_cells(n, t, trials, rng, with_signs);
    check_trials_per_cell(trials, cells.size());
    return finish_uniformity(std::move(cells), trials, significance);
}

// --- mod-p combination harness ------------------------------------------------

namespace {

// Minimal dense elimination over GF(p) for the few-rows systems used here.
// Returns a uniform nonzero solution of sum(a_i u_i) = 0 mod p, entries in
// {0, ..., p-1}.
std::vector<int> gfp_sample_dependence(const std::vector<std::vector<int>>& columns_mod_p,
                                       std::size_t n, int p, Rng& rng) {
    std::size_t cols = columns_mod_p.size();
    std::vector<std::vector<int>> m(n, std::vector<int>(cols, 0));
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            m[r][c] = columns_mod_p[c][r] % p;
        }
    }

    auto inv_mod = [p](int a) {
        for (int i = 1; i < p; ++i) {
            if (a * i % p == 1) {
                return i;
            }
        }
        throw std::logic_error("gfp_sample_dependence: non-invertible pivot");
    };

    std::vector<std::size_t> pivot_cols;
    std::vector<bool> is_pivot(cols, false);
    std::size_t next_row = 0;
    for (std::size_t col = 0; col < cols && next_row < n; ++col) {
        std::size_t pr = next_row;
        while (pr < n && m[pr][col] == 0) {
            ++pr;
        }
        if (pr == n) {
            continue;
        }
        std::swap(m[next_row], m[pr]);
        int scale = inv_mod(m[next_row][col]);
        for (std::size_t c = col; c < cols; ++c) {
            m[next_row][c] = m[next_row][c] * scale % p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == next_row || m[r][col] == 0) {
                continue;
            }
            int factor = m[r][col];
            for (std::size_t c = col; c < cols; ++c) {
                m[r][c] = (m[r][c] - factor * m[next_row][c] % p + p * p) % p;
            }
        }
        pivot_cols.push_back(col);
        is_pivot[col] = true;
        ++next_row;
    }

    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!is_pivot[c]) {
            free_cols.push_back(c);
        }
    }
    if (free_cols.empty()) {
        throw std::logic_error("gfp_sample_dependence: no dependence exists");
    }

    // Uniform nonzero assignment of the free variables, then back-substitute.
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        combos *= static_cast<std::uint64_t>(p);
    }
    std::uint64_t pick = 1 + rng.below(combos - 1);

    std::vector<int> solution(cols, 0);
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        solution[free_cols[i]] = static_cast<int>(pick % p);
        pick /= p;
    }
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) {
        int acc = 0;
        for (std::size_t k = 0; k < free_cols.size(); ++k) {
            acc = (acc + m[r][free_cols[k]] * solution[free_cols[k]]) % p;
        }
        solution[pivot_cols[r]] = (p - acc) % p;
    }
    return solution;
}

std::uint64_t pow_u64(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

} // namespace

std::vector<std::uint64_t> combination_cells_mod_p(int p, int t, std::size_t n,
                                                   std::uint64_t trials, Rng& rng) {
    if (p != 2 && p != 3 && p != 5) {
        throw std::invalid_argument("combination_cells_mod_p: p must be one of {2, 3, 5}");
    }
    if (t < 2) {
        throw std::invalid_argument("combination_cells_mod_p: t must be at least 2");
    }
    std::uint64_t modulus = pow_u64(static_cast<std::uint64_t>(p), t);
    std::uint64_t cell_count = pow_u64(pow_u64(static_cast<std::uint64_t>(p), t - 1), static_cast<int>(n));
    if (cell_count > (1ULL << 12)) {
        throw std::invalid_argument("combination_cells_mod_p: too many cells to histogram");
    }
    std::vector<std::uint64_t> cells(cell_count, 0);

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::vector<std::vector<int>> us(n + 1, std::vector<int>(n));
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                us[i][j] = static_cast<int>(rng.below(modulus));
            }
        }
        std::vector<int> pattern = gfp_sample_dependence(us, n, p, rng);

        // Lift each nonzero residue r to one of its two representatives in
        // {-(p-1), ..., p-1}, i.e. r or r - p, with equal probability.
        std::vector<std::uint64_t> sum(n, 0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (pattern[i] == 0) {
                continue;
            }
            std::uint64_t coeff = static_cast<std::uint64_t>(pattern[i]);
            if (rng.coin()) {
                coeff = modulus + coeff - static_cast<std::uint64_t>(p);
            }
            for (std::size_t j = 0; j < n; ++j) {
                sum[j] = (sum[j] + coeff * static_cast<std::uint64_t>(us[i][j])) % modulus;
            }
        }

        std::uint64_t cell = 0;
        std::uint64_t scale = 1;
        std::uint64_t reduced_modulus = modulus / static_cast<std::uint64_t>(p);
        for (std::size_t j = 0; j < n; ++j) {
            if (sum[j] % static_cast<std::uint64_t>(p) != 0) {
                throw std::logic_error("combination_cells_mod_p: combination is not divisible by p");
            }
            cell += (sum[j] / static_cast<std::uint64_t>(p)) * scale;
            scale *= reduced_modulus;
        }
        ++cells[cell];
    }
    return cells;
}

UniformityResult combination_uniformity_trial_mod_p(int p, int t, std::size_t n,
                                                    std::uint64_t trials, Rng& rng,
                                                    double significance) {
    std::vector<std::uint64_t> cells = combination_cells_mod_p(p, t, n, trials, rng);
    check_trials_per_cell(trials, cells.size());
    return finish_uniformity(std::move(cells), trials, significance);
}

// --- device statistics --------------------------------------------------------

double sign_balance_trial(Oracle& oracle, std::uint64_t trials) {
    if (trials == 0) {
        throw std::invalid_argument("sign_balance_trial: trials must be positive");
    }
    std::uint64_t plus = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        auto [u1, tok1] = oracle.sample_phase_state();
        auto [u2, tok2] = oracle.sample_phase_state();
        CombineResult combined = oracle.combine(tok1, tok2);
        if (combined.sign > 0) {
            ++plus;
        }
        oracle.discard(combined.token);
    }
    return static_cast<double>(plus) / static_cast<double>(trials);
}

SuccessBoundResult success_bound_trial(std::size_t n, int t, std::uint64_t attempts,
                                       std::uint64_t root_seed) {
    SuccessBoundResult result;
    int l = static_cast<int>(n) * t + 8;
    for (std::uint64_t i = 0; i < attempts; ++i) {
        HiddenShiftInstance inst =
            HiddenShiftInstance::random(n, t, l, derive_seed(root_seed, 2 * i));
        Oracle oracle(inst);
        Rng rng(derive_seed(root_seed, 2 * i + 1));
        AttemptTrace trace;
        solve_attempt(oracle, rng, &trace);
        result.rounds += static_cast<std::uint64_t>(trace.rounds_run);
        result.rounds_full_rank += static_cast<std::uint64_t>(trace.rounds_full_rank);
        if (trace.succeeded) {
            ++result.attempts_succeeded;
        }
    }
    result.attempts = attempts;
    result.per_round_rate =
        result.rounds ? static_cast<double>(result.rounds_full_rank) / result.rounds : 0.0;
    result.per_attempt_rate =
        attempts ? static_cast<double>(result.attempts_succeeded) / attempts : 0.0;
    return result;
}

// --- suite -------------------------------------------------------------------

namespace {

struct CheckSpec {
    std::string name;
    bool is_chi_square;
    std::function<void(SuiteEntry&, std::uint64_t seed, double alpha, std::uint64_t scale)> run;
};

double binomial_threshold(double p, std::uint64_t trials) {
    return p - 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

std::vector<CheckSpec> make_checks() {
    std::vector<CheckSpec> checks;

    auto add_mod2_uniformity = [&checks](std::size_t n, int t, std::uint64_t trials, bool with_signs) {
        std::string name = std::string("combine-uniform-") + (with_signs ? "" : "unsigned-") + "n" +
                           std::to_string(n) + "t" + std::to_string(t);
        checks.push_back(
            {name, true,
             [n, t, trials, with_signs](SuiteEntry& e, std::uint64_t seed, double alpha,
                                        std::uint64_t scale) {
                 Rng rng(seed);
                 UniformityResult r = combination_uniformity_trial(n, t, trials * scale, rng, alpha, with_signs);
                 e.statistic = r.chi_square;
                 e.dof = r.dof;
                 e.p_value = r.p_value;
                 e.trials = r.trials;
                 e.pass = r.pass;
             }});
    };
    add_mod2_uniformity(1, 2, 10000, true);
    add_mod2_uniformity(2, 2, 20000, true);
    add_mod2_uniformity(1, 3, 10000, true);
    add_mod2_uniformity(2, 2, 20000, false);

    checks.push_back(
        {"modp-matches-mod2", true,
         [](SuiteEntry& e, std::uint64_t seed, double alpha, std::uint64_t scale) {
             Rng rng_a(derive_seed(seed, 0));
             Rng rng_b(derive_seed(seed, 1));
             std::uint64_t trials = 20000 * scale;
             std::vector<std::uint64_t> a = combination_cells(2, 2, trials, rng_a, true);
             std::vector<std::uint64_t> b = combination_cells_mod_p(2, 2, 2, trials, rng_b);
             e.statistic = chi_square_homogeneity(a, b);
             e.dof = a.size() - 1;
             e.p_value = chi_square_p_value(e.statistic, e.dof);
             e.trials = 2 * trials;
             e.pass = e.p_value >= alpha;
         }});

    auto add_modp_uniformity = [&checks](int p, int t, std::size_t n, std::uint64_t trials) {
        std::string name =
            "combine-uniform-p" + std::to_string(p) + "-n" + std::to_string(n) + "t" + std::to_string(t);
        checks.push_back({name, true,
                          [p, t, n, trials](SuiteEntry& e, std::uint64_t seed, double alpha,
                                            std::uint64_t scale) {
                              Rng rng(seed);
                              UniformityResult r =
                                  combination_uniformity_trial_mod_p(p, t, n, trials * scale, rng, alpha);
                              e.statistic = r.chi_square;
                              e.dof = r.dof;
                              e.p_value = r.p_value;
                              e.trials = r.trials;
                              e.pass = r.pass;
                          }});
    };
    add_modp_uniformity(3, 2, 1, 30000);
    add_modp_uniformity(5, 2, 1, 30000);

    checks.push_back(
        {"sign-balance", false,
         [](SuiteEntry& e, std::uint64_t seed, double /*alpha*/, std::uint64_t scale) {
             HiddenShiftInstance inst = HiddenShiftInstance::random(2, 2, 12, seed);
             Oracle oracle(inst);
             std::uint64_t trials = 10000 * scale;
             double freq = sign_balance_trial(oracle, trials);
             e.observed = freq;
             e.threshold = 0.03;
             e.trials = trials;
             e.pass = std::fabs(freq - 0.5) <= 0.03;
             e.detail = "plus-sign frequency";
         }});

    auto add_success_bound = [&checks](std::size_t n, int t, std::uint64_t attempts) {
        std::string name =
            "success-bound-n" + std::to_string(n) + "t" + std::to_string(t);
        checks.push_back(
            {name, false,
             [n, t, attempts](SuiteEntry& e, std::uint64_t seed, double /*alpha*/,
                              std::uint64_t scale) {
                 std::uint64_t total = attempts * scale;
                 SuccessBoundResult r = success_bound_trial(n, t, total, seed);
                 double round_bound = 1.0 - std::pow(2.0, -t);
                 double attempt_bound = std::pow(round_bound, t);
                 double round_threshold = binomial_threshold(round_bound, r.rounds);
                 double attempt_threshold = binomial_threshold(attempt_bound, r.attempts);
                 e.observed = r.per_attempt_rate;
                 e.threshold = attempt_threshold;
                 e.trials = total;
                 e.pass = r.per_round_rate >= round_threshold &&
                          r.per_attempt_rate >= attempt_threshold;
                 e.detail = "per-round rate " + std::to_string(r.per_round_rate) + " (need " +
                            std::to_string(round_threshold) + "), per-attempt rate " +
                            std::to_string(r.per_attempt_rate) + " (need " +
                            std::to_string(attempt_threshold) + ")";
             }});
    };
    add_success_bound(3, 2, 1000);
    add_success_bound(3, 3, 1000);

    return checks;
}

} // namespace

SuiteReport run_validation_suite(const SuiteConfig& config) {
    std::vector<CheckSpec> all = make_checks();

    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (config.only.empty() || all[i].name.find(config.only) != std::string::npos) {
            enabled.push_back(i);
        }
    }
    if (enabled.empty()) {
        throw std::invalid_argument("run_validation_suite: no check matches --only filter");
    }

    std::size_t chi_count = 0;
    for (std::size_t idx : enabled) {
        if (all[idx].is_chi_square) {
            ++chi_count;
        }
    }
    double alpha = chi_count ? config.significance / static_cast<double>(chi_count)
                             : config.significance;

    SuiteReport report;
    report.significance = config.significance;
    report.bonferroni_m = chi_count;
    report.entries.resize(enabled.size());

    std::uint64_t scale = config.trial_scale == 0 ? 1 : config.trial_scale;
    auto run_one = [&](std::size_t slot) {
        const CheckSpec& check = all[enabled[slot]];
        SuiteEntry& entry = report.entries[slot];
        entry.name = check.name;
        entry.is_chi_square = check.is_chi_square;
        entry.seed = derive_seed(config.seed, enabled[slot]);
        try {
            check.run(entry, entry.seed, alpha, scale);
        } catch (const std::exception& e) {
            entry.pass = false;
            entry.detail = std::string("error: ") + e.what();
        }
    };

    int jobs = std::max(1, config.jobs);
    if (jobs == 1 || enabled.size() <= 1) {
        for (std::size_t i = 0; i < enabled.size(); ++i) {
            run_one(i);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= enabled.size()) {
                    return;
                }
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(jobs, static_cast<int>(enabled.size())); ++w) {
            pool.emplace_back(worker);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    report.pass = true;
    for (const SuiteEntry& entry : report.entries) {
        report.pass = report.pass && entry.pass;
    }
    return report;
}

} // namespace hshift
