#include <doctest.h>

#include <cmath>
#include <vector>

#include "hshift/validate.hpp"

using namespace hshift;

TEST_CASE("chi-square survival function matches published critical values") {
    // Reference points from standard chi-square tables.
    CHECK(chi_square_p_value(6.635, 1) == doctest::Approx(0.01).epsilon(0.01));
    CHECK(chi_square_p_value(20.090, 8) == doctest::Approx(0.01).epsilon(0.01));
    CHECK(chi_square_p_value(7.815, 3) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(chi_square_p_value(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(chi_square_p_value(249.4456, 200) == doctest::Approx(0.01).epsilon(0.01));
    CHECK(chi_square_p_value(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("chi-square statistic of a two-cell histogram") {
    std::vector<std::uint64_t> cells{30, 20};
    CHECK(chi_square_uniform(cells) == doctest::Approx(2.0)); // (5^2 + 5^2) / 25
    CHECK_THROWS_AS(chi_square_uniform(std::vector<std::uint64_t>{}), std::invalid_argument);
}

TEST_CASE("brute_force_shift scans tables for the unique shift") {
    // f1 == f0 : shift 0.
    std::vector<std::uint64_t> id{10, 11, 12, 13};
    CHECK(brute_force_shift(id, id, 1, 2) == GroupVector({0}, 2));

    // f0 = id, f1(x) = x - 3: f0(x) = f1(x + 3), so s = 3.
    std::vector<std::uint64_t> f0{0, 1, 2, 3};
    std::vector<std::uint64_t> f1{1, 2, 3, 0};
    CHECK(brute_force_shift(f0, f1, 1, 2) == GroupVector({3}, 2));

    // No consistent shift.
    std::vector<std::uint64_t> junk{0, 1, 2, 4};
    std::vector<std::uint64_t> junk2{0, 2, 1, 4};
    CHECK_THROWS_AS(brute_force_shift(junk, junk2, 1, 2), PromiseViolationError);

    // Non-injective tables admit several shifts.
    std::vector<std::uint64_t> flat{5, 5};
    CHECK_THROWS_AS(brute_force_shift(flat, flat, 1, 1), PromiseViolationError);

    CHECK_THROWS_AS(brute_force_shift(f0, f1, 2, 2), std::invalid_argument);
}

TEST_CASE("combination outputs are uniform after halving") {
    struct Size {
        std::size_t n;
        int t;
        std::uint64_t trials;
    };
    for (Size size : {Size{1, 2, 10000}, Size{2, 2, 20000}, Size{1, 3, 10000}}) {
        Rng rng(201 + size.n * 10 + static_cast<std::uint64_t>(size.t));
        UniformityResult r = combination_uniformity_trial(size.n, size.t, size.trials, rng, 0.001);
        INFO("n=", size.n, " t=", size.t, " p=", r.p_value);
        CHECK(r.pass);
        std::uint64_t total = 0;
        for (std::uint64_t c : r.cells) {
            total += c;
        }
        CHECK(total == r.trials);
    }
}

TEST_CASE("uniformity survives with signs disabled") {
    Rng rng(202);
    UniformityResult r = combination_uniformity_trial(2, 2, 20000, rng, 0.001, false);
    CHECK(r.pass);
}

TEST_CASE("mod-p harness is uniform for p in {3, 5} and p=2 matches the mod-2 harness") {
    Rng rng3(203);
    UniformityResult p3 = combination_uniformity_trial_mod_p(3, 2, 1, 30000, rng3, 0.001);
    CHECK(p3.pass);
    CHECK(p3.cells.size() == 3);

    Rng rng5(204);
    UniformityResult p5 = combination_uniformity_trial_mod_p(5, 2, 1, 30000, rng5, 0.001);
    CHECK(p5.pass);
    CHECK(p5.cells.size() == 5);

    Rng rng_a(205);
    Rng rng_b(206);
    std::vector<std::uint64_t> a = combination_cells(2, 2, 20000, rng_a, true);
    std::vector<std::uint64_t> b = combination_cells_mod_p(2, 2, 2, 20000, rng_b);
    double stat = chi_square_homogeneity(a, b);
    CHECK(chi_square_p_value(stat, a.size() - 1) > 0.001);
}

TEST_CASE("uniformity harness preconditions") {
    Rng rng(207);
    CHECK_THROWS_AS(combination_uniformity_trial(7, 3, 1000000, rng, 0.01), std::invalid_argument); // 2^14 cells
    CHECK_THROWS_AS(combination_uniformity_trial(2, 2, 100, rng, 0.01), std::invalid_argument); // < 50 per cell
    CHECK_THROWS_AS(combination_uniformity_trial_mod_p(7, 2, 1, 30000, rng, 0.01), std::invalid_argument);
}

TEST_CASE("sign_balance_trial sits near one half") {
    Oracle oracle(HiddenShiftInstance::random(2, 2, 10, 208));
    double freq = sign_balance_trial(oracle, 10000);
    CHECK(std::fabs(freq - 0.5) <= 0.03);
    CHECK_THROWS_AS(sign_balance_trial(oracle, 0), std::invalid_argument);
}

TEST_CASE("success bounds hold empirically at (3, 2)") {
    SuccessBoundResult r = success_bound_trial(3, 2, 500, 209);
    double round_sigma = std::sqrt(0.75 * 0.25 / static_cast<double>(r.rounds));
    CHECK(r.per_round_rate >= 0.75 - 3 * round_sigma);
    double attempt_sigma = std::sqrt(0.25 / 500.0);
    CHECK(r.per_attempt_rate >= 0.5 - 3 * attempt_sigma);
}

TEST_CASE("per-attempt rate stays above one half even at t=1") {
    double attempt_sigma = std::sqrt(0.25 / 500.0);
    for (std::size_t n : {2u, 4u}) {
        SuccessBoundResult r = success_bound_trial(n, 1, 500, 210 + n);
        CHECK(r.per_attempt_rate >= 0.5 - 3 * attempt_sigma);
        CHECK(r.rounds == 500); // one round per attempt at t=1
    }
}

TEST_CASE("the validation suite passes and honors the only-filter") {
    SuiteConfig config;
    config.seed = 210;
    config.only = "combine-uniform-n1t2";
    SuiteReport report = run_validation_suite(config);
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].name == "combine-uniform-n1t2");
    CHECK(report.pass);

    config.only = "no-such-check";
    CHECK_THROWS_AS(run_validation_suite(config), std::invalid_argument);
}
