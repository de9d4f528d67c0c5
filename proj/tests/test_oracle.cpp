#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "hshift/inspect.hpp"
#include "hshift/validate.hpp"

using namespace hshift;
using testing::Inspector;

namespace {

Oracle make_oracle(std::size_t n, int t, std::uint64_t seed) {
    return Oracle(HiddenShiftInstance::random(n, t, static_cast<int>(n) * t + 6, seed));
}

Oracle make_oracle_with_secret(std::size_t n, int t, std::vector<std::uint32_t> s,
                               std::uint64_t seed) {
    return Oracle(HiddenShiftInstance::with_secret(n, t, static_cast<int>(n) * t + 6, seed,
                                                   GroupVector(std::move(s), t)));
}

} // namespace

TEST_CASE("sampled labels are uniform over Z_4 at n=1") {
    Oracle oracle = make_oracle(1, 2, 31);
    const int trials = 10000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < trials; ++i) {
        auto [u, tok] = oracle.sample_phase_state();
        ++counts[u[0]];
        oracle.discard(tok);
    }
    for (int c : counts) {
        CHECK(std::fabs(c / double(trials) - 0.25) <= 0.02);
    }
}

TEST_CASE("phase consistency: theta is <label, s> mod 2^t") {
    Oracle oracle = make_oracle(3, 3, 32);
    const GroupVector& s = Inspector::secret(oracle.instance());
    for (int i = 0; i < 200; ++i) {
        auto [u, tok] = oracle.sample_phase_state();
        CHECK(Inspector::token_theta(oracle, tok) == inner_product_mod(u, s));
        oracle.discard(tok);
    }
}

TEST_CASE("zero shift and zero label both force theta zero") {
    Oracle oracle = make_oracle_with_secret(2, 2, {0, 0}, 33);
    for (int i = 0; i < 50; ++i) {
        auto [u, tok] = oracle.sample_phase_state();
        CHECK(Inspector::token_theta(oracle, tok) == 0);
        oracle.discard(tok);
    }

    Oracle other = make_oracle(2, 2, 34);
    PhaseToken zero_label = Inspector::mint_phase_token(other, GroupVector(2, 2));
    CHECK(Inspector::token_theta(other, zero_label) == 0);
    other.discard(zero_label);
}

TEST_CASE("combine adds or subtracts labels and phases with the reported sign") {
    Oracle oracle = make_oracle_with_secret(2, 2, {1, 1}, 35);
    const GroupVector& s = Inspector::secret(oracle.instance());

    bool saw_plus = false;
    bool saw_minus = false;
    for (int i = 0; i < 200; ++i) {
        PhaseToken a = Inspector::mint_phase_token(oracle, GroupVector({1, 0}, 2));
        PhaseToken b = Inspector::mint_phase_token(oracle, GroupVector({1, 2}, 2));
        CHECK(Inspector::token_theta(oracle, a) == 1);
        CHECK(Inspector::token_theta(oracle, b) == 3);

        CombineResult r = oracle.combine(a, b);
        if (r.sign == 1) {
            saw_plus = true;
            CHECK(r.token.label == GroupVector({2, 2}, 2));
            CHECK(Inspector::token_theta(oracle, r.token) == 0);
        } else {
            saw_minus = true;
            CHECK(r.token.label == GroupVector({0, 2}, 2));
            CHECK(Inspector::token_theta(oracle, r.token) == 2);
        }
        // Either way the phase matches the label against the secret.
        CHECK(Inspector::token_theta(oracle, r.token) == inner_product_mod(r.token.label, s));
        oracle.discard(r.token);
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
}

TEST_CASE("combining with the zero-label state keeps label and phase") {
    Oracle oracle = make_oracle(2, 2, 36);
    for (int i = 0; i < 50; ++i) {
        auto [u, tok] = oracle.sample_phase_state();
        std::uint32_t theta = Inspector::token_theta(oracle, tok);
        PhaseToken zero = Inspector::mint_phase_token(oracle, GroupVector(2, 2));
        CombineResult r = oracle.combine(tok, zero);
        CHECK(r.token.label == u);
        CHECK(Inspector::token_theta(oracle, r.token) == theta);
        oracle.discard(r.token);
    }
}

TEST_CASE("combination signs are a fair coin") {
    Oracle oracle = make_oracle(2, 2, 37);
    double freq = sign_balance_trial(oracle, 10000);
    CHECK(std::fabs(freq - 0.5) <= 0.03);
}

TEST_CASE("measure_pm follows the Born rule") {
    Oracle oracle = make_oracle(1, 2, 38);
    GroupVector label(1, 2);

    for (int i = 0; i < 100; ++i) {
        PhaseToken plus = Inspector::mint_phase_token(oracle, label, 0);
        CHECK(oracle.measure_pm(plus) == 0);
        PhaseToken minus = Inspector::mint_phase_token(oracle, label, 2); // theta = N/2
        CHECK(oracle.measure_pm(minus) == 1);
    }

    // theta = 1 at t = 2: P(1) = sin^2(pi/4) = 1/2.
    const int trials = 10000;
    int ones = 0;
    for (int i = 0; i < trials; ++i) {
        PhaseToken tok = Inspector::mint_phase_token(oracle, label, 1);
        ones += oracle.measure_pm(tok);
    }
    CHECK(std::fabs(ones / double(trials) - 0.5) <= 0.03);
}

TEST_CASE("measure_pm at a non-trivial angle") {
    Oracle oracle = make_oracle(1, 3, 118);
    GroupVector label(1, 3);
    double expected = std::sin(std::acos(-1.0) / 8.0); // theta = 1 of 8
    expected *= expected;

    const int trials = 10000;
    int ones = 0;
    for (int i = 0; i < trials; ++i) {
        PhaseToken tok = Inspector::mint_phase_token(oracle, label, 1);
        ones += oracle.measure_pm(tok);
    }
    CHECK(std::fabs(ones / double(trials) - expected) <= 0.02);
}

TEST_CASE("device seeds split transcripts; instance seed alone fixes them") {
    auto inst = HiddenShiftInstance::random(2, 2, 10, 119);
    auto first_label = [&inst](std::uint64_t device_seed) {
        Oracle oracle(inst, device_seed);
        auto [u, tok] = oracle.sample_phase_state();
        oracle.discard(tok);
        return u;
    };
    CHECK(first_label(1001) == first_label(1001));

    bool differs = false;
    for (std::uint64_t seed = 1002; seed < 1012 && !differs; ++seed) {
        differs = !(first_label(seed) == first_label(1001));
    }
    CHECK(differs);
}

TEST_CASE("tokens are consumed exactly once") {
    Oracle oracle = make_oracle(2, 2, 39);

    auto [u1, tok1] = oracle.sample_phase_state();
    auto [u2, tok2] = oracle.sample_phase_state();
    CombineResult r = oracle.combine(tok1, tok2);
    CHECK_THROWS_AS(oracle.combine(tok1, r.token), TokenReuseError);
    CHECK_THROWS_AS(oracle.measure_pm(tok2), TokenReuseError);

    oracle.measure_pm(r.token);
    CHECK_THROWS_AS(oracle.measure_pm(r.token), TokenReuseError);
    CHECK_THROWS_AS(oracle.discard(r.token), TokenReuseError);

    auto [u3, tok3] = oracle.sample_phase_state();
    CHECK_THROWS_AS(oracle.combine(tok3, tok3), TokenReuseError);
    oracle.discard(tok3);

    CHECK_THROWS_AS(oracle.measure_pm(PhaseToken{}), TokenReuseError);
}

TEST_CASE("combine rejects modulus mismatches") {
    Oracle oracle = make_oracle(2, 2, 40);
    PhaseToken wide = Inspector::mint_phase_token(oracle, GroupVector({1, 0}, 2));
    PhaseToken narrow = Inspector::mint_phase_token(oracle, GroupVector({1, 0}, 1));
    CHECK_THROWS_AS(oracle.combine(wide, narrow), std::invalid_argument);
}

TEST_CASE("coset tokens are consume-once and hide independent uniform x") {
    Oracle oracle = make_oracle(1, 1, 41);

    CosetToken tok = oracle.sample_coset_state();
    GroupVector zero(1, 1);
    oracle.shift_and_transform(tok, zero);
    CHECK_THROWS_AS(oracle.shift_and_transform(tok, zero), TokenReuseError);

    // Chi-square the hidden (x1, x2) pairs of consecutive samples.
    const int trials = 10000;
    std::map<std::uint64_t, int> cells;
    for (int i = 0; i < trials; ++i) {
        CosetToken a = oracle.sample_coset_state();
        CosetToken b = oracle.sample_coset_state();
        std::uint64_t cell = Inspector::coset_hidden_x(oracle, a).flat_index() * 2 +
                             Inspector::coset_hidden_x(oracle, b).flat_index();
        ++cells[cell];
        oracle.shift_and_transform(a, zero);
        oracle.shift_and_transform(b, zero);
    }
    std::vector<std::uint64_t> histogram(4, 0);
    for (auto& [cell, count] : cells) {
        histogram[cell] = static_cast<std::uint64_t>(count);
    }
    double p = chi_square_p_value(chi_square_uniform(histogram), 3);
    CHECK(p > 0.001);

    // Same through the public surface: label pairs from the transform.
    std::vector<std::uint64_t> label_cells(4, 0);
    for (int i = 0; i < trials; ++i) {
        CosetToken a = oracle.sample_coset_state();
        CosetToken b = oracle.sample_coset_state();
        auto [ua, ta] = oracle.shift_and_transform(a, zero);
        auto [ub, tb] = oracle.shift_and_transform(b, zero);
        ++label_cells[ua.flat_index() * 2 + ub.flat_index()];
        oracle.discard(ta);
        oracle.discard(tb);
    }
    p = chi_square_p_value(chi_square_uniform(label_cells), 3);
    CHECK(p > 0.001);
}

TEST_CASE("shift_and_transform phases track s - s_known") {
    Oracle exact = make_oracle_with_secret(2, 2, {3, 2}, 42);
    const GroupVector s({3, 2}, 2);

    for (int i = 0; i < 100; ++i) {
        CosetToken ctok = exact.sample_coset_state();
        auto [u, tok] = exact.shift_and_transform(ctok, s);
        CHECK(Inspector::token_theta(exact, tok) == 0); // fully known shift
        exact.discard(tok);
    }

    // s_known = (1,0): s - s_known = (2,2), so theta is always even.
    GroupVector partial({1, 0}, 2);
    for (int i = 0; i < 200; ++i) {
        CosetToken ctok = exact.sample_coset_state();
        auto [u, tok] = exact.shift_and_transform(ctok, partial);
        std::uint32_t theta = Inspector::token_theta(exact, tok);
        CHECK(theta % 2 == 0);
        CHECK(theta == inner_product_mod(u, GroupVector({2, 2}, 2)));
        exact.discard(tok);
    }

    // s_known = 0 reduces to plain phase-state sampling.
    Oracle plain = make_oracle(1, 2, 43);
    const GroupVector& secret = Inspector::secret(plain.instance());
    for (int i = 0; i < 100; ++i) {
        CosetToken ctok = plain.sample_coset_state();
        auto [u, tok] = plain.shift_and_transform(ctok, GroupVector(1, 2));
        CHECK(Inspector::token_theta(plain, tok) == inner_product_mod(u, secret));
        plain.discard(tok);
    }
}

TEST_CASE("descended sampling uses the residual shift") {
    Oracle oracle = make_oracle_with_secret(2, 3, {5, 2}, 44);

    // Correct first-level knowledge: s mod 2 = (1, 0).
    Descent d{1, GroupVector({1, 0}, 3)};
    GroupVector s_eff = Inspector::effective_shift(oracle, d);
    CHECK(s_eff == GroupVector({2, 1}, 2)); // (5-1)/2, (2-0)/2 over Z_4

    for (int i = 0; i < 100; ++i) {
        auto [u, tok] = oracle.sample_phase_state(d);
        CHECK(u.modulus_log() == 2);
        CHECK_FALSE(Inspector::token_collapsed(oracle, tok));
        CHECK(Inspector::token_theta(oracle, tok) == inner_product_mod(u, s_eff));
        oracle.discard(tok);
    }

    // Wrong parity guess: the device only hands out collapsed basis states,
    // and measuring them is a fair coin.
    Descent wrong{1, GroupVector({0, 0}, 3)};
    CHECK_THROWS_AS(Inspector::effective_shift(oracle, wrong), std::invalid_argument);
    int ones = 0;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
        auto [u, tok] = oracle.sample_phase_state(wrong);
        CHECK(Inspector::token_collapsed(oracle, tok));
        ones += oracle.measure_pm(tok);
    }
    CHECK(std::fabs(ones / double(trials) - 0.5) <= 0.04);
}

TEST_CASE("report counters track queries, tokens and the live high-water mark") {
    Oracle oracle = make_oracle(2, 2, 45);
    SieveReport fresh = oracle.report();
    CHECK(fresh.oracle_queries == 0);
    CHECK(fresh.phase_tokens_created == 0);
    CHECK(fresh.peak_live_phase_tokens == 0);
    CHECK(fresh.coset_tokens_created == 0);

    std::vector<PhaseToken> held;
    for (int i = 0; i < 5; ++i) {
        held.push_back(oracle.sample_phase_state().second);
        SieveReport r = oracle.report();
        CHECK(r.oracle_queries == static_cast<std::uint64_t>(i + 1));
        CHECK(r.phase_tokens_created - r.phase_tokens_consumed == r.live_phase_tokens);
        CHECK(r.live_phase_tokens == static_cast<std::uint64_t>(i + 1));
    }
    CHECK(oracle.report().peak_live_phase_tokens == 5);

    CombineResult r = oracle.combine(held[0], held[1]);
    held[0] = r.token;
    SieveReport after = oracle.report();
    CHECK(after.live_phase_tokens == 4);
    CHECK(after.peak_live_phase_tokens == 5); // consume-before-create: no transient above 5

    oracle.measure_pm(held[0]);
    oracle.discard(held[2]);
    oracle.discard(held[3]);
    oracle.discard(held[4]);
    SieveReport done = oracle.report();
    CHECK(done.live_phase_tokens == 0);
    CHECK(done.phase_tokens_created == done.phase_tokens_consumed);
}

TEST_CASE("device transcripts replay under identical seeds") {
    auto inst = HiddenShiftInstance::random(2, 2, 10, 46);

    auto transcript = [&inst]() {
        Oracle oracle(inst);
        std::vector<std::uint64_t> log;
        for (int i = 0; i < 20; ++i) {
            auto [u, tok] = oracle.sample_phase_state();
            log.push_back(u.flat_index());
            auto [v, tok2] = oracle.sample_phase_state();
            log.push_back(v.flat_index());
            CombineResult r = oracle.combine(tok, tok2);
            log.push_back(static_cast<std::uint64_t>(r.sign + 1));
            log.push_back(static_cast<std::uint64_t>(oracle.measure_pm(r.token)));
        }
        return log;
    };

    CHECK(transcript() == transcript());
}
