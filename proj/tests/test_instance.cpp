#include <doctest.h>

#include <set>

#include "hshift/inspect.hpp"

using namespace hshift;
using testing::Inspector;

TEST_CASE("random instances are deterministic in the seed") {
    auto a = HiddenShiftInstance::random(2, 2, 8, 42);
    auto b = HiddenShiftInstance::random(2, 2, 8, 42);
    CHECK(a == b);
    CHECK(Inspector::secret(a) == Inspector::secret(b));

    auto c = HiddenShiftInstance::random(2, 2, 8, 43);
    CHECK(a.seed() != c.seed());
}

TEST_CASE("instance shape preconditions") {
    CHECK_THROWS_AS(HiddenShiftInstance::random(3, 2, 5, 1), std::invalid_argument); // 5 < 6
    CHECK_THROWS_AS(HiddenShiftInstance::random(0, 2, 8, 1), std::invalid_argument);
    CHECK_THROWS_AS(HiddenShiftInstance::random(2, 0, 8, 1), std::invalid_argument);
    CHECK_THROWS_AS(HiddenShiftInstance::random(2, 2, 64, 1), std::invalid_argument);
    CHECK_NOTHROW(HiddenShiftInstance::random(2, 1, 2, 7)); // l == n*t is allowed
}

TEST_CASE("f_eval is injective per branch and satisfies the shift identity") {
    auto inst = HiddenShiftInstance::random(2, 2, 9, 5);
    Oracle oracle(inst);
    const GroupVector& s = Inspector::secret(inst);

    std::set<std::uint64_t> seen;
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        GroupVector x = GroupVector::from_flat_index(idx, 2, 2);
        std::uint64_t code = oracle.f_eval(x, 0);
        CHECK(code < (1ULL << 9));
        CHECK(seen.insert(code).second); // injective
        CHECK(code == oracle.f_eval(vec_add(x, s, 1), 1));
    }
}

TEST_CASE("encoding stays injective at tight and odd widths") {
    // l == n*t (no padding), odd l (unbalanced halves) and l == 1.
    struct Shape {
        std::size_t n;
        int t;
        int l;
    };
    for (Shape s : {Shape{2, 2, 4}, {2, 2, 7}, {1, 1, 1}, {3, 1, 5}}) {
        auto inst = HiddenShiftInstance::random(s.n, s.t, s.l, 1234 + s.l);
        Oracle oracle(inst);
        std::set<std::uint64_t> seen;
        std::uint64_t domain = 1ULL << (s.n * static_cast<std::uint64_t>(s.t));
        for (std::uint64_t idx = 0; idx < domain; ++idx) {
            std::uint64_t code = oracle.f_eval(GroupVector::from_flat_index(idx, s.n, s.t), 0);
            CHECK(code < (1ULL << s.l));
            CHECK(seen.insert(code).second);
        }
    }
}

TEST_CASE("zero shift makes the two branches identical") {
    auto inst = HiddenShiftInstance::with_secret(2, 2, 8, 3, GroupVector(2, 2));
    Oracle oracle(inst);
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        GroupVector x = GroupVector::from_flat_index(idx, 2, 2);
        CHECK(oracle.f_eval(x, 0) == oracle.f_eval(x, 1));
    }
}

TEST_CASE("instance files round trip byte exactly") {
    auto inst = HiddenShiftInstance::random(3, 2, 10, 99);

    for (bool with_secret : {false, true}) {
        std::string text = inst.to_file_text(with_secret);
        auto loaded = HiddenShiftInstance::from_file_text(text);
        CHECK(loaded == inst);
        CHECK(Inspector::secret(loaded) == Inspector::secret(inst));
        CHECK(loaded.to_file_text(with_secret) == text);
    }
}

TEST_CASE("an explicit stored secret overrides the derived one") {
    auto base = HiddenShiftInstance::random(2, 2, 8, 17);
    GroupVector other = vec_add(Inspector::secret(base), GroupVector({1, 0}, 2), 1);
    auto custom = HiddenShiftInstance::with_secret(2, 2, 8, 17, other);

    std::string text = custom.to_file_text(true);
    auto loaded = HiddenShiftInstance::from_file_text(text);
    CHECK(Inspector::secret(loaded) == other);
    CHECK(loaded.to_file_text(true) == text);
}

TEST_CASE("instance file parsing rejects malformed input") {
    CHECK_THROWS_AS(HiddenShiftInstance::from_file_text("not json"), std::invalid_argument);
    CHECK_THROWS_AS(HiddenShiftInstance::from_file_text("{\"schema\":\"other\"}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(HiddenShiftInstance::from_file_text(
                        "{\"schema\":\"hshift-instance\",\"schema_version\":2}"),
                    std::invalid_argument);
}
