#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "audit/game.hpp"

using namespace audit;

TEST_CASE("binary example game validates and is penalty-insensitive") {
    const AuditGame g = fig1_game();
    CHECK(validate_game(g).empty());
    // 2/1 >= 4/3
    CHECK(insensitivity_flag(g).holds);
    CHECK(g.gamma() == doctest::Approx(1.0));
}

TEST_CASE("penalty below payment is reported as a violation, not a fault") {
    AuditGame g = fig1_game();
    g.pen = {0.5, 4.0};
    const auto violations = validate_game(g);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations) found = found || v.find("pen(0) < pay(0)") != std::string::npos;
    CHECK(found);
}

TEST_CASE("three-type heatmap game validates") {
    const AuditGame g = heatmap_game();
    CHECK(validate_game(g).empty());
    CHECK(insensitivity_flag(g).holds);
}

TEST_CASE("zero-mass priors are rejected") {
    AuditGame g = heatmap_game({0.5, 0.5, 0.0});
    CHECK(!validate_game(g).empty());
}

TEST_CASE("lambda above a penalty is a violation") {
    AuditGame g = fig1_game();
    g.regime = Regime::costly(3.5);  // pen(0) = 3
    CHECK(!validate_game(g).empty());
}

TEST_CASE("discretize reproduces the two-bin instance") {
    ContinuousModelSpec spec;  // pay = 1 + 2x, pen offset 2, val 2 + 2x - |x-y|, lambda 2.5
    spec.m = 2;
    const AuditGame g = discretize(spec);
    CHECK(g.m == 2);
    CHECK(g.n == 1.0);
    CHECK(g.q[0] == doctest::Approx(0.5));
    CHECK(g.pay[0] == doctest::Approx(1.5));
    CHECK(g.pay[1] == doctest::Approx(2.5));
    CHECK(g.pen[0] == doctest::Approx(3.5));
    CHECK(g.pen[1] == doctest::Approx(4.5));
    CHECK(g.val_at(0, 0) == doctest::Approx(2.5 - 1.0 / 6));
    CHECK(g.regime.lambda == doctest::Approx(2.5));
}

TEST_CASE("discretize rejects m = 1") {
    ContinuousModelSpec spec;
    spec.m = 1;
    CHECK_THROWS_AS(discretize(spec), std::invalid_argument);
}

TEST_CASE("discretize at m = 4 lands the payments on the affine grid") {
    ContinuousModelSpec spec;
    spec.m = 4;
    const AuditGame g = discretize(spec);
    CHECK(g.q == std::vector<double>{0.25, 0.25, 0.25, 0.25});
    CHECK(g.pay[0] == doctest::Approx(1.25));
    CHECK(g.pay[1] == doctest::Approx(1.75));
    CHECK(g.pay[2] == doctest::Approx(2.25));
    CHECK(g.pay[3] == doctest::Approx(2.75));
}

TEST_CASE("discretized games validate at every resolution and gamma tracks the gap") {
    ContinuousModelSpec spec;
    for (int m = 2; m <= 200; ++m) {
        spec.m = m;
        const AuditGame g = discretize(spec);
        REQUIRE(validate_game(g).empty());
        // first gap is pay(0) = c0 + c1/(2m), the rest are c1/m
        const double expected = std::min(spec.c0 + spec.c1 / (2.0 * m), spec.c1 / m);
        REQUIRE(g.gamma() == doctest::Approx(expected).epsilon(1e-12));
        REQUIRE(g.gamma() > 0.0);
    }
}

TEST_CASE("discretize rejects specs that break the value monotonicity") {
    ContinuousModelSpec spec;
    spec.a2 = -1.0;  // negative distance penalty would reward misreporting
    CHECK_THROWS_AS(discretize(spec), std::invalid_argument);
}

TEST_CASE("discretize rejects an audit cost above the lowest penalty") {
    ContinuousModelSpec spec;
    spec.m = 4;
    spec.lambda = 10.0;  // pen(0) = 1 + 1/4 + 2
    CHECK_THROWS_AS(discretize(spec), std::invalid_argument);
}

TEST_CASE("random games are valid in both regimes") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (int m : {2, 3, 5}) {
            CHECK(validate_game(random_game(m, seed)).empty());
            RandomGameOptions opt;
            opt.insensitive = true;
            const AuditGame g = random_game(m, seed, opt);
            CHECK(validate_game(g).empty());
            CHECK(insensitivity_flag(g).holds);
            RandomGameOptions bopt;
            bopt.regime = RegimeKind::Budgeted;
            CHECK(validate_game(random_game(m, seed, bopt)).empty());
        }
    }
}
