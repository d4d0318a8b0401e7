#include <doctest.h>

#include "qreset/model.hpp"

using namespace qreset;

TEST_CASE("angle wrapping") {
    CHECK(wrap_angle(-kPi) == kPi);
    CHECK(wrap_angle(kPi) == kPi);
    CHECK(wrap_angle(3.0 * kPi) == kPi);
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi + 0.25) == doctest::Approx(-kPi + 0.25).epsilon(1e-14));
    for (double x : {-9.7, -3.2, -kPi, 0.1, 2.9, kPi, 7.5, 123.456}) {
        const double w = wrap_angle(x);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        CHECK(wrap_angle(w) == w);  // idempotent
    }
}

TEST_CASE("make_params derives regime constants") {
    SUBCASE("lambda = 0.5") {
        const auto p = make_params(1.0, 2.0);
        CHECK(p.lambda == 0.5);
        CHECK(p.regime == Regime::Sub);
        CHECK(*p.beta == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
        CHECK(*p.beta * *p.beta + p.lambda * p.lambda == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(!p.beta_prime);
        CHECK(!p.phi_prime);
        CHECK(*p.phi > 0);
        CHECK(*p.phi <= kPi / 2);
        CHECK(std::tan(*p.phi) == doctest::Approx(*p.beta / p.lambda).epsilon(1e-14));
    }
    SUBCASE("lambda = 1 boundary") {
        const auto p = make_params(1.0, 4.0);
        CHECK(p.lambda == 1.0);
        CHECK(p.regime == Regime::Critical);
        CHECK(!p.beta);
        CHECK(!p.beta_prime);
    }
    SUBCASE("lambda = 2 boundary") {
        const auto p = make_params(1.0, 8.0);
        CHECK(p.lambda == 2.0);
        CHECK(p.counting_regime == CountingRegime::Confluent);
        CHECK(!p.omega);
        CHECK(!p.omega_prime);
        CHECK(p.regime == Regime::Super);
        CHECK(*p.beta_prime * *p.beta_prime == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(p.lambda * p.lambda - *p.beta_prime * *p.beta_prime ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("near-critical guard snaps to the lambda = 1 branch") {
        const auto p = make_params(1.0, 4.0 * (1.0 + 1e-12));
        CHECK(p.regime == Regime::Critical);
    }
    SUBCASE("bad input rejected") {
        CHECK_THROWS_AS(make_params(0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_params(1.0, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_params(1.0, std::nan("")), std::invalid_argument);
        CHECK_THROWS_AS(make_params_lambda(1.0, -0.5), std::invalid_argument);
    }
}

TEST_CASE("drift and click rate") {
    const auto p05 = make_params_lambda(1.0, 0.5);
    const auto p1 = make_params_lambda(1.0, 1.0);
    CHECK(drift(Angle(0.0), p05) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(drift(Angle(-kPi / 2), p1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(drift(Angle(kPi / 2), p05) == doctest::Approx(-3.0).epsilon(1e-15));

    const auto pg2 = make_params(1.0, 2.0);
    CHECK(click_rate(Angle(0.0), pg2) == 0.0);
    CHECK(click_rate(Angle(kPi), pg2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(click_rate(Angle(kPi / 2), pg2) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("drift strictly negative below lambda = 1, bounded away from 0") {
        for (double th = -kPi + 1e-3; th <= kPi; th += 0.05)
            CHECK(drift(Angle(th), p05) <= -2.0 * p05.gamma0 * (1.0 - p05.lambda) + 1e-12);
    }
    SUBCASE("click rate range and maximum") {
        for (double th = -kPi + 1e-3; th <= kPi; th += 0.05) {
            CHECK(click_rate(Angle(th), pg2) >= 0.0);
            CHECK(click_rate(Angle(th), pg2) <= pg2.gamma + 1e-15);
        }
    }
}

TEST_CASE("fixed points") {
    CHECK(!fixed_points(make_params_lambda(1.0, 0.5)));

    const auto fp1 = fixed_points(make_params_lambda(1.0, 1.0));
    REQUIRE(fp1.has_value());
    CHECK(fp1->degenerate);
    CHECK(fp1->stable == doctest::Approx(-kPi / 2).epsilon(1e-15));

    const auto p2 = make_params_lambda(1.0, 2.0);
    const auto fp2 = fixed_points(p2);
    REQUIRE(fp2.has_value());
    CHECK(!fp2->degenerate);
    CHECK(fp2->stable == doctest::Approx(-kPi / 6).epsilon(1e-12));
    CHECK(fp2->unstable == doctest::Approx(-5.0 * kPi / 6).epsilon(1e-12));
    CHECK(drift(Angle(fp2->stable), p2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(drift(Angle(fp2->unstable), p2) == doctest::Approx(0.0).epsilon(1e-14));
    // stability via the drift slope
    CHECK(drift_derivative(Angle(fp2->stable), p2) < 0);
    CHECK(drift_derivative(Angle(fp2->unstable), p2) > 0);
    // sign change of the drift on each side of each fixed point
    CHECK(drift(Angle(fp2->stable + 1e-4), p2) < 0);
    CHECK(drift(Angle(fp2->stable - 1e-4), p2) > 0);
}
