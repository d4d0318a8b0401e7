#include <doctest.h>

#include <complex>
#include <algorithm>
#include <vector>

#include "qreset/counting.hpp"
#include "qreset/noclick.hpp"
#include "test_oracles.hpp"

using namespace qreset;
namespace tt = qreset::testing;
using C = std::complex<double>;

TEST_CASE("g_hat") {
    const auto p = make_params_lambda(1.0, 0.5);
    const double b = *p.beta, ph = *p.phi;

    SUBCASE("matches direct Laplace quadrature") {
        for (double shift : {0.0, ph}) {
            for (double sigma : {1.0, 0.5}) {
                const double mu = sigma + 0.5 * p.gamma;
                const double horizon = 60.0 / mu;
                const double direct = tt::integrate(
                    [&](double t) {
                        const double s = std::sin(b * p.gamma0 * t - shift);
                        return std::exp(-mu * t) * s * s;
                    },
                    0.0, horizon);
                CHECK(std::abs(g_hat(C(sigma, 0.0), shift, p).real() - direct) < 1e-10);
                CHECK(std::abs(g_hat(C(sigma, 0.0), shift, p).imag()) < 1e-14);
            }
        }
    }
    SUBCASE("large-sigma asymptote 2 beta^2 gamma0^2 / mu^3") {
        const double sigma = 1e4;
        const double mu = sigma + 0.5 * p.gamma;
        const double lead = 2.0 * b * b * p.gamma0 * p.gamma0 / (mu * mu * mu);
        CHECK(g_hat(C(sigma, 0.0), 0.0, p).real() == doctest::Approx(lead).epsilon(1e-3));
    }
    SUBCASE("pi periodicity of the shift") {
        const C a = g_hat(C(1.0, 0.3), 0.4, p);
        const C c = g_hat(C(1.0, 0.3), 0.4 + kPi, p);
        CHECK(std::abs(a - c) < 1e-14);
    }
    SUBCASE("abscissa of convergence enforced") {
        CHECK_THROWS_AS(g_hat(C(-0.5 * p.gamma, 0.0), 0.0, p), std::invalid_argument);
    }
}

TEST_CASE("epd closed rows equal the product construction") {
    const std::vector<std::vector<double>> click_sets{
        {0.9}, {0.4, 1.1}, {0.3, 0.8, 1.7}, {0.2, 0.9, 1.2, 1.9}};
    for (double l : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        const auto p = make_params_lambda(1.0, l);
        const double t = 2.0;
        CHECK(epd_joint(t, {}, p) == doctest::Approx(survival(t, Angle(0.0), p)).epsilon(1e-14));
        for (const auto& clicks : click_sets) {
            CAPTURE(l);
            CAPTURE(clicks.size());
            const double closed = epd_joint(t, clicks, p);
            const double product = epd_joint_product(t, clicks, p);
            CHECK(closed == doctest::Approx(product).epsilon(1e-10));
        }
    }
    SUBCASE("one-click density built from survival * rate * survival") {
        const auto p = make_params_lambda(1.0, 0.5);
        const double t = 2.0, t1 = 1.0;
        const double direct = survival(t1, Angle(0.0), p) *
                              click_rate(flow(t1, 0.0, Angle(0.0), p), p) *
                              survival(t - t1, Angle(kPi), p);
        CHECK(epd_joint(t, std::vector<double>{t1}, p) ==
              doctest::Approx(direct).epsilon(1e-10));
    }
    SUBCASE("invalid click times rejected") {
        const auto p = make_params_lambda(1.0, 0.5);
        CHECK_THROWS_AS(epd_joint(1.0, std::vector<double>{0.8, 0.4}, p), std::invalid_argument);
        CHECK_THROWS_AS(epd_joint(1.0, std::vector<double>{1.2}, p), std::invalid_argument);
        CHECK_THROWS_AS(epd_joint(1.0, std::vector<double>{0.0, 0.5}, p), std::invalid_argument);
    }
}

TEST_CASE("count_prob") {
    SUBCASE("n = 0 is the survival probability") {
        const auto p = make_params_lambda(1.0, 0.7);
        CHECK(count_prob(0, 1.7, p) == doctest::Approx(survival(1.7, Angle(0.0), p)));
    }
    SUBCASE("cap enforced") {
        const auto p = make_params_lambda(1.0, 0.7);
        CHECK_THROWS_AS(count_prob(5, 1.0, p), std::invalid_argument);
        CHECK_NOTHROW(count_prob(5, 1.0, p, 5));
    }
    SUBCASE("simplex quadrature matches the generating-function route") {
        for (double l : {0.5, 1.0, 1.5}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {1.0, 2.0}) {
                const auto dist = count_distribution(t, p, 3);
                for (int n = 0; n <= 3; ++n) {
                    CAPTURE(l);
                    CAPTURE(t);
                    CAPTURE(n);
                    CHECK(std::abs(count_prob(n, t, p) - dist[static_cast<std::size_t>(n)]) <
                          1e-7);
                }
            }
        }
    }
    SUBCASE("normalization") {
        const auto p = make_params_lambda(1.0, 0.5);
        const auto dist = count_distribution(2.0, p, 20);
        double sum12 = 0.0, sum20 = 0.0;
        for (int n = 0; n <= 20; ++n) {
            if (n <= 12) sum12 += dist[static_cast<std::size_t>(n)];
            sum20 += dist[static_cast<std::size_t>(n)];
        }
        // the n <= 12 partial sum misses exactly the (real) 13-click tail,
        // which is ~9.6e-6 at this parameter point
        CHECK(std::abs(sum12 - 1.0) < 2e-5);
        CHECK(std::abs(sum20 - 1.0) < 1e-9);
    }
}

TEST_CASE("mgf in the Laplace domain") {
    SUBCASE("normalization at s = 0: exactly 1/sigma") {
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double sigma : {0.5, 1.0, 2.0}) {
                const C v = mgf_laplace(C(sigma, 0.0), 0.0, p);
                CHECK(std::abs(v * sigma - 1.0) < 1e-12);
            }
        }
    }
    SUBCASE("large s tends to the Laplace transform of the survival") {
        const auto p = make_params_lambda(1.0, 0.5);
        const double sigma = 0.8;
        const double ls = tt::integrate(
            [&](double t) { return std::exp(-sigma * t) * survival(t, Angle(0.0), p); }, 0.0,
            200.0);
        CHECK(std::abs(mgf_laplace(C(sigma, 0.0), 30.0, p).real() - ls) < 1e-8);
    }
    SUBCASE("geometric resummation agrees with the rational form") {
        const auto p = make_params_lambda(1.0, 0.5);
        const C direct = mgf_laplace(C(1.0, 0.0), 0.3, p);
        const C resummed = detail::mgf_laplace_resummed(C(1.0, 0.0), 0.3, p);
        CHECK(std::abs(direct - resummed) < 1e-12);
        // analytic continuation covers lambda > 1 as well
        const auto p2 = make_params_lambda(1.0, 1.5);
        const C d2 = mgf_laplace(C(1.0, 0.0), 0.3, p2);
        const C r2 = detail::mgf_laplace_resummed(C(1.0, 0.0), 0.3, p2);
        CHECK(std::abs(d2 - r2) < 1e-10);
    }
    SUBCASE("preconditions") {
        const auto p = make_params_lambda(1.0, 0.5);
        CHECK_THROWS_AS(mgf_laplace(C(-1.0, 0.0), 0.0, p), std::invalid_argument);
    }
}

TEST_CASE("cubic roots") {
    SUBCASE("s = 0 factorization") {
        for (double l : {0.5, 1.5, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            const auto r = mgf_denominator_roots(0.0, p);
            // one root at 0; the others at gamma0 (-lambda +- sqrt(lambda^2 - 4))
            double best0 = 1e9;
            for (const auto& s : r.sigma) best0 = std::min(best0, std::abs(s));
            CHECK(best0 < 1e-10);
            const C disc = std::sqrt(C(l * l - 4.0, 0.0));
            for (const C expect : {C(-l, 0.0) + disc, C(-l, 0.0) - disc}) {
                double best = 1e9;
                for (const auto& s : r.sigma) best = std::min(best, std::abs(s - expect));
                CHECK(best < 1e-9);
            }
        }
    }
    SUBCASE("all real for lambda = 3") {
        const auto p = make_params_lambda(1.0, 3.0);
        const auto r = mgf_denominator_roots(0.0, p);
        CHECK(!r.confluent);
        for (const auto& s : r.sigma) CHECK(std::abs(s.imag()) < 1e-10);
        double best2 = 1e9, best3 = 1e9;
        for (const auto& s : r.sigma) {
            best2 = std::min(best2, std::abs(s - C(-3.0 + std::sqrt(5.0), 0.0)));
            best3 = std::min(best3, std::abs(s - C(-3.0 - std::sqrt(5.0), 0.0)));
        }
        CHECK(best2 < 1e-9);
        CHECK(best3 < 1e-9);
    }
    SUBCASE("confluence detected at lambda = 2, s = 0") {
        const auto p = make_params_lambda(1.0, 2.0);
        CHECK(mgf_denominator_roots(0.0, p).confluent);
    }
    SUBCASE("roots move continuously in s") {
        const auto p = make_params_lambda(1.0, 0.8);
        auto prev = mgf_denominator_roots(0.0, p);
        std::vector<double> moves;
        for (int i = 1; i <= 120; ++i) {
            const auto cur = mgf_denominator_roots(0.025 * i, p);
            // nearest-neighbour pairing against the previous set
            double worst = 0.0;
            for (const auto& a : cur.sigma) {
                double best = 1e9;
                for (const auto& b : prev.sigma) best = std::min(best, std::abs(a - b));
                worst = std::max(worst, best);
            }
            moves.push_back(worst);
            prev = cur;
        }
        std::vector<double> sorted = moves;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        for (double m : moves) CHECK(m < 10.0 * median);  // no branch jumps
    }
}

TEST_CASE("mgf in the time domain") {
    SUBCASE("normalization E[1] = 1") {
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {0.3, 1.0, 4.0, 12.0}) {
                CAPTURE(l);
                CAPTURE(t);
                CHECK(std::abs(mgf(0.0, t, p) - 1.0) < 1e-10);
            }
        }
    }
    SUBCASE("s -> infinity leaves only the zero-click term") {
        const auto p = make_params_lambda(1.0, 0.5);
        CHECK(std::abs(mgf(30.0, 1.0, p) - survival(1.0, Angle(0.0), p)) < 1e-8);
    }
    SUBCASE("monotone in s") {
        const auto p = make_params_lambda(1.0, 1.5);
        double prev = 1.0;
        for (double s : {0.1, 0.4, 1.0, 2.0, 5.0}) {
            const double v = mgf(s, 2.0, p);
            CHECK(v <= prev + 1e-14);
            prev = v;
        }
    }
    SUBCASE("confluent lambda = 2 evaluates cleanly") {
        const auto p = make_params_lambda(1.0, 2.0);
        for (double t : {0.5, 1.0, 3.0}) CHECK(std::abs(mgf(0.0, t, p) - 1.0) < 1e-10);
        CHECK(mgf(0.7, 1.0, p) > 0.0);
        CHECK(mgf(0.7, 1.0, p) < 1.0);
    }
}

TEST_CASE("mean count") {
    SUBCASE("zero at t = 0 and for lambda = 0") {
        for (double l : {0.0, 0.5, 1.0, 2.0, 3.0})
            CHECK(mean_count(0.0, make_params_lambda(1.0, l)) == 0.0);
        CHECK(mean_count(5.0, make_params(1.0, 0.0)) == 0.0);
    }
    SUBCASE("confluent value 8 e^-2 at lambda = 2, t = 1") {
        const auto p = make_params_lambda(1.0, 2.0);
        CHECK(mean_count(1.0, p) == doctest::Approx(8.0 * std::exp(-2.0)).epsilon(1e-12));
    }
    SUBCASE("long-time slope is gamma / 2") {
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            const double slope = (mean_count(41.0, p) - mean_count(40.0, p)) / 1.0;
            CHECK(slope == doctest::Approx(0.5 * p.gamma).epsilon(1e-8));
        }
    }
    SUBCASE("matches the finite-difference of the mgf") {
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {0.5, 1.0, 3.0}) {
                CAPTURE(l);
                CAPTURE(t);
                CHECK(std::abs(mean_count(t, p) - mean_count_fd(t, p)) < 1e-6);
            }
        }
    }
    SUBCASE("non-decreasing in t") {
        const auto p = make_params_lambda(1.0, 0.9);
        double prev = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double v = mean_count(0.2 * i, p);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("mean rate") {
    SUBCASE("exactly zero at t = 0") {
        for (double l : {0.5, 1.0, 2.0, 3.0})
            CHECK(mean_rate(0.0, make_params_lambda(1.0, l)) == 0.0);
    }
    SUBCASE("tends to gamma / 2") {
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            CHECK(std::abs(mean_rate(30.0, p) - 0.5 * p.gamma) < 1e-6);
        }
    }
    SUBCASE("is the derivative of the mean count") {
        const double h = 1e-5;
        for (double l : {0.5, 1.0, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {0.3, 1.0, 2.5}) {
                const double fd = (mean_count(t + h, p) - mean_count(t - h, p)) / (2.0 * h);
                CAPTURE(l);
                CAPTURE(t);
                CHECK(std::abs(mean_rate(t, p) - fd) < 1e-7);
            }
        }
    }
    SUBCASE("oscillation amplitude 1/sin(varphi) is smallest at lambda = sqrt 2") {
        double best_l = 0.0, best_amp = 1e18;
        for (double l = 0.3; l < 1.95; l += 0.005) {
            const auto p = make_params_lambda(1.0, l);
            const double amp = 1.0 / std::abs(std::sin(*p.varphi));
            if (amp < best_amp) {
                best_amp = amp;
                best_l = l;
            }
        }
        CHECK(best_l == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
    }
}

TEST_CASE("mgf matches Laplace inversion sanity") {
    // residue expansion vs direct numerical Laplace quadrature of mgf(s, .)
    const auto p = make_params_lambda(1.0, 0.5);
    const double s = 0.4, sigma = 0.9;
    const double lhs = tt::integrate(
        [&](double t) { return std::exp(-sigma * t) * mgf(s, t, p); }, 0.0, 200.0);
    CHECK(std::abs(lhs - mgf_laplace(C(sigma, 0.0), s, p).real()) < 1e-8);
}

TEST_CASE("mgf_laplace flags pole-proximate evaluation") {
    const auto p = make_params_lambda(1.0, 0.5);
    // sigma -> 0+ approaches the s = 0 zero of the denominator
    CHECK_THROWS_AS(mgf_laplace(C(1e-14, 0.0), 0.0, p), std::domain_error);
}
