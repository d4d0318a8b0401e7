#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "qreset/counting.hpp"
#include "qreset/noclick.hpp"
#include "qreset/renewal.hpp"
#include "test_oracles.hpp"

using namespace qreset;
namespace tt = qreset::testing;

namespace {

// Integral of the continuous part over its support, split at the moving front
// where the density jumps; tanh_sinh absorbs the (theta - theta_+)^q edge.
double integrate_continuous(const DistributionSnapshot& snap) {
    if (!snap.continuous) return 0.0;
    boost::math::quadrature::tanh_sinh<double> quad;
    auto f = [&](double th) { return snap.continuous(th); };
    auto piece = [&](double a, double b) {
        return (b - a > 1e-12) ? quad.integrate(f, a, b, 1e-9) : 0.0;
    };
    if (snap.support.full) {
        const double front = snap.support.lo;  // residual jump location
        return piece(-kPi, front) + piece(front, kPi);
    }
    if (snap.support.lo >= kPi) return 0.0;
    return piece(snap.support.lo, kPi);
}

// The same mass integral in the time-of-last-reset parametrization,
// d theta = Omega d tau; exact substitution, immune to the exponential
// compression of the angle coordinate onto theta_+ at large lambda t.
double continuous_mass_renewal(double t, const ModelParams& p) {
    const SurvivalCurve from_pi(Angle(kPi), p);
    return tt::integrate([&](double tau) { return mean_rate(t - tau, p) * from_pi.value(tau); },
                         0.0, t, 1e-12);
}

}  // namespace

TEST_CASE("tau0") {
    SUBCASE("zero at the reset point") {
        for (double l : {0.5, 1.0, 1.5}) {
            const auto p = make_params_lambda(1.0, l);
            CHECK(tau0(Angle(kPi), p) == 0.0);
        }
    }
    SUBCASE("critical value gamma tau0 / 2 = 2 at theta = 0") {
        const auto p = make_params_lambda(1.0, 1.0);
        CHECK(tau0(Angle(0.0), p) == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("inverts the flow from pi") {
        for (double l : {0.5, 1.0, 1.5}) {
            const auto p = make_params_lambda(1.0, l);
            for (int i = 0; i < 100; ++i) {
                double th = -kPi + kTwoPi * (i + 0.5) / 100.0;
                if (l >= 1.0) {
                    const double lim = (l == 1.0) ? -kPi / 2 : fixed_points(p)->stable;
                    if (th <= lim + 1e-6) continue;
                }
                const double t0 = tau0(Angle(th), p);
                CAPTURE(l);
                CAPTURE(th);
                CHECK(tt::ang_dist(flow(t0, 0.0, Angle(kPi), p).value(), th) < 1e-9);
            }
        }
    }
    SUBCASE("unreachable angles rejected") {
        CHECK_THROWS_AS(tau0(Angle(-kPi / 2 - 0.1), make_params_lambda(1.0, 1.0)),
                        std::invalid_argument);
        const auto p = make_params_lambda(1.0, 2.0);
        CHECK_THROWS_AS(tau0(Angle(fixed_points(p)->stable - 0.01), p), std::invalid_argument);
    }
}

TEST_CASE("steady state") {
    SUBCASE("normalized for every regime") {
        // direct angle quadrature where the edge exponent leaves the mass
        // representable in doubles (lambda < 2/sqrt(3) + margin) ...
        for (double l : {0.3, 0.7, 1.0, 1.2}) {
            const auto p = make_params_lambda(1.0, l);
            const auto snap = snapshot_steady(p);
            const double total = integrate_continuous(snap);
            CAPTURE(l);
            CHECK(std::abs(total - 1.0) < 1e-8);
        }
        // ... and through the exact time parametrization
        // integral P_inf d theta = (gamma/2) integral_0^inf P_0^tau[0||pi] d tau
        // for every lambda, including the divergent-edge cases where a finite
        // fraction of the stationary mass sits below ulp(theta_+).
        for (double l : {0.3, 0.7, 1.0, 1.2, 2.0, 5.0}) {
            const auto p = make_params_lambda(1.0, l);
            const SurvivalCurve from_pi(Angle(kPi), p);
            const double decay = (p.regime == Regime::Super)
                                     ? 2.0 * (l - *p.beta_prime) * p.gamma0
                                     : 0.5 * p.gamma;
            const double horizon = 40.0 / decay;
            const double total = 0.5 * p.gamma *
                                 tt::integrate([&](double tau) { return from_pi.value(tau); },
                                               0.0, horizon, 1e-12);
            CAPTURE(l);
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }
    SUBCASE("support is (theta_+, pi] above the bifurcation") {
        const auto p = make_params_lambda(1.0, 1.5);
        const double tp = fixed_points(p)->stable;
        CHECK(steady_state(Angle(tp - 0.05), p) == 0.0);
        CHECK(steady_state(Angle(tp + 0.05), p) > 0.0);
        const auto p1 = make_params_lambda(1.0, 1.0);
        CHECK(steady_state(Angle(-kPi / 2 - 0.05), p1) == 0.0);
        CHECK(steady_state(Angle(-kPi / 2 + 0.05), p1) > 0.0);
    }
    SUBCASE("edge exponent lambda/sqrt(lambda^2-1) - 2 by log-log fit") {
        for (double l : {1.1, 1.3}) {
            const auto p = make_params_lambda(1.0, l);
            const double tp = fixed_points(p)->stable;
            const double expect = l / std::sqrt(l * l - 1.0) - 2.0;
            std::vector<double> xs, ys;
            for (double eps = 1e-6; eps < 1.1e-3; eps *= 10.0) {
                xs.push_back(std::log(eps));
                ys.push_back(std::log(steady_state(Angle(tp + eps), p)));
            }
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const auto n = static_cast<double>(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            CAPTURE(l);
            CHECK(std::abs(slope - expect) < 0.05 * std::abs(expect));
        }
    }
    SUBCASE("divergent iff lambda exceeds 2/sqrt(3)") {
        CHECK(1.1 / std::sqrt(1.1 * 1.1 - 1.0) - 2.0 > 0.0);   // integrable, finite edge
        CHECK(1.3 / std::sqrt(1.3 * 1.3 - 1.0) - 2.0 < 0.0);   // divergent edge
    }
    SUBCASE("lambda = 0 rejected") {
        CHECK_THROWS_AS(steady_state(Angle(0.0), make_params(1.0, 0.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("renewal density") {
    SUBCASE("closed form equals the visit-sum evaluator on its domain") {
        for (double l : {0.5, 1.0, 1.5, 2.0, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {0.5, 1.0, 2.0}) {
                if (p.regime == Regime::Sub && t > kPi / (*p.beta * p.gamma0)) continue;
                for (int i = 0; i < 64; ++i) {
                    const double th = -kPi + kTwoPi * (i + 0.5) / 64.0;
                    CAPTURE(l);
                    CAPTURE(t);
                    CAPTURE(th);
                    CHECK(std::abs(density_closed(Angle(th), t, p) -
                                   renewal_convolve(Angle(th), t, p)) < 1e-8);
                }
            }
        }
    }
    SUBCASE("single-visit window enforced for lambda < 1") {
        const auto p = make_params_lambda(1.0, 0.5);
        const double window = kPi / (*p.beta * p.gamma0);
        CHECK_THROWS_AS(density_closed(Angle(0.0), window + 0.1, p), std::invalid_argument);
        CHECK_NOTHROW(renewal_convolve(Angle(0.0), window + 0.1, p));
    }
    SUBCASE("snapshot normalization: atom + continuous = 1") {
        for (double l : {0.3, 0.5, 1.0, 1.5, 3.0}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {0.5, 1.0, 2.0, 5.0, 20.0}) {
                CAPTURE(l);
                CAPTURE(t);
                // time parametrization: exact for every regime and time
                CHECK(std::abs(survival(t, Angle(0.0), p) + continuous_mass_renewal(t, p) -
                               1.0) < 1e-9);
                // angle quadrature resolves the same mass except where the
                // flow has compressed a finite fraction of it within
                // ~exp(-2 beta' gamma0 t) < 1e-15 of theta_+
                if (l > 1.0 && 2.0 * *p.beta_prime * p.gamma0 * t > 30.0) continue;
                const auto snap = snapshot_renewal(t, p);
                const double total = snap.atom_mass + integrate_continuous(snap);
                CHECK(std::abs(total - 1.0) < 1e-7);
            }
        }
    }
    SUBCASE("atom is the survival mass at the transported point") {
        const auto p = make_params_lambda(1.0, 0.5);
        const auto snap = snapshot_renewal(1.0, p, 64);
        CHECK(snap.atom_mass == survival(1.0, Angle(0.0), p));
        CHECK(snap.atom_position == flow(1.0, 0.0, Angle(0.0), p).value());
        CHECK(snap.grid_theta.size() == 64);
    }
    SUBCASE("mean rate recovered from the density") {
        for (double l : {0.5, 1.5}) {
            const auto p = make_params_lambda(1.0, l);
            for (double t : {1.0, 3.0}) {
                const auto snap = snapshot_renewal(t, p);
                boost::math::quadrature::tanh_sinh<double> quad;
                const double lo = snap.support.full ? -kPi : snap.support.lo;
                double alpha_bar =
                    snap.atom_mass * click_rate(Angle(snap.atom_position), p);
                if (lo < kPi) {
                    auto f = [&](double th) {
                        return snap.continuous(th) * click_rate(Angle(th), p);
                    };
                    if (snap.support.full) {
                        alpha_bar += quad.integrate(f, -kPi, lo, 1e-10) +
                                     quad.integrate(f, lo, kPi, 1e-10);
                    } else {
                        alpha_bar += quad.integrate(f, lo, kPi, 1e-10);
                    }
                }
                CAPTURE(l);
                CAPTURE(t);
                CHECK(std::abs(alpha_bar - mean_rate(t, p)) < 1e-6);
            }
        }
    }
    SUBCASE("long-time convergence to the steady state") {
        for (double l : {1.0, 1.5}) {
            const auto p = make_params_lambda(1.0, l);
            const double t = 20.0;
            for (int i = 0; i < 48; ++i) {
                const double th = -kPi + kTwoPi * (i + 0.5) / 48.0;
                const double expect =
                    (p.regime == Regime::Critical && th <= -kPi / 2) ||
                            (p.regime == Regime::Super && th <= fixed_points(p)->stable)
                        ? 0.0
                        : steady_state(Angle(th), p);
                CAPTURE(l);
                CAPTURE(th);
                CHECK(std::abs(renewal_convolve(Angle(th), t, p) - expect) < 1e-6);
            }
        }
    }
    SUBCASE("relaxation rate matches the spectral gap") {
        const auto p = make_params_lambda(1.0, 0.5);
        std::vector<double> ts{8.0, 10.0, 12.0, 14.0, 16.0}, ys;
        for (double t : ts) {
            double sup = 0.0;
            for (int i = 0; i < 256; ++i) {
                const double th = -kPi + kTwoPi * (i + 0.5) / 256.0;
                sup = std::max(sup, std::abs(renewal_convolve(Angle(th), t, p) -
                                             steady_state(Angle(th), p)));
            }
            ys.push_back(std::log(sup));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto n = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sx += ts[i]; sy += ys[i]; sxx += ts[i] * ts[i]; sxy += ts[i] * ys[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(std::abs(-slope - p.lambda * p.gamma0) < 0.05 * p.lambda * p.gamma0);
    }
    SUBCASE("master equation residual away from the singular points") {
        const auto p = make_params_lambda(1.0, 0.5);
        const double t = 2.0;
        const double atom = flow(t, 0.0, Angle(0.0), p).value();
        const double front = flow(t, 0.0, Angle(kPi), p).value();
        const double ht = 2e-3, hx = 2e-3;
        for (int i = 0; i < 80; ++i) {
            const double th = -kPi + kTwoPi * (i + 0.5) / 80.0;
            if (std::abs(wrap_angle(th - atom)) < 0.3) continue;
            if (std::abs(wrap_angle(th - front)) < 0.3) continue;
            if (kPi - std::abs(th) < 0.25) continue;
            auto P = [&](double x, double tm) { return renewal_convolve(Angle(x), tm, p); };
            const double dpdt = (P(th, t + ht) - P(th, t - ht)) / (2.0 * ht);
            auto omega_p = [&](double x) { return drift(Angle(x), p) * P(x, t); };
            const double dflux = (omega_p(th + hx) - omega_p(th - hx)) / (2.0 * hx);
            const double kill = click_rate(Angle(th), p) * P(th, t);
            CAPTURE(th);
            CHECK(std::abs(dpdt + dflux + kill) < 1e-4);
        }
    }
}

TEST_CASE("density matrix") {
    SUBCASE("pure atom at theta = 0") {
        DistributionSnapshot snap;
        snap.atom_position = 0.0;
        snap.atom_mass = 1.0;
        snap.support = SupportInterval{kPi, false};
        const auto rho = density_matrix(snap);
        CHECK(std::abs(rho.m00 - 1.0) < 1e-14);
        CHECK(std::abs(rho.m11) < 1e-14);
        CHECK(std::abs(rho.m01) < 1e-14);
    }
    SUBCASE("steady state is close to the maximally mixed state") {
        const auto p = make_params_lambda(1.0, 0.5);
        const auto rho = density_matrix(snapshot_steady(p));
        CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
        CHECK(std::abs(rho.m00 - 0.5) < 1e-3);
        CHECK(std::abs(rho.m11 - 0.5) < 1e-3);
        CHECK(std::abs(rho.m01) < 1e-3);
    }
    SUBCASE("hermitian, unit trace, positive semidefinite") {
        const auto p = make_params_lambda(1.0, 1.5);
        const auto rho = density_matrix(snapshot_renewal(1.0, p));
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        CHECK(std::abs(rho.m01 - std::conj(rho.m10)) < 1e-12);
        const double tr = rho.trace().real();
        const double det = (rho.m00 * rho.m11 - rho.m01 * rho.m10).real();
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        CHECK(tr / 2.0 - disc > -1e-10);  // smallest eigenvalue
    }
}
