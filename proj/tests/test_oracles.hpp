#pragma once

// Independent numerical oracles used by the tests: adaptive Runge-Kutta
// integration of the flow with the accumulated click rate, and plain
// quadrature helpers. These never call the closed forms they check.

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "qreset/model.hpp"

namespace qreset::testing {

/// exp(-int_0^t alpha(theta_s) ds) along the numerically integrated flow.
inline double survival_numeric(double t, double theta0, const ModelParams& p,
                               double tol = 1e-12) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;  // (theta, accumulated alpha)
    State s{theta0, 0.0};
    auto rhs = [&p](const State& x, State& dx, double) {
        dx[0] = -2.0 * p.gamma0 * (1.0 + p.lambda * std::sin(x[0]));
        const double half = std::sin(0.5 * x[0]);
        dx[1] = p.gamma * half * half;
    };
    if (t > 0) {
        ode::integrate_adaptive(
            ode::make_controlled<ode::runge_kutta_cash_karp54<State>>(tol, tol), rhs, s, 0.0, t,
            1e-3 * t);
    }
    return std::exp(-s[1]);
}

/// Numerically integrated flow angle (unwrapped internally).
inline double flow_numeric(double t, double theta0, const ModelParams& p, double tol = 1e-12) {
    namespace ode = boost::numeric::odeint;
    double s = theta0;
    auto rhs = [&p](const double& x, double& dx, double) {
        dx = -2.0 * p.gamma0 * (1.0 + p.lambda * std::sin(x));
    };
    if (t > 0) {
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_cash_karp54<double>>(tol, tol),
                                rhs, s, 0.0, t, 1e-3 * t);
    }
    return wrap_angle(s);
}

/// Distance on the circle.
inline double ang_dist(double a, double b) { return std::abs(wrap_angle(a - b)); }

template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

}  // namespace qreset::testing
