#pragma once

#include <complex>

#include "qreset/model.hpp"

namespace qreset {

enum class FlowMethod { ClosedForm, Numeric };

/// Solves theta_t(s, theta_start) of d theta = Omega(theta) dt.
///
/// ClosedForm integrates the orbit exactly in a regime-adapted coordinate
/// (phase angle for lambda < 1, tan(pi/4 - theta/2) at lambda = 1, the
/// exponential cross-ratio of tan(theta/2) for lambda > 1); arbitrary start
/// angles are time-shifted onto the same orbit. Numeric is the adaptive
/// Runge-Kutta reference at tolerance 1e-10.
Angle flow(double t, double s, Angle theta_start, const ModelParams& p,
           FlowMethod method = FlowMethod::ClosedForm);

/// Two-component state a|psi0> + b|psi1>.
struct WaveFunction {
    std::complex<double> a;
    std::complex<double> b;
    double norm2() const { return std::norm(a) + std::norm(b); }
    WaveFunction normalized() const;
};

/// Unnormalized no-click state exp(-i gamma0 t H_eff) psi0, where
/// H_eff = [[0, 1], [1, -2 i lambda]]. <psi~|psi~> is the survival
/// probability when psi0 = |psi0>.
WaveFunction propagator(double t, const WaveFunction& psi0, const ModelParams& p);

/// Precomputed no-click leg from a fixed start angle: survival probability
/// and its inverse. value() is exp(-int_0^t alpha(theta_s) ds) evaluated in
/// closed form, value(t) in (0, 1], non-increasing.
class SurvivalCurve {
public:
    SurvivalCurve(Angle theta0, const ModelParams& p);

    double value(double t) const;

    /// Smallest tau with value(tau) = u, by bracketing + bisection to 1e-12
    /// in u. Requires 0 < u <= 1 and lambda > 0.
    double quantile(double u) const;

private:
    double gamma0_, gamma_, lambda_;
    Regime regime_;
    // fixed-point start: survival is a pure exponential exp(-rate * t)
    bool at_fixed_point_ = false;
    double fp_rate_ = 0;
    // lambda < 1
    double psi0_ = 0, q0_ = 0, beta_ = 0;
    // lambda = 1
    double v0_ = 0, one_plus_v0sq_ = 0;
    // lambda > 1
    double r0_ = 0, a0_ = 0, xp_ = 0, xm_ = 0, beta_prime_ = 0;
};

/// P_0^t[0 || theta0], probability of zero clicks in (0, t].
double survival(double t, Angle theta0, const ModelParams& p);

/// Inverse of survival in its first argument; see SurvivalCurve::quantile.
double first_click_quantile(double u, Angle theta0, const ModelParams& p);

/// Bloch angle of a normalized yz-plane state: after gauging a >= 0 real,
/// theta = 2 atan2(Im b, a). States with |Re(b conj(a))| > 1e-9 after
/// gauging are rejected.
Angle bloch_angle(const WaveFunction& psi);

}  // namespace qreset
