#pragma once

#include "qreset/model.hpp"

namespace qreset::detail {

// Orbit coordinates in which the no-click flow moves at constant speed.
// lambda < 1: psi(theta), d psi/dt = -beta gamma0, one revolution = pi shift.
// lambda = 1: v(theta) = tan(pi/4 - theta/2), dv/dt = 2 gamma0.
// lambda > 1: cross-ratio r of tan(theta/2), r(t) = r0 exp(-2 beta' gamma0 t).

inline double sub_psi(double theta, double lambda, double beta) {
    if (theta == kPi) return kPi / 2.0;
    return std::atan((lambda + std::tan(0.5 * theta)) / beta);
}

/// Inverse of sub_psi on the principal branch psi in (-pi/2, pi/2].
inline double sub_theta(double psi, double lambda, double beta) {
    if (psi == kPi / 2.0) return kPi;
    return 2.0 * std::atan(beta * std::tan(psi) - lambda);
}

/// Q(psi) = beta^2 / (1 + lambda sin theta(psi)); bounded, zero-free.
inline double sub_q(double psi, double lambda, double beta) {
    const double c = std::cos(psi), s = std::sin(psi);
    const double m = beta * s - lambda * c;
    return c * c + m * m;
}

/// Reduce psi modulo pi into (-pi/2, pi/2].
inline double sub_reduce(double psi) {
    const double k = std::ceil(psi / kPi - 0.5);
    return psi - k * kPi;
}

inline double crit_v(double theta) {
    if (theta == kPi) return -1.0;
    return std::tan(kPi / 4.0 - 0.5 * theta);
}

inline double crit_theta(double v) { return wrap_angle(kPi / 2.0 - 2.0 * std::atan(v)); }

/// tan(theta_pm / 2) = -lambda +- beta_prime.
inline double super_x_plus(double lambda, double beta_prime) { return -lambda + beta_prime; }
inline double super_x_minus(double lambda, double beta_prime) { return -lambda - beta_prime; }

inline double super_r(double theta, double xp, double xm) {
    if (theta == kPi) return 1.0;
    const double x = std::tan(0.5 * theta);
    return (x - xp) / (x - xm);
}

inline double super_theta(double r, double xp, double xm) {
    const double x = (xp - xm * r) / (1.0 - r);
    if (std::isinf(x)) return kPi;
    return wrap_angle(2.0 * std::atan(x));
}

/// Spectral phase map phi(theta, lambda) = 2 psi(theta); phi(+-pi) = +-pi,
/// d phi / d theta = beta / (1 + lambda sin theta).
inline double phase_map(double theta, double lambda, double beta) {
    if (theta == kPi) return kPi;
    if (theta == -kPi) return -kPi;
    return 2.0 * std::atan((lambda + std::tan(0.5 * theta)) / beta);
}

}  // namespace qreset::detail
