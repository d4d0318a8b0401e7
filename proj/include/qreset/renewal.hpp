#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qreset/model.hpp"

namespace qreset {

/// First time the no-click flow started at pi reaches theta. Rejects angles
/// outside the reachable set (theta <= theta_+ for lambda > 1, theta <= -pi/2
/// at lambda = 1).
double tau0(Angle theta, const ModelParams& p);

/// Stationary density P_inf(theta). Requires lambda > 0. Returns 0 outside
/// the support ((theta_+, pi] for lambda > 1, (-pi/2, pi] at lambda = 1).
double steady_state(Angle theta, const ModelParams& p);

/// Continuous part of P(theta, t) from the renewal sum over visit times
/// tau_n(theta) = tau0 + n pi/(beta gamma0); the general evaluator, valid for
/// every regime and time. The atom is not included.
double renewal_convolve(Angle theta, double t, const ModelParams& p);

/// Continuous part of P(theta, t) in the explicit per-regime closed form.
/// For lambda < 1 it is restricted to the single-visit window
/// t <= pi / (beta gamma0) and rejects later times.
double density_closed(Angle theta, double t, const ModelParams& p);

/// Support arc of the continuous density: (lo, pi], or the whole circle.
struct SupportInterval {
    double lo = -kPi;
    bool full = false;
    bool contains(double theta) const { return full || theta > lo; }
};

/// Atom (position, mass) plus continuous density over the support.
struct DistributionSnapshot {
    double t = 0;
    double atom_position = 0;
    double atom_mass = 0;
    std::function<double(double)> continuous;
    SupportInterval support;
    std::vector<double> grid_theta;    ///< optional uniform sampling
    std::vector<double> grid_density;
};

/// Full snapshot via renewal_convolve; grid_n > 0 adds a uniform sampling.
DistributionSnapshot snapshot_renewal(double t, const ModelParams& p, std::size_t grid_n = 0);

/// Full snapshot via density_closed (same atom handling).
DistributionSnapshot snapshot_closed(double t, const ModelParams& p, std::size_t grid_n = 0);

/// Snapshot of the steady state (no atom).
DistributionSnapshot snapshot_steady(const ModelParams& p, std::size_t grid_n = 0);

struct Matrix2c {
    std::complex<double> m00, m01, m10, m11;
    std::complex<double> trace() const { return m00 + m11; }
};

/// Average density matrix rho = int P(theta) |theta><theta| d theta with
/// |theta> = (cos(theta/2), i sin(theta/2)); Hermitian, unit trace, PSD.
Matrix2c density_matrix(const DistributionSnapshot& snap);

}  // namespace qreset
