#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "qreset/model.hpp"

namespace qreset {

/// Laplace transform over t in (0, inf) of exp(-gamma t / 2) sin^2(beta gamma0 t - shift),
/// for lambda < 1. Requires Re(sigma) > -gamma/2.
std::complex<double> g_hat(std::complex<double> sigma, double shift, const ModelParams& p);

/// Joint exclusive density of exactly n clicks at the given ordered times in
/// (0, t], started from theta = 0. Closed per-regime product rows; the
/// division by the final angle is folded into the last survival bracket.
double epd_joint(double t, std::span<const double> clicks, const ModelParams& p);

/// Same density assembled from first principles as
/// survival * rate * survival * ... via the no-click module. Slower;
/// the reference route for validating the closed rows.
double epd_joint_product(double t, std::span<const double> clicks, const ModelParams& p);

/// P_0^t[n]: probability of exactly n clicks in (0, t], by nested adaptive
/// quadrature of epd_joint over the ordered simplex. Cost grows exponentially
/// with n; capped at n_max.
double count_prob(int n, double t, const ModelParams& p, int n_max = 4);

/// P_0^t[0..n_upto] in one shot through the probability generating function
/// E[z^N] evaluated on the unit circle (Fourier inversion). Machine-accurate
/// for any n the double format can resolve; the route of choice when the
/// simplex quadrature of count_prob is too expensive.
std::vector<double> count_distribution(double t, const ModelParams& p, int n_upto);

/// Zeros of the cubic denominator of the Laplace-domain MGF at real s >= 0
/// (rates sigma_i, Re <= 0 for s >= 0). confluent marks a root pair closer
/// than 1e-9 * max(|sigma_i|, gamma0).
struct CubicRoots {
    std::array<std::complex<double>, 3> sigma;
    bool confluent;
};

CubicRoots mgf_denominator_roots(double s, const ModelParams& p);

/// Laplace transform in time of E[exp(-s N_t)]. Requires Re(sigma) > 0;
/// evaluation too close to a denominator zero is rejected.
std::complex<double> mgf_laplace(std::complex<double> sigma, double s, const ModelParams& p);

/// E[exp(-s N_t)] for s >= 0 via the three-pole residue expansion of
/// mgf_laplace; confluent roots use the limiting double/triple-root formula.
double mgf(double s, double t, const ModelParams& p);

/// E[N_t], closed per-regime form.
double mean_count(double t, const ModelParams& p);

/// -d/ds E[exp(-s N_t)] at s = 0 by central differences (step 1e-6, one
/// Richardson level). Cross-check for mean_count.
double mean_count_fd(double t, const ModelParams& p);

/// Mean click rate d E[N_t] / dt, closed form; exactly 0 at t = 0.
double mean_rate(double t, const ModelParams& p);

namespace detail {
/// mgf for arbitrary complex s (generating-function evaluation on |z| = 1).
std::complex<double> mgf_general(std::complex<double> s, double t, const ModelParams& p);
/// Cubic roots for arbitrary complex s.
CubicRoots mgf_denominator_roots_c(std::complex<double> s, const ModelParams& p);
/// MGF Laplace transform rebuilt from the g_hat geometric resummation,
/// analytically continued in beta; cross-check of the rational form.
std::complex<double> mgf_laplace_resummed(std::complex<double> sigma, double s,
                                          const ModelParams& p);
}  // namespace detail

}  // namespace qreset
