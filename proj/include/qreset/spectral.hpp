#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "qreset/model.hpp"

namespace qreset {

/// Complete bi-orthonormal eigen-system of the density evolution operator for
/// 0 < lambda < 1: the displaced trio {0, nu+, nu-} plus the tower
/// nu_m = -lambda + i m sqrt(1 - lambda^2), |m| in [2, M].
///
/// f* are right eigenfunctions (f0 is the steady state), h* the adjoint
/// eigenfunctions with <h_a, f_b> = delta_ab; (fbar_m, g_m) is the underlying
/// free bi-orthonormal pair of the continuity-boundary operator.
class BiorthoBasis {
public:
    BiorthoBasis(const ModelParams& p, int truncation);

    const ModelParams& params() const { return params_; }
    int truncation() const { return m_; }

    std::complex<double> nu_plus() const { return nu_p_; }
    std::complex<double> nu_minus() const { return nu_m_; }
    std::complex<double> nu_tower(int m) const;
    std::complex<double> b_coeff(int m) const;  ///< B_m = nu_m (nu_m - nu-)(nu_m - nu+)

    /// Phase map phi(theta, lambda) with phi(+-pi) = +-pi.
    double phase(double theta) const;

    std::complex<double> f0(double theta) const;
    std::complex<double> f_plus(double theta) const;
    std::complex<double> f_minus(double theta) const;
    std::complex<double> f_tower(int m, double theta) const;  ///< |m| >= 2

    std::complex<double> fbar(int m, double theta) const;
    std::complex<double> g(int m, double theta) const;

    std::complex<double> h0(double) const { return 1.0; }
    std::complex<double> h_plus(double theta) const;
    std::complex<double> h_minus(double theta) const;
    std::complex<double> h_tower(int m, double theta) const;

private:
    ModelParams params_;
    int m_;
    double beta_, w4_, norm4_;  // norm4 = ((1-l^2)/4pi^2)^{1/4}
    std::complex<double> nu_p_, nu_m_;
};

BiorthoBasis build_basis_sub(const ModelParams& p, int truncation);

/// Smallest tower truncation whose a-priori tail bound is below tol/2.
int choose_truncation(const ModelParams& p, double tol);

/// Pairings <h_a, f_b> (conjugate-linear left slot) over the label order
/// [0, nu+, nu-, m = -mmax..-2, m = 2..mmax]; identity when the system is
/// bi-orthonormal.
Eigen::MatrixXcd gram_check(const BiorthoBasis& basis, int mmax);

/// Pairings <g_m, fbar_n> of the free pair, same tower order without the trio.
Eigen::MatrixXcd gram_check_free(const BiorthoBasis& basis, int mmax);

enum class GeneratorSide { Forward, Adjoint };

struct GridFunction {
    std::vector<double> theta;
    std::vector<std::complex<double>> values;
};

/// Applies the evolution generator (in units of 2 gamma0) or its adjoint to a
/// callable on a uniform grid: sixth-order finite differences away from the
/// theta = pi cut, one-sided stencils at the cut. The delta source at pi is
/// not included; check the jump condition separately.
GridFunction apply_generator(const std::function<std::complex<double>(double)>& fn,
                             const ModelParams& p, GeneratorSide side, int n = 4096);

/// Continuous (finite) part of P(theta, t) for lambda < 1 from the spectral
/// series: steady state + displaced pair + tower + resummed Dirichlet-kernel
/// correction. The atom is never produced by the series; it is added by the
/// caller from the survival probability.
double density_series_sub(Angle theta, double t, const BiorthoBasis& basis);

// --- lambda = 1 -------------------------------------------------------------

/// Expansion coefficient c_k(t) of the continuum representation at lambda = 1.
std::complex<double> coeff_ck(double k, double t, const ModelParams& p);

/// Point spectrum {0, nu+, nu-} at lambda = 1 with eigenfunctions supported on
/// (-pi/2, pi], plus the continuum families f_k, g_k, h_k (proper for k != 0)
/// and the improper adjoint h_nu0.
class CriticalSpectrum {
public:
    explicit CriticalSpectrum(const ModelParams& p);

    std::complex<double> nu_plus() const { return nu_p_; }
    std::complex<double> nu_minus() const { return nu_m_; }

    /// x(theta) = -2 / (1 + tan(theta/2)); the flow coordinate of the continuum.
    static double x_coord(double theta);

    double f0(double theta) const;
    std::complex<double> f_plus(double theta) const;
    std::complex<double> f_minus(double theta) const;
    std::complex<double> h0(double) const { return 1.0; }
    std::complex<double> h_plus(double theta) const;
    std::complex<double> h_minus(double theta) const;

    std::complex<double> f_k(double k, double theta) const;
    std::complex<double> g_k(double k, double theta) const;
    std::complex<double> h_k(double k, double theta) const;  ///< k != 0
    std::complex<double> h_nu0(double theta) const;

    static bool in_support(double theta) { return theta > -kPi / 2.0; }

private:
    ModelParams params_;
    std::complex<double> nu_p_, nu_m_;
};

CriticalSpectrum point_spectrum_critical(const ModelParams& p);

/// Continuous part of P(theta, t) at lambda = 1 reconstructed by numerical
/// k-quadrature of the continuum expansion over [-K, K], K doubled until the
/// value changes by less than tol (the transported atom term is excluded from
/// the quadrature; it is exactly the delta handled by the caller).
double reconstruct_density_critical(Angle theta, double t, const ModelParams& p,
                                    double tol = 1e-4);

}  // namespace qreset
