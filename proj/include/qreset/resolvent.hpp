#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <vector>

#include "qreset/model.hpp"

namespace qreset {

/// Reset target: a point mass or a density on the circle.
struct ResetMeasure {
    bool atomic = true;
    double atom_theta = kPi;
    std::function<double(double)> density;  ///< used when !atomic; normalized on the grid

    static ResetMeasure at_point(double theta) { return {true, wrap_angle(theta), nullptr}; }
    static ResetMeasure uniform() {
        return {false, 0.0, [](double) { return 1.0 / kTwoPi; }};
    }
};

/// Drift + diffusion + position-dependent jump rate + reset measure on the
/// periodic circle. Null fields mean identically zero.
struct GeneratorSpec {
    std::function<double(double)> drift;
    std::function<double(double)> diffusion;
    std::function<double(double)> jump_rate;
    ResetMeasure reset = ResetMeasure::at_point(kPi);
};

/// The qubit resetting process: Omega drift, no diffusion, rate
/// gamma sin^2(theta/2), reset to the point pi.
GeneratorSpec qubit_generator(const ModelParams& p);

/// Finite-volume discretization of L0 = L - gamma(theta), plus the rank-one
/// data of L1 f = mu(theta) <gamma, f>. Advection uses a second-order
/// upwind-biased reconstruction, diffusion central fluxes; L0 + L1 conserves
/// total mass to machine precision by construction.
class GridOperator {
public:
    int n() const { return n_; }
    double h() const { return h_; }
    const std::vector<double>& centers() const { return centers_; }
    const Eigen::SparseMatrix<double>& l0() const { return l0_; }
    const Eigen::VectorXd& mu() const { return mu_; }             ///< reset density values
    const Eigen::VectorXd& jump_rate() const { return gamma_; }   ///< gamma(theta_i)

    /// <gamma, f> = sum gamma_i f_i h.
    double pair_rate(const Eigen::VectorXd& f) const;
    std::complex<double> pair_rate(const Eigen::VectorXcd& f) const;

    int cell_of(double theta) const;

    /// Unit point mass at theta as a grid density, split over the two
    /// neighbouring cells so the first moment is exact (the naive one-cell
    /// placement biases every functional by O(h/2)).
    Eigen::VectorXd point_mass(double theta) const;

    friend GridOperator discretize(const GeneratorSpec&, int);

private:
    int n_ = 0;
    double h_ = 0;
    std::vector<double> centers_;
    Eigen::SparseMatrix<double> l0_;
    Eigen::VectorXd mu_, gamma_;
};

GridOperator discretize(const GeneratorSpec& spec, int n);

/// Laplace-domain transition density (L P_t)(s)(. | theta_from) by two solves
/// against (s - L0) and the exact rank-one combination
/// x + y <gamma, x> / (1 - <gamma, y>). Requires Re(s) > 0.
Eigen::VectorXcd laplace_transition(std::complex<double> s, Angle theta_from,
                                    const GridOperator& grid);

/// Laplace transform of the mean jump rate, <gamma, (L P_t)(s)(. | theta_from)>.
std::complex<double> mean_rate_laplace(std::complex<double> s, Angle theta_from,
                                       const GridOperator& grid);

/// Time-domain density at time t by fixed-Talbot contour inversion with
/// `nodes` quadrature points. If check_tol > 0, the result is recomputed with
/// 2x nodes and a sup-norm change above check_tol is an error.
Eigen::VectorXd invert_laplace(Angle theta_from, double t, const GridOperator& grid,
                               int nodes = 32, double check_tol = 0.0);

}  // namespace qreset
