#include "qreset/resolvent.hpp"

#include <Eigen/SparseLU>

namespace qreset {

GeneratorSpec qubit_generator(const ModelParams& p) {
    GeneratorSpec spec;
    spec.drift = [p](double th) { return -2.0 * p.gamma0 * (1.0 + p.lambda * std::sin(th)); };
    spec.diffusion = nullptr;
    spec.jump_rate = [p](double th) {
        const double s = std::sin(0.5 * th);
        return p.gamma * s * s;
    };
    spec.reset = ResetMeasure::at_point(kPi);
    return spec;
}

double GridOperator::pair_rate(const Eigen::VectorXd& f) const {
    return h_ * gamma_.dot(f);
}

std::complex<double> GridOperator::pair_rate(const Eigen::VectorXcd& f) const {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n_; ++i) acc += gamma_(i) * f(i);
    return acc * h_;
}

int GridOperator::cell_of(double theta) const {
    const double w = wrap_angle(theta);
    auto idx = static_cast<long>(std::floor((w + kPi) / h_));
    idx = std::min<long>(std::max<long>(idx, 0), n_ - 1);
    return static_cast<int>(idx);
}

Eigen::VectorXd GridOperator::point_mass(double theta) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    const int j = cell_of(theta);
    const double w = wrap_angle(theta);
    const double frac = wrap_angle(w - centers_[static_cast<std::size_t>(j)]) / h_;
    const int other = ((frac >= 0 ? j + 1 : j - 1) % n_ + n_) % n_;
    const double wo = std::min(std::abs(frac), 1.0);
    out(j) = (1.0 - wo) / h_;
    out(other) += wo / h_;
    return out;
}

GridOperator discretize(const GeneratorSpec& spec, int n) {
    if (n < 64) throw std::invalid_argument("discretize: n must be >= 64");
    GridOperator g;
    g.n_ = n;
    g.h_ = kTwoPi / n;
    g.centers_.resize(n);
    for (int i = 0; i < n; ++i) g.centers_[i] = -kPi + (i + 0.5) * g.h_;

    auto wrap_idx = [n](int i) { return ((i % n) + n) % n; };

    // edge k sits at theta = -pi + k h, between cells k-1 and k
    std::vector<double> omega_e(n), diff_e(n);
    for (int k = 0; k < n; ++k) {
        const double edge = -kPi + k * g.h_;
        omega_e[k] = spec.drift ? spec.drift(edge) : 0.0;
        diff_e[k] = spec.diffusion ? spec.diffusion(edge) : 0.0;
        if (diff_e[k] < 0) throw std::invalid_argument("discretize: negative diffusion");
    }

    g.gamma_.resize(n);
    for (int i = 0; i < n; ++i) {
        g.gamma_(i) = spec.jump_rate ? spec.jump_rate(g.centers_[i]) : 0.0;
        if (g.gamma_(i) < 0) throw std::invalid_argument("discretize: negative jump rate");
    }

    g.mu_ = Eigen::VectorXd::Zero(n);
    if (spec.reset.atomic) {
        g.mu_ = g.point_mass(spec.reset.atom_theta);
    } else {
        if (!spec.reset.density)
            throw std::invalid_argument("discretize: reset measure has no density");
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            g.mu_(i) = spec.reset.density(g.centers_[i]);
            if (g.mu_(i) < 0) throw std::invalid_argument("discretize: negative reset density");
            total += g.mu_(i) * g.h_;
        }
        if (total <= 0) throw std::invalid_argument("discretize: reset measure has zero mass");
        g.mu_ /= total;
    }

    // flux at edge k as a stencil over cell values; second-order upwind for
    // advection, central for diffusion
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 6);
    auto add_flux = [&](int k, int cell, double coeff) {
        // (L f)_i += -(F_{i+1} - F_i)/h  ->  edge k contributes to rows k-1 and k
        trip.emplace_back(wrap_idx(k - 1), wrap_idx(cell), -coeff / g.h_);
        trip.emplace_back(wrap_idx(k), wrap_idx(cell), coeff / g.h_);
    };
    for (int k = 0; k < n; ++k) {
        const double w = omega_e[k];
        if (w >= 0) {
            add_flux(k, k - 1, 1.5 * w);
            add_flux(k, k - 2, -0.5 * w);
        } else {
            add_flux(k, k, 1.5 * w);
            add_flux(k, k + 1, -0.5 * w);
        }
        const double d = diff_e[k] / g.h_;
        if (d != 0) {
            add_flux(k, k, -d);
            add_flux(k, k - 1, d);
        }
    }
    // killing term of L0
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, -g.gamma_(i));

    g.l0_.resize(n, n);
    g.l0_.setFromTriplets(trip.begin(), trip.end());
    g.l0_.makeCompressed();
    return g;
}

namespace {

struct RankOneSolve {
    Eigen::VectorXcd x;  // (s - L0)^{-1} delta_from
    Eigen::VectorXcd y;  // (s - L0)^{-1} mu
    std::complex<double> gx, gy;
};

// Core rank-one resolvent combination; no half-plane restriction so the
// inversion contour may dip into Re(s) < 0.
RankOneSolve solve_pair(std::complex<double> s, Angle theta_from, const GridOperator& grid) {
    const int n = grid.n();
    Eigen::SparseMatrix<std::complex<double>> m(n, n);
    m = (-grid.l0()).cast<std::complex<double>>();
    for (int i = 0; i < n; ++i) m.coeffRef(i, i) += s;
    m.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
        throw std::domain_error("laplace_transition: singular (s - L0)");

    const Eigen::VectorXcd rhs_from =
        grid.point_mass(theta_from.value()).cast<std::complex<double>>();
    RankOneSolve out;
    out.x = lu.solve(rhs_from);
    out.y = lu.solve(grid.mu().cast<std::complex<double>>().eval());
    out.gx = grid.pair_rate(out.x);
    out.gy = grid.pair_rate(out.y);
    if (std::abs(1.0 - out.gy) < 1e-12)
        throw std::domain_error("laplace_transition: resonant reset denominator");
    return out;
}

}  // namespace

Eigen::VectorXcd laplace_transition(std::complex<double> s, Angle theta_from,
                                    const GridOperator& grid) {
    if (!(s.real() > 0)) throw std::invalid_argument("laplace_transition: requires Re(s) > 0");
    RankOneSolve r = solve_pair(s, theta_from, grid);
    return r.x + r.y * (r.gx / (1.0 - r.gy));
}

std::complex<double> mean_rate_laplace(std::complex<double> s, Angle theta_from,
                                       const GridOperator& grid) {
    if (!(s.real() > 0)) throw std::invalid_argument("mean_rate_laplace: requires Re(s) > 0");
    RankOneSolve r = solve_pair(s, theta_from, grid);
    return r.gx / (1.0 - r.gy);
}

namespace {

// m-point trapezoid of the Bromwich integral along the Talbot contour
// s(phi) = r phi (cot phi + i). The contour parameter r is handed in so a
// refinement (larger m, same r) converges geometrically -- enlarging r with m
// would instead hit the e^{rt} roundoff wall.
Eigen::VectorXd talbot(Angle theta_from, double t, const GridOperator& grid, int m, double r) {
    auto resolvent = [&](std::complex<double> s) -> Eigen::VectorXcd {
        RankOneSolve ro = solve_pair(s, theta_from, grid);
        return ro.x + ro.y * (ro.gx / (1.0 - ro.gy));
    };
    Eigen::VectorXd acc =
        0.5 * std::exp(r * t) * resolvent(std::complex<double>(r, 0.0)).real().eval();
    for (int k = 1; k < m; ++k) {
        const double phi = k * kPi / m;
        const double cot = std::cos(phi) / std::sin(phi);
        const std::complex<double> s(r * phi * cot, r * phi);
        // nodes this deep in the left half-plane weigh in at exp(s t) ~ 1e-20
        // and can sit on near-singular resolvent points; drop them
        if (s.real() * t < -46.0) continue;
        const double sigma = phi + (phi * cot - 1.0) * cot;
        const std::complex<double> weight =
            std::exp(s * t) * std::complex<double>(1.0, sigma);
        acc += (resolvent(s) * weight).real();
    }
    return acc * (r / m);
}

}  // namespace

Eigen::VectorXd invert_laplace(Angle theta_from, double t, const GridOperator& grid, int nodes,
                               double check_tol) {
    if (!(t > 0)) throw std::invalid_argument("invert_laplace: requires t > 0");
    if (nodes < 4) throw std::invalid_argument("invert_laplace: too few nodes");
    const double r = 2.0 * nodes / (5.0 * t);
    Eigen::VectorXd coarse = talbot(theta_from, t, grid, nodes, r);
    if (check_tol > 0) {
        Eigen::VectorXd fine = talbot(theta_from, t, grid, 2 * nodes, r);
        if ((fine - coarse).lpNorm<Eigen::Infinity>() > check_tol)
            throw std::domain_error("invert_laplace: node sweep did not converge");
        return fine;
    }
    return coarse;
}

}  // namespace qreset
