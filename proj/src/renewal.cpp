#include "qreset/renewal.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qreset/counting.hpp"
#include "qreset/detail/orbit.hpp"
#include "qreset/noclick.hpp"

namespace qreset {

using namespace qreset::detail;

double tau0(Angle theta, const ModelParams& p) {
    const double th = theta.value();
    switch (p.regime) {
        case Regime::Sub: {
            if (th == kPi) return 0.0;
            const double b = *p.beta;
            return (kPi / 2.0 - sub_psi(th, p.lambda, b)) / (b * p.gamma0);
        }
        case Regime::Critical: {
            if (th <= -kPi / 2.0)
                throw std::invalid_argument("tau0: theta unreachable from pi");
            return (1.0 + crit_v(th)) / (2.0 * p.gamma0);
        }
        case Regime::Super: {
            const double bp = *p.beta_prime;
            const double tp = -std::asin(1.0 / p.lambda);
            if (th <= tp) throw std::invalid_argument("tau0: theta unreachable from pi");
            const double r = super_r(th, super_x_plus(p.lambda, bp), super_x_minus(p.lambda, bp));
            return -std::log(r) / (2.0 * bp * p.gamma0);
        }
    }
    throw std::logic_error("tau0: unreachable");
}

namespace {

bool in_steady_support(double th, const ModelParams& p) {
    if (p.regime == Regime::Sub) return true;
    if (p.regime == Regime::Critical) return th > -kPi / 2.0;
    return th > -std::asin(1.0 / p.lambda);
}

}  // namespace

double steady_state(Angle theta, const ModelParams& p) {
    if (p.lambda == 0)
        throw std::invalid_argument("steady_state: no steady state for lambda = 0");
    const double th = theta.value();
    if (!in_steady_support(th, p)) return 0.0;
    const double t0 = tau0(theta, p);
    const double a = 1.0 + p.lambda * std::sin(th);
    const double damp = std::exp(-0.5 * p.gamma * t0);
    // at the numerical edge of the support the exponential wins over the
    // vanishing denominator; both can underflow to 0 here
    if (a <= 0.0 || damp == 0.0) return 0.0;
    switch (p.regime) {
        case Regime::Sub: {
            const double revisit = 1.0 - std::exp(-kTwoPi * p.lambda / *p.beta);
            return p.lambda * damp / (a * a * revisit);
        }
        case Regime::Critical:
            return damp / (a * a);
        case Regime::Super:
            return p.lambda * damp / (a * a);
    }
    throw std::logic_error("steady_state: unreachable");
}

double renewal_convolve(Angle theta, double t, const ModelParams& p) {
    if (!(t >= 0)) throw std::invalid_argument("renewal_convolve: requires t >= 0");
    if (p.lambda == 0) return 0.0;
    const double th = theta.value();
    if (!in_steady_support(th, p)) return 0.0;
    const double t0 = tau0(theta, p);
    if (!(t0 < t)) return 0.0;

    const double a = 1.0 + p.lambda * std::sin(th);
    if (a <= 0.0) return 0.0;  // numerically at a fixed point: edge limit is 0
    const double geom = 1.0 / (2.0 * p.gamma0 * a * a);
    if (p.regime != Regime::Sub)
        return geom * mean_rate(t - t0, p) * std::exp(-0.5 * p.gamma * t0);

    // lambda < 1: the flow revisits theta once per revolution
    const double t_rev = kPi / (*p.beta * p.gamma0);
    double sum = 0.0;
    for (double tn = t0; tn < t; tn += t_rev)
        sum += mean_rate(t - tn, p) * std::exp(-0.5 * p.gamma * tn);
    return geom * sum;
}

double density_closed(Angle theta, double t, const ModelParams& p) {
    if (!(t >= 0)) throw std::invalid_argument("density_closed: requires t >= 0");
    if (p.lambda == 0) return 0.0;
    const double th = theta.value();
    const double g0 = p.gamma0, l = p.lambda;

    if (p.regime == Regime::Sub) {
        const double window = kPi / (*p.beta * g0);
        if (t > window)
            throw std::invalid_argument(
                "density_closed: beyond the single-visit window for lambda < 1 "
                "(use renewal_convolve)");
    }
    if (!in_steady_support(th, p)) return 0.0;
    const double t0 = tau0(theta, p);
    if (!(t0 < t)) return 0.0;

    const double a = 1.0 + l * std::sin(th);
    const double expdamp = std::exp(-0.5 * p.gamma * t0);
    if (a <= 0.0 || expdamp == 0.0) return 0.0;
    const double shape = expdamp / (a * a);
    const double delta = t - t0;

    switch (p.regime) {
        case Regime::Sub: {
            const double w4 = std::sqrt(4.0 - l * l);
            const std::complex<double> i(0.0, 1.0);
            const std::complex<double> rot =
                std::exp((-l + i * w4) * g0 * t) * std::exp(-(l + i * w4) * g0 * t0) / (w4 + i * l);
            return l * shape - (4.0 * l / w4) * rot.real() / (a * a);
        }
        case Regime::Critical: {
            const double bracket =
                1.0 - (2.0 / std::sqrt(3.0)) * std::exp(-g0 * delta) *
                          std::sin(std::sqrt(3.0) * g0 * delta + kPi / 3.0);
            return bracket * shape;
        }
        case Regime::Super: {
            double bracket;
            switch (p.counting_regime) {
                case CountingRegime::Oscillatory: {
                    const double w4 = std::sqrt(4.0 - l * l);
                    bracket = 1.0 - (2.0 / w4) * std::exp(-l * g0 * delta) *
                                        std::sin(*p.omega * delta + std::atan(w4 / l));
                    break;
                }
                case CountingRegime::Confluent:
                    bracket = 1.0 - std::exp(-2.0 * g0 * delta) * (1.0 + 2.0 * g0 * delta);
                    break;
                case CountingRegime::Overdamped: {
                    // sinh continuation of the oscillatory bracket, split into
                    // decaying exponentials
                    const double w4p = std::sqrt(l * l - 4.0);
                    const double c = std::atanh(w4p / l);
                    const double wp = *p.omega_prime;
                    const double ep = std::exp((wp - l * g0) * delta + c);
                    const double em = std::exp(-(wp + l * g0) * delta - c);
                    bracket = 1.0 - (1.0 / w4p) * (ep - em);
                    break;
                }
                default:
                    throw std::logic_error("density_closed: unreachable");
            }
            return l * bracket * shape;
        }
    }
    throw std::logic_error("density_closed: unreachable");
}

namespace {

SupportInterval support_at(double t, const ModelParams& p) {
    SupportInterval s;
    if (p.lambda == 0) {
        s.full = false;
        s.lo = kPi;  // empty: atom only
        return s;
    }
    if (p.regime == Regime::Sub && t >= kPi / (*p.beta * p.gamma0)) {
        s.full = true;
        return s;
    }
    s.lo = flow(t, 0.0, Angle(kPi), p).value();
    return s;
}

DistributionSnapshot make_snapshot(double t, const ModelParams& p, std::size_t grid_n,
                                   std::function<double(double)> density) {
    DistributionSnapshot snap;
    snap.t = t;
    snap.atom_position = flow(t, 0.0, Angle(0.0), p).value();
    snap.atom_mass = survival(t, Angle(0.0), p);
    snap.support = support_at(t, p);
    snap.continuous = std::move(density);
    if (grid_n > 0) {
        snap.grid_theta.resize(grid_n);
        snap.grid_density.resize(grid_n);
        for (std::size_t i = 0; i < grid_n; ++i) {
            const double th = -kPi + kTwoPi * (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(grid_n);
            snap.grid_theta[i] = th;
            snap.grid_density[i] = snap.continuous(th);
        }
    }
    return snap;
}

}  // namespace

DistributionSnapshot snapshot_renewal(double t, const ModelParams& p, std::size_t grid_n) {
    return make_snapshot(t, p, grid_n,
                         [p, t](double th) { return renewal_convolve(Angle(th), t, p); });
}

DistributionSnapshot snapshot_closed(double t, const ModelParams& p, std::size_t grid_n) {
    return make_snapshot(t, p, grid_n,
                         [p, t](double th) { return density_closed(Angle(th), t, p); });
}

DistributionSnapshot snapshot_steady(const ModelParams& p, std::size_t grid_n) {
    DistributionSnapshot snap =
        make_snapshot(0.0, p, 0, [p](double th) { return steady_state(Angle(th), p); });
    snap.t = std::numeric_limits<double>::infinity();
    snap.atom_mass = 0.0;
    snap.atom_position = 0.0;
    if (p.regime == Regime::Sub)
        snap.support = SupportInterval{-kPi, true};
    else
        snap.support = SupportInterval{
            p.regime == Regime::Critical ? -kPi / 2.0 : -std::asin(1.0 / p.lambda), false};
    if (grid_n > 0) {
        snap.grid_theta.resize(grid_n);
        snap.grid_density.resize(grid_n);
        for (std::size_t i = 0; i < grid_n; ++i) {
            const double th = -kPi + kTwoPi * (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(grid_n);
            snap.grid_theta[i] = th;
            snap.grid_density[i] = snap.continuous(th);
        }
    }
    return snap;
}

Matrix2c density_matrix(const DistributionSnapshot& snap) {
    using C = std::complex<double>;
    boost::math::quadrature::tanh_sinh<double> quad;
    const double lo = snap.support.full ? -kPi : snap.support.lo;
    auto moment = [&](auto weight) -> double {
        if (!snap.continuous || lo >= kPi) return 0.0;
        return quad.integrate([&](double th) { return snap.continuous(th) * weight(th); }, lo,
                              kPi, 1e-10);
    };
    const double ca = std::cos(0.5 * snap.atom_position), sa = std::sin(0.5 * snap.atom_position);
    const double m_cc = snap.atom_mass * ca * ca +
                        moment([](double th) { const double c = std::cos(0.5 * th); return c * c; });
    const double m_ss = snap.atom_mass * sa * sa +
                        moment([](double th) { const double s = std::sin(0.5 * th); return s * s; });
    const double m_cs = snap.atom_mass * ca * sa +
                        moment([](double th) { return std::cos(0.5 * th) * std::sin(0.5 * th); });
    const C i(0.0, 1.0);
    return Matrix2c{m_cc, -i * m_cs, i * m_cs, m_ss};
}

}  // namespace qreset
