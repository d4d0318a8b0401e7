#include "qreset/noclick.hpp"

#include <boost/numeric/odeint.hpp>

#include "qreset/detail/orbit.hpp"

namespace qreset {

namespace {

using namespace qreset::detail;

bool is_super_fixed_point(double theta, const ModelParams& p, double* rate) {
    const auto fp = fixed_points(p);
    if (!fp) return false;
    if (theta == fp->stable || theta == fp->unstable) {
        *rate = click_rate(Angle(theta), p);
        return true;
    }
    return false;
}

}  // namespace

Angle flow(double t, double s, Angle theta_start, const ModelParams& p, FlowMethod method) {
    if (!(t >= s)) throw std::invalid_argument("flow: requires t >= s");
    const double dt = t - s;
    const double th0 = theta_start.value();
    if (dt == 0) return theta_start;

    if (method == FlowMethod::Numeric) {
        namespace ode = boost::numeric::odeint;
        double state = th0;
        auto rhs = [&p](const double& th, double& dth, double) {
            dth = -2.0 * p.gamma0 * (1.0 + p.lambda * std::sin(th));
        };
        ode::integrate_adaptive(
            ode::make_controlled<ode::runge_kutta_cash_karp54<double>>(1e-10, 1e-10),
            rhs, state, 0.0, dt, 1e-3 * dt + 1e-12);
        return Angle(state);
    }

    switch (p.regime) {
        case Regime::Sub: {
            const double psi = sub_psi(th0, p.lambda, *p.beta) - *p.beta * p.gamma0 * dt;
            return Angle(sub_theta(sub_reduce(psi), p.lambda, *p.beta));
        }
        case Regime::Critical: {
            if (th0 == -kPi / 2.0) return theta_start;
            const double v = crit_v(th0) + 2.0 * p.gamma0 * dt;
            return Angle(crit_theta(v));
        }
        case Regime::Super: {
            double rate;
            if (is_super_fixed_point(th0, p, &rate)) return theta_start;
            const double bp = *p.beta_prime;
            const double xp = super_x_plus(p.lambda, bp), xm = super_x_minus(p.lambda, bp);
            const double r = super_r(th0, xp, xm) * std::exp(-2.0 * bp * p.gamma0 * dt);
            return Angle(super_theta(r, xp, xm));
        }
    }
    throw std::logic_error("flow: unreachable");
}

WaveFunction WaveFunction::normalized() const {
    const double n = std::sqrt(norm2());
    if (n == 0) throw std::invalid_argument("normalized: zero state");
    return {a / n, b / n};
}

WaveFunction propagator(double t, const WaveFunction& psi0, const ModelParams& p) {
    if (!(t >= 0)) throw std::invalid_argument("propagator: requires t >= 0");
    using C = std::complex<double>;
    const double l = p.lambda, g0t = p.gamma0 * t;
    // exp(-i gamma0 t H_eff) = e^{-lambda gamma0 t} [cI - i sM], M = [[i l, 1], [1, -i l]],
    // M^2 = (1 - l^2) I. (c, s) is (cos, sin/beta), (1, gamma0 t) or (cosh, sinh/beta')
    // per regime, folded into the decaying exponential so nothing overflows.
    double ec, es;
    switch (p.regime) {
        case Regime::Sub: {
            const double x = *p.beta * g0t, d = std::exp(-l * g0t);
            ec = d * std::cos(x);
            es = d * std::sin(x) / *p.beta;
            break;
        }
        case Regime::Critical: {
            const double d = std::exp(-g0t);
            ec = d;
            es = d * g0t;
            break;
        }
        case Regime::Super: {
            const double bp = *p.beta_prime;
            const double ep = std::exp((bp - l) * g0t), em = std::exp(-(bp + l) * g0t);
            ec = 0.5 * (ep + em);
            es = 0.5 * (ep - em) / bp;
            break;
        }
        default:
            throw std::logic_error("propagator: unreachable");
    }
    const C i(0.0, 1.0);
    const C u00 = ec - i * es * (i * l), u01 = -i * es;
    const C u10 = -i * es, u11 = ec - i * es * (-i * l);
    return {u00 * psi0.a + u01 * psi0.b, u10 * psi0.a + u11 * psi0.b};
}

SurvivalCurve::SurvivalCurve(Angle theta0, const ModelParams& p)
    : gamma0_(p.gamma0), gamma_(p.gamma), lambda_(p.lambda), regime_(p.regime) {
    const double th0 = theta0.value();
    switch (regime_) {
        case Regime::Sub:
            if (lambda_ > 0) {
                beta_ = *p.beta;
                psi0_ = sub_psi(th0, lambda_, beta_);
                q0_ = sub_q(psi0_, lambda_, beta_);
            }
            break;
        case Regime::Critical:
            if (th0 == -kPi / 2.0) {
                at_fixed_point_ = true;
                fp_rate_ = click_rate(theta0, p);
            } else {
                v0_ = crit_v(th0);
                one_plus_v0sq_ = 1.0 + v0_ * v0_;
            }
            break;
        case Regime::Super: {
            if (is_super_fixed_point(th0, p, &fp_rate_)) {
                at_fixed_point_ = true;
                break;
            }
            beta_prime_ = *p.beta_prime;
            xp_ = super_x_plus(lambda_, beta_prime_);
            xm_ = super_x_minus(lambda_, beta_prime_);
            r0_ = super_r(th0, xp_, xm_);
            a0_ = (th0 == kPi) ? 1.0 : 1.0 + lambda_ * std::sin(th0);
            break;
        }
    }
}

double SurvivalCurve::value(double t) const {
    if (!(t >= 0)) throw std::invalid_argument("survival: requires t >= 0");
    if (lambda_ == 0) return 1.0;
    if (at_fixed_point_) return std::exp(-fp_rate_ * t);
    switch (regime_) {
        case Regime::Sub: {
            const double psi = psi0_ - beta_ * gamma0_ * t;
            return std::exp(-0.5 * gamma_ * t) * sub_q(psi, lambda_, beta_) / q0_;
        }
        case Regime::Critical: {
            const double v = v0_ + 2.0 * gamma0_ * t;
            return std::exp(-2.0 * gamma0_ * t) * (1.0 + v * v) / one_plus_v0sq_;
        }
        case Regime::Super: {
            // exp(-gamma t / 2) Omega(theta0)/Omega(theta_t) in the exponential
            // cross-ratio variables; stable down to the fixed-point approach.
            const double rho = std::exp(-2.0 * beta_prime_ * gamma0_ * t);
            const double w1 = 1.0 - r0_ * rho;
            const double w2 = xp_ - xm_ * r0_ * rho;
            return std::exp(-2.0 * (lambda_ - beta_prime_) * gamma0_ * t) * a0_ *
                   (w1 * w1 + w2 * w2) / (4.0 * beta_prime_ * beta_prime_ * r0_);
        }
    }
    throw std::logic_error("survival: unreachable");
}

double SurvivalCurve::quantile(double u) const {
    if (!(u > 0.0) || u > 1.0)
        throw std::invalid_argument("first_click_quantile: requires 0 < u <= 1");
    if (lambda_ == 0)
        throw std::invalid_argument("first_click_quantile: no clicks for lambda = 0");
    if (u == 1.0) return 0.0;

    // Survival decays within an exponential envelope, so a bracket always exists.
    double lo = 0.0, hi = 1.0 / gamma0_;
    int guard = 0;
    while (value(hi) > u) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("quantile: bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = value(mid);
        if (std::abs(s - u) <= 1e-12) return mid;
        (s > u ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

double survival(double t, Angle theta0, const ModelParams& p) {
    return SurvivalCurve(theta0, p).value(t);
}

double first_click_quantile(double u, Angle theta0, const ModelParams& p) {
    return SurvivalCurve(theta0, p).quantile(u);
}

Angle bloch_angle(const WaveFunction& psi) {
    const WaveFunction n = psi.normalized();
    std::complex<double> a = n.a, b = n.b;
    if (std::abs(a) > 0) {
        const std::complex<double> phase = std::conj(a) / std::abs(a);
        a *= phase;
        b *= phase;
    }
    if (std::abs((b * std::conj(a)).real()) > 1e-9)
        throw std::invalid_argument("bloch_angle: state is not in the yz plane");
    return Angle(2.0 * std::atan2(b.imag(), a.real()));
}

}  // namespace qreset
