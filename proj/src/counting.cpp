#include "qreset/counting.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qreset/noclick.hpp"

namespace qreset {

using C = std::complex<double>;

std::complex<double> g_hat(std::complex<double> sigma, double shift, const ModelParams& p) {
    if (p.regime != Regime::Sub)
        throw std::invalid_argument("g_hat: defined for lambda < 1 (see detail continuation)");
    if (sigma.real() <= -0.5 * p.gamma)
        throw std::invalid_argument("g_hat: sigma left of the abscissa of convergence");
    const double b = *p.beta, g0 = p.gamma0;
    const C mu = sigma + 0.5 * p.gamma;
    return 0.5 * (1.0 / mu - (mu * std::cos(2.0 * shift) + 2.0 * b * g0 * std::sin(2.0 * shift)) /
                                 (mu * mu + 4.0 * b * b * g0 * g0));
}

namespace {

void check_clicks(double t, std::span<const double> clicks) {
    double prev = 0.0;
    for (double c : clicks) {
        if (!(c > prev) || !(c <= t))
            throw std::invalid_argument("epd_joint: click times must be strictly ordered in (0, t]");
        prev = c;
    }
}

// exp(-gamma dt / 2) * sinh^2(beta' gamma0 dt + shift) without overflow.
double damped_sinh_sq(double dt, double shift, double bp, const ModelParams& p) {
    const double y = bp * p.gamma0 * dt + shift;
    const double d = 0.5 * p.gamma * dt;  // = 2 lambda gamma0 dt > 2 bp gamma0 dt
    const double ep = std::exp(y - 0.5 * d), em = std::exp(-y - 0.5 * d);
    const double s = 0.5 * (ep - em);
    return s * s;
}

}  // namespace

double epd_joint(double t, std::span<const double> clicks, const ModelParams& p) {
    check_clicks(t, clicks);
    const std::size_t n = clicks.size();
    if (n == 0) return survival(t, Angle(0.0), p);

    const double g0 = p.gamma0;
    std::vector<double> d(n + 1);
    d[0] = clicks[0];
    for (std::size_t k = 1; k < n; ++k) d[k] = clicks[k] - clicks[k - 1];
    d[n] = t - clicks[n - 1];

    switch (p.regime) {
        case Regime::Sub: {
            const double b = *p.beta, ph = *p.phi;
            double val = std::exp(-0.5 * p.gamma * t) / (b * b);
            const double rate_factor = p.gamma / (b * b);
            double s0 = std::sin(b * g0 * d[0]);
            val *= rate_factor * s0 * s0;
            for (std::size_t k = 1; k < n; ++k) {
                const double sk = std::sin(b * g0 * d[k] - ph);
                val *= rate_factor * sk * sk;
            }
            const double sn = std::sin(b * g0 * d[n]);
            const double snp = std::sin(b * g0 * d[n] - ph);
            // last product factor folded with 1/sin^2(theta_t / 2)
            val *= sn * sn + snp * snp;
            return val;
        }
        case Regime::Critical: {
            double val = std::exp(-0.5 * p.gamma * t);
            val *= p.gamma * (g0 * d[0]) * (g0 * d[0]);
            for (std::size_t k = 1; k < n; ++k) {
                const double f = 1.0 - g0 * d[k];
                val *= p.gamma * f * f;
            }
            const double vn = -1.0 + 2.0 * g0 * d[n];
            val *= 0.5 * (1.0 + vn * vn);
            return val;
        }
        case Regime::Super: {
            const double bp = *p.beta_prime, php = *p.phi_prime;
            // exponential damping split leg by leg to keep every factor finite
            double val = 1.0 / (bp * bp);
            const double rate_factor = p.gamma / (bp * bp);
            val *= rate_factor * damped_sinh_sq(d[0], 0.0, bp, p);
            for (std::size_t k = 1; k < n; ++k)
                val *= rate_factor * damped_sinh_sq(d[k], -php, bp, p);
            val *= damped_sinh_sq(d[n], 0.0, bp, p) + damped_sinh_sq(d[n], -php, bp, p);
            return val;
        }
    }
    throw std::logic_error("epd_joint: unreachable");
}

double epd_joint_product(double t, std::span<const double> clicks, const ModelParams& p) {
    check_clicks(t, clicks);
    if (clicks.empty()) return survival(t, Angle(0.0), p);

    double val = 1.0;
    double leg_start_time = 0.0;
    Angle leg_start(0.0);
    for (std::size_t k = 0; k < clicks.size(); ++k) {
        const double leg = clicks[k] - leg_start_time;
        const Angle pre_click = flow(leg, 0.0, leg_start, p);
        val *= survival(leg, leg_start, p) * click_rate(pre_click, p);
        leg_start_time = clicks[k];
        leg_start = Angle(kPi);
    }
    val *= survival(t - leg_start_time, leg_start, p);
    return val;
}

namespace {

// Iterated fixed-order Gauss-Legendre over the ordered simplex. The EPD is
// entire in each click time, so raising the order until two levels agree is
// both cheap and reliable; adaptive bisection nested n deep is not.
template <unsigned Order>
double simplex_gauss(int level, double upper, double t, std::vector<double>& clicks,
                     const ModelParams& p) {
    using G = boost::math::quadrature::gauss<double, Order>;
    auto f = [&](double tk) {
        clicks[static_cast<std::size_t>(level)] = tk;
        if (level == 0) return epd_joint(t, clicks, p);
        return simplex_gauss<Order>(level - 1, tk, t, clicks, p);
    };
    return G::integrate(f, 0.0, upper);
}

}  // namespace

double count_prob(int n, double t, const ModelParams& p, int n_max) {
    if (n < 0) throw std::invalid_argument("count_prob: n must be >= 0");
    if (n > n_max) throw std::invalid_argument("count_prob: n exceeds n_max");
    if (n == 0) return survival(t, Angle(0.0), p);
    std::vector<double> clicks(static_cast<std::size_t>(n));
    const double tol = 1e-8;
    const double v1 = simplex_gauss<24>(n - 1, t, t, clicks, p);
    const double v2 = simplex_gauss<36>(n - 1, t, t, clicks, p);
    if (std::abs(v2 - v1) <= tol) return v2;
    const double v3 = simplex_gauss<54>(n - 1, t, t, clicks, p);
    if (std::abs(v3 - v2) <= tol) return v3;
    throw std::runtime_error("count_prob: simplex quadrature did not converge");
}

namespace detail {

CubicRoots mgf_denominator_roots_c(std::complex<double> s, const ModelParams& p) {
    const double g = p.gamma, g0 = p.gamma0, l = p.lambda;
    const C es = std::exp(-s);
    // monic cubic in mu = sigma + gamma/2:
    // mu^3 - g es mu^2 + (4 (1-l^2) g0^2 + g^2/2 es) mu - 2 g0^2 g es
    const C c2 = -g * es;
    const C c1 = 4.0 * (1.0 - l * l) * g0 * g0 + 0.5 * g * g * es;
    const C c0 = -2.0 * g0 * g0 * g * es;

    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(0, 2) = -c0;
    companion(1, 2) = -c1;
    companion(2, 2) = -c2;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es_solver(companion, false);

    CubicRoots out{};
    double scale = p.gamma0;
    for (int i = 0; i < 3; ++i) {
        out.sigma[i] = es_solver.eigenvalues()(i) - 0.5 * g;
        scale = std::max(scale, std::abs(out.sigma[i]));
    }
    std::sort(out.sigma.begin(), out.sigma.end(),
              [](const C& a, const C& b) { return a.real() != b.real() ? a.real() > b.real()
                                                                       : a.imag() < b.imag(); });
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            dmin = std::min(dmin, std::abs(out.sigma[i] - out.sigma[j]));
    // an exact double root surfaces as an O(sqrt(eps)) ~ 1e-8 split of the
    // computed eigenvalues, so the detection radius sits above that
    out.confluent = dmin < 1e-7 * scale;
    return out;
}

namespace {

// Numerator of the Laplace-domain MGF, mu^2 + (gamma/2) mu + 4 gamma0^2
// - gamma e^{-s} mu. At s = 0 it collapses onto the quadratic factor of the
// denominator, so the transform is exactly 1/sigma there; as s -> infinity it
// leaves the survival transform. (Rebuilt from the g_hat resummation; the
// quoted closed form is its s = 0 value.)
C mgf_numerator(const C& sigma, const C& es, const ModelParams& p) {
    const C mu = sigma + 0.5 * p.gamma;
    return mu * mu + 0.5 * p.gamma * mu + 4.0 * p.gamma0 * p.gamma0 - p.gamma * es * mu;
}

C mgf_numerator_deriv(const C& sigma, const C& es, const ModelParams& p) {
    const C mu = sigma + 0.5 * p.gamma;
    return 2.0 * mu + 0.5 * p.gamma - p.gamma * es;
}

}  // namespace

std::complex<double> mgf_general(std::complex<double> s, double t, const ModelParams& p) {
    if (p.lambda == 0) return 1.0;  // N_t identically 0
    CubicRoots r = mgf_denominator_roots_c(s, p);
    const C es = std::exp(-s);
    auto N = [&](const C& x) { return mgf_numerator(x, es, p); };

    if (!r.confluent) {
        C sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            const C si = r.sigma[i];
            C denom = 1.0;
            for (int j = 0; j < 3; ++j)
                if (j != i) denom *= si - r.sigma[j];
            sum += N(si) * std::exp(si * t) / denom;
        }
        return sum;
    }

    // repeated roots: pick the closest pair as the double root
    int a = 0, b = 1;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double dij = std::abs(r.sigma[i] - r.sigma[j]);
            if (dij < dmin) { dmin = dij; a = i; b = j; }
        }
    const int c = 3 - a - b;
    const C sd = 0.5 * (r.sigma[a] + r.sigma[b]);
    const C s1 = r.sigma[c];
    const double scale = std::max({std::abs(sd), std::abs(s1), p.gamma0});
    if (std::abs(sd - s1) < 1e-7 * scale) {
        // triple root: residue of N(z) e^{zt} / (z - sd)^3
        const C st = (sd + sd + s1) / 3.0;
        return std::exp(st * t) *
               (0.5 * t * t * N(st) + t * mgf_numerator_deriv(st, es, p) + 1.0);
    }
    const C d1 = s1 - sd;
    const C term1 = N(s1) * std::exp(s1 * t) / (d1 * d1);
    const C term2 = std::exp(sd * t) * ((mgf_numerator_deriv(sd, es, p) + t * N(sd)) / (sd - s1) -
                                        N(sd) / ((sd - s1) * (sd - s1)));
    return term1 + term2;
}

std::complex<double> mgf_laplace_resummed(std::complex<double> sigma, double s,
                                          const ModelParams& p) {
    if (p.regime == Regime::Critical)
        throw std::invalid_argument("mgf_laplace_resummed: beta continuation singular at lambda = 1");
    const double g = p.gamma, g0 = p.gamma0, l = p.lambda;
    const C beta = std::sqrt(C(1.0 - l * l, 0.0));
    const C phi = std::atan(beta / l);
    const C beta2 = beta * beta;
    const C mu = sigma + 0.5 * g;
    auto ghat = [&](C shift) {
        return 0.5 * (1.0 / mu - (mu * std::cos(2.0 * shift) + 2.0 * beta * g0 * std::sin(2.0 * shift)) /
                                     (mu * mu + 4.0 * beta2 * g0 * g0));
    };
    const C g0h = ghat(0.0), gph = ghat(phi), gmh = ghat(-phi);
    const C w = g * std::exp(-s) / beta2;
    return (gmh + g0h + w * g0h * (g0h + gph) / (1.0 - w * gph)) / beta2;
}

}  // namespace detail

CubicRoots mgf_denominator_roots(double s, const ModelParams& p) {
    return detail::mgf_denominator_roots_c(C(s, 0.0), p);
}

std::complex<double> mgf_laplace(std::complex<double> sigma, double s, const ModelParams& p) {
    if (!(sigma.real() > 0)) throw std::invalid_argument("mgf_laplace: requires Re(sigma) > 0");
    if (s < 0) throw std::invalid_argument("mgf_laplace: requires s >= 0");
    const double g = p.gamma, g0 = p.gamma0, l = p.lambda;
    const C mu = sigma + 0.5 * g;
    const C num = detail::mgf_numerator(sigma, std::exp(C(-s, 0.0)), p);
    const C den = mu * (mu * mu + 4.0 * (1.0 - l * l) * g0 * g0) -
                  g * std::exp(-s) * (mu * mu - 0.5 * g * mu + 2.0 * g0 * g0);
    const double scale = std::max({std::abs(mu), g0, g});
    if (std::abs(den) < 1e-12 * scale * scale * scale)
        throw std::domain_error("mgf_laplace: sigma too close to a denominator zero");
    return num / den;
}

double mgf(double s, double t, const ModelParams& p) {
    if (s < 0) throw std::invalid_argument("mgf: requires s >= 0");
    if (!(t >= 0)) throw std::invalid_argument("mgf: requires t >= 0");
    return detail::mgf_general(C(s, 0.0), t, p).real();
}

std::vector<double> count_distribution(double t, const ModelParams& p, int n_upto) {
    if (n_upto < 0) throw std::invalid_argument("count_distribution: n_upto must be >= 0");
    int m = 64;
    while (m < 4 * (n_upto + 1)) m *= 2;
    // P_n = (1/m) sum_j E[z^N] z^{-n} on the unit circle z = exp(i u_j);
    // the trapezoid aliasing error is the (n + m)-click tail, negligible here.
    std::vector<C> pgf(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double u = kTwoPi * j / m;
        pgf[j] = detail::mgf_general(C(0.0, -u), t, p);
    }
    std::vector<double> out(static_cast<std::size_t>(n_upto) + 1);
    for (int n = 0; n <= n_upto; ++n) {
        C acc = 0.0;
        for (int j = 0; j < m; ++j) {
            const double u = kTwoPi * j / m;
            acc += pgf[j] * std::exp(C(0.0, -n * u));
        }
        out[n] = std::max(0.0, acc.real() / m);
    }
    return out;
}

double mean_count(double t, const ModelParams& p) {
    if (!(t >= 0)) throw std::invalid_argument("mean_count: requires t >= 0");
    if (p.lambda == 0) return 0.0;
    const double g0 = p.gamma0, l = p.lambda;
    switch (p.counting_regime) {
        case CountingRegime::Oscillatory: {
            const double w = *p.omega, vp = *p.varphi;
            return 2.0 * l * g0 * t +
                   l * l * (-1.0 + std::exp(-l * g0 * t) * std::sin(w * t + vp) / std::sin(vp));
        }
        case CountingRegime::Confluent:
            return 4.0 * (-1.0 + g0 * t + std::exp(-2.0 * g0 * t) * (1.0 + g0 * t));
        case CountingRegime::Overdamped: {
            const double w = *p.omega_prime, vp = *p.varphi_prime;
            // e^{-l g0 t} sinh(w t + vp) split into decaying exponentials
            const double ep = std::exp((w - l * g0) * t + vp);
            const double em = std::exp(-(w + l * g0) * t - vp);
            return 2.0 * l * g0 * t + l * l * (-1.0 + 0.5 * (ep - em) / std::sinh(vp));
        }
    }
    throw std::logic_error("mean_count: unreachable");
}

double mean_count_fd(double t, const ModelParams& p) {
    const double h = 1e-6;
    auto diff = [&](double step) {
        const double ep = detail::mgf_general(C(step, 0.0), t, p).real();
        const double em = detail::mgf_general(C(-step, 0.0), t, p).real();
        return (em - ep) / (2.0 * step);
    };
    const double d1 = diff(h), d2 = diff(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

double mean_rate(double t, const ModelParams& p) {
    if (!(t >= 0)) throw std::invalid_argument("mean_rate: requires t >= 0");
    if (p.lambda == 0) return 0.0;
    const double g = p.gamma, g0 = p.gamma0, l = p.lambda;
    switch (p.counting_regime) {
        case CountingRegime::Oscillatory: {
            const double w = *p.omega;
            return g * (0.5 - std::exp(-l * g0 * t) *
                                  (0.5 * std::cos(w * t) + 0.5 * l * g0 / w * std::sin(w * t)));
        }
        case CountingRegime::Confluent:
            return 0.5 * g * (1.0 - std::exp(-2.0 * g0 * t) * (1.0 + 2.0 * g0 * t));
        case CountingRegime::Overdamped: {
            const double w = *p.omega_prime, c = l * g0 / w;
            const double ep = std::exp((w - l * g0) * t), em = std::exp(-(w + l * g0) * t);
            return g * (0.5 - (0.25 * (1.0 + c) * ep + 0.25 * (1.0 - c) * em));
        }
    }
    throw std::logic_error("mean_rate: unreachable");
}

}  // namespace qreset
