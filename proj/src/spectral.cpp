#include "qreset/spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qreset/detail/orbit.hpp"

namespace qreset {

using C = std::complex<double>;
namespace {
const C kI(0.0, 1.0);
}

// ---------------------------------------------------------------------------
// lambda < 1 basis

BiorthoBasis::BiorthoBasis(const ModelParams& p, int truncation) : params_(p), m_(truncation) {
    if (p.regime != Regime::Sub || p.lambda <= 0)
        throw std::invalid_argument("BiorthoBasis: requires 0 < lambda < 1");
    if (truncation < 8) throw std::invalid_argument("BiorthoBasis: truncation must be >= 8");
    beta_ = *p.beta;
    w4_ = std::sqrt(4.0 - p.lambda * p.lambda);
    norm4_ = std::sqrt(beta_ / kTwoPi);
    nu_p_ = C(-0.5 * p.lambda, 0.5 * w4_);
    nu_m_ = C(-0.5 * p.lambda, -0.5 * w4_);
}

BiorthoBasis build_basis_sub(const ModelParams& p, int truncation) {
    return BiorthoBasis(p, truncation);
}

std::complex<double> BiorthoBasis::nu_tower(int m) const {
    return C(-params_.lambda, m * beta_);
}

std::complex<double> BiorthoBasis::b_coeff(int m) const {
    const C nm = nu_tower(m);
    return nm * (nm - nu_m_) * (nm - nu_p_);
}

double BiorthoBasis::phase(double theta) const {
    return detail::phase_map(theta, params_.lambda, beta_);
}

std::complex<double> BiorthoBasis::f0(double theta) const {
    const double l = params_.lambda;
    const double a = 1.0 + l * std::sin(theta);
    const double ph = phase(theta);
    return l / (2.0 * std::sinh(kPi * l / beta_)) * std::exp(l * ph / beta_) / (a * a);
}

std::complex<double> BiorthoBasis::f_plus(double theta) const {
    const double a = 1.0 + params_.lambda * std::sin(theta);
    const double ph = phase(theta);
    return nu_m_ / (2.0 * std::sinh(kPi * nu_m_ / beta_)) * std::exp(-nu_m_ * ph / beta_) /
           (a * a);
}

std::complex<double> BiorthoBasis::f_minus(double theta) const {
    const double a = 1.0 + params_.lambda * std::sin(theta);
    const double ph = phase(theta);
    return nu_p_ / (2.0 * std::sinh(kPi * nu_p_ / beta_)) * std::exp(-nu_p_ * ph / beta_) /
           (a * a);
}

std::complex<double> BiorthoBasis::fbar(int m, double theta) const {
    const double a = 1.0 + params_.lambda * std::sin(theta);
    return norm4_ * std::exp(kI * (m * phase(theta))) / (a * a);
}

std::complex<double> BiorthoBasis::f_tower(int m, double theta) const {
    if (m >= -1 && m <= 1)
        throw std::invalid_argument("f_tower: labels -1, 0, 1 belong to the displaced trio");
    return fbar(m, theta);
}

std::complex<double> BiorthoBasis::g(int m, double theta) const {
    const double a = 1.0 + params_.lambda * std::sin(theta);
    return norm4_ * a * std::exp(kI * (m * phase(theta)));
}

std::complex<double> BiorthoBasis::h_plus(double theta) const {
    const double l = params_.lambda;
    return -kI * l * (std::cos(theta) - nu_m_ * std::sin(theta)) / w4_;
}

std::complex<double> BiorthoBasis::h_minus(double theta) const {
    const double l = params_.lambda;
    return kI * l * (std::cos(theta) - nu_p_ * std::sin(theta)) / w4_;
}

std::complex<double> BiorthoBasis::h_tower(int m, double theta) const {
    if (m >= -1 && m <= 1)
        throw std::invalid_argument("h_tower: labels -1, 0, 1 belong to the displaced trio");
    const double l = params_.lambda;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    C corr = 0.0;
    const double md = m;
    for (int k = -1; k <= 1; ++k) {
        const double geom = md * (md * md - 1.0) / ((md - k) * (k * k + 1.0));
        corr += geom * g(k, theta) / b_coeff(k);
    }
    return g(m, theta) + sign * l * l / b_coeff(-m) * corr;
}

int choose_truncation(const ModelParams& p, double tol) {
    if (p.regime != Regime::Sub || p.lambda <= 0)
        throw std::invalid_argument("choose_truncation: requires 0 < lambda < 1");
    BiorthoBasis basis(p, 8);
    const double l = p.lambda, b = *p.beta;
    const double sup_shape = 1.0 / ((1.0 - l) * (1.0 - l));
    const double norm_sq = b / kTwoPi;  // norm4^2, f_m carries one norm4 and the
                                        // series coefficient the other
    for (int m = 8; m < 200000; m *= 2) {
        // per-term bound and integral-comparison tail (terms fall off as m^-3)
        const double term = 2.0 * norm_sq * l / std::abs(basis.b_coeff(m)) * sup_shape;
        if (term * m / 2.0 < 0.5 * tol) {
            // refine downward within [m/2, m]
            int lo = std::max(8, m / 2), hi = m;
            while (lo < hi) {
                const int mid = (lo + hi) / 2;
                const double tm =
                    2.0 * norm_sq * l / std::abs(basis.b_coeff(mid)) * sup_shape * mid / 2.0;
                if (tm < 0.5 * tol)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return hi;
        }
    }
    throw std::runtime_error("choose_truncation: tolerance unreachable");
}

namespace {

C pair_quadrature(const std::function<C(double)>& left, const std::function<C(double)>& right) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double th) { return std::conj(left(th)) * right(th); };
    return gauss_kronrod<double, 61>::integrate(f, -kPi, kPi, 12, 1e-11);
}

}  // namespace

Eigen::MatrixXcd gram_check(const BiorthoBasis& basis, int mmax) {
    if (mmax < 2) throw std::invalid_argument("gram_check: mmax must be >= 2");
    std::vector<int> labels;  // 0 -> steady, +1/-1 -> nu+-, else tower m
    labels.push_back(0);
    labels.push_back(1);
    labels.push_back(-1);
    for (int m = -mmax; m <= -2; ++m) labels.push_back(m * 1000);
    for (int m = 2; m <= mmax; ++m) labels.push_back(m * 1000);

    auto hfun = [&](int lab) -> std::function<C(double)> {
        if (lab == 0) return [&](double th) { return basis.h0(th); };
        if (lab == 1) return [&](double th) { return basis.h_plus(th); };
        if (lab == -1) return [&](double th) { return basis.h_minus(th); };
        const int m = lab / 1000;
        return [&, m](double th) { return basis.h_tower(m, th); };
    };
    auto ffun = [&](int lab) -> std::function<C(double)> {
        if (lab == 0) return [&](double th) { return basis.f0(th); };
        if (lab == 1) return [&](double th) { return basis.f_plus(th); };
        if (lab == -1) return [&](double th) { return basis.f_minus(th); };
        const int m = lab / 1000;
        return [&, m](double th) { return basis.f_tower(m, th); };
    };

    const auto nlab = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXcd gram(nlab, nlab);
    for (Eigen::Index i = 0; i < nlab; ++i)
        for (Eigen::Index j = 0; j < nlab; ++j)
            gram(i, j) = pair_quadrature(hfun(labels[static_cast<std::size_t>(i)]),
                                         ffun(labels[static_cast<std::size_t>(j)]));
    return gram;
}

Eigen::MatrixXcd gram_check_free(const BiorthoBasis& basis, int mmax) {
    std::vector<int> ms;
    for (int m = -mmax; m <= mmax; ++m) ms.push_back(m);
    const auto nlab = static_cast<Eigen::Index>(ms.size());
    Eigen::MatrixXcd gram(nlab, nlab);
    for (Eigen::Index i = 0; i < nlab; ++i)
        for (Eigen::Index j = 0; j < nlab; ++j) {
            const int mi = ms[static_cast<std::size_t>(i)], mj = ms[static_cast<std::size_t>(j)];
            gram(i, j) = pair_quadrature([&](double th) { return basis.g(mi, th); },
                                         [&](double th) { return basis.fbar(mj, th); });
        }
    return gram;
}

// ---------------------------------------------------------------------------
// generator application on a grid

namespace {

// Fornberg weights for the first derivative on an arbitrary stencil.
std::vector<double> fd_weights(double x0, const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    // c[k][j]: weight of xs[j] for the k-th derivative, k in {0, 1}
    std::vector<std::vector<double>> c(2, std::vector<double>(xs.size(), 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                c[1][i] = c1 * (c[0][i - 1] - c5 * c[1][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            c[1][j] = (c4 * c[1][j] - c[0][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c[1];
}

}  // namespace

GridFunction apply_generator(const std::function<std::complex<double>(double)>& fn,
                             const ModelParams& p, GeneratorSide side, int n) {
    if (n < 16) throw std::invalid_argument("apply_generator: grid too small");
    GridFunction out;
    out.theta.resize(static_cast<std::size_t>(n));
    out.values.resize(static_cast<std::size_t>(n));
    const double h = kTwoPi / n;
    std::vector<C> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.theta[static_cast<std::size_t>(i)] = -kPi + (i + 0.5) * h;
        f[static_cast<std::size_t>(i)] = fn(out.theta[static_cast<std::size_t>(i)]);
    }
    const C h_pi = (side == GeneratorSide::Adjoint) ? fn(kPi) : C(0.0);

    constexpr int kStencil = 7;
    for (int i = 0; i < n; ++i) {
        int s0 = std::clamp(i - kStencil / 2, 0, n - kStencil);
        std::vector<double> xs(kStencil);
        for (int j = 0; j < kStencil; ++j) xs[static_cast<std::size_t>(j)] = out.theta[static_cast<std::size_t>(s0 + j)];
        const std::vector<double> w = fd_weights(out.theta[static_cast<std::size_t>(i)], xs);
        C deriv = 0.0;
        for (int j = 0; j < kStencil; ++j)
            deriv += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(s0 + j)];

        const double th = out.theta[static_cast<std::size_t>(i)];
        const double a = 1.0 + p.lambda * std::sin(th);
        if (side == GeneratorSide::Forward) {
            out.values[static_cast<std::size_t>(i)] =
                a * deriv + p.lambda * (2.0 * std::cos(th) - 1.0) * f[static_cast<std::size_t>(i)];
        } else {
            const double s = std::sin(0.5 * th);
            out.values[static_cast<std::size_t>(i)] =
                -a * deriv - 2.0 * p.lambda * s * s * (f[static_cast<std::size_t>(i)] - h_pi);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// spectral series, lambda < 1

double density_series_sub(Angle theta, double t, const BiorthoBasis& basis) {
    if (!(t > 0)) throw std::invalid_argument("density_series_sub: requires t > 0");
    const ModelParams& p = basis.params();
    const double th = theta.value();
    const double l = p.lambda, g0 = p.gamma0;
    const double beta = *p.beta, w4 = std::sqrt(4.0 - l * l);

    const double steady = basis.f0(th).real();
    const C pair_term = kI * l / w4 * std::exp(2.0 * basis.nu_plus() * g0 * t) * basis.f_plus(th);

    C tower = 0.0;
    for (int m = 2; m <= basis.truncation(); ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        tower += sign * l / basis.b_coeff(m) * basis.f_tower(m, th) *
                 std::exp(2.0 * basis.nu_tower(m) * g0 * t);
    }
    const double norm4 = std::sqrt(beta / kTwoPi);

    // Dirichlet-kernel correction from resumming the free tower; the companion
    // 2 pi delta is the atom and is never evaluated here.
    const double big_phi = basis.phase(th) - basis.phase(0.0) + 2.0 * g0 * t * beta;
    const double a = 1.0 + l * std::sin(th);
    const double kernel = (beta / kTwoPi) * std::exp(-2.0 * l * g0 * t) *
                          (1.0 + 2.0 * std::cos(big_phi)) / (a * a);

    return steady + 2.0 * pair_term.real() + 2.0 * (norm4 * tower).real() - kernel;
}

// ---------------------------------------------------------------------------
// lambda = 1

namespace {

void require_critical(const ModelParams& p, const char* who) {
    if (p.regime != Regime::Critical)
        throw std::invalid_argument(std::string(who) + ": requires lambda = 1");
}

}  // namespace

std::complex<double> coeff_ck(double k, double t, const ModelParams& p) {
    require_critical(p, "coeff_ck");
    const double g0 = p.gamma0;
    const C nu_p(-0.5, 0.5 * std::sqrt(3.0)), nu_m(-0.5, -0.5 * std::sqrt(3.0));
    const double s3 = std::sqrt(3.0);
    const C kk(k, 0.0);
    auto pole = [&](C shift_nu) {
        // (exp(-2 i g0 t (k - i nu)) - 1) / (k - i nu)
        const C z = kk - kI * shift_nu;
        return (std::exp(-2.0 * kI * g0 * t * z) - 1.0) / z;
    };
    const C term1 = std::exp(2.0 * kI * kk);
    const C term2 = kI * pole(C(-1.0, 0.0));
    const C term3 = nu_m / s3 * pole(nu_m);
    const C term4 = -nu_p / s3 * pole(nu_p);
    return (term1 + term2 + term3 + term4) / std::sqrt(kTwoPi);
}

CriticalSpectrum::CriticalSpectrum(const ModelParams& p) : params_(p) {
    require_critical(p, "CriticalSpectrum");
    nu_p_ = C(-0.5, 0.5 * std::sqrt(3.0));
    nu_m_ = C(-0.5, -0.5 * std::sqrt(3.0));
}

CriticalSpectrum point_spectrum_critical(const ModelParams& p) { return CriticalSpectrum(p); }

double CriticalSpectrum::x_coord(double theta) {
    if (theta == kPi || theta == -kPi) return 0.0;
    return -2.0 / (1.0 + std::tan(0.5 * theta));
}

double CriticalSpectrum::f0(double theta) const {
    if (!in_support(theta)) return 0.0;
    const double a = 1.0 + std::sin(theta);
    return std::exp(x_coord(theta)) / (a * a);
}

std::complex<double> CriticalSpectrum::f_plus(double theta) const {
    if (!in_support(theta)) return 0.0;
    const double a = 1.0 + std::sin(theta);
    return -nu_m_ * std::exp(-nu_m_ * x_coord(theta)) / (a * a);
}

std::complex<double> CriticalSpectrum::f_minus(double theta) const {
    if (!in_support(theta)) return 0.0;
    const double a = 1.0 + std::sin(theta);
    return -nu_p_ * std::exp(-nu_p_ * x_coord(theta)) / (a * a);
}

std::complex<double> CriticalSpectrum::h_plus(double theta) const {
    return -kI * (std::cos(theta) - nu_m_ * std::sin(theta)) / std::sqrt(3.0);
}

std::complex<double> CriticalSpectrum::h_minus(double theta) const {
    return kI * (std::cos(theta) - nu_p_ * std::sin(theta)) / std::sqrt(3.0);
}

std::complex<double> CriticalSpectrum::f_k(double k, double theta) const {
    const double a = 1.0 + std::sin(theta);
    return std::exp(kI * (k * x_coord(theta))) / (std::sqrt(kTwoPi) * a * a);
}

std::complex<double> CriticalSpectrum::g_k(double k, double theta) const {
    const double a = 1.0 + std::sin(theta);
    return a * std::exp(kI * (k * x_coord(theta))) / std::sqrt(kTwoPi);
}

std::complex<double> CriticalSpectrum::h_k(double k, double theta) const {
    if (k == 0.0) throw std::invalid_argument("h_k: k = 0 is the improper label, use h_nu0");
    const C numk(-1.0, -k);  // nu_{-k}
    const C corr = 1.0 / numk - ((numk + 1.0) * std::cos(theta) + std::sin(theta)) /
                                    (numk * numk + numk + 1.0);
    return g_k(k, theta) + corr / std::sqrt(kTwoPi);
}

std::complex<double> CriticalSpectrum::h_nu0(double theta) const {
    if (theta == kPi || theta == -kPi) return 1.0 / std::sqrt(kTwoPi);
    const double t2 = std::tan(0.5 * theta);
    return (1.0 + (2.0 / 3.0) * (3.0 * std::sin(theta) - std::cos(theta) + 5.0) / (1.0 + t2)) /
           std::sqrt(kTwoPi);
}

double reconstruct_density_critical(Angle theta, double t, const ModelParams& p, double tol) {
    require_critical(p, "reconstruct_density_critical");
    if (!(t > 0)) throw std::invalid_argument("reconstruct_density_critical: requires t > 0");
    const double th = theta.value();
    if (!CriticalSpectrum::in_support(th)) return 0.0;
    const double g0 = p.gamma0;
    const double x = CriticalSpectrum::x_coord(th);
    const double big_x = x + 2.0 * g0 * t;
    const C nu_p(-0.5, 0.5 * std::sqrt(3.0)), nu_m(-0.5, -0.5 * std::sqrt(3.0));
    const double s3 = std::sqrt(3.0);
    const double e2 = std::exp(-2.0 * g0 * t);
    const C ep = std::exp(2.0 * nu_p * g0 * t), em = std::exp(2.0 * nu_m * g0 * t);

    // d_k = sqrt(2 pi) e^{-2 g0 t} c_k(t) without the transported-atom term
    // e^{2ik}; every piece is bounded uniformly in k.
    auto dk = [&](double k) -> C {
        const C kk(k, 0.0);
        const C osc = std::exp(-2.0 * kI * g0 * t * kk);
        const C t2 = kI * (osc - e2) / (kk + kI);
        const C t3 = nu_m / s3 * (osc * ep - e2) / (kk - kI * nu_m);
        const C t4 = -nu_p / s3 * (osc * em - e2) / (kk - kI * nu_p);
        return t2 + t3 + t4;
    };

    using boost::math::quadrature::gauss_kronrod;
    const double a = 1.0 + std::sin(th);
    auto integral_to = [&](double cap) {
        auto f = [&](double k) { return (dk(k) * std::exp(kI * (k * big_x))).real(); };
        return gauss_kronrod<double, 61>::integrate(f, -cap, cap, 15, 1e-9) /
               (kTwoPi * a * a);
    };

    double cap = 256.0;
    double val = integral_to(cap);
    for (int it = 0; it < 6; ++it) {
        cap *= 2.0;
        const double next = integral_to(cap);
        if (std::abs(next - val) < 0.5 * tol) return next;
        val = next;
    }
    return val;
}

}  // namespace qreset
