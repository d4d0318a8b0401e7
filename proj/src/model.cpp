#include "qreset/model.hpp"

namespace qreset {

namespace {
// Relative snap width for the lambda = 1 and lambda = 2 boundaries.
constexpr double kBoundaryGuard = 1e-9;
}

ModelParams make_params(double gamma0, double gamma) {
    if (!std::isfinite(gamma0) || !std::isfinite(gamma))
        throw std::invalid_argument("make_params: non-finite rate");
    if (gamma0 <= 0) throw std::invalid_argument("make_params: gamma0 must be positive");
    if (gamma < 0) throw std::invalid_argument("make_params: gamma must be non-negative");

    ModelParams p;
    p.gamma0 = gamma0;
    p.gamma = gamma;
    p.lambda = gamma / (4.0 * gamma0);
    const double l = p.lambda;

    if (std::abs(l - 1.0) < kBoundaryGuard) {
        p.regime = Regime::Critical;
    } else if (l < 1.0) {
        p.regime = Regime::Sub;
        const double b = std::sqrt((1.0 - l) * (1.0 + l));
        p.beta = b;
        p.phi = std::atan2(b, l);  // branch (0, pi/2], so S(0) = 1
    } else {
        p.regime = Regime::Super;
        const double bp = std::sqrt((l - 1.0) * (l + 1.0));
        p.beta_prime = bp;
        p.phi_prime = std::atanh(bp / l);
    }

    if (std::abs(l - 2.0) < kBoundaryGuard) {
        p.counting_regime = CountingRegime::Confluent;
    } else if (l < 2.0) {
        p.counting_regime = CountingRegime::Oscillatory;
        p.omega = gamma0 * std::sqrt((2.0 - l) * (2.0 + l));
        p.varphi = std::atan2(l * std::sqrt((2.0 - l) * (2.0 + l)), l * l - 2.0);
    } else {
        p.counting_regime = CountingRegime::Overdamped;
        const double w = std::sqrt((l - 2.0) * (l + 2.0));
        p.omega_prime = gamma0 * w;
        p.varphi_prime = std::atanh(l * w / (l * l - 2.0));
    }
    return p;
}

ModelParams make_params_lambda(double gamma0, double lambda) {
    if (!std::isfinite(lambda) || lambda < 0)
        throw std::invalid_argument("make_params_lambda: lambda must be non-negative");
    return make_params(gamma0, 4.0 * gamma0 * lambda);
}

double drift(Angle theta, const ModelParams& p) {
    return -2.0 * p.gamma0 * (1.0 + p.lambda * std::sin(theta.value()));
}

double drift_derivative(Angle theta, const ModelParams& p) {
    return -2.0 * p.gamma0 * p.lambda * std::cos(theta.value());
}

double click_rate(Angle theta, const ModelParams& p) {
    const double s = std::sin(0.5 * theta.value());
    return p.gamma * s * s;
}

std::optional<FixedPoints> fixed_points(const ModelParams& p) {
    if (p.regime == Regime::Sub) return std::nullopt;
    if (p.regime == Regime::Critical)
        return FixedPoints{-kPi / 2.0, -kPi / 2.0, true};
    const double tp = -std::asin(1.0 / p.lambda);
    return FixedPoints{tp, wrap_angle(kPi - tp), false};
}

}  // namespace qreset
