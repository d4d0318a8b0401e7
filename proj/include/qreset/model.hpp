#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qreset {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into (-pi, pi]; -pi and pi are identified, we pick +pi.
inline double wrap_angle(double x) {
    double r = std::remainder(x, kTwoPi);
    return (r <= -kPi) ? kPi : r;
}

/// Angle on the circle, always stored wrapped into (-pi, pi].
class Angle {
public:
    explicit Angle(double raw) : value_(wrap_angle(raw)) {
        if (!std::isfinite(raw)) throw std::invalid_argument("Angle: non-finite value");
    }
    double value() const { return value_; }

private:
    double value_;
};

/// Drift regime of the no-click flow, split at lambda = 1 (saddle-node bifurcation).
enum class Regime { Sub, Critical, Super };

/// Counting-statistics regime, split at lambda = 2 (mean-count crossover).
enum class CountingRegime { Oscillatory, Confluent, Overdamped };

/// Physical rates plus every regime constant derived from them.
/// Constants that do not exist in the active regime are absent, never NaN.
struct ModelParams {
    double gamma0 = 0;  ///< Rabi frequency, > 0
    double gamma = 0;   ///< measurement coupling, >= 0
    double lambda = 0;  ///< gamma / (4 gamma0)

    Regime regime = Regime::Sub;
    CountingRegime counting_regime = CountingRegime::Oscillatory;

    std::optional<double> beta;          ///< sqrt(1 - lambda^2), lambda < 1
    std::optional<double> beta_prime;    ///< sqrt(lambda^2 - 1), lambda > 1
    std::optional<double> phi;           ///< tan(phi) = beta/lambda, in (0, pi/2]
    std::optional<double> phi_prime;     ///< tanh(phi') = beta'/lambda
    std::optional<double> omega;         ///< gamma0 sqrt(4 - lambda^2), lambda < 2
    std::optional<double> omega_prime;   ///< gamma0 sqrt(lambda^2 - 4), lambda > 2
    std::optional<double> varphi;        ///< tan = lambda sqrt(4-l^2)/(l^2-2)
    std::optional<double> varphi_prime;  ///< tanh = lambda sqrt(l^2-4)/(l^2-2)
};

/// Builds ModelParams from the two physical rates. Rejects non-finite or
/// out-of-range inputs. Inputs within 1e-9 of a regime boundary are snapped
/// onto the boundary branch to avoid cancellation in beta / omega.
ModelParams make_params(double gamma0, double gamma);

/// Convenience: gamma = 4 * gamma0 * lambda.
ModelParams make_params_lambda(double gamma0, double lambda);

/// Angular velocity of the no-click flow, Omega(theta) = -2 gamma0 (1 + lambda sin theta).
double drift(Angle theta, const ModelParams& p);

/// d Omega / d theta.
double drift_derivative(Angle theta, const ModelParams& p);

/// Detector click intensity alpha(theta) = gamma sin^2(theta/2).
double click_rate(Angle theta, const ModelParams& p);

/// Fixed points of the drift for lambda >= 1. `degenerate` marks the
/// lambda = 1 saddle-node point where stable and unstable coincide at -pi/2.
struct FixedPoints {
    double stable;    ///< theta_+ = -asin(1/lambda)
    double unstable;  ///< theta_- = pi - theta_+, wrapped
    bool degenerate;
};

/// Empty for lambda < 1.
std::optional<FixedPoints> fixed_points(const ModelParams& p);

}  // namespace qreset
