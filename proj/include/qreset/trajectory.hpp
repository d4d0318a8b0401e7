#pragma once

#include <cstdint>
#include <vector>

#include "qreset/model.hpp"

namespace qreset {

enum class Scheme { Euler, EventDriven };

struct TrajectoryConfig {
    double t_max = 1.0;
    Scheme scheme = Scheme::EventDriven;
    double dt = 1e-3;  ///< Euler step; must satisfy dt * gamma <= 0.1
    std::uint64_t seed = 0;
    std::vector<double> record_grid;  ///< sorted times in [0, t_max]
};

/// One realization of the drift + reset process.
struct Trajectory {
    std::vector<double> click_times;                    ///< strictly increasing
    std::vector<std::pair<double, double>> snapshots;   ///< (time, theta) on record_grid
    /// N_t = number of clicks <= t.
    int count_at(double t) const;
};

/// Simulates one trajectory. EventDriven draws each inter-click time by
/// inverting the exact no-click survival (exact in distribution); Euler
/// advances theta by Omega dt and jumps to pi with probability alpha dt.
/// Deterministic given (seed, scheme, params).
Trajectory simulate(Angle theta0, const TrajectoryConfig& config, const ModelParams& p);

/// Order-independent integer aggregates of an ensemble, per record time.
/// A trajectory belongs to the atom at time t iff it has zero clicks by t;
/// all such trajectories sit at the same deterministic no-click angle.
struct EnsembleStats {
    std::uint64_t n_traj = 0;
    Scheme scheme = Scheme::EventDriven;
    std::vector<double> record_grid;
    std::vector<double> bin_edges;                      ///< uniform over (-pi, pi]
    std::vector<std::uint64_t> atom_count;              ///< zero-click count per time
    std::vector<double> noclick_angle;                  ///< deterministic atom angle per time
    std::vector<std::vector<std::uint64_t>> bin_counts; ///< [time][bin], clicked trajectories
    std::vector<std::uint64_t> count_sum;               ///< sum of N_t per time
    std::vector<std::uint64_t> count_sq_sum;            ///< sum of N_t^2 per time
    /// [time][n]: trajectories with N_t = n; the last slot collects overflow.
    std::vector<std::vector<std::uint64_t>> count_hist;
    static constexpr std::size_t kCountHistMax = 64;
};

/// Runs n independent trajectories with per-trajectory seeds derived from
/// (config.seed, index). Results are a pure function of the arguments,
/// independent of worker count (integer accumulation only).
EnsembleStats ensemble(Angle theta0, std::size_t n, const TrajectoryConfig& config,
                       const ModelParams& p, std::size_t bins = 250,
                       unsigned workers = 0);

/// Histogram-with-atom estimate at one record time. The atom is the
/// zero-click subpopulation; its position is pinned to the analytically
/// transported point passed by the caller, with the scheme's measured angle
/// kept alongside.
struct HistogramSnapshot {
    double t = 0;
    double atom_position = 0;           ///< predicted (analytic) transport point
    double atom_position_measured = 0;  ///< deterministic no-click angle of the scheme
    double atom_mass = 0;
    double atom_mass_se = 0;
    std::vector<double> bin_edges;
    std::vector<double> bin_mass;       ///< continuous part, sums to 1 - atom_mass
    std::vector<std::uint64_t> bin_counts;
    std::uint64_t n = 0;
};

HistogramSnapshot histogram_with_atom(const EnsembleStats& stats, double t, Angle predicted_atom);

struct MeanCountSeries {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> std_error;
};

MeanCountSeries empirical_mean_count(const EnsembleStats& stats);

}  // namespace qreset
