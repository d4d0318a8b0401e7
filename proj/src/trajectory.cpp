#include "qreset/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qreset/noclick.hpp"
#include "qreset/rng.hpp"

namespace qreset {

namespace {

void validate_config(const TrajectoryConfig& c, const ModelParams& p) {
    if (!(c.t_max >= 0)) throw std::invalid_argument("simulate: t_max must be >= 0");
    if (c.scheme == Scheme::Euler) {
        if (!(c.dt > 0)) throw std::invalid_argument("simulate: dt must be positive");
        if (c.dt * p.gamma > 0.1)
            throw std::invalid_argument("simulate: dt * gamma > 0.1 (probability overflow)");
    }
    double prev = 0.0;
    for (double g : c.record_grid) {
        if (!(g >= prev) || g > c.t_max)
            throw std::invalid_argument("simulate: record_grid must be sorted within [0, t_max]");
        prev = g;
    }
}

// Visitor-based core so the ensemble can aggregate without storing paths.
// on_state(time_index, theta, n_clicks) fires once per record time.
template <typename OnClick, typename OnState>
void run_event_driven(Angle theta0, const TrajectoryConfig& c, const ModelParams& p, Rng& rng,
                      const SurvivalCurve& curve0, const SurvivalCurve& curve_pi,
                      OnClick&& on_click, OnState&& on_state) {
    double leg_start_time = 0.0;
    Angle leg_start = theta0;
    std::size_t gi = 0;
    int n_clicks = 0;
    const bool no_clicks_ever = p.lambda == 0;
    while (true) {
        double t_click = std::numeric_limits<double>::infinity();
        if (!no_clicks_ever) {
            const SurvivalCurve& curve = (n_clicks == 0) ? curve0 : curve_pi;
            t_click = leg_start_time + curve.quantile(rng.uniform01());
        }
        const double leg_end = std::min(t_click, c.t_max);
        while (gi < c.record_grid.size() && c.record_grid[gi] < leg_end) {
            const double tg = c.record_grid[gi];
            on_state(gi, flow(tg - leg_start_time, 0.0, leg_start, p), n_clicks);
            ++gi;
        }
        if (t_click > c.t_max) break;
        ++n_clicks;
        on_click(t_click);
        leg_start_time = t_click;
        leg_start = Angle(kPi);
    }
    // grid times at or after the final event boundary (== t_max, or == a click)
    while (gi < c.record_grid.size()) {
        const double tg = c.record_grid[gi];
        on_state(gi, flow(tg - leg_start_time, 0.0, leg_start, p), n_clicks);
        ++gi;
    }
}

template <typename OnClick, typename OnState>
void run_euler(Angle theta0, const TrajectoryConfig& c, const ModelParams& p, Rng& rng,
               OnClick&& on_click, OnState&& on_state, bool suppress_clicks = false) {
    double t = 0.0;
    double theta = theta0.value();
    int n_clicks = 0;
    std::size_t gi = 0;
    while (gi < c.record_grid.size() && c.record_grid[gi] <= t) {
        on_state(gi, Angle(theta), n_clicks);
        ++gi;
    }
    while (t < c.t_max) {
        double stop = std::min(t + c.dt, c.t_max);
        if (gi < c.record_grid.size()) stop = std::min(stop, c.record_grid[gi]);
        const double h = stop - t;
        if (h > 0) {
            const double a = click_rate(Angle(theta), p);
            const double u = suppress_clicks ? 2.0 : rng.uniform01();
            if (u <= a * h) {
                theta = kPi;
                ++n_clicks;
                on_click(stop);
            } else {
                theta = wrap_angle(theta + drift(Angle(theta), p) * h);
            }
        }
        t = stop;
        while (gi < c.record_grid.size() && c.record_grid[gi] <= t) {
            on_state(gi, Angle(theta), n_clicks);
            ++gi;
        }
    }
}

}  // namespace

int Trajectory::count_at(double t) const {
    return static_cast<int>(std::upper_bound(click_times.begin(), click_times.end(), t) -
                            click_times.begin());
}

Trajectory simulate(Angle theta0, const TrajectoryConfig& config, const ModelParams& p) {
    validate_config(config, p);
    Trajectory out;
    Rng rng(config.seed);
    auto on_click = [&](double tc) { out.click_times.push_back(tc); };
    auto on_state = [&](std::size_t gi, Angle th, int) {
        out.snapshots.emplace_back(config.record_grid[gi], th.value());
    };
    if (config.scheme == Scheme::EventDriven) {
        const SurvivalCurve curve0(theta0, p), curve_pi(Angle(kPi), p);
        run_event_driven(theta0, config, p, rng, curve0, curve_pi, on_click, on_state);
    } else {
        run_euler(theta0, config, p, rng, on_click, on_state);
    }
    return out;
}

namespace {

struct Partial {
    std::vector<std::uint64_t> atom_count;
    std::vector<std::vector<std::uint64_t>> bin_counts;
    std::vector<std::uint64_t> count_sum, count_sq_sum;
    std::vector<std::vector<std::uint64_t>> count_hist;

    Partial(std::size_t n_times, std::size_t n_bins)
        : atom_count(n_times, 0),
          bin_counts(n_times, std::vector<std::uint64_t>(n_bins, 0)),
          count_sum(n_times, 0),
          count_sq_sum(n_times, 0),
          count_hist(n_times, std::vector<std::uint64_t>(EnsembleStats::kCountHistMax + 1, 0)) {}

    void merge(const Partial& o) {
        for (std::size_t i = 0; i < atom_count.size(); ++i) {
            atom_count[i] += o.atom_count[i];
            count_sum[i] += o.count_sum[i];
            count_sq_sum[i] += o.count_sq_sum[i];
            for (std::size_t b = 0; b < bin_counts[i].size(); ++b)
                bin_counts[i][b] += o.bin_counts[i][b];
            for (std::size_t b = 0; b < count_hist[i].size(); ++b)
                count_hist[i][b] += o.count_hist[i][b];
        }
    }
};

std::size_t bin_index(double theta, std::size_t nbins) {
    const double w = kTwoPi / static_cast<double>(nbins);
    const auto idx = static_cast<long>(std::floor((theta + kPi) / w));
    return static_cast<std::size_t>(std::clamp<long>(idx, 0, static_cast<long>(nbins) - 1));
}

}  // namespace

EnsembleStats ensemble(Angle theta0, std::size_t n, const TrajectoryConfig& config,
                       const ModelParams& p, std::size_t bins, unsigned workers) {
    if (n < 1) throw std::invalid_argument("ensemble: n must be >= 1");
    validate_config(config, p);
    const std::size_t nt = config.record_grid.size();

    EnsembleStats stats;
    stats.n_traj = n;
    stats.scheme = config.scheme;
    stats.record_grid = config.record_grid;
    stats.bin_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        stats.bin_edges[b] = -kPi + kTwoPi * static_cast<double>(b) / static_cast<double>(bins);

    // deterministic zero-click angle per record time
    stats.noclick_angle.resize(nt);
    if (config.scheme == Scheme::EventDriven) {
        for (std::size_t i = 0; i < nt; ++i)
            stats.noclick_angle[i] = flow(config.record_grid[i], 0.0, theta0, p).value();
    } else {
        Rng dummy(0);
        std::vector<double>& angles = stats.noclick_angle;
        run_euler(
            theta0, config, p, dummy, [](double) {},
            [&](std::size_t gi, Angle th, int) { angles[gi] = th.value(); },
            /*suppress_clicks=*/true);
    }

    unsigned nw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    nw = static_cast<unsigned>(std::min<std::size_t>(nw, n));

    const SurvivalCurve curve0(theta0, p), curve_pi(Angle(kPi), p);
    std::vector<Partial> partials(nw, Partial(nt, bins));

    auto work = [&](unsigned wi, std::size_t lo, std::size_t hi) {
        Partial& acc = partials[wi];
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng(derive_seed(config.seed, i));
            auto on_state = [&](std::size_t gi, Angle th, int nc) {
                const auto c = static_cast<std::uint64_t>(nc);
                acc.count_sum[gi] += c;
                acc.count_sq_sum[gi] += c * c;
                acc.count_hist[gi][std::min<std::size_t>(static_cast<std::size_t>(nc),
                                                         EnsembleStats::kCountHistMax)] += 1;
                if (nc == 0)
                    acc.atom_count[gi] += 1;
                else
                    acc.bin_counts[gi][bin_index(th.value(), bins)] += 1;
            };
            if (config.scheme == Scheme::EventDriven)
                run_event_driven(theta0, config, p, rng, curve0, curve_pi, [](double) {}, on_state);
            else
                run_euler(theta0, config, p, rng, [](double) {}, on_state);
        }
    };

    if (nw == 1) {
        work(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + nw - 1) / nw;
        for (unsigned wi = 0; wi < nw; ++wi) {
            const std::size_t lo = wi * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, wi, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    Partial total(nt, bins);
    for (const auto& pt : partials) total.merge(pt);
    stats.atom_count = std::move(total.atom_count);
    stats.count_sum = std::move(total.count_sum);
    stats.count_sq_sum = std::move(total.count_sq_sum);
    stats.bin_counts = std::move(total.bin_counts);
    stats.count_hist = std::move(total.count_hist);
    return stats;
}

HistogramSnapshot histogram_with_atom(const EnsembleStats& stats, double t, Angle predicted_atom) {
    std::size_t gi = stats.record_grid.size();
    for (std::size_t i = 0; i < stats.record_grid.size(); ++i)
        if (std::abs(stats.record_grid[i] - t) <= 1e-12 * (1.0 + std::abs(t))) {
            gi = i;
            break;
        }
    if (gi == stats.record_grid.size())
        throw std::invalid_argument("histogram_with_atom: t is not a record time");

    HistogramSnapshot snap;
    snap.t = stats.record_grid[gi];
    snap.n = stats.n_traj;
    snap.atom_position = predicted_atom.value();
    snap.atom_position_measured = stats.noclick_angle[gi];
    const double n = static_cast<double>(stats.n_traj);
    const double pa = static_cast<double>(stats.atom_count[gi]) / n;
    snap.atom_mass = pa;
    snap.atom_mass_se = std::sqrt(std::max(0.0, pa * (1.0 - pa) / n));
    snap.bin_edges = stats.bin_edges;
    snap.bin_counts = stats.bin_counts[gi];
    snap.bin_mass.resize(snap.bin_counts.size());
    for (std::size_t b = 0; b < snap.bin_counts.size(); ++b)
        snap.bin_mass[b] = static_cast<double>(snap.bin_counts[b]) / n;
    return snap;
}

MeanCountSeries empirical_mean_count(const EnsembleStats& stats) {
    MeanCountSeries out;
    const double n = static_cast<double>(stats.n_traj);
    out.t = stats.record_grid;
    out.mean.resize(out.t.size());
    out.std_error.resize(out.t.size());
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        const double mean = static_cast<double>(stats.count_sum[i]) / n;
        out.mean[i] = mean;
        if (stats.n_traj > 1) {
            const double var =
                (static_cast<double>(stats.count_sq_sum[i]) - n * mean * mean) / (n - 1.0);
            out.std_error[i] = std::sqrt(std::max(0.0, var) / n);
        } else {
            out.std_error[i] = 0.0;
        }
    }
    return out;
}

}  // namespace qreset
