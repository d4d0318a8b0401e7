// Command-line front end: parameter parsing, experiment orchestration, the
// verification suite, and plot-ready CSV/JSON emission.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qreset/acceptance.hpp"
#include "qreset/counting.hpp"
#include "qreset/noclick.hpp"
#include "qreset/renewal.hpp"
#include "qreset/resolvent.hpp"
#include "qreset/spectral.hpp"
#include "qreset/trajectory.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace qreset;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    explicit CsvWriter(const std::string& path) : out(path) {
        if (!out) throw std::runtime_error("cannot open " + path);
    }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    }
    std::ofstream out;
};

struct CommonConfig {
    double gamma0 = 1.0;
    std::optional<double> gamma;
    std::optional<double> lambda;
    std::uint64_t seed = 1;
    std::string out = "qreset_out";
    std::string format = "csv";

    ModelParams params() const {
        if (gamma && lambda)
            throw CLI::ValidationError("give exactly one of --gamma or --lambda");
        if (lambda) return make_params_lambda(gamma0, *lambda);
        if (gamma) return make_params(gamma0, *gamma);
        throw CLI::ValidationError("one of --gamma or --lambda is required");
    }

    json echo(const ModelParams& p) const {
        json j;
        j["gamma0"] = p.gamma0;
        j["gamma"] = p.gamma;
        j["lambda"] = p.lambda;
        j["seed"] = seed;
        return j;
    }
};

void add_common(CLI::App* cmd, CommonConfig& cfg) {
    cmd->add_option("--gamma0", cfg.gamma0, "Rabi frequency (1/time)")->check(CLI::PositiveNumber);
    auto* g = cmd->add_option("--gamma", cfg.gamma, "measurement coupling (1/time)");
    auto* l = cmd->add_option("--lambda", cfg.lambda, "measurement parameter gamma/(4 gamma0)");
    g->excludes(l);
    l->excludes(g);
    cmd->add_option("--seed", cfg.seed, "base random seed");
    cmd->add_option("--out", cfg.out, "output path prefix");
    cmd->add_option("--format", cfg.format, "csv or json for curve output")
        ->check(CLI::IsMember({"csv", "json"}));
}

void write_curve(const CommonConfig& cfg, const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows) {
    if (cfg.format == "csv") {
        CsvWriter csv(cfg.out + ".csv");
        csv.header(cols);
        for (const auto& r : rows) {
            std::vector<std::string> cells;
            cells.reserve(r.size());
            for (double v : r) cells.push_back(num(v));
            csv.row(cells);
        }
        std::printf("wrote %s.csv (%zu rows)\n", cfg.out.c_str(), rows.size());
    } else {
        json j;
        j["columns"] = cols;
        j["rows"] = rows;
        std::ofstream(cfg.out + ".json") << j.dump(2) << "\n";
        std::printf("wrote %s.json (%zu rows)\n", cfg.out.c_str(), rows.size());
    }
}

// --- subcommands -------------------------------------------------------------

int run_flow(const CommonConfig& cfg, double theta0, double t_max, int points) {
    const auto p = cfg.params();
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= points; ++i) {
        const double t = t_max * i / static_cast<double>(points);
        const double th = flow(t, 0.0, Angle(theta0), p).value();
        const double c = std::cos(0.5 * th);
        rows.push_back({t, th, c * c});
    }
    write_curve(cfg, {"t", "theta", "a_sq"}, rows);
    return kExitOk;
}

int run_survival(const CommonConfig& cfg, double theta0, double t_max, int points) {
    const auto p = cfg.params();
    const SurvivalCurve curve(Angle(theta0), p);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= points; ++i) {
        const double t = t_max * i / static_cast<double>(points);
        rows.push_back({t, curve.value(t)});
    }
    write_curve(cfg, {"t", "S"}, rows);
    return kExitOk;
}

int run_counting(const CommonConfig& cfg, double t_max, int points) {
    const auto p = cfg.params();
    std::vector<std::vector<double>> rows;
    for (int i = 1; i <= points; ++i) {
        const double t = t_max * i / static_cast<double>(points);
        const auto dist = count_distribution(t, p, 2);
        rows.push_back({t, mean_count(t, p), mean_rate(t, p), dist[0], dist[1], dist[2]});
    }
    write_curve(cfg, {"t", "mean_count", "mean_rate", "p0", "p1", "p2"}, rows);
    return kExitOk;
}

int run_simulate(const CommonConfig& cfg, double theta0, std::vector<double> record,
                 std::size_t n_traj, std::size_t bins, const std::string& scheme, double dt) {
    const auto p = cfg.params();
    TrajectoryConfig tc;
    tc.t_max = record.empty() ? 1.0 : record.back();
    tc.scheme = scheme == "euler" ? Scheme::Euler : Scheme::EventDriven;
    tc.dt = dt;
    tc.seed = cfg.seed;
    tc.record_grid = record;
    const auto stats = ensemble(Angle(theta0), n_traj, tc, p, bins);
    const auto mc = empirical_mean_count(stats);

    CsvWriter hist(cfg.out + "_hist.csv");
    hist.header({"t", "theta", "mc_density", "mc_stderr"});
    json atoms = json::array();
    for (std::size_t gi = 0; gi < record.size(); ++gi) {
        const double t = record[gi];
        const auto snap = histogram_with_atom(stats, t, flow(t, 0.0, Angle(theta0), p));
        const double width = kTwoPi / static_cast<double>(bins);
        for (std::size_t b = 0; b < snap.bin_mass.size(); ++b) {
            const double center = 0.5 * (snap.bin_edges[b] + snap.bin_edges[b + 1]);
            const double mass = snap.bin_mass[b];
            const double se =
                std::sqrt(std::max(mass * (1.0 - mass), 0.0) / static_cast<double>(n_traj));
            hist.row({num(t), num(center), num(mass / width), num(se / width)});
        }
        json a;
        a["t"] = t;
        a["atom_position"] = snap.atom_position;
        a["atom_mass"] = snap.atom_mass;
        a["atom_mass_stderr"] = snap.atom_mass_se;
        atoms.push_back(a);
    }
    CsvWriter counts(cfg.out + "_counts.csv");
    counts.header({"t", "mean_count", "stderr"});
    for (std::size_t i = 0; i < mc.t.size(); ++i)
        counts.row({num(mc.t[i]), num(mc.mean[i]), num(mc.std_error[i])});

    json summary;
    summary["params"] = cfg.echo(p);
    summary["n_traj"] = n_traj;
    summary["bins"] = bins;
    summary["scheme"] = scheme;
    summary["atoms"] = atoms;
    std::ofstream(cfg.out + "_summary.json") << summary.dump(2) << "\n";
    std::printf("wrote %s_hist.csv, %s_counts.csv, %s_summary.json\n", cfg.out.c_str(),
                cfg.out.c_str(), cfg.out.c_str());
    return kExitOk;
}

int run_density(const CommonConfig& cfg, double t, std::size_t n_traj, std::size_t bins,
                int trunc_m) {
    const auto p = cfg.params();
    TrajectoryConfig tc;
    tc.t_max = t;
    tc.scheme = Scheme::EventDriven;
    tc.seed = cfg.seed;
    tc.record_grid = {t};
    const auto stats = ensemble(Angle(0.0), n_traj, tc, p, bins);
    const auto snap_mc = histogram_with_atom(stats, t, flow(t, 0.0, Angle(0.0), p));
    const auto snap = snapshot_renewal(t, p);

    std::optional<BiorthoBasis> basis;
    if (p.regime == Regime::Sub && p.lambda > 0)
        basis.emplace(p, trunc_m > 0 ? trunc_m : choose_truncation(p, 1e-6));

    CsvWriter csv(cfg.out + ".csv");
    csv.header({"theta", "analytic", "spectral", "mc_estimate", "mc_stderr"});
    const double width = kTwoPi / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double center = 0.5 * (snap_mc.bin_edges[b] + snap_mc.bin_edges[b + 1]);
        const double analytic = snap.continuous(center);
        const std::string spectral =
            basis ? num(density_series_sub(Angle(center), t, *basis)) : "";
        const double mass = snap_mc.bin_mass[b];
        const double se =
            std::sqrt(std::max(mass * (1.0 - mass), 0.0) / static_cast<double>(n_traj));
        csv.row({num(center), num(analytic), spectral, num(mass / width), num(se / width)});
    }

    json side;
    side["t"] = t;
    side["lambda"] = p.lambda;
    side["seed"] = cfg.seed;
    side["atom_position"] = snap.atom_position;
    side["atom_mass"] = snap.atom_mass;
    side["atom_mass_mc"] = snap_mc.atom_mass;
    side["atom_mass_mc_stderr"] = snap_mc.atom_mass_se;
    side["params"] = cfg.echo(p);
    std::ofstream(cfg.out + ".json") << side.dump(2) << "\n";
    std::printf("wrote %s.csv and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
    return kExitOk;
}

int run_resolvent(const CommonConfig& cfg, const std::string& spec_path, int grid_n, int nodes,
                  std::optional<double> t, double s) {
    // spec file: key=value lines; see the README for the schema
    std::map<std::string, std::string> kv;
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open spec file " + spec_path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string v) {
            const auto a = v.find_first_not_of(" \t");
            const auto b = v.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    GeneratorSpec spec;
    if (kv.count("model") && kv["model"] == "qubit") {
        const double g0 = kv.count("gamma0") ? std::stod(kv["gamma0"]) : 1.0;
        const double l = kv.count("lambda") ? std::stod(kv["lambda"]) : 0.5;
        spec = qubit_generator(make_params_lambda(g0, l));
    } else {
        if (kv.count("drift")) {
            const double v = std::stod(kv["drift"]);
            if (v != 0.0) spec.drift = [v](double) { return v; };
        }
        if (kv.count("diffusion")) {
            const double v = std::stod(kv["diffusion"]);
            if (v != 0.0) spec.diffusion = [v](double) { return v; };
        }
        if (kv.count("rate")) {
            const double v = std::stod(kv["rate"]);
            if (v != 0.0) spec.jump_rate = [v](double) { return v; };
        }
        if (kv.count("reset")) {
            const std::string r = kv["reset"];
            if (r == "uniform")
                spec.reset = ResetMeasure::uniform();
            else if (r.rfind("point:", 0) == 0)
                spec.reset = ResetMeasure::at_point(std::stod(r.substr(6)));
        }
    }
    const double theta_from = kv.count("theta_from") ? std::stod(kv["theta_from"]) : 0.0;
    const auto grid = discretize(spec, grid_n);

    CsvWriter csv(cfg.out + ".csv");
    if (t) {
        const auto rho = invert_laplace(Angle(theta_from), *t, grid, nodes);
        csv.header({"theta", "density"});
        for (int i = 0; i < grid.n(); ++i)
            csv.row({num(grid.centers()[static_cast<std::size_t>(i)]), num(rho(i))});
    } else {
        const auto z = laplace_transition({s, 0.0}, Angle(theta_from), grid);
        csv.header({"theta", "re", "im"});
        for (int i = 0; i < grid.n(); ++i)
            csv.row({num(grid.centers()[static_cast<std::size_t>(i)]), num(z(i).real()),
                     num(z(i).imag())});
    }
    std::printf("wrote %s.csv\n", cfg.out.c_str());
    return kExitOk;
}

int run_verify(std::uint64_t seed, bool quick, const std::string& out) {
    AcceptanceOptions opts;
    opts.seed = seed;
    if (quick) opts.n_traj = 20000;
    const auto results = run_acceptance(opts);
    const int failures = report_acceptance(results);
    if (!out.empty()) {
        json j;
        j["seed"] = seed;
        j["n_traj"] = opts.n_traj;
        json arr = json::array();
        for (const auto& r : results) {
            json e;
            e["id"] = r.id;
            e["name"] = r.name;
            e["pass"] = r.pass;
            e["worst"] = r.worst;
            e["tolerance"] = r.tolerance;
            e["detail"] = r.detail;
            arr.push_back(e);
        }
        j["criteria"] = arr;
        std::ofstream(out) << j.dump(2) << "\n";
    }
    std::printf("%d of %zu checks failed\n", failures, results.size());
    return failures == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and analytics for measurement-driven qubit resetting dynamics"};
    app.require_subcommand(1);
    // key=value file with one [subcommand] section; flags take precedence
    app.set_config("--config", "", "configuration file (sections per subcommand)");

    CommonConfig cfg;

    auto* flow_cmd = app.add_subcommand("flow", "no-click angle trajectory and |a(t)|^2");
    double theta0 = kPi, t_max = 10.0;
    int points = 400;
    add_common(flow_cmd, cfg);
    flow_cmd->add_option("--theta0", theta0, "start angle");
    flow_cmd->add_option("--t-max", t_max, "horizon");
    flow_cmd->add_option("--points", points, "samples");

    auto* surv_cmd = app.add_subcommand("survival", "no-click survival probability");
    double s_theta0 = 0.0, s_tmax = 10.0;
    int s_points = 400;
    add_common(surv_cmd, cfg);
    surv_cmd->add_option("--theta0", s_theta0, "start angle");
    surv_cmd->add_option("--t-max", s_tmax, "horizon");
    surv_cmd->add_option("--points", s_points, "samples");

    auto* count_cmd = app.add_subcommand("counting", "mean count, mean rate, click probabilities");
    double c_tmax = 5.0;
    int c_points = 200;
    add_common(count_cmd, cfg);
    count_cmd->add_option("--t-max", c_tmax, "horizon");
    count_cmd->add_option("--points", c_points, "samples");

    auto* sim_cmd = app.add_subcommand("simulate", "trajectory ensembles and histograms");
    double sim_theta0 = 0.0, sim_dt = 1e-3;
    std::vector<double> sim_record{1.0, 2.0};
    std::size_t sim_n = 100000, sim_bins = 250;
    std::string sim_scheme = "event";
    add_common(sim_cmd, cfg);
    sim_cmd->add_option("--theta0", sim_theta0, "start angle");
    sim_cmd->add_option("--t", sim_record, "record times (sorted)");
    sim_cmd->add_option("--n-traj", sim_n, "ensemble size");
    sim_cmd->add_option("--bins", sim_bins, "histogram bins");
    sim_cmd->add_option("--scheme", sim_scheme, "event or euler")
        ->check(CLI::IsMember({"event", "euler"}));
    sim_cmd->add_option("--dt", sim_dt, "euler step");

    auto* dens_cmd = app.add_subcommand("density", "analytic + spectral + Monte Carlo density");
    double d_t = 1.0;
    std::size_t d_n = 100000, d_bins = 250;
    int d_trunc = 0;
    add_common(dens_cmd, cfg);
    dens_cmd->add_option("--t", d_t, "time");
    dens_cmd->add_option("--n-traj", d_n, "ensemble size");
    dens_cmd->add_option("--bins", d_bins, "histogram bins");
    dens_cmd->add_option("--trunc-M", d_trunc, "spectral tower truncation (0 = adaptive)");

    auto* res_cmd = app.add_subcommand("resolvent", "grid resolvent solutions for a spec file");
    std::string res_spec;
    int res_grid = 1024, res_nodes = 32;
    std::optional<double> res_t;
    double res_s = 1.0;
    add_common(res_cmd, cfg);
    res_cmd->add_option("--spec", res_spec, "generator spec file (key=value)")->required();
    res_cmd->add_option("--grid", res_grid, "grid size");
    res_cmd->add_option("--nodes", res_nodes, "inversion nodes");
    res_cmd->add_option("--t", res_t, "invert to this time (otherwise stay in Laplace domain)");
    res_cmd->add_option("--s", res_s, "Laplace variable for the transform output");

    auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
    bool quick = false;
    std::uint64_t v_seed = 30035001;
    std::string v_out;
    verify_cmd->add_flag("--quick", quick, "reduce the Monte Carlo population to 20000");
    verify_cmd->add_option("--seed", v_seed, "base seed");
    verify_cmd->add_option("--out", v_out, "also write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(flow_cmd)) return run_flow(cfg, theta0, t_max, points);
        if (app.got_subcommand(surv_cmd)) return run_survival(cfg, s_theta0, s_tmax, s_points);
        if (app.got_subcommand(count_cmd)) return run_counting(cfg, c_tmax, c_points);
        if (app.got_subcommand(sim_cmd))
            return run_simulate(cfg, sim_theta0, sim_record, sim_n, sim_bins, sim_scheme, sim_dt);
        if (app.got_subcommand(dens_cmd)) return run_density(cfg, d_t, d_n, d_bins, d_trunc);
        if (app.got_subcommand(res_cmd))
            return run_resolvent(cfg, res_spec, res_grid, res_nodes, res_t, res_s);
        if (app.got_subcommand(verify_cmd)) return run_verify(v_seed, quick, v_out);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
