// dnlslab: command-line laboratory for the gauged derivative NLS
// i u_t - u_xx + i lambda |u|^k u_x = 0 on a long periodic box.
//
// Subcommands: simulate, gauge-check, estimates, decompose, norms.
// Every run writes a JSON summary (schema 1) with the resolved config;
// identical config + seed reproduces byte-identical artifacts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dnls/estimates.hpp"
#include "dnls/report.hpp"

using namespace dnls;
using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string out_dir = "dnlslab-out";
    std::string config_path;
    int jobs = 1;
    std::uint64_t seed = 7;
};

fs::path resolve_out(const std::string& flag_value) {
    if (const char* env = std::getenv("DNLSLAB_OUT"); env && *env) return fs::path(env);
    return fs::path(flag_value);
}

InitialData parse_ic(const std::string& text) {
    // gaussian:amp=0.5,width=2[,center=0]  modulated:amp=..,width=..,freq=..
    // random_band:amp=..,lo=..,hi=..,seed=..
    InitialData ic;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "gaussian")
        ic.kind = InitialData::Kind::gaussian;
    else if (kind == "modulated")
        ic.kind = InitialData::Kind::modulated_gaussian;
    else if (kind == "random_band")
        ic.kind = InitialData::Kind::random_band;
    else
        throw ConfigInvalid("unknown initial data kind: " + kind);
    if (colon == std::string::npos) return ic;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigInvalid("bad ic parameter: " + item);
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "amp") ic.amplitude = std::stod(val);
        else if (key == "width") ic.width = std::stod(val);
        else if (key == "center") ic.center = std::stod(val);
        else if (key == "freq") ic.modulation = std::stod(val);
        else if (key == "lo") ic.band_lo = std::stoi(val);
        else if (key == "hi") ic.band_hi = std::stoi(val);
        else if (key == "seed") ic.seed = std::stoull(val);
        else throw ConfigInvalid("unknown ic parameter: " + key);
    }
    return ic;
}

TestFamily parse_family(const std::string& text, std::uint64_t seed) {
    TestFamily fam;
    fam.seed = seed;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "gaussian") fam.kind = TestFamily::Kind::gaussian_sweep;
    else if (kind == "modulated") fam.kind = TestFamily::Kind::modulated_sweep;
    else if (kind == "random_band") fam.kind = TestFamily::Kind::random_band;
    else if (kind == "trajectory") fam.kind = TestFamily::Kind::solver_trajectory;
    else throw ConfigInvalid("unknown family kind: " + kind);
    if (colon != std::string::npos) fam.cardinality = std::stoi(text.substr(colon + 1));
    return fam;
}

ordered_json grid_json(const GridSpec& g) {
    return ordered_json{{"nx", g.nx},
                        {"length", g.length},
                        {"dt", g.dt},
                        {"horizon", g.horizon},
                        {"dealias_fraction", g.dealias_fraction}};
}

// Merge a JSON config file underneath CLI flags: any option the user did
// not pass on the command line picks up the file's value.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("cannot read config file " + path);
    ordered_json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("config file parse error: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || opt->count() > 0) continue;
        std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        opt->add_result(text);
        opt->run_callback();
    }
}

int run_simulate(const CommonArgs& common, const std::string& ic_text, double lambda, double k,
                 int nx, double length, double dt, double horizon, int store_every,
                 double dealias) {
    GridSpec grid = make_grid(nx, length, dt, horizon, dealias);
    InitialData ic = parse_ic(ic_text);
    Field u0 = ic.realize(grid);
    Trajectory traj = solve(u0, lambda, k, grid, store_every);

    const fs::path out = resolve_out(common.out_dir);
    {
        std::ostringstream os;
        write_trajectory_csv(traj, os);
        atomic_write(out / "trajectory.csv", os.str());
    }
    {
        std::ostringstream os(std::ios::binary);
        write_trajectory_binary(traj, os);
        atomic_write(out / "trajectory.bin", os.str());
    }

    const double m0 = mass(traj.data.slice(0));
    double drift = 0.0;
    for (const Field& f : traj.data.levels)
        drift = std::max(drift, std::abs(mass(f) - m0) / m0);

    ordered_json summary;
    summary["schema"] = 1;
    summary["command"] = "simulate";
    summary["grid"] = grid_json(grid);
    summary["lambda"] = lambda;
    summary["k"] = k;
    summary["ic"] = ic_text;
    summary["store_every"] = traj.store_every;
    summary["levels"] = traj.data.steps();
    summary["mass_initial"] = m0;
    summary["mass_drift_rel"] = drift;
    if (lambda == 0.0) {
        // exact free flow for comparison
        double err = 0.0;
        for (int l = 0; l < traj.data.steps(); ++l) {
            Field ref = propagate(u0, traj.data.time(l));
            Field diff = ref;
            for (int i = 0; i < grid.nx; ++i) diff[i] -= traj.data.slice(l)[i];
            err = std::max(err, l2_norm(diff));
        }
        summary["linear_flow_error"] = err;
    }
    atomic_write(out / "summary.json", summary.dump(2) + "\n");
    std::cout << "simulate: levels=" << traj.data.steps() << " mass_drift=" << drift << "\n";
    return 0;
}

int run_gauge_check(const CommonArgs& common, const std::string& ic_text, double lambda, double k,
                    int band_n, int nx, double length, double dt, double horizon, int store_every,
                    bool refine) {
    GridSpec grid = make_grid(nx, length, dt, horizon);
    InitialData ic = parse_ic(ic_text);
    if (store_every <= 0) store_every = choose_store_every(grid.steps());
    Trajectory traj = solve(ic.realize(grid), lambda, k, grid, store_every);
    WindowFamily w = WindowFamily::build(grid);
    GaugeParams params{lambda, k, DyadicIndex::band_value(band_n)};

    const double residual = gauge_residual(traj.data, params, w);
    const double mismatch = duhamel_mismatch(traj.data, params, horizon, w);

    ordered_json summary;
    summary["schema"] = 1;
    summary["command"] = "gauge-check";
    summary["grid"] = grid_json(grid);
    summary["lambda"] = lambda;
    summary["k"] = k;
    summary["N"] = band_n;
    summary["ic"] = ic_text;
    summary["store_every"] = store_every;
    summary["residual"] = residual;
    summary["duhamel_mismatch"] = mismatch;

    if (refine) {
        GridSpec fine = refine_space_time(grid);
        Trajectory ft = solve(ic.realize(fine), lambda, k, fine, store_every);
        WindowFamily fw = WindowFamily::build(fine);
        const double fres = gauge_residual(ft.data, params, fw);
        const double fmis = duhamel_mismatch(ft.data, params, horizon, fw);
        summary["refined"] = {{"residual", fres},
                              {"duhamel_mismatch", fmis},
                              {"residual_reduction", residual / fres},
                              {"duhamel_reduction", mismatch / fmis}};
    }
    atomic_write(resolve_out(common.out_dir) / "gauge_check.json", summary.dump(2) + "\n");
    std::cout << "gauge-check: residual=" << residual << " duhamel=" << mismatch << "\n";
    if (refine) std::cout << "  (refined figures in gauge_check.json)\n";
    return 0;
}

int run_estimates(const CommonArgs& common, const std::string& which, const std::string& family_text,
                  double theta, double horizon, double p, double alpha, double lambda, double k,
                  int nx, double length, double dt, int levels, double c_high,
                  const std::string& terms_text) {
    TestFamily fam = parse_family(family_text, common.seed);
    fam.lambda = lambda;
    fam.k = k;

    const fs::path out = resolve_out(common.out_dir);
    std::vector<EstimateReport> reports;

    auto data_grid = [&](double T) { return make_grid(nx, length, T, T); };

    if (which == "strichartz") {
        GridSpec g = data_grid(horizon);
        reports.push_back(certify("strichartz_theta" + std::to_string(theta), g, levels,
                                  RefinementMode::space, [&](const SuiteEnv& env) {
                                      return verify_strichartz(fam, env, theta, horizon);
                                  },
                                  common.jobs));
    } else if (which == "smoothing" || which == "maximal_l2" || which == "maximal_l4") {
        SmoothingKind kind = which == "smoothing" ? SmoothingKind::smoothing
                             : which == "maximal_l2" ? SmoothingKind::maximal_l2
                                                     : SmoothingKind::maximal_l4;
        GridSpec g = data_grid(horizon);
        reports.push_back(certify(which + "_theta" + std::to_string(theta), g, levels,
                                  RefinementMode::space, [&](const SuiteEnv& env) {
                                      return verify_smoothing_maximal(fam, env, kind, theta,
                                                                      horizon);
                                  },
                                  common.jobs));
    } else if (which.rfind("duhamel", 0) == 0) {
        const auto colon = which.find(':');
        if (colon == std::string::npos)
            throw ConfigInvalid("use duhamel:NAME, e.g. duhamel:smoothing");
        const std::string label = which.substr(colon + 1);
        DuhamelEstimate est;
        if (label == "dual_strichartz") est = DuhamelEstimate::dual_strichartz;
        else if (label == "energy") est = DuhamelEstimate::energy;
        else if (label == "band_maximal") est = DuhamelEstimate::band_maximal;
        else if (label == "maximal_l4") est = DuhamelEstimate::maximal_l4;
        else if (label == "smoothing") est = DuhamelEstimate::smoothing;
        else if (label == "band_mixed") est = DuhamelEstimate::band_mixed;
        else if (label == "maximal") est = DuhamelEstimate::maximal;
        else if (label == "derivative_smoothing") est = DuhamelEstimate::derivative_smoothing;
        else throw ConfigInvalid("unknown duhamel estimate " + label);
        GridSpec g = data_grid(horizon);
        reports.push_back(certify(std::string(duhamel_name(est)) + "_theta" + std::to_string(theta),
                                  g, levels, RefinementMode::space,
                                  [&](const SuiteEnv& env) {
                                      return verify_inhomogeneous(fam, env, est, theta, horizon);
                                  },
                                  common.jobs));
    } else if (which == "leibniz") {
        GridSpec g = data_grid(horizon);
        LeibnizExponents exps;
        reports.push_back(certify("gauge_leibniz", g, levels, RefinementMode::space,
                                  [&](const SuiteEnv& env) {
                                      return verify_gauge_leibniz(fam, env, alpha, exps, horizon);
                                  },
                                  common.jobs));
    } else if (which == "bilinear") {
        GridSpec g = make_grid(nx, length, dt, horizon);
        fam.kind = TestFamily::Kind::solver_trajectory;
        reports.push_back(certify("bilinear_p" + std::to_string(p), g, levels,
                                  RefinementMode::space_time,
                                  [&](const SuiteEnv& env) { return verify_bilinear(fam, env, p); },
                                  common.jobs));
    } else if (which == "commutator") {
        GridSpec g = make_grid(nx, length, 1e-3, 1e-3);
        SuiteEnv env = make_env(g, 2, common.jobs);
        InitialData fd;
        fd.amplitude = 1.0;
        fd.width = length / 16.0;
        Field f = fd.realize(g);
        InitialData gd;
        gd.kind = InitialData::Kind::random_band;
        gd.amplitude = 1.0;
        gd.band_lo = 1;
        gd.band_hi = static_cast<int>(length);
        gd.seed = common.seed;
        Field gf = gd.realize(g);
        CommutatorReport rep = verify_commutator(f, gf, {8.0, 16.0, 32.0}, env);
        ordered_json j;
        j["schema"] = 1;
        j["inequality"] = "projector_commutator";
        j["identity_error"] = rep.identity_error;
        for (const auto& [n, r] : rep.bound_ratio) j["bound_ratio"][std::to_string(int(n))] = r;
        j["scaling_spread"] = rep.scaling_spread;
        const bool pass = rep.identity_error < 1e-6 && rep.scaling_spread < 2.0;
        j["pass"] = pass;
        atomic_write(out / "projector_commutator.json", j.dump(2) + "\n");
        std::cout << (pass ? "PASS" : "FAIL") << " projector_commutator identity_err="
                  << rep.identity_error << " spread=" << rep.scaling_spread << "\n";
        return pass ? 0 : 1;
    } else if (which == "nonlinear" || which == "band_commutator" ||
               which == "power_difference") {
        GridSpec g = make_grid(nx, length, dt, horizon);
        fam.kind = TestFamily::Kind::solver_trajectory;
        if (which == "nonlinear") {
            std::set<int> terms;
            if (terms_text.empty() || terms_text == "all") terms = {1, 2, 3, 4, 5};
            else
                for (char c : terms_text)
                    if (c >= '1' && c <= '5') terms.insert(c - '0');
            reports.push_back(certify("gauged_forcing_terms" +
                                          (terms_text.empty() ? "all" : terms_text),
                                      g, levels, RefinementMode::space_time,
                                      [&](const SuiteEnv& env) {
                                          return verify_nonlinear(fam, env, terms);
                                      },
                                      common.jobs));
        } else if (which == "band_commutator") {
            reports.push_back(certify("band_commutator", g, levels, RefinementMode::space_time,
                                      [&](const SuiteEnv& env) {
                                          return verify_band_commutator(fam, env);
                                      },
                                      common.jobs));
        } else {
            reports.push_back(certify("power_difference", g, levels, RefinementMode::space_time,
                                      [&](const SuiteEnv& env) {
                                          return verify_power_difference(fam, env);
                                      },
                                      common.jobs));
        }
    } else if (which == "data_gauge") {
        GridSpec g = data_grid(horizon);
        reports.push_back(certify("data_gauge", g, levels, RefinementMode::space,
                                  [&](const SuiteEnv& env) {
                                      return verify_data_gauge(fam, env, horizon, lambda, k);
                                  },
                                  common.jobs));
    } else if (which == "apriori") {
        GridSpec g = make_grid(nx, length, dt, horizon);
        reports.push_back(certify("small_data_apriori", g, levels, RefinementMode::space_time,
                                  [&](const SuiteEnv& env) {
                                      return verify_apriori_family(fam, env, c_high);
                                  },
                                  common.jobs));
    } else {
        throw ConfigInvalid("unknown estimates suite: " + which);
    }

    bool all_pass = true;
    for (const EstimateReport& r : reports) {
        ordered_json cfg;
        cfg["family"] = fam.describe();
        cfg["theta"] = theta;
        cfg["T"] = horizon;
        cfg["lambda"] = lambda;
        cfg["k"] = k;
        cfg["seed"] = common.seed;
        write_estimate_report(out, r, cfg.dump());
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.inequality
                  << " max_ratio=" << r.max_ratio << " growth=" << r.trend.growth << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int run_decompose(const CommonArgs& common, const std::string& ic_text, int nx, double length) {
    GridSpec grid = make_grid(nx, length, 1e-3, 1e-3);
    Field u0 = parse_ic(ic_text).realize(grid);
    WindowFamily w = WindowFamily::build(grid);
    std::ostringstream os;
    os << "block,N,l2_energy\n";
    for (const DyadicIndex& idx : w.indices()) {
        Field block = project(u0, idx, w);
        os << (idx.is_low() ? "low" : "band") << "," << format_double(idx.value()) << ","
           << format_double(mass(block)) << "\n";
    }
    atomic_write(resolve_out(common.out_dir) / "decompose.csv", os.str());
    std::cout << "decompose: wrote band energies for " << ic_text << "\n";
    return 0;
}

int run_norms(const CommonArgs& common, const std::string& ic_text, const std::string& traj_path,
              int nx, double length, double horizon, int levels) {
    SpacetimeField u;
    GridSpec grid;
    if (!traj_path.empty()) {
        std::ifstream is(traj_path, std::ios::binary);
        if (!is) throw IoError("cannot open " + traj_path);
        Trajectory t = read_trajectory_binary(is);
        u = t.data;
        grid = t.data.grid;
    } else {
        grid = make_grid(nx, length, horizon, horizon);
        u = free_evolution(parse_ic(ic_text).realize(grid), horizon, levels);
    }
    WindowFamily w = WindowFamily::build(grid);
    XtNormBreakdown xt = xt_norm(u, w);
    YtNormBreakdown yt = yt_norm_breakdown(u);
    ordered_json j;
    j["schema"] = 1;
    j["command"] = "norms";
    j["grid"] = grid_json(grid);
    j["xt"] = {{"sup_sobolev", xt.sup_sobolev},
               {"smoothing", xt.smoothing},
               {"maximal_l2", xt.maximal_l2},
               {"maximal_l4", xt.maximal_l4},
               {"total", xt.total}};
    j["yt"] = {{"sup_sobolev", yt.sup_sobolev},
               {"smoothing", yt.smoothing},
               {"maximal_l2", yt.maximal_l2},
               {"maximal_l4", yt.maximal_l4},
               {"total", yt.total}};
    atomic_write(resolve_out(common.out_dir) / "norms.json", j.dump(2) + "\n");
    std::cout << "norms: X_T=" << xt.total << " Y_T=" << yt.total << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dnlslab: pseudospectral laboratory for the gauged derivative NLS"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--out", common.out_dir, "output directory (env DNLSLAB_OUT overrides)");
    app.add_option("--config", common.config_path, "JSON config file; flags override its values");
    app.add_option("--jobs", common.jobs, "worker parallelism for family evaluation");
    app.add_option("--seed", common.seed, "base RNG seed");

    // shared numeric options
    double lambda = 1.0, k = 5.0, length = 100.0, dt = 5e-4, horizon = 0.5, theta = 0.0;
    double p = 4.0, alpha = 0.5, c_high = 0.8;
    int nx = 512, store_every = 0, band_n = 8, levels = 65;
    std::string ic_text = "gaussian:amp=1.65,width=2";
    std::string family_text = "gaussian:20";
    std::string which = "strichartz";
    std::string terms_text = "all";
    std::string traj_path;
    bool refine = false;
    bool relaxed_k = false;

    CLI::App* sim = app.add_subcommand("simulate", "integrate the Cauchy problem");
    sim->add_option("--ic", ic_text, "initial data spec");
    sim->add_option("--lambda", lambda, "coupling");
    sim->add_option("--k", k, "nonlinearity power");
    sim->add_option("--nx", nx, "spatial points (power of two)");
    sim->add_option("--length", length, "domain length");
    sim->add_option("--dt", dt, "time step");
    sim->add_option("--T", horizon, "final time");
    sim->add_option("--store-every", store_every, "snapshot stride (0: auto)");
    double dealias = 2.0 / 3.0;
    sim->add_option("--dealias", dealias, "dealias fraction");

    CLI::App* gauge = app.add_subcommand("gauge-check", "residual and Duhamel checks of the "
                                                        "gauged equation");
    gauge->add_option("--ic", ic_text, "initial data spec");
    gauge->add_option("--lambda", lambda, "coupling");
    gauge->add_option("--k", k, "nonlinearity power");
    gauge->add_option("--N", band_n, "dyadic band");
    gauge->add_option("--nx", nx, "spatial points");
    gauge->add_option("--length", length, "domain length");
    gauge->add_option("--dt", dt, "time step");
    gauge->add_option("--T", horizon, "final time");
    gauge->add_option("--store-every", store_every, "snapshot stride (0: auto)");
    gauge->add_flag("--refine", refine, "also run one space-time refinement step");

    CLI::App* est = app.add_subcommand("estimates", "inequality certification suites");
    est->add_option("--which", which,
                    "suite: strichartz|smoothing|maximal_l2|maximal_l4|duhamel:NAME|leibniz|"
                    "bilinear|commutator|nonlinear|band_commutator|power_difference|"
                    "data_gauge|apriori");
    est->add_option("--family", family_text, "family spec kind:count");
    est->add_option("--theta", theta, "interpolation parameter");
    est->add_option("--T", horizon, "time horizon");
    est->add_option("--p", p, "Lebesgue exponent (bilinear)");
    est->add_option("--alpha", alpha, "derivative order (leibniz)");
    est->add_option("--lambda", lambda, "coupling");
    est->add_option("--k", k, "nonlinearity power");
    est->add_option("--nx", nx, "spatial points");
    est->add_option("--length", length, "domain length");
    est->add_option("--dt", dt, "time step (trajectory suites)");
    est->add_option("--levels", levels, "stored levels for free evolutions");
    est->add_option("--c-high", c_high, "high-frequency budget (apriori)");
    est->add_option("--terms", terms_text, "gauge terms subset, e.g. 145 (nonlinear)");
    est->add_flag("--relaxed-k", relaxed_k,
                  "accept k >= 4 (band_commutator / power_difference suites)");

    CLI::App* dec = app.add_subcommand("decompose", "emit Littlewood-Paley band energies");
    dec->add_option("--ic", ic_text, "initial data spec");
    dec->add_option("--nx", nx, "spatial points");
    dec->add_option("--length", length, "domain length");

    CLI::App* nrm = app.add_subcommand("norms", "emit X_T / Y_T breakdowns");
    nrm->add_option("--ic", ic_text, "initial data spec");
    nrm->add_option("--traj", traj_path, "trajectory binary dump to load instead");
    nrm->add_option("--nx", nx, "spatial points");
    nrm->add_option("--length", length, "domain length");
    nrm->add_option("--T", horizon, "time horizon");
    nrm->add_option("--levels", levels, "stored levels");

    try {
        app.parse(argc, argv);
        for (CLI::App* cmd : {sim, gauge, est, dec, nrm})
            if (cmd->parsed()) apply_config_file(cmd, common.config_path);

        const double k_min = relaxed_k ? 4.0 : 5.0;
        const bool needs_k = sim->parsed() || gauge->parsed() ||
                             (est->parsed() && (which == "bilinear" || which == "nonlinear" ||
                                                which == "band_commutator" ||
                                                which == "power_difference" ||
                                                which == "apriori"));
        if (needs_k && k < k_min && k != 0.0)
            throw ConfigInvalid("k must be >= " + std::to_string(k_min) +
                                (relaxed_k ? "" : " (pass --relaxed-k for >= 4)"));

        if (sim->parsed())
            return run_simulate(common, ic_text, lambda, k, nx, length, dt, horizon, store_every,
                                dealias);
        if (gauge->parsed())
            return run_gauge_check(common, ic_text, lambda, k, band_n, nx, length, dt, horizon,
                                   store_every, refine);
        if (est->parsed())
            return run_estimates(common, which, family_text, theta, horizon, p, alpha, lambda, k,
                                 nx, length, dt, levels, c_high, terms_text);
        if (dec->parsed()) return run_decompose(common, ic_text, nx, length);
        if (nrm->parsed())
            return run_norms(common, ic_text, traj_path, nx, length, horizon, levels);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
