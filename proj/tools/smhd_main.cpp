// Experiment runner: every harness operation as a subcommand, with
// key=value (or JSON) configs, deterministic seeding, and CSV artifacts.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 the noise model
// violates the standing hypotheses, 3 a path blew up, 4 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "smhd/config.hpp"
#include "smhd/ergodicity.hpp"
#include "smhd/report.hpp"

namespace fs = std::filesystem;
using namespace smhd;

namespace {

struct Cli {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "smhd_out";
    int threads = 0;       // 0: keep config value
    long long seed = -1;   // <0: keep config value
};

ExperimentConfig resolve_config(const Cli& cli) {
    ExperimentConfig cfg;
    if (!cli.config_path.empty()) cfg = ExperimentConfig::load(cli.config_path);
    for (const auto& ov : cli.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("--set expects key=value, got '" + ov + "'");
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (cli.threads > 0) cfg.threads = cli.threads;
    if (cli.seed >= 0) cfg.seed = std::uint64_t(cli.seed);
    return cfg;
}

void write_echo(const ExperimentConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream f(dir / "config_echo.ini");
    cfg.echo(f);
}

int emit(const VerificationReport& rep, const fs::path& dir) {
    print_report(std::cout, rep);
    fs::create_directories(dir);
    std::ofstream f(dir / "report.txt", std::ios::app);
    print_report_machine(f, rep);
    return rep.pass() ? 0 : 1;
}

Ensemble make_ensemble(const ExperimentConfig& cfg, const BasisPtr& basis,
                       const NoiseModel& noise) {
    Ensemble ens;
    ens.basis = basis;
    ens.noise = &noise;
    ens.integ = cfg.build_integrator();
    ens.x0 = cfg.build_x0(basis);
    ens.paths = cfg.m_paths;
    ens.threads = cfg.threads;
    ens.seed = cfg.seed;
    return ens;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    OperatorContext& ctx = local_context(basis);
    PathRecord rec = simulate_path(ctx, noise, cfg.build_x0(basis),
                                   cfg.build_integrator(), {cfg.seed, 0});
    fs::create_directories(out);
    CsvWriter csv((out / "trace.csv").string(),
                  {"t", "h_norm2", "v_norm2", "int_v_norm2"});
    for (std::size_t i = 0; i < rec.t.size(); ++i)
        csv.row({rec.t[i], rec.h2[i], rec.v2[i], rec.int_v2[i]});
    save_state(rec.final_state, (out / "final_state.txt").string());
    std::cout << "simulated " << rec.t.size() << " records, " << rec.jumps
              << " jumps, final |x|^2 = " << format_number(rec.h2.back())
              << "\n";
    return 0;
}

int cmd_energy(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    return emit(verify_energy_bounds(make_ensemble(cfg, basis, noise),
                                     cfg.delta),
                out);
}

int cmd_pmoment(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    return emit(verify_pth_moments(make_ensemble(cfg, basis, noise), cfg.p),
                out);
}

int cmd_monotonicity(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    return emit(monotonicity_campaign(basis, noise, cfg.samples, cfg.radius,
                                      cfg.eps, cfg.seed),
                out);
}

int cmd_convergence(const ExperimentConfig& cfg, const fs::path& out) {
    auto rep = galerkin_convergence(
        cfg.cutoffs, cfg.re, cfg.rm, cfg.s,
        [&](BasisPtr b) { return cfg.build_noise(b); },
        [&](BasisPtr b) { return cfg.build_x0(b); }, cfg.build_integrator(),
        cfg.seed);
    return emit(rep, out);
}

int cmd_uniqueness_replay(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    return emit(pathwise_uniqueness_check(make_ensemble(cfg, basis, noise)),
                out);
}

int cmd_stability(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    const MhdState x0 = cfg.build_x0(basis);
    const MhdState y0 = zero_state(basis);
    const StabilityEnsemble ens =
        stability_ensemble(basis, noise, x0, y0, cfg.build_integrator(),
                           cfg.m_paths, cfg.threads, cfg.seed);
    VerificationReport rep;
    rep.title = "exponential-stability";
    rep.paths = ens.paths;
    rep.add_detail("condition_value", ens.condition_value);
    BoundCheck cond = make_check("stability-condition", ens.condition_value,
                                 0.0, 1.0, "2(M1+M3)/lambda1 < 1");
    cond.pass = ens.condition_met;
    rep.checks.push_back(cond);
    rep.checks.push_back(make_check("pathwise-bound-violations",
                                    ens.bound_violations, 0.0, 0.0,
                                    "count must be zero"));
    rep.checks.push_back(make_check(
        "negative-decay-slope-fraction", 0.95, 0.0,
        ens.paths > 0 ? double(ens.negative_slopes) / ens.paths : 0.0,
        ">= 95% of paths"));
    rep.checks.push_back(make_check("terminal-contraction", ens.max_w_ratio,
                                    0.0, 1e-3, "|w(t_end)|/|w(0)|"));
    return emit(rep, out);
}

int cmd_martingale(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    OperatorContext& ctx = local_context(basis);
    const MartingaleTrace tr =
        martingale_ratio(ctx, noise, cfg.build_x0(basis),
                         cfg.build_integrator(), {cfg.seed, 0});
    fs::create_directories(out);
    CsvWriter csv((out / "martingale_ratio.csv").string(), {"t", "ratio"});
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        csv.row({tr.t[i], tr.ratio[i]});
    VerificationReport rep;
    rep.title = "martingale-ratio";
    rep.paths = 1;
    rep.checks.push_back(make_check("final-ratio", tr.final_ratio, 0.0,
                                    0.1 * tr.max_ratio,
                                    "M*(t)/t at t_end vs 10% of running max"));
    rep.add_detail("final_ratio", tr.final_ratio);
    rep.add_detail("max_ratio", tr.max_ratio);
    rep.add_detail("final_m", tr.final_m);
    return emit(rep, out);
}

int cmd_invariant_measure(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    const MeasureEnsemble ens = measure_ensemble(
        basis, noise, cfg.build_x0(basis), cfg.build_integrator(), cfg.burn_in,
        cfg.m_paths, cfg.threads, cfg.seed);
    VerificationReport rep;
    rep.title = "invariant-measure";
    rep.paths = ens.paths;
    for (int i = 0; i < kNumObservables; ++i) {
        rep.add_detail(std::string("mu_") + kObservableNames[i],
                       ens.obs[std::size_t(i)].mean);
        rep.add_detail(std::string("ci_") + kObservableNames[i],
                       ens.obs[std::size_t(i)].ci95_half);
    }
    rep.add_detail("mu_h_norm4", ens.h4.mean);
    return emit(rep, out);
}

int cmd_uniqueness_of_measure(const ExperimentConfig& cfg,
                              const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    auto rep = invariant_uniqueness_test(
        basis, noise, zero_state(basis), cfg.build_x0(basis),
        cfg.build_integrator(), cfg.burn_in, cfg.m_paths, cfg.threads,
        cfg.seed, cfg.seed + 0x9E3779B97F4A7C15ull);
    return emit(rep, out);
}

int cmd_moment_audit(const ExperimentConfig& cfg, const fs::path& out) {
    const BasisPtr basis = cfg.build_basis();
    const NoiseModel noise = cfg.build_noise(basis);
    const MhdState x0 = cfg.build_x0(basis);
    IntegratorConfig integ = cfg.build_integrator();
    const MeasureEnsemble at_t = measure_ensemble(
        basis, noise, x0, integ, cfg.burn_in, cfg.m_paths, cfg.threads,
        cfg.seed);
    integ.t_end *= 2.0;
    const MeasureEnsemble at_2t = measure_ensemble(
        basis, noise, x0, integ, cfg.burn_in, cfg.m_paths, cfg.threads,
        cfg.seed);
    return emit(measure_moment_audit(at_t, at_2t, noise.constants()), out);
}

int cmd_ou_validate(const ExperimentConfig& cfg, const fs::path& out) {
    return emit(ou_weak_order(cfg.build_ou(), cfg.t_end, cfg.ou_dts,
                              cfg.ou_match_paths, cfg.ou_slope_paths,
                              cfg.threads, cfg.seed),
                out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral Galerkin simulator and Monte Carlo verification "
                 "harness for stochastic MHD with Levy noise"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Cli cli;
    app.add_option("--config", cli.config_path, "configuration file");
    app.add_option("--set", cli.overrides, "override: section.key=value");
    app.add_option("--out", cli.out_dir, "artifact output directory");
    app.add_option("--threads", cli.threads, "worker thread cap");
    app.add_option("--seed", cli.seed, "root seed override");

    const std::vector<std::pair<std::string,
                                int (*)(const ExperimentConfig&,
                                        const fs::path&)>>
        commands = {
            {"simulate", cmd_simulate},
            {"energy-check", cmd_energy},
            {"pmoment-check", cmd_pmoment},
            {"monotonicity-check", cmd_monotonicity},
            {"convergence", cmd_convergence},
            {"uniqueness-replay", cmd_uniqueness_replay},
            {"stability", cmd_stability},
            {"martingale-ratio", cmd_martingale},
            {"invariant-measure", cmd_invariant_measure},
            {"uniqueness-of-measure", cmd_uniqueness_of_measure},
            {"moment-audit", cmd_moment_audit},
            {"ou-validate", cmd_ou_validate},
        };
    for (const auto& [name, fn] : commands) {
        (void)fn;
        app.add_subcommand(name);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = resolve_config(cli);
        const fs::path out = cli.out_dir;
        write_echo(cfg, out);
        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) return fn(cfg, out);
        std::cerr << "unknown subcommand\n";
        return 4;
    } catch (const HypothesisViolationError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 2;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << " (path " << e.path_index()
                  << ")\n";
        return 3;
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const UnsupportedConfigurationError& e) {
        std::cerr << "unsupported configuration: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
