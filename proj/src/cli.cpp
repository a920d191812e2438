#include "varorb/cli.hpp"

#include "varorb/errors.hpp"
#include "varorb/functional.hpp"
#include "varorb/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace varorb {

namespace {

std::ostream& log_stream(const CommandContext& ctx)
{
    return ctx.log ? *ctx.log : std::cerr;
}

void progress(const CommandContext& ctx, const std::string& line)
{
    if (!ctx.quiet) {
        log_stream(ctx) << line << "\n";
    }
}

// Creates the output directory and proves it is writable before any computation.
fs::path prepare_output(const RunConfig& cfg, const CommandContext& ctx)
{
    const fs::path dir = ctx.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(ctx.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("cannot create output directory " + dir.string());
    }
    const fs::path probe = dir / ".write_probe";
    {
        std::FILE* f = std::fopen(probe.string().c_str(), "wb");
        if (!f) {
            throw ConfigError("output directory " + dir.string() + " is not writable");
        }
        std::fclose(f);
    }
    fs::remove(probe, ec);
    return dir;
}

std::string radius_tag(double R)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", R);
    return buf;
}

json summary_header(const char* kind, const RunConfig& cfg)
{
    return json{{"schema", kSchemaVersion}, {"kind", kind}, {"config", config_to_json(cfg)}};
}

} // namespace

int cmd_check(const RunConfig& cfg, const CommandContext& ctx)
{
    validate_config(cfg, RunKind::Check);
    const fs::path dir = prepare_output(cfg, ctx);
    const Potential p = build_potential(cfg);
    const HypothesisReport report = check_hypotheses(p, cfg.H, cfg.profile, cfg.grid);

    json summary = summary_header("check", cfg);
    summary["report"] = hypothesis_to_json(report);
    const std::string text = dump_json(summary);
    write_text(dir / "check.json", text);
    if (!ctx.quiet) {
        (ctx.out ? *ctx.out : std::cout) << text;
    }
    if (!report.energy_ok) {
        log_stream(ctx) << report.energy_message << "\n";
    }
    return report.all_passed() ? ExitSuccess : ExitRunFailure;
}

int cmd_minimize(const RunConfig& cfg, const CommandContext& ctx)
{
    validate_config(cfg, RunKind::Minimize);
    const fs::path dir = prepare_output(cfg, ctx);
    const Potential p = build_potential(cfg);
    const double R = *cfg.R;

    const LoopPath q0 = new_loop(cfg.dim, R, cfg.discretization, initial_direction(cfg), cfg.initial_profile);
    progress(ctx, "minimizing at R=" + radius_tag(R) + " with K=" + std::to_string(cfg.discretization.harmonics));
    const MinimizeReport report = minimize(q0, p, cfg.H, R, cfg.minimize);

    json summary = summary_header("minimize", cfg);
    summary["R"] = R;
    summary["converged"] = report.converged;
    summary["termination"] = report.termination;
    summary["iterations"] = report.iterations;
    summary["f"] = report.f_final.f;
    summary["A"] = report.f_final.A;
    summary["B"] = report.f_final.B;
    summary["grad_norm"] = report.grad_norm;
    summary["dirichlet_energy"] = dirichlet_energy(report.q_R);
    summary["best_restart"] = report.best_restart;
    summary["restarts"] = restarts_to_json(report);
    summary["pairing_residual"] = pairing_identity_residual(report.q_R, p, cfg.H);
    summary["quadrature_gap"] = quadrature_refinement_gap(report.q_R, p, cfg.H);

    write_text(dir / "loop.json", dump_json(loop_to_json(report.q_R)));
    write_trace_csv(dir / "trace.csv", report);

    try {
        const double T = compute_period(report, p, cfg.H);
        const PeriodicOrbit orbit = rescale(report.q_R, T, cfg.discretization.samples);
        const double L = cfg.marker_radius ? *cfg.marker_radius
                                           : std::max(2.0 * min_radius(orbit).second, 0.25 * R);
        const OrbitDiagnostics diag = diagnose(orbit, p, cfg.H, L, cfg.margin);
        summary["T_R"] = T;
        summary["diagnostics"] = diagnostics_to_json(diag);
        write_orbit_csv(dir / "orbit.csv", orbit, p, cfg.H);
    } catch (const EnergyConditionError& e) {
        summary["period_error"] = e.what();
        if (report.converged) {
            write_text(dir / "summary.json", dump_json(summary));
            log_stream(ctx) << e.what() << "\n";
            return ExitRunFailure;
        }
    }

    write_text(dir / "summary.json", dump_json(summary));
    progress(ctx, std::string(report.converged ? "converged" : "did not converge") + " after " +
                      std::to_string(report.iterations) + " iterations; f = " + format_number(report.f_final.f));
    return report.converged ? ExitSuccess : ExitRunFailure;
}

int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx)
{
    validate_config(cfg, RunKind::Sweep);
    const fs::path dir = prepare_output(cfg, ctx);
    const Potential p = build_potential(cfg);
    const SweepPlan plan = make_sweep_plan(cfg);

    progress(ctx, "sweeping " + std::to_string(plan.radii.size()) + " radii");
    HyperbolicCandidate cand;
    try {
        cand = run_sweep(plan, p, cfg.H);
    } catch (const SweepFailedError& e) {
        log_stream(ctx) << "sweep failed: " << e.what() << "\n";
        return ExitRunFailure;
    }

    json summary = summary_header("sweep", cfg);
    summary.update(sweep_to_json(cand));
    write_text(dir / "sweep.json", dump_json(summary));
    write_plot_csv(dir / "plot_data.csv", cand);

    std::string timings = "R,wall_time\n";
    for (const auto& rec : cand.records) {
        timings += format_number(rec.R) + "," + format_number(rec.wall_time) + "\n";
        if (rec.centered) {
            write_orbit_csv(dir / ("orbit_R" + radius_tag(rec.R) + ".csv"), *rec.centered, p, cfg.H);
        }
        progress(ctx, "R=" + radius_tag(rec.R) + (rec.converged ? " converged" : " failed") +
                          (rec.converged ? ", T_R=" + format_number(rec.period) : std::string()));
    }
    write_text(dir / "timings.csv", timings);
    progress(ctx, "verdict: " + to_string(cand.verdict));

    switch (cand.verdict) {
    case Classification::Hyperbolic:
        return ExitSuccess;
    case Classification::Undetermined:
        return ExitUndetermined;
    default:
        return ExitRunFailure;
    }
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Variational construction of periodic and hyperbolic orbits at fixed energy"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_flag("--quiet", quiet, "suppress progress and stdout report");
    };
    CLI::App* check = app.add_subcommand("check", "check the potential hypotheses and energy condition");
    CLI::App* mini = app.add_subcommand("minimize", "minimize at a single radius and rescale to a periodic orbit");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep the radius schedule and classify the limit orbit");
    add_common(check);
    add_common(mini);
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitSuccess : ExitConfigError;
    }

    CommandContext ctx;
    ctx.output_dir = out_dir;
    ctx.quiet = quiet;
    try {
        RunConfig cfg = load_config(config_path);
        if (seed) {
            cfg.set_seed(*seed);
        }
        if (check->parsed()) {
            return cmd_check(cfg, ctx);
        }
        if (mini->parsed()) {
            return cmd_minimize(cfg, ctx);
        }
        return cmd_sweep(cfg, ctx);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return ExitRunFailure;
    }
}

} // namespace varorb
