#include "meshless/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "meshless/errors.hpp"
#include "meshless/harness.hpp"
#include "meshless/parallel.hpp"
#include "meshless/scenario.hpp"
#include "meshless/stability.hpp"

namespace meshless {

namespace {

struct CommonFlags {
    std::string scenario;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt_override;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    auto* sc = sub->add_option("--scenario", f.scenario, "scenario config file");
    auto* pr = sub->add_option("--preset", f.preset, "built-in preset name");
    sc->excludes(pr);
    sub->add_option("--out", f.out, "output directory (overrides [output] dir)");
    sub->add_option("--seed", f.seed, "cloud jitter seed");
    sub->add_option("--dt-override", f.dt_override, "time step (overrides [scheme] dt)");
}

Scenario load(const CommonFlags& f) {
    if (f.scenario.empty() && f.preset.empty())
        throw InvalidArgument("one of --scenario or --preset is required");
    Scenario sc = f.scenario.empty() ? load_preset(f.preset) : parse_scenario(f.scenario);
    if (f.seed) sc.cloud.seed = *f.seed;
    if (f.dt_override) {
        sc.scheme.dt = *f.dt_override;
        sc.dt_given = true;
        validate(sc.scheme);
    }
    if (!f.out.empty()) sc.output_dir = f.out;
    return sc;
}

int cmd_run(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    Scenario sc = load(flags);
    const NodeCloud cloud = build_cloud(sc);
    const StencilTable table = build_all_stencils(cloud, sc.star);
    const SchemeContext ctx(cloud, table, sc.model);
    State init = initial_state(sc, cloud);

    if (!sc.dt_given) {
        State projected = init;
        ctx.neumann.apply(projected.k);
        ctx.neumann.apply(projected.A);
        const StabilityReport rep = dt_bound(cloud, table, projected, sc.model, sc.scheme.stability);
        sc.scheme.dt = 0.9 * rep.global_dt;
        out << "initial dt from stability bound: " << sc.scheme.dt << '\n';
    }

    const Trajectory traj = run(ctx, std::move(init), sc.scheme);
    const auto files = write_snapshots(traj, cloud, sc.output_dir);

    out << sc.name << ": " << cloud.size() << " nodes, " << traj.steps << " steps, t = "
        << traj.final_state.time << '\n';
    out << "wrote " << files.size() << " files to " << sc.output_dir.string() << '\n';
    if (traj.clamp_count) out << "clamped k < 0 inside f " << traj.clamp_count << " times\n";
    if (traj.bound_exceeded)
        err << "warning: dt exceeded the stability bound at " << traj.bound_exceeded
            << " check(s)\n";
    if (traj.dt_reductions)
        out << "dt reduced " << traj.dt_reductions << " time(s), final dt " << traj.final_dt << '\n';

    if (traj.divergence) {
        const DivergenceInfo& d = *traj.divergence;
        err << "divergence at step " << d.step << " (t = " << d.time << "), node " << d.node << ": "
            << d.message << '\n';
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_stability(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const Scenario sc = load(flags);
    const NodeCloud cloud = build_cloud(sc);
    const StencilTable table = build_all_stencils(cloud, sc.star);
    const SchemeContext ctx(cloud, table, sc.model);
    State s = initial_state(sc, cloud);
    ctx.neumann.apply(s.k);
    ctx.neumann.apply(s.A);
    const StabilityReport rep = dt_bound(cloud, table, s, sc.model, sc.scheme.stability);
    write_stability_report(rep, out);
    err << "global_dt = " << std::setprecision(10) << rep.global_dt << ", "
        << rep.violations.size() << " star(s) violate the condition";
    if (rep.fprime_fallbacks) err << ", " << rep.fprime_fallbacks << " f' fallback(s)";
    err << '\n';
    if (sc.dt_given && sc.scheme.dt > rep.global_dt)
        err << "warning: configured dt " << sc.scheme.dt << " exceeds the bound\n";
    return kExitOk;
}

struct VerifyRow {
    std::string check;
    std::string item;
    double value;
    double tolerance;
};

int cmd_verify(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    std::vector<NodeCloud> clouds;
    std::vector<StarConfig> stars;
    if (flags.scenario.empty() && flags.preset.empty()) {
        const std::uint64_t seed = flags.seed.value_or(1);
        clouds.push_back(generate_jittered(100, 1.0, 1, 0.3, seed));
        stars.push_back({2, StarCriterion::distance, {}});
        clouds.push_back(generate_jittered(20, 1.0, 2, 0.3, seed));
        stars.push_back({8, StarCriterion::distance, {}});
    } else {
        const Scenario sc = load(flags);
        clouds.push_back(build_cloud(sc));
        stars.push_back(sc.star);
    }

    std::vector<VerifyRow> rows;
    for (std::size_t c = 0; c < clouds.size(); ++c) {
        const std::string tag = std::to_string(clouds[c].dim) + "d";
        const ExactnessReport rep = polynomial_exactness(clouds[c], stars[c]);
        for (const ExactnessEntry& e : rep.entries)
            rows.push_back({"exactness_" + tag, e.monomial + ":" + e.derivative, e.max_error, 1e-9});
    }
    WeightSpec equal;
    equal.exponent = 0.0;
    const FdEquivalence fd1 = fd_equivalence(generate_regular(21, 1.0, 1), equal);
    rows.push_back({"fd_1d", "first_derivative", fd1.first_derivative, 1e-12});
    rows.push_back({"fd_1d", "second_derivative", fd1.second_derivative, 1e-12});
    const FdEquivalence fd2 = fd_equivalence(generate_regular(11, 1.0, 2), equal);
    rows.push_back({"fd_2d", "laplacian", fd2.second_derivative, 1e-12});

    bool ok = true;
    out << "check,item,value,tolerance,pass\n" << std::setprecision(6);
    for (const VerifyRow& r : rows) {
        const bool pass = r.value <= r.tolerance;
        ok = ok && pass;
        out << r.check << ',' << r.item << ',' << r.value << ',' << r.tolerance << ','
            << (pass ? "yes" : "no") << '\n';
    }
    if (!ok) {
        err << "verification failed\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

struct ConvergenceFlags {
    int dim = 1;
    std::vector<int> levels{81, 161, 321};
    std::string kind = "spatial";
    double jitter = 0.0;
    std::uint64_t seed = 1;
};

int cmd_convergence(const ConvergenceFlags& f, std::ostream& out, std::ostream& err) {
    if (f.levels.size() < 3) throw InvalidArgument("convergence: need at least 3 levels");
    ManufacturedProblem prob;
    prob.star.s = f.dim == 1 ? 2 : 8;
    auto make = [&](int n) {
        return f.jitter > 0.0 ? generate_jittered(n, 1.0, f.dim, f.jitter, f.seed)
                              : generate_regular(n, 1.0, f.dim);
    };
    ConvergenceResult r;
    if (f.kind == "spatial") {
        std::vector<NodeCloud> clouds;
        for (int n : f.levels) clouds.push_back(make(n));
        r = convergence_study(prob, clouds);
    } else {
        const NodeCloud cloud = make(f.levels.back());
        const double h = nominal_spacing(cloud);
        const double dt0 = prob.dt_factor * h * h;
        std::vector<double> dts;
        for (std::size_t i = 0; i < f.levels.size(); ++i)
            dts.push_back(dt0 / static_cast<double>(1u << i));
        r = temporal_study(prob, cloud, dts, dts.back() / 16.0);
    }
    write_convergence_csv(r, out);
    for (const std::string& w : r.warnings) err << "warning: " << w << '\n';
    err << "observed order: " << std::setprecision(4) << r.observed_order << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_threads_from_env();

    CLI::App app{"Meshless GFD solver for the spatial Solow growth model", "meshless_growth"};
    app.require_subcommand(1, 1);

    CommonFlags run_flags, stab_flags, verify_flags;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and write snapshots");
    add_common(run_cmd, run_flags);
    auto* stab_cmd = app.add_subcommand("stability", "print the stability report of the initial state");
    add_common(stab_cmd, stab_flags);
    auto* verify_cmd =
        app.add_subcommand("verify", "polynomial exactness and finite-difference equivalence");
    add_common(verify_cmd, verify_flags);

    ConvergenceFlags conv;
    auto* conv_cmd = app.add_subcommand("convergence", "manufactured-solution refinement study");
    conv_cmd->add_option("--dim", conv.dim, "1 or 2")->check(CLI::IsMember({1, 2}));
    conv_cmd->add_option("--levels", conv.levels, "nodes per axis for each level")->delimiter(',');
    conv_cmd->add_option("--kind", conv.kind, "spatial or temporal")
        ->check(CLI::IsMember({"spatial", "temporal"}));
    conv_cmd->add_option("--jitter", conv.jitter, "cloud jitter (0: regular grid)");
    conv_cmd->add_option("--seed", conv.seed, "jitter seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run_flags, out, err);
        if (*stab_cmd) return cmd_stability(stab_flags, out, err);
        if (*verify_cmd) return cmd_verify(verify_flags, out, err);
        if (*conv_cmd) return cmd_convergence(conv, out, err);
    } catch (const DivergenceError& e) {
        err << "divergence: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace meshless
