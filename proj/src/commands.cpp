#include "mimfrac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mimfrac/csv.hpp"
#include "mimfrac/errors.hpp"
#include "mimfrac/fd_solver.hpp"

namespace mimfrac {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_writable(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const fs::path probe = dir / ".mimfrac_write_probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "probe")) throw IoError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

namespace {

struct Prepared {
    ExperimentSpec spec;
    fs::path out;
};

Prepared prepare(const CommandOptions& opts) {
    Prepared p{load_config(opts.config), {}};
    if (opts.seed) p.spec.seed = *opts.seed;
    p.out = opts.out ? *opts.out : p.spec.output_dir;
    ensure_writable(p.out);
    return p;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

json grid_json(const GridSpec& g) { return {{"m", g.m()}, {"n", g.n()}, {"T", g.T()}}; }

csv::Table observation_table(const ObservationSeries& s) {
    csv::Table t{{"t", "u1_at_x0"}, {}};
    for (std::size_t k = 0; k < s.times.size(); ++k) t.rows.push_back({s.times[k], s.values[k]});
    return t;
}

std::string delta_label(double delta) {
    std::ostringstream ss;
    ss << delta;
    return ss.str();
}

}  // namespace

void cmd_forward(const CommandOptions& opts, std::ostream& log) {
    const auto [spec, out] = prepare(opts);
    const ModelParams p = validate_params(spec.model_with_orders());
    const auto sol = solve_forward(p, spec.grid);
    const GridSpec& g = spec.grid;

    csv::Table table{{"x", "t", "u1", "u2"}, {}};
    table.rows.reserve((g.m() + 1) * (g.n() + 1));
    double lo1 = INFINITY, hi1 = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
    for (std::size_t k = 0; k <= g.n(); ++k) {
        for (std::size_t i = 0; i <= g.m(); ++i) {
            const double u1 = sol.u1(i, k);
            const double u2 = sol.u2(i, k);
            table.rows.push_back({g.x(i), g.t(k), u1, u2});
            lo1 = std::min(lo1, u1);
            hi1 = std::max(hi1, u1);
            lo2 = std::min(lo2, u2);
            hi2 = std::max(hi2, u2);
        }
    }
    csv::write_file(out / "solution.csv", table);
    csv::write_file(out / "observation.csv", observation_table(extract_observation(sol, spec.x0)));
    if (!opts.quiet) {
        log << "grid m=" << g.m() << " n=" << g.n() << " T=" << g.T() << '\n'
            << "u1 min=" << lo1 << " max=" << hi1 << '\n'
            << "u2 min=" << lo2 << " max=" << hi2 << '\n'
            << "wrote " << (out / "solution.csv").string() << " and " << (out / "observation.csv").string()
            << '\n';
    }
}

void cmd_reference(const CommandOptions& opts, std::ostream& log) {
    const auto [spec, out] = prepare(opts);
    const ModelParams p = validate_params(spec.model_with_orders());
    const ContourQuadrature& q = spec.reference.quadrature;

    csv::Table table{{"x", "t", "u1_ref", "u2_ref", "est_rel_err", "converged"}, {}};
    int flagged = 0;
    for (const auto& [x, t] : spec.reference.points) {
        ReferenceValue r;
        try {
            r = reference_estimate(x, t, p, q);
        } catch (const NumericalError&) {
            r = {NAN, NAN, INFINITY};
        }
        const bool ok = r.est_rel_err <= q.tolerance && std::isfinite(r.u1) && std::isfinite(r.u2);
        flagged += ok ? 0 : 1;
        table.rows.push_back({x, t, r.u1, r.u2, r.est_rel_err, ok ? 1.0 : 0.0});
    }
    csv::write_file(out / "reference.csv", table);
    if (!opts.quiet) {
        log << "evaluated " << spec.reference.points.size() << " reference points (" << flagged
            << " flagged as not converged)\nwrote " << (out / "reference.csv").string() << '\n';
    }
}

std::vector<fs::path> cmd_make_obs(const CommandOptions& opts, std::ostream& log) {
    const auto [spec, out] = prepare(opts);
    const ModelParams p = validate_params(spec.model_with_orders());
    const auto clean = observe(p, spec.grid, spec.x0);

    const auto sidecar = [&](const ObservationSeries& s, const char* kind) {
        return json{{"x0", s.x0},
                    {"noise_level", s.noise_level},
                    {"seed", s.seed},
                    {"kind", kind},
                    {"exact_orders", {p.alpha, p.gamma}},
                    {"grid", grid_json(spec.grid)}};
    };

    std::vector<fs::path> written;
    const fs::path clean_path = out / "obs_clean.csv";
    csv::write_file(clean_path, observation_table(clean));
    write_json(fs::path(clean_path).replace_extension(".json"), sidecar(clean, "clean"));
    written.push_back(clean_path);

    for (std::size_t i = 0; i < spec.noise_levels.size(); ++i) {
        const double delta = spec.noise_levels[i];
        const auto noisy = add_noise(clean, delta, spec.seed + i);
        const fs::path path = out / ("obs_delta_" + delta_label(delta) + ".csv");
        csv::write_file(path, observation_table(noisy));
        write_json(fs::path(path).replace_extension(".json"), sidecar(noisy, "noisy"));
        written.push_back(path);
    }
    if (!opts.quiet) {
        log << "wrote " << written.size() << " observation files to " << out.string() << '\n';
    }
    return written;
}

ObservationSeries read_observation(const fs::path& path, double x0) {
    const auto table = csv::read_file(path);
    if (table.header.size() != 2 || table.header[0] != "t" || table.header[1] != "u1_at_x0") {
        throw ValidationError("observation file '" + path.string() + "': expected header 't,u1_at_x0'");
    }
    ObservationSeries s;
    s.x0 = x0;
    for (const auto& row : table.rows) {
        s.times.push_back(row[0]);
        s.values.push_back(row[1]);
    }
    const fs::path side = fs::path(path).replace_extension(".json");
    if (fs::exists(side)) {
        std::ifstream f(side);
        try {
            const json j = json::parse(f);
            s.noise_level = j.value("noise_level", 0.0);
            s.seed = j.value("seed", std::uint64_t{0});
        } catch (const json::exception& e) {
            throw ValidationError("sidecar '" + side.string() + "': " + e.what());
        }
    }
    try {
        validate_series(s);
    } catch (const ValidationError& e) {
        throw ValidationError("observation file '" + path.string() + "': " + e.what());
    }
    return s;
}

namespace {

json history_json(const InversionResult& r) {
    json h = json::array();
    for (std::size_t i = 0; i < r.history.size(); ++i) {
        const auto& it = r.history[i];
        h.push_back({{"iteration", i + 1},
                     {"alpha", it.z.alpha},
                     {"gamma", it.z.gamma},
                     {"kappa", it.kappa},
                     {"residual_norm", it.residual_norm},
                     {"update_norm", it.update_norm}});
    }
    return h;
}

}  // namespace

InversionResult cmd_invert(const CommandOptions& opts, const fs::path& observation_file, std::ostream& log) {
    const auto [spec, out] = prepare(opts);
    const auto obs = read_observation(observation_file, spec.x0);
    check_alignment(obs, spec.grid);
    const auto result = invert_orders(obs, spec.model, spec.grid, spec.inversion, spec.exact);

    json report{{"z_inv", {result.z_inv.alpha, result.z_inv.gamma}},
                {"iterations", result.iterations},
                {"converged", result.converged},
                {"stop_reason", to_string(result.reason)},
                {"x0", spec.x0},
                {"noise_level", obs.noise_level},
                {"history", history_json(result)}};
    if (result.rel_error) report["rel_error"] = *result.rel_error;
    write_json(out / "inversion_report.json", report);

    csv::Table trace{{"iteration", "alpha", "gamma", "kappa", "residual_norm", "update_norm"}, {}};
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& it = result.history[i];
        trace.rows.push_back({static_cast<double>(i + 1), it.z.alpha, it.z.gamma, it.kappa, it.residual_norm,
                              it.update_norm});
    }
    csv::write_file(out / "inversion_trace.csv", trace);

    if (!opts.quiet) {
        log << std::setprecision(10) << "z_inv = (" << result.z_inv.alpha << ", " << result.z_inv.gamma
            << ") after " << result.iterations << " iterations (" << to_string(result.reason) << ")";
        if (result.rel_error) log << std::setprecision(3) << ", relative error " << *result.rel_error;
        log << '\n';
    }
    return result;
}

std::string render_markdown(const ExperimentReport& report) {
    std::ostringstream md;
    md << "Inversion results for " << report.id << " (exact z = (" << report.spec.exact->alpha << ", "
       << report.spec.exact->gamma << "), grid m=" << report.spec.grid.m() << " n=" << report.spec.grid.n()
       << ", " << report.spec.replicates << " replicates)\n\n";
    md << "| delta | mean z_inv | mean Err | Err of mean z_inv | mean j | failures |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        std::ostringstream delta;
        delta << row.delta * 100.0 << "%";
        if (row.failed()) {
            md << "| " << delta.str() << " | FAILED | FAILED | FAILED | - | "
               << (row.summary ? row.summary->failures : report.spec.replicates) << " |\n";
            continue;
        }
        const auto& s = *row.summary;
        md << "| " << delta.str() << " | (" << std::fixed << std::setprecision(8) << s.mean_z.alpha << ", "
           << s.mean_z.gamma << ") | " << std::scientific << std::setprecision(2) << s.mean_rel_error << " | "
           << s.error_of_mean << " | " << std::fixed << std::setprecision(1) << s.mean_iterations << " | "
           << s.failures << " |\n";
        md.unsetf(std::ios::floatfield);
    }
    return md.str();
}

ExperimentReport cmd_experiment(std::string_view id, const ExperimentOptions& opts, std::ostream& log) {
    ExperimentReport report{std::string(id), preset(id), {}};
    ExperimentSpec& spec = report.spec;
    if (opts.seed) spec.seed = *opts.seed;
    if (opts.replicates) {
        if (*opts.replicates < 1) throw ValidationError("replicates must be >= 1");
        spec.replicates = *opts.replicates;
    }
    if (opts.z0) spec.inversion.z0 = *opts.z0;
    if (opts.m || opts.n) spec.grid = GridSpec(opts.m.value_or(spec.grid.m()), opts.n.value_or(spec.grid.n()), spec.grid.T());
    node_index(spec.grid, spec.x0);
    validate(spec.inversion);
    ensure_writable(opts.out);

    for (std::size_t i = 0; i < spec.noise_levels.size(); ++i) {
        ExperimentRow row;
        row.delta = spec.noise_levels[i];
        row.seed = spec.seed + 1000 * i;
        // Noise-free replicates are identical, one run suffices.
        const int reps = row.delta == 0.0 ? 1 : spec.replicates;
        try {
            row.summary = run_replicates(
                {spec.model, spec.grid, spec.x0, *spec.exact, row.delta, spec.inversion, row.seed}, reps);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (!opts.quiet) {
            log << id << " delta=" << row.delta << ": "
                << (row.failed() ? "FAILED" : "mean Err " + csv::format_number(row.summary->mean_rel_error))
                << '\n';
        }
        report.rows.push_back(std::move(row));
    }

    const std::string md = render_markdown(report);
    const fs::path base = opts.out / ("experiment_" + report.id);
    {
        std::ofstream f(base.string() + ".md");
        if (!(f << md)) throw IoError("cannot write " + base.string() + ".md");
    }
    csv::Table table{{"delta", "alpha_mean", "gamma_mean", "mean_rel_error", "error_of_mean", "mean_iterations",
                      "successes", "failures"},
                     {}};
    json cells = json::array();
    for (const auto& row : report.rows) {
        if (row.summary) {
            const auto& s = *row.summary;
            table.rows.push_back({row.delta, s.mean_z.alpha, s.mean_z.gamma, s.mean_rel_error, s.error_of_mean,
                                  s.mean_iterations, static_cast<double>(s.successes),
                                  static_cast<double>(s.failures)});
            cells.push_back({{"delta", row.delta}, {"seed", row.seed}, {"failure_messages", s.failure_messages}});
        } else {
            table.rows.push_back({row.delta, NAN, NAN, NAN, NAN, NAN, 0.0, static_cast<double>(spec.replicates)});
            cells.push_back({{"delta", row.delta}, {"seed", row.seed}, {"error", row.error}});
        }
    }
    csv::write_file(base.string() + ".csv", table);
    write_json(base.string() + ".json",
               {{"id", report.id},
                {"exact_orders", {spec.exact->alpha, spec.exact->gamma}},
                {"z0", {spec.inversion.z0.alpha, spec.inversion.z0.gamma}},
                {"grid", grid_json(spec.grid)},
                {"x0", spec.x0},
                {"replicates", spec.replicates},
                {"base_seed", spec.seed},
                {"cells", cells}});
    if (!opts.quiet) log << '\n' << md;
    return report;
}

namespace {

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return 1;
    if (dynamic_cast<const IoError*>(&e)) return 3;
    return 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional mobile-immobile transport: forward solves, Laplace reference, order inversion"};
    app.require_subcommand(1);

    CommandOptions common;
    std::string out_dir;
    std::uint64_t seed = 0;
    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", common.config, "JSON configuration file");
        if (needs_config) c->required();
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_option("--seed", seed, "base RNG seed (overrides seed)");
        sub->add_flag("--quiet", common.quiet, "suppress progress output");
    };

    auto* forward = app.add_subcommand("forward", "solve the forward problem on the configured grid");
    add_common(forward, true);
    auto* reference = app.add_subcommand("reference", "Laplace-inversion reference values at configured points");
    add_common(reference, true);
    auto* make_obs = app.add_subcommand("make-obs", "clean and noisy observation series at x0");
    add_common(make_obs, true);
    auto* invert = app.add_subcommand("invert", "recover (alpha, gamma) from an observation file");
    add_common(invert, true);
    std::string obs_file;
    invert->add_option("--obs", obs_file, "observation CSV (t,u1_at_x0)")->required();
    auto* experiment = app.add_subcommand("experiment", "reproduce an example table: ex51, ex52 or ex53");
    add_common(experiment, false);
    std::string table_id;
    experiment->add_option("id", table_id, "example id (ex51, ex52, ex53)")->required();
    int replicates = 0;
    std::vector<double> z0;
    std::size_t grid_m = 0, grid_n = 0;
    experiment->add_option("--replicates", replicates, "replicates per noise level");
    experiment->add_option("--z0", z0, "initial iterate alpha,gamma")->delimiter(',')->expected(2);
    experiment->add_option("--m", grid_m, "space intervals");
    experiment->add_option("--n", grid_n, "time steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
    CLI::App* active = app.get_subcommands().front();
    if (given(active, "--out")) common.out = out_dir;
    if (given(active, "--seed")) common.seed = seed;

    try {
        if (active == forward) {
            cmd_forward(common, out);
        } else if (active == reference) {
            cmd_reference(common, out);
        } else if (active == make_obs) {
            cmd_make_obs(common, out);
        } else if (active == invert) {
            const auto r = cmd_invert(common, obs_file, out);
            if (!r.converged) {
                err << "inversion stopped without convergence: " << to_string(r.reason) << '\n';
                return 2;
            }
        } else {
            ExperimentOptions eo;
            eo.out = common.out.value_or(".");
            eo.seed = common.seed;
            eo.quiet = common.quiet;
            if (given(experiment, "--replicates")) eo.replicates = replicates;
            if (given(experiment, "--z0")) eo.z0 = Orders{z0[0], z0[1]};
            if (given(experiment, "--m")) eo.m = grid_m;
            if (given(experiment, "--n")) eo.n = grid_n;
            cmd_experiment(table_id, eo, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    }
    return 0;
}

}  // namespace mimfrac
