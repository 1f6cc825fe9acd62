#include "mimfrac/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mimfrac/errors.hpp"
#include "mimfrac/fd_solver.hpp"

namespace mimfrac {

double norm(const Orders& z) { return std::hypot(z.alpha, z.gamma); }

void validate(const InversionConfig& cfg) {
    if (cfg.j0 < 1) throw ValidationError("inversion: j0 must be >= 1");
    if (!(cfg.sigma > 0.0)) throw ValidationError("inversion: sigma must be > 0");
    if (cfg.max_iter < 1) throw ValidationError("inversion: max_iter must be >= 1");
    if (!(cfg.step_tol > 0.0)) throw ValidationError("inversion: step_tol must be > 0");
    if (!(cfg.jacobian_step > 0.0 && cfg.jacobian_step <= 0.1)) {
        throw ValidationError("inversion: jacobian_step must lie in (0, 0.1]");
    }
    if (!(cfg.clamp_margin > 0.0 && cfg.clamp_margin < 0.2)) {
        throw ValidationError("inversion: clamp_margin must lie in (0, 0.2)");
    }
    if (cfg.stagnation_window < 1) throw ValidationError("inversion: stagnation_window must be >= 1");
    if (!std::isfinite(cfg.z0.alpha) || !std::isfinite(cfg.z0.gamma)) {
        throw ValidationError("inversion: z0 must be finite");
    }
}

Orders clamp_orders(const Orders& z, double margin) {
    return {std::clamp(z.alpha, margin, 1.0 - margin), std::clamp(z.gamma, margin, 1.0 - margin)};
}

ObservationSeries add_noise(const ObservationSeries& clean, double delta, std::uint64_t seed) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("noise level must be >= 0");
    ObservationSeries out = clean;
    out.noise_level = delta;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta(-1.0, 1.0);
    for (double& v : out.values) v += theta(rng) * delta;
    return out;
}

double homotopy_kappa(int j, int j0, double sigma) {
    return 1.0 / (1.0 + std::exp(sigma * static_cast<double>(j - j0)));
}

Sensitivity sensitivity_jacobian(const Orders& z, const ModelParams& base, const GridSpec& g, double x0,
                                 double h_fd, double clamp_margin) {
    const double lo_bound = clamp_margin;
    const double hi_bound = 1.0 - clamp_margin;
    const double a_lo = std::max(z.alpha - h_fd, lo_bound);
    const double a_hi = std::min(z.alpha + h_fd, hi_bound);
    const double g_lo = std::max(z.gamma - h_fd, lo_bound);
    const double g_hi = std::min(z.gamma + h_fd, hi_bound);
    const std::array<Orders, 4> points{
        Orders{a_hi, z.gamma}, Orders{a_lo, z.gamma}, Orders{z.alpha, g_hi}, Orders{z.alpha, g_lo}};

    std::array<ObservationSeries, 4> series;
    std::array<std::string, 4> errors;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < 4; ++i) {
        try {
            series[i] = observe(base.with_orders(points[i].alpha, points[i].gamma), g, x0);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sensitivity solve failed at z=(" << points[i].alpha << ", " << points[i].gamma
                << "): " << e.what();
            errors[i] = msg.str();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericalError(e);
    }

    const std::size_t n = series[0].values.size();
    Sensitivity G(n);
    for (std::size_t k = 0; k < n; ++k) {
        G[k][0] = (series[0].values[k] - series[1].values[k]) / (a_hi - a_lo);
        G[k][1] = (series[2].values[k] - series[3].values[k]) / (g_hi - g_lo);
    }
    return G;
}

std::array<double, 2> lm_step(std::span<const std::array<double, 2>> G, std::span<const double> residual,
                              double kappa) {
    if (G.size() != residual.size()) throw ValidationError("lm_step: G and residual differ in length");
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ValidationError("lm_step: kappa must lie in [0,1]");

    double g11 = 0.0, g12 = 0.0, g22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k < G.size(); ++k) {
        g11 += G[k][0] * G[k][0];
        g12 += G[k][0] * G[k][1];
        g22 += G[k][1] * G[k][1];
        b1 += G[k][0] * residual[k];
        b2 += G[k][1] * residual[k];
    }
    const double w = 1.0 - kappa;
    const double m11 = w * g11 + kappa;
    const double m12 = w * g12;
    const double m22 = w * g22 + kappa;
    const double det = m11 * m22 - m12 * m12;
    const double scale = std::max({std::abs(m11), std::abs(m22), std::numeric_limits<double>::min()});
    if (!(std::abs(det) > 1e-14 * scale * scale)) {
        // Smallest eigenvalue of G^T G, reported as a singular value of G.
        const double tr = g11 + g22;
        const double disc = std::sqrt(std::max(0.0, 0.25 * (g11 - g22) * (g11 - g22) + g12 * g12));
        const double smallest = std::sqrt(std::max(0.0, 0.5 * tr - disc));
        std::ostringstream msg;
        msg << "lm_step: singular normal equations (smallest singular value of G = " << smallest << ")";
        throw NumericalError(msg.str());
    }
    const double r1 = w * b1;
    const double r2 = w * b2;
    std::array<double, 2> dz{(m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det};
    if (!std::isfinite(dz[0]) || !std::isfinite(dz[1])) throw NumericalError("lm_step: non-finite update");
    return dz;
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::StepTolerance: return "step_tolerance";
        case StopReason::ResidualStagnation: return "residual_stagnation";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::NonFiniteResidual: return "non_finite_residual";
    }
    return "unknown";
}

void check_alignment(const ObservationSeries& obs, const GridSpec& g) {
    if (obs.times.size() != g.n()) {
        throw ValidationError("observation has " + std::to_string(obs.times.size()) +
                              " samples but the grid has " + std::to_string(g.n()) + " time steps");
    }
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
        const double expected = g.t(k + 1);
        if (!(std::abs(obs.times[k] - expected) <= 1e-9 * std::max(1.0, expected))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "observation time stamp t=" << obs.times[k] << " (row " << k + 1
                << ") does not match grid time " << expected;
            throw ValidationError(msg.str());
        }
    }
}

namespace {

double residual_into(const ObservationSeries& model, const ObservationSeries& data, std::vector<double>& r) {
    r.resize(data.values.size());
    double sq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] = data.values[k] - model.values[k];
        sq += r[k] * r[k];
    }
    return std::sqrt(sq);
}

}  // namespace

InversionResult invert_orders(const ObservationSeries& obs, const ModelParams& base, const GridSpec& g,
                              const InversionConfig& cfg, std::optional<Orders> z_exact) {
    validate(cfg);
    validate_physical(base);
    validate_series(obs);
    check_alignment(obs, g);
    node_index(g, obs.x0);

    InversionResult result;
    Orders z = clamp_orders(cfg.z0, cfg.clamp_margin);
    Orders best_z = z;
    double best_residual = std::numeric_limits<double>::infinity();
    double previous_residual = std::numeric_limits<double>::infinity();
    int increases = 0;
    std::vector<double> residual;
    bool stopped = false;

    for (int j = 0; j < cfg.max_iter; ++j) {
        const double kappa = homotopy_kappa(j, cfg.j0, cfg.sigma);
        const auto model = observe(base.with_orders(z.alpha, z.gamma), g, obs.x0);
        const double rnorm = residual_into(model, obs, residual);
        if (!std::isfinite(rnorm)) {
            result.reason = StopReason::NonFiniteResidual;
            stopped = true;
            break;
        }
        if (rnorm < best_residual) {
            best_residual = rnorm;
            best_z = z;
        }
        increases = (rnorm > previous_residual && kappa < cfg.stagnation_kappa) ? increases + 1 : 0;
        previous_residual = rnorm;
        if (increases >= cfg.stagnation_window) {
            result.reason = StopReason::ResidualStagnation;
            result.converged = true;
            z = best_z;
            stopped = true;
            break;
        }

        const auto G = sensitivity_jacobian(z, base, g, obs.x0, cfg.jacobian_step, cfg.clamp_margin);
        const auto dz = lm_step(G, residual, kappa);
        const Orders next = clamp_orders({z.alpha + dz[0], z.gamma + dz[1]}, cfg.clamp_margin);
        const double update = std::hypot(next.alpha - z.alpha, next.gamma - z.gamma);
        result.history.push_back({next, kappa, rnorm, update});
        z = next;
        if (update <= cfg.step_tol) {
            result.reason = StopReason::StepTolerance;
            result.converged = true;
            stopped = true;
            break;
        }
    }
    if (!stopped) result.reason = StopReason::MaxIterations;

    result.z_inv = z;
    result.iterations = static_cast<int>(result.history.size());
    if (z_exact) {
        result.rel_error = std::hypot(z_exact->alpha - z.alpha, z_exact->gamma - z.gamma) / norm(*z_exact);
    }
    return result;
}

ReplicateSummary run_replicates(const ReplicateSpec& spec, int replicates) {
    if (replicates < 1) throw ValidationError("replicates must be >= 1");
    const auto clean = observe(spec.base.with_orders(spec.exact.alpha, spec.exact.gamma), spec.grid, spec.x0);

    std::vector<std::optional<InversionResult>> runs(static_cast<std::size_t>(replicates));
    std::vector<std::string> errors(static_cast<std::size_t>(replicates));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < replicates; ++i) {
        try {
            const auto noisy = add_noise(clean, spec.delta, spec.seed + static_cast<std::uint64_t>(i));
            runs[i] = invert_orders(noisy, spec.base, spec.grid, spec.config, spec.exact);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    ReplicateSummary out;
    double sa = 0.0, sg = 0.0, se = 0.0, sj = 0.0;
    for (int i = 0; i < replicates; ++i) {
        const auto& run = runs[static_cast<std::size_t>(i)];
        if (!run) {
            ++out.failures;
            out.failure_messages.push_back("seed " + std::to_string(spec.seed + i) + ": " + errors[i]);
            continue;
        }
        if (!run->converged) {
            ++out.failures;
            out.failure_messages.push_back("seed " + std::to_string(spec.seed + i) +
                                           ": stopped without convergence (" + to_string(run->reason) + ")");
        } else {
            ++out.successes;
            sa += run->z_inv.alpha;
            sg += run->z_inv.gamma;
            se += *run->rel_error;
            sj += run->iterations;
        }
        out.runs.push_back(*run);
    }
    if (out.successes > 0) {
        const double cnt = out.successes;
        out.mean_z = {sa / cnt, sg / cnt};
        out.error_of_mean = std::hypot(spec.exact.alpha - out.mean_z.alpha, spec.exact.gamma - out.mean_z.gamma) /
                            norm(spec.exact);
        out.mean_rel_error = se / cnt;
        out.mean_iterations = sj / cnt;
    } else {
        out.mean_z = {NAN, NAN};
        out.error_of_mean = out.mean_rel_error = out.mean_iterations = NAN;
    }
    return out;
}

}  // namespace mimfrac
