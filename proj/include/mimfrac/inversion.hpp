#pragma once

// Recovery of the fractional orders (alpha, gamma) from u1 observations at an
// interior point by a homotopy-regularized Levenberg-Marquardt iteration:
//
//   ((1-kappa) G^T G + kappa I) dz = (1-kappa) G^T (eta - xi),   z <- clamp(z + dz)
//
// with kappa(j) = 1 / (1 + exp(sigma (j - j0))) decaying from ~1 to 0, G the
// n x 2 sensitivity matrix of the observations, eta the data and xi the model
// output at the current iterate.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimfrac/model.hpp"

namespace mimfrac {

struct Orders {
    double alpha = 0.0;
    double gamma = 0.0;

    friend bool operator==(const Orders&, const Orders&) = default;
};

double norm(const Orders& z);

struct InversionConfig {
    Orders z0{0.0, 0.0};
    int j0 = 5;
    double sigma = 0.9;
    int max_iter = 100;
    double step_tol = 1e-8;
    double jacobian_step = 1e-3;
    double clamp_margin = 0.01;
    /// Stop after this many consecutive residual increases once kappa < stagnation_kappa.
    int stagnation_window = 3;
    double stagnation_kappa = 0.01;
};

/// Throws ValidationError unless j0 >= 1, sigma > 0, max_iter >= 1, step_tol > 0,
/// jacobian_step in (0, 0.1], clamp_margin in (0, 0.2), stagnation_window >= 1.
void validate(const InversionConfig& cfg);

/// Projects z onto [margin, 1 - margin]^2.
Orders clamp_orders(const Orders& z, double margin);

/// clean.values[k] + theta_k * delta with theta_k ~ U[-1, 1] drawn from a
/// 64-bit Mersenne Twister seeded with `seed`. Records delta and seed.
ObservationSeries add_noise(const ObservationSeries& clean, double delta, std::uint64_t seed);

/// 1 / (1 + exp(sigma (j - j0))).
double homotopy_kappa(int j, int j0, double sigma);

/// Row k holds (du1/dalpha, du1/dgamma) at (x0, t_k).
using Sensitivity = std::vector<std::array<double, 2>>;

/// Central differences of full forward solves. The stencil z +- h is clamped to
/// [margin, 1 - margin] per coordinate and the quotient uses the clamped width.
/// The four perturbed solves run concurrently under OpenMP.
Sensitivity sensitivity_jacobian(const Orders& z, const ModelParams& base, const GridSpec& g, double x0,
                                 double h_fd, double clamp_margin = 0.01);

/// Solves the 2x2 regularized normal equations. Throws NumericalError (with the
/// smallest singular value of G) if the system is singular.
std::array<double, 2> lm_step(std::span<const std::array<double, 2>> G, std::span<const double> residual,
                              double kappa);

enum class StopReason { StepTolerance, ResidualStagnation, MaxIterations, NonFiniteResidual };
const char* to_string(StopReason r);

struct IterationRecord {
    Orders z;              ///< iterate after the update
    double kappa = 0.0;
    double residual_norm = 0.0;  ///< ||eta - xi|| at the iterate before the update
    double update_norm = 0.0;    ///< ||z_new - z_old|| after clamping
};

struct InversionResult {
    Orders z_inv;
    std::optional<double> rel_error;
    int iterations = 0;
    std::vector<IterationRecord> history;
    bool converged = false;
    StopReason reason = StopReason::MaxIterations;
};

/// Runs the iteration from clamp(cfg.z0). Stops when the clamped update is at
/// most step_tol, or when the residual has grown `stagnation_window` times in a
/// row with kappa below stagnation_kappa (the lowest-residual iterate is then
/// returned); both count as converged. Hitting max_iter does not.
/// Requires obs.times to coincide with the grid's time stamps t_1..t_n and
/// obs.x0 to be a grid node. A non-finite residual stops the run with reason
/// NonFiniteResidual and the history so far.
InversionResult invert_orders(const ObservationSeries& obs, const ModelParams& base, const GridSpec& g,
                              const InversionConfig& cfg, std::optional<Orders> z_exact = std::nullopt);

/// Throws ValidationError naming the first time stamp that differs from the
/// grid by more than 1e-9 relative.
void check_alignment(const ObservationSeries& obs, const GridSpec& g);

/// One synthetic experiment cell: data generated at `exact`, perturbed with
/// noise `delta`, inverted `replicates` times with seeds seed, seed+1, ...
struct ReplicateSpec {
    ModelParams base;
    GridSpec grid{80, 400, 100.0};
    double x0 = 0.5;
    Orders exact;
    double delta = 0.0;
    InversionConfig config;
    std::uint64_t seed = 0;
};

struct ReplicateSummary {
    Orders mean_z;                  ///< average recovered orders over successful runs
    double error_of_mean = 0.0;     ///< ||exact - mean_z|| / ||exact||
    double mean_rel_error = 0.0;    ///< average of per-run relative errors
    double mean_iterations = 0.0;
    int successes = 0;
    int failures = 0;
    std::vector<InversionResult> runs;
    std::vector<std::string> failure_messages;
};

/// A run counts as failed if it throws or stops without converging.
/// Replicates run concurrently; results are combined in seed order.
ReplicateSummary run_replicates(const ReplicateSpec& spec, int replicates);

}  // namespace mimfrac
