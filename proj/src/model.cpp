#include "mimfrac/model.hpp"

#include <cmath>
#include <string>

#include "mimfrac/errors.hpp"

namespace mimfrac {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw ValidationError(message);
}

bool open_unit(double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool at_least_one(double v) { return std::isfinite(v) && v >= 1.0; }

}  // namespace

const ModelParams& validate_physical(const ModelParams& p) {
    require(open_unit(p.beta), "beta must lie in (0,1)");
    require(at_least_one(p.R1), "R1 must be >= 1");
    require(at_least_one(p.R2), "R2 must be >= 1");
    require(positive(p.P), "P must be > 0");
    require(positive(p.omega), "omega must be > 0");
    require(positive(p.lambda), "lambda must be > 0");
    require(positive(p.mu), "mu must be > 0");
    return p;
}

const ModelParams& validate_params(const ModelParams& p) {
    require(open_unit(p.alpha), "alpha must lie in (0,1)");
    require(open_unit(p.gamma), "gamma must lie in (0,1)");
    return validate_physical(p);
}

GridSpec::GridSpec(std::size_t m, std::size_t n, double T) : m_(m), n_(n), T_(T) {
    if (m < 3) throw ValidationError("grid: m must be >= 3, got " + std::to_string(m));
    if (n < 1) throw ValidationError("grid: n must be >= 1");
    if (!(std::isfinite(T) && T > 0.0)) throw ValidationError("grid: T must be > 0");
}

SolutionGrid::SolutionGrid(const GridSpec& grid)
    : grid_(grid),
      u1_((grid.m() + 1) * (grid.n() + 1), 0.0),
      u2_((grid.m() + 1) * (grid.n() + 1), 0.0) {}

void validate_series(const ObservationSeries& s) {
    if (!(std::isfinite(s.noise_level) && s.noise_level >= 0.0)) {
        throw ValidationError("observation: noise_level must be >= 0");
    }
    if (s.times.size() != s.values.size()) {
        throw ValidationError("observation: times and values differ in length");
    }
    double prev = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        if (!std::isfinite(s.times[k]) || s.times[k] <= prev) {
            throw ValidationError("observation: times must be positive and strictly increasing (row " +
                                  std::to_string(k + 1) + ")");
        }
        if (!std::isfinite(s.values[k])) {
            throw ValidationError("observation: non-finite value at row " + std::to_string(k + 1));
        }
        prev = s.times[k];
    }
}

double l1_bracket(double order, std::size_t k, std::size_t j) {
    const std::size_t lag = k - j;
    // 0^(1-order) is 0 for order < 1; at order = 1 the current increment still carries weight 1.
    if (lag == 0) return 1.0;
    const double e = 1.0 - order;
    const double l = static_cast<double>(lag);
    return std::pow(l + 1.0, e) - std::pow(l, e);
}

double psi_weight(double order, std::size_t k, std::size_t j) {
    const double e = 1.0 - order;
    const double l = static_cast<double>(k - j);
    return 2.0 * std::pow(l + 1.0, e) - std::pow(l, e) - std::pow(l + 2.0, e);
}

std::vector<double> l1_lag_weights(double order, std::size_t count) {
    std::vector<double> w(count);
    for (std::size_t l = 0; l < count; ++l) w[l] = l1_bracket(order, l, 0);
    return w;
}

}  // namespace mimfrac
