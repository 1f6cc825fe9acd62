#include "mimfrac/fd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimfrac/errors.hpp"
#include "mimfrac/kernels.hpp"

namespace mimfrac {

SchemeConstants scheme_constants(const ModelParams& p, const GridSpec& g) {
    const double h = g.h();
    const double tau = g.tau();
    const double ca = std::pow(tau, p.alpha) * std::tgamma(2.0 - p.alpha);
    const double cg = std::pow(tau, p.gamma) * std::tgamma(2.0 - p.gamma);

    SchemeConstants c;
    c.r1 = ca / (p.P * p.beta * p.R1 * h * h);
    c.r2 = cg / ((1.0 - p.beta) * p.R2);
    c.A = ca / (p.beta * p.R1 * h) + c.r1;
    c.D = p.omega * ca / (2.0 * p.beta * p.R1);
    c.E = c.r2 * p.omega / 2.0;
    c.B = 1.0 + c.A + c.r1 + 2.0 * c.D + ca / (p.beta * p.R1) * p.lambda;
    c.F = 1.0 + 2.0 * c.E + c.r2 * p.mu;

    for (double v : {c.r1, c.r2, c.A, c.B, c.D, c.E, c.F}) {
        if (!std::isfinite(v)) {
            throw NumericalError("scheme constants overflow: tau^alpha Gamma(2-alpha)/h^2 is not finite");
        }
    }
    return c;
}

BlockSystem::BlockSystem(const SchemeConstants& c, std::size_t m)
    : c_(c), size_(2 * (m - 1)), band_(2 * (m - 1), 3, 3), forcing_(2 * (m - 1), 0.0) {
    if (m < 3) throw ValidationError("block system: m must be >= 3");
    const std::size_t n = m - 1;
    const auto mob = [](std::size_t i) { return 2 * i; };
    const auto imm = [](std::size_t i) { return 2 * i + 1; };

    for (std::size_t i = 0; i < n; ++i) {
        const bool last = i + 1 == n;
        // Mobile row: -A u1_{i-1} + B u1_i - r1 u1_{i+1} - D u2_{i-1} - D u2_{i+1}.
        band_.set(mob(i), mob(i), last ? c.B - c.r1 : c.B);
        if (i > 0) {
            band_.set(mob(i), mob(i - 1), -c.A);
            band_.set(mob(i), imm(i - 1), -c.D);
        }
        if (!last) {
            band_.set(mob(i), mob(i + 1), -c.r1);
            band_.set(mob(i), imm(i + 1), -c.D);
        } else {
            // Reflection u2_m = u2_{m-1}.
            band_.set(mob(i), imm(i), -c.D);
        }
        // Immobile row: -E u1_{i-1} - E u1_{i+1} + F u2_i.
        band_.set(imm(i), imm(i), c.F);
        if (i > 0) band_.set(imm(i), mob(i - 1), -c.E);
        if (!last) {
            band_.set(imm(i), mob(i + 1), -c.E);
        } else {
            band_.set(imm(i), mob(i), -c.E);
        }
    }
    forcing_[0] = c.A;
    forcing_[n] = c.E;
}

std::size_t BlockSystem::interleaved(std::size_t block_index) const {
    const std::size_t n = interior();
    return block_index < n ? 2 * block_index : 2 * (block_index - n) + 1;
}

double BlockSystem::entry(std::size_t row, std::size_t col) const {
    return band_.get(interleaved(row), interleaved(col));
}

std::vector<double> BlockSystem::dense() const {
    std::vector<double> out(size_ * size_);
    for (std::size_t r = 0; r < size_; ++r) {
        for (std::size_t c = 0; c < size_; ++c) out[r * size_ + c] = entry(r, c);
    }
    return out;
}

double BlockSystem::dominance_margin() const {
    double margin = INFINITY;
    for (std::size_t r = 0; r < size_; ++r) {
        double off = 0.0;
        const std::size_t c0 = r >= 3 ? r - 3 : 0;
        const std::size_t c1 = std::min(size_, r + 4);
        for (std::size_t c = c0; c < c1; ++c) {
            if (c != r) off += std::abs(band_.get(r, c));
        }
        margin = std::min(margin, std::abs(band_.get(r, r)) - off);
    }
    return margin;
}

BlockSystem::Factorization BlockSystem::factorize() const {
    BandedMatrix lu = band_;
    lu.factorize();
    return Factorization(std::move(lu));
}

void BlockSystem::Factorization::solve_in_place(std::span<double> rhs,
                                                std::span<double> scratch) const {
    const std::size_t n = rhs.size() / 2;
    for (std::size_t i = 0; i < n; ++i) {
        scratch[2 * i] = rhs[i];
        scratch[2 * i + 1] = rhs[n + i];
    }
    lu_.solve_in_place(scratch);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = scratch[2 * i];
        rhs[n + i] = scratch[2 * i + 1];
    }
}

namespace {

void check_solver_inputs(const ModelParams& p) {
    validate_physical(p);
    const auto order_ok = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; };
    if (!order_ok(p.alpha)) throw ValidationError("alpha must lie in (0,1]");
    if (!order_ok(p.gamma)) throw ValidationError("gamma must lie in (0,1]");
}

}  // namespace

SolutionGrid solve_forward(const ModelParams& p, const GridSpec& g, const SolveOptions& opts) {
    check_solver_inputs(p);
    const std::size_t m = g.m();
    const std::size_t n = g.n();
    const std::size_t ni = g.interior();
    const std::size_t rows = 2 * ni;

    const BlockSystem system(scheme_constants(p, g), m);
    const auto factors = system.factorize();
    const auto w_mobile = l1_lag_weights(p.alpha, n + 1);
    const auto w_immobile = l1_lag_weights(p.gamma, n + 1);

    std::vector<double> levels((n + 1) * rows, 0.0);
    std::vector<double> rhs(rows);
    std::vector<double> scratch(rows);
    const auto forcing = system.boundary_forcing();

    for (std::size_t k = 0; k < n; ++k) {
        const kernels::HistoryView view{std::span<const double>(levels.data(), (k + 1) * rows), rows, ni};
        if (opts.parallel_history) {
            kernels::history_rhs(view, k, w_mobile, w_immobile, rhs);
        } else {
            kernels::history_rhs_reference(view, k, w_mobile, w_immobile, rhs);
        }
        for (std::size_t r = 0; r < rows; ++r) rhs[r] += opts.inflow * forcing[r];
        factors.solve_in_place(rhs, scratch);
        for (std::size_t r = 0; r < rows; ++r) {
            if (!std::isfinite(rhs[r])) {
                throw NumericalError("forward solve: non-finite value at step " + std::to_string(k + 1));
            }
        }
        std::copy(rhs.begin(), rhs.end(), levels.begin() + static_cast<std::ptrdiff_t>((k + 1) * rows));
    }

    SolutionGrid out(g);
    for (std::size_t k = 1; k <= n; ++k) {
        const double* U = levels.data() + k * rows;
        out.u1(0, k) = opts.inflow;
        out.u2(0, k) = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            out.u1(i, k) = U[i - 1];
            out.u2(i, k) = U[ni + i - 1];
        }
        out.u1(m, k) = out.u1(m - 1, k);
        out.u2(m, k) = out.u2(m - 1, k);
    }
    return out;
}

std::size_t node_index(const GridSpec& g, double x0) {
    const double pos = x0 * static_cast<double>(g.m());
    if (!(std::isfinite(x0) && x0 > 0.0 && x0 < 1.0)) {
        throw ValidationError("observation point x0 must lie strictly inside (0,1)");
    }
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) > 1e-9 * std::max(1.0, pos)) {
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        throw ValidationError("observation point x0=" + std::to_string(x0) +
                              " is not a grid node; nearest nodes are i=" + std::to_string(lo) +
                              " and i=" + std::to_string(lo + 1));
    }
    return static_cast<std::size_t>(nearest);
}

ObservationSeries extract_observation(const SolutionGrid& s, double x0) {
    const GridSpec& g = s.grid();
    const std::size_t i = node_index(g, x0);
    ObservationSeries obs;
    obs.x0 = x0;
    obs.times.reserve(g.n());
    obs.values.reserve(g.n());
    for (std::size_t k = 1; k <= g.n(); ++k) {
        obs.times.push_back(g.t(k));
        obs.values.push_back(s.u1(i, k));
    }
    return obs;
}

ObservationSeries observe(const ModelParams& p, const GridSpec& g, double x0) {
    node_index(g, x0);
    return extract_observation(solve_forward(p, g), x0);
}

}  // namespace mimfrac
