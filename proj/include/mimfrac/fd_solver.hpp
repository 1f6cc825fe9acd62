#pragma once

// Implicit L1 finite-difference scheme for the fractional mobile-immobile system.
//
// Unknowns per time level are ordered in blocks, U = (u1_1..u1_{m-1}, u2_1..u2_{m-1}).
// Each step solves M U^{k+1} = (L1 history of U) + boundary forcing, with M
// constant in time, so M is factorized once per solve.

#include <cstddef>
#include <span>
#include <vector>

#include "mimfrac/banded.hpp"
#include "mimfrac/model.hpp"

namespace mimfrac {

/// Step coefficients of the scheme. With c_a = tau^alpha Gamma(2-alpha) and
/// c_g = tau^gamma Gamma(2-gamma):
///   r1 = c_a/(P beta R1 h^2)   r2 = c_g/((1-beta) R2)
///   A = c_a/(beta R1 h) + r1   D = omega c_a/(2 beta R1)   E = r2 omega/2
///   B = 1 + A + r1 + 2D + lambda c_a/(beta R1)   F = 1 + 2E + r2 mu
struct SchemeConstants {
    double r1 = 0.0;
    double r2 = 0.0;
    double A = 0.0;
    double B = 0.0;
    double D = 0.0;
    double E = 0.0;
    double F = 0.0;
};

/// Orders may be anywhere in (0,1]; no other validation is applied, so the
/// zero-degradation limit can be evaluated. Throws NumericalError if any
/// constant is not finite.
SchemeConstants scheme_constants(const ModelParams& p, const GridSpec& g);

/// The 2(m-1) step matrix and the constant inflow contribution to the rhs.
///
/// Rows 0..m-2 are the mobile equations, rows m-1..2m-3 the immobile ones.
/// M11 is tridiagonal (-A, B, -r1) with last diagonal B - r1; M12 has -D on both
/// off-diagonals and a final row ending (-D, -D); M21 likewise with E; M22 = F I.
/// Internally the entries live in a band matrix over interleaved
/// (u1_i, u2_i) ordering, bandwidth 3.
class BlockSystem {
public:
    BlockSystem(const SchemeConstants& c, std::size_t m);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::size_t interior() const { return size_ / 2; }
    [[nodiscard]] const SchemeConstants& constants() const { return c_; }

    /// Entry in block ordering.
    [[nodiscard]] double entry(std::size_t row, std::size_t col) const;
    /// Row-major dense copy in block ordering.
    [[nodiscard]] std::vector<double> dense() const;

    /// +A at the first mobile row and +E at the first immobile row (unit inflow).
    [[nodiscard]] std::span<const double> boundary_forcing() const { return forcing_; }

    /// min over rows of |M_ii| - sum_{j != i} |M_ij|.
    [[nodiscard]] double dominance_margin() const;

    /// Factorizes a copy of M; the returned object solves M x = b in block ordering.
    class Factorization {
    public:
        void solve_in_place(std::span<double> rhs, std::span<double> scratch) const;

    private:
        friend class BlockSystem;
        explicit Factorization(BandedMatrix lu) : lu_(std::move(lu)) {}
        BandedMatrix lu_;
    };
    [[nodiscard]] Factorization factorize() const;

private:
    [[nodiscard]] std::size_t interleaved(std::size_t block_index) const;

    SchemeConstants c_;
    std::size_t size_;
    BandedMatrix band_;
    std::vector<double> forcing_;
};

inline BlockSystem assemble_block_system(const SchemeConstants& c, std::size_t m) {
    return BlockSystem(c, m);
}

struct SolveOptions {
    /// Value of u1 at x = 0 for t > 0. 1 for the model; other values are test hooks
    /// (0 gives the homogeneous problem, scaling exercises linearity).
    double inflow = 1.0;
    /// Use the OpenMP history kernel (otherwise the serial reference loop).
    bool parallel_history = true;
};

/// Marches the scheme from zero initial data to t = T.
/// Requires the physical constants to satisfy their bounds and both orders in
/// (0,1]; order 1 gives backward Euler. Throws NumericalError naming the step if
/// a non-finite value appears.
SolutionGrid solve_forward(const ModelParams& p, const GridSpec& g, const SolveOptions& opts = {});

/// Grid node index of x0; throws ValidationError naming the neighbouring nodes
/// when x0 is not a node or not interior.
std::size_t node_index(const GridSpec& g, double x0);

/// u1(x0, t_k), k = 1..n.
ObservationSeries extract_observation(const SolutionGrid& s, double x0);

/// extract_observation(solve_forward(p, g), x0) without keeping the full grid
/// around longer than needed.
ObservationSeries observe(const ModelParams& p, const GridSpec& g, double x0);

}  // namespace mimfrac
