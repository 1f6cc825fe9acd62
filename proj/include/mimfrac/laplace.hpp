#pragma once

// Closed-form Laplace-domain solution of the fractional mobile-immobile system
// and its numerical inversion.
//
// Transforming in time turns the system into a constant-coefficient ODE in x:
//   a u1'' - u1' + b u1 = 0,  u1(0) = 1/s,  u1'(1) = 0,
//   b = -beta R1 s^alpha - omega - lambda + omega^2 / ((1-beta) R2 s^gamma + omega + mu),
// with a = 1/P, and u2 = omega u1 / ((1-beta) R2 s^gamma + omega + mu).

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mimfrac/model.hpp"

namespace mimfrac {

using cplx = std::complex<double>;

/// Everything needed to evaluate u1_hat(x; s) = c1 e^{eta1 x} + c2 e^{eta2 x}.
/// Roots satisfy a eta^2 - eta + b = 0 with Re(eta1) >= Re(eta2).
struct LaplaceCoefficients {
    cplx s;
    double a = 0.0;
    cplx b;
    cplx eta1;
    cplx eta2;
    cplx c1;
    cplx c2;
    /// (1-beta) R2 s^gamma + omega + mu
    cplx immobile_denominator;
};

/// Principal-branch b(s). Valid on the plane cut along (-inf, 0]; throws
/// ValidationError for s on the cut.
cplx coeff_b(cplx s, const ModelParams& p);

LaplaceCoefficients laplace_coefficients(cplx s, const ModelParams& p);

struct LaplacePair {
    cplx u1;
    cplx u2;
};

/// Transformed concentrations at x in [0,1]. Exponentials are rearranged so
/// that their arguments have bounded real part, which keeps large |s| finite.
LaplacePair laplace_profile(double x, cplx s, const ModelParams& p);
LaplacePair laplace_profile(double x, const LaplaceCoefficients& c);

/// d/dx u1_hat at x = 1, computed from the same rearranged terms.
cplx laplace_flux_at_outlet(const LaplaceCoefficients& c);

/// max over `samples` and `x_grid` of |s| |u1_hat(x, s)|.
double bound_constant(const ModelParams& p, std::span<const cplx> samples,
                      std::span<const double> x_grid);
/// Same with x_grid = {0, 0.05, ..., 1}.
double bound_constant(const ModelParams& p, std::span<const cplx> samples);

/// u1_hat(x0, s) for real s > 0 and the given orders; real by construction.
double real_s_profile(double x0, double s, double alpha, double gamma, const ModelParams& base);

/// Settings for contour inversion. The estimate uses `nodes` and 2*`nodes`
/// quadrature points; the relative error is measured against
/// max(|f(t)|, scale_floor).
struct ContourQuadrature {
    int nodes = 24;
    double tolerance = 1e-6;
    double scale_floor = 1e-6;
};

/// Throws ValidationError unless nodes >= 8, tolerance in (0, 1e-2] and
/// scale_floor > 0.
void validate(const ContourQuadrature& q);

/// One quadrature point of the inversion sum f(t) ~ Re sum_k w_k F(s_k).
struct ContourNode {
    cplx s;
    cplx weight;
};

/// Midpoint rule on an optimized Talbot contour
///   s(theta) = (N/t)(-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta)
/// over theta in (-pi, pi). Geometric convergence for transforms analytic off
/// the negative real axis. Weights include e^{s t} s'(theta) / (i N).
std::vector<ContourNode> talbot_nodes(double t, int count);

struct InverseValue {
    double value = 0.0;
    double imag_residue = 0.0;
    double est_rel_err = 0.0;
};

/// Inverts a scalar transform at time t > 0. Throws NumericalError when the
/// N and 2N estimates disagree beyond q.tolerance.
InverseValue invert_laplace(const std::function<cplx(cplx)>& transform, double t,
                            const ContourQuadrature& q);

struct ReferenceValue {
    double u1 = 0.0;
    double u2 = 0.0;
    double est_rel_err = 0.0;
};

/// Reference solution (u1, u2)(x, t) by inverting laplace_profile; never throws
/// on slow convergence, the caller inspects est_rel_err.
ReferenceValue reference_estimate(double x, double t, const ModelParams& p, const ContourQuadrature& q = {});

/// reference_estimate that throws NumericalError when est_rel_err exceeds
/// q.tolerance.
ReferenceValue invert_at(double x, double t, const ModelParams& p, const ContourQuadrature& q = {});

}  // namespace mimfrac
