#include "mimfrac/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mimfrac/errors.hpp"

namespace mimfrac {

namespace {

void check_branch(cplx s) {
    if (!(std::isfinite(s.real()) && std::isfinite(s.imag())) ||
        (s.imag() == 0.0 && s.real() <= 0.0)) {
        std::ostringstream msg;
        msg << "Laplace variable s=" << s << " lies on the branch cut (-inf, 0]";
        throw ValidationError(msg.str());
    }
}

// c1 e^{eta1 x} + c2 e^{eta2 x}, written over the common denominator
// d = eta1 - eta2 e^{eta2 - eta1}; every exponential has Re(argument) <= Re(eta2).
struct ProfileTerms {
    cplx first;   // c1 e^{eta1 x}
    cplx second;  // c2 e^{eta2 x}
};

ProfileTerms profile_terms(double x, const LaplaceCoefficients& c) {
    const cplx d = (c.eta1 - c.eta2 * std::exp(c.eta2 - c.eta1)) * c.s;
    return {-c.eta2 * std::exp(c.eta1 * (x - 1.0) + c.eta2) / d, c.eta1 * std::exp(c.eta2 * x) / d};
}

}  // namespace

cplx coeff_b(cplx s, const ModelParams& p) {
    check_branch(s);
    const cplx den = (1.0 - p.beta) * p.R2 * std::pow(s, p.gamma) + p.omega + p.mu;
    return -p.beta * p.R1 * std::pow(s, p.alpha) - p.omega - p.lambda + p.omega * p.omega / den;
}

LaplaceCoefficients laplace_coefficients(cplx s, const ModelParams& p) {
    LaplaceCoefficients c;
    c.s = s;
    c.a = 1.0 / p.P;
    c.b = coeff_b(s, p);
    c.immobile_denominator = (1.0 - p.beta) * p.R2 * std::pow(s, p.gamma) + p.omega + p.mu;
    const cplx root = std::sqrt(1.0 - 4.0 * c.a * c.b);  // principal: Re >= 0
    c.eta1 = (1.0 + root) / (2.0 * c.a);
    c.eta2 = (1.0 - root) / (2.0 * c.a);
    c.c1 = c.eta2 / s / (c.eta2 - c.eta1 * std::exp(c.eta1 - c.eta2));
    c.c2 = c.eta1 / s / (c.eta1 - c.eta2 * std::exp(c.eta2 - c.eta1));
    return c;
}

LaplacePair laplace_profile(double x, const LaplaceCoefficients& c) {
    cplx u1;
    if (x == 0.0) {
        u1 = 1.0 / c.s;
    } else {
        const auto t = profile_terms(x, c);
        u1 = t.first + t.second;
    }
    return {u1, 0.0};
}

LaplacePair laplace_profile(double x, cplx s, const ModelParams& p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("Laplace profile: x must lie in [0,1]");
    const auto c = laplace_coefficients(s, p);
    LaplacePair out = laplace_profile(x, c);
    out.u2 = p.omega * out.u1 / c.immobile_denominator;
    return out;
}

cplx laplace_flux_at_outlet(const LaplaceCoefficients& c) {
    const auto t = profile_terms(1.0, c);
    return c.eta1 * t.first + c.eta2 * t.second;
}

double bound_constant(const ModelParams& p, std::span<const cplx> samples,
                      std::span<const double> x_grid) {
    double best = 0.0;
    for (const cplx& s : samples) {
        const auto c = laplace_coefficients(s, p);
        for (double x : x_grid) best = std::max(best, std::abs(s) * std::abs(laplace_profile(x, c).u1));
    }
    return best;
}

double bound_constant(const ModelParams& p, std::span<const cplx> samples) {
    std::vector<double> xs(21);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) / 20.0;
    return bound_constant(p, samples, xs);
}

double real_s_profile(double x0, double s, double alpha, double gamma, const ModelParams& base) {
    if (!(s > 0.0)) throw ValidationError("real_s_profile: s must be > 0");
    return laplace_profile(x0, cplx(s, 0.0), base.with_orders(alpha, gamma)).u1.real();
}

void validate(const ContourQuadrature& q) {
    if (q.nodes < 8) throw ValidationError("quadrature: nodes must be >= 8");
    if (!(q.tolerance > 0.0 && q.tolerance <= 1e-2)) {
        throw ValidationError("quadrature: tolerance must lie in (0, 1e-2]");
    }
    if (!(q.scale_floor > 0.0)) throw ValidationError("quadrature: scale_floor must be > 0");
}

std::vector<ContourNode> talbot_nodes(double t, int count) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("inverse Laplace: t must be > 0");
    if (count < 1) throw ValidationError("inverse Laplace: node count must be positive");
    constexpr double shift = -0.6122;
    constexpr double scale = 0.5017;
    constexpr double angle = 0.6407;
    constexpr double slope = 0.2645;
    const double N = count;
    const double step = 2.0 * std::numbers::pi / N;

    std::vector<ContourNode> nodes(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double th = -std::numbers::pi + (k + 0.5) * step;
        const double cot = 1.0 / std::tan(angle * th);
        const double sn = std::sin(angle * th);
        const cplx z = (N / t) * cplx(shift + scale * th * cot, slope * th);
        const cplx dz = (N / t) * cplx(scale * (cot - angle * th / (sn * sn)), slope);
        nodes[static_cast<std::size_t>(k)] = {z, std::exp(z * t) * dz / cplx(0.0, N)};
    }
    return nodes;
}

namespace {

double relative_gap(double fine, double coarse, double floor) {
    return std::abs(fine - coarse) / std::max(std::abs(fine), floor);
}

}  // namespace

InverseValue invert_laplace(const std::function<cplx(cplx)>& transform, double t,
                            const ContourQuadrature& q) {
    validate(q);
    cplx coarse = 0.0;
    for (const auto& node : talbot_nodes(t, q.nodes)) coarse += node.weight * transform(node.s);
    cplx fine = 0.0;
    for (const auto& node : talbot_nodes(t, 2 * q.nodes)) fine += node.weight * transform(node.s);

    InverseValue out{fine.real(), fine.imag(), relative_gap(fine.real(), coarse.real(), q.scale_floor)};
    if (!(out.est_rel_err <= q.tolerance)) {
        std::ostringstream msg;
        msg << "inverse Laplace did not converge at t=" << t << ": estimated relative error "
            << out.est_rel_err << " > " << q.tolerance;
        throw NumericalError(msg.str());
    }
    return out;
}

ReferenceValue reference_estimate(double x, double t, const ModelParams& p, const ContourQuadrature& q) {
    validate(q);
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("reference: x must lie in [0,1]");
    const auto sum = [&](int count) {
        cplx u1 = 0.0;
        cplx u2 = 0.0;
        for (const auto& node : talbot_nodes(t, count)) {
            const auto v = laplace_profile(x, node.s, p);
            u1 += node.weight * v.u1;
            u2 += node.weight * v.u2;
        }
        return std::pair{u1.real(), u2.real()};
    };
    const auto [c1, c2] = sum(q.nodes);
    const auto [f1, f2] = sum(2 * q.nodes);
    const double err = std::max(relative_gap(f1, c1, q.scale_floor), relative_gap(f2, c2, q.scale_floor));
    return {f1, f2, std::isfinite(err) ? err : INFINITY};
}

ReferenceValue invert_at(double x, double t, const ModelParams& p, const ContourQuadrature& q) {
    const auto r = reference_estimate(x, t, p, q);
    if (!(r.est_rel_err <= q.tolerance) || !std::isfinite(r.u1) || !std::isfinite(r.u2)) {
        std::ostringstream msg;
        msg << "reference inversion did not converge at (x=" << x << ", t=" << t
            << "): estimated relative error " << r.est_rel_err;
        throw NumericalError(msg.str());
    }
    return r;
}

}  // namespace mimfrac
