#pragma once

// Shared value types of the fractional mobile-immobile transport model and the
// L1 (Caputo) history weights used by the implicit scheme.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mimfrac {

/// Physical constants of the two-zone model plus the two fractional orders.
///
///   beta*R1 * D_t^alpha u1 = (1/P) u1_xx - u1_x - omega (u1 - u2) - lambda u1
///   (1-beta)*R2 * D_t^gamma u2 = omega (u1 - u2) - mu u2
///
/// with u1(0,t) = 1, u2(0,t) = 0, zero flux at x = 1 and zero initial data.
struct ModelParams {
    double P = 0.0;       ///< Peclet number
    double R1 = 0.0;      ///< mobile retardation
    double R2 = 0.0;      ///< immobile retardation
    double beta = 0.0;    ///< mobile fraction of storage
    double omega = 0.0;   ///< mass transfer rate
    double lambda = 0.0;  ///< mobile degradation
    double mu = 0.0;      ///< immobile degradation
    double alpha = 0.0;   ///< mobile fractional order
    double gamma = 0.0;   ///< immobile fractional order

    /// Same physical constants with different orders.
    [[nodiscard]] ModelParams with_orders(double a, double g) const {
        ModelParams out = *this;
        out.alpha = a;
        out.gamma = g;
        return out;
    }
};

/// Checks every bound strictly:
/// 0<alpha<1, 0<gamma<1, 0<beta<1, R1>=1, R2>=1, P>0, omega>0, lambda>0, mu>0.
/// Throws ValidationError naming the first violated bound; returns `p` otherwise.
const ModelParams& validate_params(const ModelParams& p);

/// Same as validate_params but ignores the two orders (used when the orders are
/// the unknowns of an inversion).
const ModelParams& validate_physical(const ModelParams& p);

/// Uniform space-time grid on [0,1] x [0,T].
class GridSpec {
public:
    /// Throws ValidationError unless m >= 3, n >= 1 and T > 0 (finite).
    GridSpec(std::size_t m, std::size_t n, double T);

    [[nodiscard]] std::size_t m() const { return m_; }
    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] double T() const { return T_; }
    [[nodiscard]] double h() const { return 1.0 / static_cast<double>(m_); }
    [[nodiscard]] double tau() const { return T_ / static_cast<double>(n_); }
    [[nodiscard]] double x(std::size_t i) const { return static_cast<double>(i) * h(); }
    [[nodiscard]] double t(std::size_t k) const { return static_cast<double>(k) * tau(); }

    /// Number of interior unknowns per species, m - 1.
    [[nodiscard]] std::size_t interior() const { return m_ - 1; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    std::size_t m_;
    std::size_t n_;
    double T_;
};

/// Mobile and immobile concentrations on all (m+1) x (n+1) grid nodes,
/// stored time-major: value(i, k) lives at k*(m+1) + i.
class SolutionGrid {
public:
    explicit SolutionGrid(const GridSpec& grid);

    [[nodiscard]] const GridSpec& grid() const { return grid_; }

    [[nodiscard]] double u1(std::size_t i, std::size_t k) const { return u1_[index(i, k)]; }
    [[nodiscard]] double u2(std::size_t i, std::size_t k) const { return u2_[index(i, k)]; }
    double& u1(std::size_t i, std::size_t k) { return u1_[index(i, k)]; }
    double& u2(std::size_t i, std::size_t k) { return u2_[index(i, k)]; }

    [[nodiscard]] std::span<const double> u1_data() const { return u1_; }
    [[nodiscard]] std::span<const double> u2_data() const { return u2_; }

private:
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t k) const {
        return k * (grid_.m() + 1) + i;
    }

    GridSpec grid_;
    std::vector<double> u1_;
    std::vector<double> u2_;
};

/// Time series of u1 at a fixed interior point.
struct ObservationSeries {
    double x0 = 0.5;
    std::vector<double> times;
    std::vector<double> values;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

/// Throws ValidationError unless times are strictly increasing and positive,
/// values are finite and the same length, and noise_level >= 0.
void validate_series(const ObservationSeries& s);

/// (k+1-j)^(1-order) - (k-j)^(1-order); the L1 weight of the increment
/// u^{j+1} - u^j in the Caputo derivative at step k+1. Requires 0 <= j <= k.
double l1_bracket(double order, std::size_t k, std::size_t j);

/// 2(k+1-j)^(1-order) - (k-j)^(1-order) - (k-j+2)^(1-order); the coefficient of
/// u^j (1 <= j <= k-1) after regrouping the L1 history sum by time level.
double psi_weight(double order, std::size_t k, std::size_t j);

/// l1_bracket by lag: out[l] = (l+1)^(1-order) - l^(1-order) for l = 0..count-1.
std::vector<double> l1_lag_weights(double order, std::size_t count);

}  // namespace mimfrac
