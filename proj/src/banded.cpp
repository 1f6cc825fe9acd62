#include "mimfrac/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mimfrac/errors.hpp"

namespace mimfrac {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), width_(lower + upper + 1), data_(n * width_, 0.0) {}

double BandedMatrix::get(std::size_t row, std::size_t col) const {
    if (row >= n_ || col >= n_ || !in_band(row, col)) return 0.0;
    return data_[offset(row, col)];
}

void BandedMatrix::set(std::size_t row, std::size_t col, double value) {
    if (row >= n_ || col >= n_ || !in_band(row, col)) {
        throw std::out_of_range("band matrix entry (" + std::to_string(row) + "," +
                                std::to_string(col) + ") outside the band");
    }
    data_[offset(row, col)] = value;
}

void BandedMatrix::factorize() {
    for (std::size_t p = 0; p < n_; ++p) {
        const double pivot = data_[offset(p, p)];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw NumericalError("band LU: zero pivot at row " + std::to_string(p));
        }
        const std::size_t row_end = std::min(n_, p + lower_ + 1);
        const std::size_t col_end = std::min(n_, p + upper_ + 1);
        for (std::size_t r = p + 1; r < row_end; ++r) {
            double& l = data_[offset(r, p)];
            l /= pivot;
            if (l == 0.0) continue;
            for (std::size_t c = p + 1; c < col_end; ++c) {
                data_[offset(r, c)] -= l * data_[offset(p, c)];
            }
        }
    }
    factorized_ = true;
}

void BandedMatrix::solve_in_place(std::span<double> b) const {
    if (!factorized_) throw std::logic_error("band LU: solve before factorize");
    if (b.size() != n_) throw std::invalid_argument("band LU: rhs size mismatch");
    for (std::size_t r = 0; r < n_; ++r) {
        const std::size_t c0 = r > lower_ ? r - lower_ : 0;
        double acc = b[r];
        for (std::size_t c = c0; c < r; ++c) acc -= data_[offset(r, c)] * b[c];
        b[r] = acc;
    }
    for (std::size_t r = n_; r-- > 0;) {
        const std::size_t c1 = std::min(n_, r + upper_ + 1);
        double acc = b[r];
        for (std::size_t c = r + 1; c < c1; ++c) acc -= data_[offset(r, c)] * b[c];
        b[r] = acc / data_[offset(r, r)];
    }
}

}  // namespace mimfrac
