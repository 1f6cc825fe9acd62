#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mimfrac {

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
/// Factorized in place by LU without pivoting, which is stable for the strictly
/// diagonally dominant systems assembled by the solver.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t lower() const { return lower_; }
    [[nodiscard]] std::size_t upper() const { return upper_; }

    [[nodiscard]] bool in_band(std::size_t row, std::size_t col) const {
        return col + lower_ >= row && col <= row + upper_;
    }
    /// Zero outside the band.
    [[nodiscard]] double get(std::size_t row, std::size_t col) const;
    /// Throws std::out_of_range outside the band.
    void set(std::size_t row, std::size_t col, double value);

    /// Replaces the contents by L\U factors. Throws NumericalError on a zero pivot.
    void factorize();
    [[nodiscard]] bool factorized() const { return factorized_; }

    /// Solves A x = b in place using the factors.
    void solve_in_place(std::span<double> b) const;

private:
    [[nodiscard]] std::size_t offset(std::size_t row, std::size_t col) const {
        return row * width_ + (col + lower_ - row);
    }

    std::size_t n_;
    std::size_t lower_;
    std::size_t upper_;
    std::size_t width_;
    std::vector<double> data_;
    bool factorized_ = false;
};

}  // namespace mimfrac
