#pragma once

// L1 history kernels. Each time step of the implicit scheme needs, for every
// interior unknown r,
//
//   rhs[r] = U^k[r] - sum_{j=0}^{k-1} (U^{j+1}[r] - U^j[r]) * w[k-j]
//
// where w is the lag weight table of the unknown's species. This O(k * rows)
// sum dominates the forward solve. `history_rhs` is the OpenMP kernel used by
// the solver; `history_rhs_reference` is the plain serial loop kept as its
// test oracle. Both accumulate each row over j in increasing order, so their
// results are bit-identical.

#include <cstddef>
#include <span>

namespace mimfrac::kernels {

/// History of interior unknowns, time-major: level j occupies
/// [j*rows, (j+1)*rows). Rows [0, split) use the mobile weights, rows
/// [split, rows) the immobile weights.
struct HistoryView {
    std::span<const double> levels;
    std::size_t rows = 0;
    std::size_t split = 0;
};

/// Writes the rhs for step k -> k+1 (requires levels 0..k present and weight
/// tables of length > k).
void history_rhs_reference(const HistoryView& h, std::size_t k, std::span<const double> w_mobile,
                           std::span<const double> w_immobile, std::span<double> rhs);

/// OpenMP version; rows are split across threads in contiguous blocks once
/// rows * k exceeds `parallel_threshold`.
void history_rhs(const HistoryView& h, std::size_t k, std::span<const double> w_mobile,
                 std::span<const double> w_immobile, std::span<double> rhs,
                 std::size_t parallel_threshold = 1 << 16);

}  // namespace mimfrac::kernels
