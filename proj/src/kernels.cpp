#include "mimfrac/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimfrac::kernels {

namespace {

void check(const HistoryView& h, std::size_t k, std::span<const double> wm,
           std::span<const double> wi, std::span<double> rhs) {
    if (h.split > h.rows || rhs.size() != h.rows || h.levels.size() < (k + 1) * h.rows ||
        wm.size() <= k || wi.size() <= k) {
        throw std::invalid_argument("history_rhs: inconsistent sizes");
    }
}

// Rows [r0, r1) with weight table w; j outer so the row loop vectorizes.
void accumulate_block(const HistoryView& h, std::size_t k, std::span<const double> w,
                      std::size_t r0, std::size_t r1, double* out) {
    const double* U = h.levels.data();
    const std::size_t R = h.rows;
    for (std::size_t r = r0; r < r1; ++r) out[r] = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double wj = w[k - j];
        const double* lo = U + j * R;
        const double* hi = lo + R;
        for (std::size_t r = r0; r < r1; ++r) out[r] += (hi[r] - lo[r]) * wj;
    }
    const double* cur = U + k * R;
    for (std::size_t r = r0; r < r1; ++r) out[r] = cur[r] - out[r];
}

}  // namespace

void history_rhs_reference(const HistoryView& h, std::size_t k, std::span<const double> w_mobile,
                           std::span<const double> w_immobile, std::span<double> rhs) {
    check(h, k, w_mobile, w_immobile, rhs);
    const double* U = h.levels.data();
    for (std::size_t r = 0; r < h.rows; ++r) {
        const std::span<const double> w = r < h.split ? w_mobile : w_immobile;
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            acc += (U[(j + 1) * h.rows + r] - U[j * h.rows + r]) * w[k - j];
        }
        rhs[r] = U[k * h.rows + r] - acc;
    }
}

void history_rhs(const HistoryView& h, std::size_t k, std::span<const double> w_mobile,
                 std::span<const double> w_immobile, std::span<double> rhs,
                 std::size_t parallel_threshold) {
    check(h, k, w_mobile, w_immobile, rhs);
    const bool go_parallel = h.rows * k >= parallel_threshold;
    double* out = rhs.data();

#pragma omp parallel if (go_parallel)
    {
        std::size_t nthreads = 1;
        std::size_t tid = 0;
#ifdef _OPENMP
        nthreads = static_cast<std::size_t>(omp_get_num_threads());
        tid = static_cast<std::size_t>(omp_get_thread_num());
#endif
        const std::size_t chunk = (h.rows + nthreads - 1) / nthreads;
        const std::size_t r0 = std::min(h.rows, tid * chunk);
        const std::size_t r1 = std::min(h.rows, r0 + chunk);
        // Split the thread's block at the species boundary.
        const std::size_t mid = std::clamp(h.split, r0, r1);
        if (r0 < mid) accumulate_block(h, k, w_mobile, r0, mid, out);
        if (mid < r1) accumulate_block(h, k, w_immobile, mid, r1, out);
    }
}

}  // namespace mimfrac::kernels
