#pragma once

#include <cstddef>
#include <string>

// Hot inner loops shared by the MSD statistic and the summary code. Each
// kernel has a scalar reference implementation and, where the build targets
// support it, a SIMD variant (AVX2 on x86-64, NEON on arm64). The active
// backend is chosen once at runtime from CPU capabilities and can be forced
// with the MSD_KERNEL_BACKEND environment variable ("scalar", "avx2", "neon").
//
// All sums use Neumaier-compensated accumulation: lag counts reach 10^6 and
// squared increments span several orders of magnitude across lags, so naive
// summation would lose digits that the golden-record determinism tests (and
// the estimator) care about. SIMD variants keep per-lane compensation and
// reduce the lane sums with the same compensated rule, so scalar and SIMD
// results agree to within a few ulp (the equivalence tests pin this down).

namespace msd::kernels {

struct Backend {
    // Sum of (x[i+h] - x[i])^2 for i = 0..count-1.
    double (*sum_sq_diff)(const double* x, std::size_t h, std::size_t count);
    // Compensated sum of v[0..count).
    double (*sum)(const double* v, std::size_t count);
    // Compensated sum of squared deviations from a given center.
    double (*sum_sq_dev)(const double* v, std::size_t count, double center);
    // out[i] = x[i+h] - x[i].
    void (*diff_lag)(const double* x, std::size_t h, std::size_t count, double* out);
    const char* name;
};

// The dispatch table selected at startup (or forced via environment).
const Backend& active();

// Named backends for equivalence tests; null if not compiled in.
const Backend* by_name(const std::string& name);
const Backend& scalar();

// Convenience wrappers through the active backend.
inline double sum_sq_diff(const double* x, std::size_t h, std::size_t count) {
    return active().sum_sq_diff(x, h, count);
}
inline double sum(const double* v, std::size_t count) { return active().sum(v, count); }
inline double sum_sq_dev(const double* v, std::size_t count, double center) {
    return active().sum_sq_dev(v, count, center);
}
inline void diff_lag(const double* x, std::size_t h, std::size_t count, double* out) {
    active().diff_lag(x, h, count, out);
}

}  // namespace msd::kernels
