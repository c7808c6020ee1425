#include "msd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 kernels: 4 doubles per lane-group, per-lane Neumaier compensation,
// compensated cross-lane reduction at the end. This translation unit is the
// only one compiled with -mavx2 -mfma; it must not be entered unless the CPU
// reports AVX2 (the dispatcher checks).

namespace msd::kernels {
namespace {

struct VecAcc {
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();

    static __m256d vabs(__m256d x) {
        const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        return _mm256_and_pd(x, mask);
    }

    void add(__m256d v) {
        const __m256d t = _mm256_add_pd(sum, v);
        const __m256d sum_bigger = _mm256_cmp_pd(vabs(sum), vabs(v), _CMP_GE_OQ);
        const __m256d big = _mm256_blendv_pd(v, sum, sum_bigger);
        const __m256d small = _mm256_blendv_pd(sum, v, sum_bigger);
        comp = _mm256_add_pd(comp, _mm256_add_pd(_mm256_sub_pd(big, t), small));
        sum = t;
    }

    // Compensated scalar reduction of the four (sum, comp) lane pairs plus a
    // scalar tail accumulator.
    double reduce(double tail_sum, double tail_comp) const {
        alignas(32) double s[4], c[4];
        _mm256_store_pd(s, sum);
        _mm256_store_pd(c, comp);
        double total = 0.0, compensation = 0.0;
        auto neumaier_add = [&](double v) {
            const double t = total + v;
            if (std::abs(total) >= std::abs(v))
                compensation += (total - t) + v;
            else
                compensation += (v - t) + total;
            total = t;
        };
        for (double lane : s) neumaier_add(lane);
        for (double lane : c) neumaier_add(lane);
        neumaier_add(tail_sum);
        neumaier_add(tail_comp);
        return total + compensation;
    }
};

struct ScalarAcc {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
};

double avx2_sum_sq_diff(const double* x, std::size_t h, std::size_t count) {
    VecAcc acc;
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d hi = _mm256_loadu_pd(x + i + h);
        const __m256d lo = _mm256_loadu_pd(x + i);
        const __m256d d = _mm256_sub_pd(hi, lo);
        acc.add(_mm256_mul_pd(d, d));
    }
    ScalarAcc tail;
    for (; i < count; ++i) {
        const double d = x[i + h] - x[i];
        tail.add(d * d);
    }
    return acc.reduce(tail.sum, tail.comp);
}

double avx2_sum(const double* v, std::size_t count) {
    VecAcc acc;
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) acc.add(_mm256_loadu_pd(v + i));
    ScalarAcc tail;
    for (; i < count; ++i) tail.add(v[i]);
    return acc.reduce(tail.sum, tail.comp);
}

double avx2_sum_sq_dev(const double* v, std::size_t count, double center) {
    VecAcc acc;
    const __m256d c = _mm256_set1_pd(center);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), c);
        acc.add(_mm256_mul_pd(d, d));
    }
    ScalarAcc tail;
    for (; i < count; ++i) {
        const double d = v[i] - center;
        tail.add(d * d);
    }
    return acc.reduce(tail.sum, tail.comp);
}

void avx2_diff_lag(const double* x, std::size_t h, std::size_t count, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d hi = _mm256_loadu_pd(x + i + h);
        const __m256d lo = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(hi, lo));
    }
    for (; i < count; ++i) out[i] = x[i + h] - x[i];
}

}  // namespace

const Backend* avx2_backend() {
    static const Backend backend{avx2_sum_sq_diff, avx2_sum, avx2_sum_sq_dev,
                                 avx2_diff_lag, "avx2"};
    return &backend;
}

}  // namespace msd::kernels
