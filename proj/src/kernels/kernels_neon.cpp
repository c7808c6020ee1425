#include "msd/kernels.hpp"

#include <arm_neon.h>
#include <cmath>

// NEON kernels (arm64): 2 doubles per vector, same per-lane Neumaier scheme
// as the AVX2 translation unit.

namespace msd::kernels {
namespace {

struct VecAcc {
    float64x2_t sum = vdupq_n_f64(0.0);
    float64x2_t comp = vdupq_n_f64(0.0);

    void add(float64x2_t v) {
        const float64x2_t t = vaddq_f64(sum, v);
        const uint64x2_t sum_bigger = vcgeq_f64(vabsq_f64(sum), vabsq_f64(v));
        const float64x2_t big = vbslq_f64(sum_bigger, sum, v);
        const float64x2_t small = vbslq_f64(sum_bigger, v, sum);
        comp = vaddq_f64(comp, vaddq_f64(vsubq_f64(big, t), small));
        sum = t;
    }

    double reduce(double tail_sum, double tail_comp) const {
        double total = 0.0, compensation = 0.0;
        auto neumaier_add = [&](double v) {
            const double t = total + v;
            if (std::abs(total) >= std::abs(v))
                compensation += (total - t) + v;
            else
                compensation += (v - t) + total;
            total = t;
        };
        neumaier_add(vgetq_lane_f64(sum, 0));
        neumaier_add(vgetq_lane_f64(sum, 1));
        neumaier_add(vgetq_lane_f64(comp, 0));
        neumaier_add(vgetq_lane_f64(comp, 1));
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

double neon_sum_sq_diff(const double* x, std::size_t h, std::size_t count) {
    VecAcc acc;
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i + h), vld1q_f64(x + i));
        acc.add(vmulq_f64(d, d));
    }
    ScalarAcc tail;
    for (; i < count; ++i) {
        const double d = x[i + h] - x[i];
        tail.add(d * d);
    }
    return acc.reduce(tail.sum, tail.comp);
}

double neon_sum(const double* v, std::size_t count) {
    VecAcc acc;
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) acc.add(vld1q_f64(v + i));
    ScalarAcc tail;
    for (; i < count; ++i) tail.add(v[i]);
    return acc.reduce(tail.sum, tail.comp);
}

double neon_sum_sq_dev(const double* v, std::size_t count, double center) {
    VecAcc acc;
    const float64x2_t c = vdupq_n_f64(center);
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(v + i), c);
        acc.add(vmulq_f64(d, d));
    }
    ScalarAcc tail;
    for (; i < count; ++i) {
        const double d = v[i] - center;
        tail.add(d * d);
    }
    return acc.reduce(tail.sum, tail.comp);
}

void neon_diff_lag(const double* x, std::size_t h, std::size_t count, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2)
        vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i + h), vld1q_f64(x + i)));
    for (; i < count; ++i) out[i] = x[i + h] - x[i];
}

}  // namespace

const Backend* neon_backend() {
    static const Backend backend{neon_sum_sq_diff, neon_sum, neon_sum_sq_dev,
                                 neon_diff_lag, "neon"};
    return &backend;
}

}  // namespace msd::kernels
