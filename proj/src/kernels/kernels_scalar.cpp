#include "msd/kernels.hpp"

#include <cmath>

// Reference implementations. These define the semantics the SIMD variants
// must reproduce; keep them simple and obviously correct.

namespace msd::kernels {
namespace {

// Neumaier's variant of Kahan summation: the compensation also captures the
// case where the incoming term is larger than the running sum.
struct NeumaierAcc {
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
    double value() const { return sum + comp; }
};

double scalar_sum_sq_diff(const double* x, std::size_t h, std::size_t count) {
    NeumaierAcc acc;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = x[i + h] - x[i];
        acc.add(d * d);
    }
    return acc.value();
}

double scalar_sum(const double* v, std::size_t count) {
    NeumaierAcc acc;
    for (std::size_t i = 0; i < count; ++i) acc.add(v[i]);
    return acc.value();
}

double scalar_sum_sq_dev(const double* v, std::size_t count, double center) {
    NeumaierAcc acc;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = v[i] - center;
        acc.add(d * d);
    }
    return acc.value();
}

void scalar_diff_lag(const double* x, std::size_t h, std::size_t count, double* out) {
    for (std::size_t i = 0; i < count; ++i) out[i] = x[i + h] - x[i];
}

}  // namespace

const Backend& scalar() {
    static const Backend backend{scalar_sum_sq_diff, scalar_sum, scalar_sum_sq_dev,
                                 scalar_diff_lag, "scalar"};
    return backend;
}

}  // namespace msd::kernels
