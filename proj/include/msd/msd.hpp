#pragma once

#include <string>
#include <vector>

#include "msd/fractional.hpp"
#include "msd/model.hpp"

namespace msd {

// Pathwise mean-squared-displacement curve over a set of lags, plus the
// metadata needed to reproduce it.
struct MsdCurve {
    std::vector<int> lags;       // h_1 < ... < h_m
    std::vector<double> values;  // averaged squared increments at each lag
    std::vector<long> counts;    // N_k = n - h_k
    double delta = 1.0;          // sampling interval of the source path
    ProcessModel model;          // source path metadata
    std::uint64_t seed = 0;
    long n = 0;

    int m() const { return static_cast<int>(lags.size()); }
};

// (1/(n-h)) sum_{j=1..n-h} (X((j+h)Delta) - X(j Delta))^2. The j = 0
// increment is excluded. Compensated accumulation via the kernel backend.
double msd(const SamplePath& path, int h);

// msd applied per lag of the scheme.
MsdCurve msd_curve(const SamplePath& path, const LagScheme& scheme);

// Exact second moment E X(h)^2 at integer lag (unit spacing): the power law
// sigma2 * h^alpha for fBm; for the ifOU, 2 int_0^h (h-u) gamma_V(u) du by
// quadrature (absolute accuracy ~1e-9 * h^2; quadrature failure raises a
// numerical error). h = 0 returns 0.
double exact_msd_moment(const ProcessModel& model, int h);

// Cross-covariance of lagged increments at integer gap z:
//   E[(X(j+z+w1 h) - X(j+z)) (X(j+w2 h) - X(j))].
// fBm uses the four-term closed form; the ifOU reduces to second moments via
// the stationary-increment polarization
//   [G(z+h1) - G(z+h1-h2) - G(z) + G(z-h2)] / 2,  G(u) = E X(|u|)^2.
double increment_cross_cov(const ProcessModel& model, long z, int h, double w1, double w2);

// CSV with header "lag,msd,count", full round-trip precision.
void export_msd_csv(const MsdCurve& curve, const std::string& file);

}  // namespace msd
