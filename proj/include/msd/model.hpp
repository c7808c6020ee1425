#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msd/common.hpp"

// Process descriptions and the assumption bookkeeping shared by every other
// module: the two concrete models (fBm and integrated fOU), the lag scheme of
// the regression, the three-way regime split in the diffusion exponent, and
// the lag-growth diagnostics.

namespace msd {

enum class ProcessKind { FBM, IFOU };

struct ProcessModel {
    ProcessKind kind = ProcessKind::FBM;
    double H = 0.5;        // Hurst index, in (0,1)
    double alpha = 1.0;    // diffusion exponent, always exactly 2*H
    double sigma2 = 1.0;   // variance scale of the driving noise
    double lambda = 1.0;   // ifOU relaxation rate (unused for FBM)
    double c_alpha = 0.0;  // spectral constant of the process
    double delta0 = 2.0;   // short-range regularity exponent
    double eps0 = 1.0;     // short-range regularity radius

    // Factories validate and fill the derived constants (alpha, c_alpha).
    static ProcessModel fbm(double H, double sigma2 = 1.0);
    // For the ifOU the short-range term |s(x)|^2 = lambda^2/(lambda^2+x^2) is
    // analytic at 0, which gives delta0 = 2 and eps0 = lambda.
    static ProcessModel ifou(double H, double sigma2 = 1.0, double lambda = 1.0);

    std::string to_json() const;
    static ProcessModel from_json(const std::string& text);
};

// The local power law E X^2(t) ~ theta * t^alpha. For fBm theta = sigma2
// exactly; for the ifOU theta = sigma2 / lambda^2 (the relaxation flattens
// the spectral density near zero by a factor lambda^-2).
double theta_constant(const ProcessModel& model);

struct LagScheme {
    int base_lag = 1;               // h
    std::vector<double> weights;    // w_1 < ... < w_m with w_k * h integral

    int m() const { return static_cast<int>(weights.size()); }
    std::vector<int> lags() const;  // h_k = w_k * h
    // Throws domain_error unless lags are distinct, increasing, integral and
    // (when n > 0) satisfy h_m <= n - 1.
    void validate(int n = 0) const;
    // Builds a scheme with base_lag = gcd-free smallest lag from explicit lag
    // values (h = h_1, w_k = h_k / h_1).
    static LagScheme from_lags(const std::vector<int>& lags);
};

enum class Regime { SUBCRITICAL, CRITICAL, SUPERCRITICAL };

inline constexpr double kCriticalTolerance = 1e-6;

// Three-way split of the exponent range at alpha = 3/2. Estimated exponents
// never hit the point exactly, so a small half-width around it is classified
// as critical; the default matches the library-wide constant.
Regime classify_regime(double alpha, double tol = kCriticalTolerance);

const char* regime_name(Regime r);

// delta = min(alpha/2, delta0/2) — the decay exponent of both the moment
// ratio E X^2(h)/(theta h^alpha) - 1 and the increment-covariance residual.
double delta_exponent(const ProcessModel& model);

// Diagnostics for the lag-growth regime: the lag must grow slower than
// n/log^2(n) and faster than n^{1/(1+delta/2)}. Both ratios should be small;
// values above the documented threshold only warn, since the condition is
// asymptotic rather than a hard validity constraint at finite n.
struct A2Diagnostics {
    double q1 = 0.0;  // h * log^2(n) / n            (upper-growth check)
    double q2 = 0.0;  // n / h^(1 + delta/2)         (lower-growth check)
    bool warn = false;
};

A2Diagnostics check_a2_regime(long n, long h, double delta, double warn_threshold = 1.0);

}  // namespace msd
