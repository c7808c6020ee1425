#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "msd/model.hpp"

// Limit-law computations: normalization rates for the three exponent regimes,
// the Gaussian limit covariance, and the Rosenblatt-distribution numerics
// (kernel spectrum, cumulant coefficients, characteristic function, CDF and
// quantiles via characteristic-function inversion).

namespace msd {

// Spectral constant of standard fBm: sqrt(pi^-1 * H * Gamma(2H) * sin(H pi)).
double c_H(double H);

// Covariance tail scale: tau = (C_alpha/C_H)^2 * alpha(alpha-1)/2. The first
// factor equals theta_constant(model), so for fBm tau = sigma2 * H(2H-1).
double tau(const ProcessModel& model);

// Standardization constant of the variance-one Rosenblatt law,
// psi = sqrt((2 alpha - 3)(alpha - 1)/2); requires alpha > 3/2.
double psi_alpha(double alpha);

// Closed form of the second cumulant coefficient c_2 = integral of
// |x-y|^(2 alpha - 4) over the unit square = 1/((2 alpha - 3)(alpha - 1)).
double rosenblatt_c2_closed_form(double alpha);

struct NormalizationPair {
    double eta = 0.0;
    std::vector<double> zeta_per_lag;
    Regime regime = Regime::SUBCRITICAL;
};

// Rate pair (eta(n), zeta(h)) per regime: subcritical (sqrt(n), h^(alpha+1/2)),
// critical (sqrt(n log n), h^2), supercritical (n^(alpha-1), h^2).
NormalizationPair normalization(double alpha, long n, int h,
                                double tol = kCriticalTolerance);
NormalizationPair normalization(double alpha, long n, const std::vector<int>& lags,
                                double tol = kCriticalTolerance);
double zeta_value(double alpha, double h, Regime regime);

struct SigmaMatrix {
    int m = 0;
    double alpha = 0.0;
    std::vector<double> weights;
    std::vector<double> entries;  // row-major m x m, symmetric

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * m + j]; }
};

// Gaussian-regime limit covariance, computed in the time domain:
//   Sigma_{k1,k2} = 2 (w_k1 w_k2)^-(alpha+1/2) * theta^2 * I(w_k1, w_k2),
//   I(w1,w2) = int_R G(u; w1, w2)^2 du,
//   G(u; w1, w2) = [|u+w1|^2H - |u+w1-w2|^2H - |u|^2H + |u-w2|^2H]/2.
// G is the cross-covariance of unit-lag-scaled increments; the Brownian case
// alpha = 1, w = 1 gives the exact anchor value 4/3. The integrand has cusps
// at u in {-w1, 0, w2-w1, w2}; panels split there and the tails are mapped to
// finite intervals by u -> 1/t, so no truncation error enters.
SigmaMatrix sigma_gaussian(const ProcessModel& model, const std::vector<double>& weights,
                           double quad_tol = 1e-10);

// Critical-regime covariance: every entry equals 4 tau^2, independent of the
// weights.
SigmaMatrix sigma_critical(const ProcessModel& model, int m);

// ---------------------------------------------------------------- Rosenblatt

// Eigenvalues (descending) of the symmetric Nystrom matrix
// [sqrt(g_i g_j) |x_i - x_j|^(alpha-2)] for the n_quad-point Gauss-Legendre
// rule on [0,1], with the integrable diagonal singularity replaced by the
// exact average of the kernel over each node's cell. Used for
// self-convergence checks; the law computations below use the completed
// spectrum in RosenblattParams, whose tail this truncation misses.
std::vector<double> rosenblatt_eigenvalues(double alpha, int n_quad);

struct RosenblattInversionCache;  // internal (rosenblatt.cpp)

struct RosenblattParams {
    double alpha = 0.0;
    double tau = 0.0;
    double psi = 0.0;
    // Spectrum of the kernel |x-y|^(alpha-2) on [0,1]: n_quad leading modes
    // from a piecewise-constant Galerkin discretization, extended by the
    // known power-law tail lambda_k ~ 2 Gamma(alpha-1) sin(pi alpha/2) (pi k)^(1-alpha)
    // rescaled so that sum lambda_k^2 + var_far equals the closed-form c_2
    // exactly. Sorted descending.
    std::vector<double> eigenvalues;
    // Residual sum of lambda_k^2 beyond the stored modes; enters the
    // characteristic function as an aggregate Gaussian factor.
    double var_far = 0.0;
    std::vector<double> c_s;  // c_s cache, index s-2 for s = 2..s_max
    int n_quad = 0;
    int s_max = 0;

    std::shared_ptr<RosenblattInversionCache> inversion;  // lazy CDF tables
};

RosenblattParams make_rosenblatt_params(const ProcessModel& model, int n_quad = 256,
                                        int s_max = 12, int n_store = 4096);

// Power sums c_s = sum_k lambda_k^s of the completed spectrum (the cyclic
// integral of the kernel over [0,1]^s); cached for s <= s_max.
double rosenblatt_cs(const RosenblattParams& params, int s);

// phi(t) = prod_k exp(-i t scale lambda_k)/sqrt(1 - 2 i t scale lambda_k)
//          * exp(-(t scale)^2 var_far),
// the law of scale * sum_k lambda_k (xi_k^2 - 1). scale = psi(alpha) gives the
// standardized (variance one) law; scale = tau gives the limit of the
// normalized MSD statistic. For the multivariate rank-1 limit pass
// t = sum_k t_k.
std::complex<double> rosenblatt_cf(const RosenblattParams& params, double t, double scale);

// CDF by characteristic-function inversion on a cached oscillation-controlled
// node table; quantile by monotone bracketing + bisection/secant to tol.
double rosenblatt_cdf(const RosenblattParams& params, double x, double scale,
                      double tol = 1e-6);
double rosenblatt_quantile(const RosenblattParams& params, double p, double scale,
                           double tol = 1e-6);

}  // namespace msd
