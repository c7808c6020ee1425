#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "msd/asymptotics.hpp"
#include "msd/estimator.hpp"
#include "msd/model.hpp"

namespace msd {

// Everything the estimator's limit law needs in one bundle: the regime, the
// Gaussian covariance (sub/critical) or the Rosenblatt parameters
// (supercritical), and the scale constants.
struct AsymptoticLaw {
    double alpha = 0.0;
    double theta = 0.0;
    Regime regime = Regime::SUBCRITICAL;
    std::vector<double> weights;
    SigmaMatrix sigma;  // filled for SUBCRITICAL / CRITICAL
    double tau = 0.0;
    double psi = 0.0;                                   // supercritical only
    std::shared_ptr<const RosenblattParams> rosenblatt;  // supercritical only

    std::string to_json() const;
};

AsymptoticLaw asymptotic_law(const ProcessModel& model, const std::vector<double>& weights,
                             double quad_tol = 1e-10, int n_quad = 256);

// Coefficients of the least-squares limit: the normalized estimation errors
//   (n h^alpha / (eta(n) zeta(h))) * [ (1/log h)(log theta_hat - log theta);
//                                      alpha_hat - alpha ]
// converge to [U^T; -U^T] A Z. rate_factor stores the reciprocal of that
// normalization, eta(n) zeta(h) / (n h^alpha) -- the width factor multiplying
// the limit quantiles in a confidence interval.
struct LsLimitCoefficients {
    std::vector<double> u_vector;  // U_j = (1/c_w) sum_k log(w_k / w_j)
    double c_w = 0.0;              // m sum log^2 w - (sum log w)^2
    std::vector<double> a_diag;    // A_kk = zeta(w_k) / (theta w_k^alpha)
    double rate_factor = 0.0;      // eta(n) zeta(h) / (n h^alpha)
    double alpha = 0.0;
    Regime regime = Regime::SUBCRITICAL;
};

LsLimitCoefficients ls_limit_coefficients(const std::vector<double>& weights, double theta,
                                          double alpha, long n, int h);

// Standard deviation sigma(theta, alpha) of the common limit factor:
// -U^T A Z = sigma * Z_std with Z_std standardized. Subcritical: the
// quadratic form sqrt(U^T A Sigma A U). Supercritical: Z is rank one with a
// shared Rosenblatt factor, so sigma = |sum_j (U^T A)_j| * tau / psi.
// The critical regime is rejected: the interval theory covers only the open
// subregions.
double estimator_limit_sd(const LsLimitCoefficients& coefs, const AsymptoticLaw& law);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    std::string parameter;        // "alpha" or "log_theta"
    Regime regime = Regime::SUBCRITICAL;
    std::string quantile_source;  // "normal" or "rosenblatt"
    bool degenerate = false;      // zero-width (sigma = 0, or log h = 0)

    std::string to_json() const;
};

// Two-sided level-confidence intervals for alpha and log theta from a fitted
// report. The regime is classified from alpha_hat: below the critical point
// the width factor is (h/n)^(1/2) with normal quantiles; above it,
// (h/n)^(2-alpha_hat) with standardized Rosenblatt quantiles (the skewed law
// makes the interval asymmetric; endpoints account for the sign of the rank-1
// coefficient sum). alpha_hat within 0.01 of the critical point 3/2 is
// rejected. h must be the base lag of the report's scheme (lags of the form
// w_k * h with w_1 = 1); n is the path length the report came from.
std::pair<ConfidenceInterval, ConfidenceInterval> confidence_interval(
    const EstimateReport& report, long n, int h, double level);

}  // namespace msd
