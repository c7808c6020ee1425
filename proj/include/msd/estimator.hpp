#pragma once

#include <string>
#include <vector>

#include "msd/model.hpp"
#include "msd/msd.hpp"

namespace msd {

// Ordinary least-squares fit of log msd(h_k) = log_theta + alpha * log h_k.
struct EstimateReport {
    double log_theta_hat = 0.0;
    double alpha_hat = 0.0;
    double hurst_hat = 0.0;           // alpha_hat / 2, always
    std::vector<int> lags;            // the lags the fit used
    std::vector<double> residuals;    // per-lag regression residuals
    double c_w = 0.0;                 // m*sum(log^2 w) - (sum log w)^2, w_k = h_k/h_1
    double delta = 1.0;               // sampling interval carried from the curve

    std::string to_json() const;
    static EstimateReport from_json(const std::string& text);
};

// Solves the two-parameter log-log regression through an orthogonal
// factorization of the design matrix (columns [1, log h_k]). Requires at
// least two distinct lags and strictly positive MSD values: a nonpositive
// value means the path was degenerate, and dropping the lag silently would
// bias the slope.
EstimateReport fit_loglog(const MsdCurve& curve);

enum class LagPreset { CONSECUTIVE, PAIR, DYADIC_TRIPLE };

// CONSECUTIVE -> {h_min..h_max}; PAIR -> {h_min, h_max};
// DYADIC_TRIPLE -> {h, 2h, 4h} with h = h_min.
LagScheme lag_presets(LagPreset kind, int h_min, int h_max);

}  // namespace msd
