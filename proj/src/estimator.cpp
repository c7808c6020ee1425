#include "msd/estimator.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "msd/common.hpp"

namespace msd {

EstimateReport fit_loglog(const MsdCurve& curve) {
    const int m = curve.m();
    if (m < 2) throw domain_error("fit_loglog: need at least two lags");
    for (int k = 1; k < m; ++k)
        if (curve.lags[k] == curve.lags[k - 1])
            throw domain_error("fit_loglog: lags must be distinct");
    for (double v : curve.values)
        if (!(v > 0.0))
            throw domain_error(
                "fit_loglog: nonpositive MSD value (degenerate path); refusing to fit");

    Eigen::MatrixXd design(m, 2);
    Eigen::VectorXd q(m);
    for (int k = 0; k < m; ++k) {
        design(k, 0) = 1.0;
        design(k, 1) = std::log(static_cast<double>(curve.lags[k]) * curve.delta);
        q(k) = std::log(curve.values[k]);
    }
    const Eigen::Vector2d beta = design.householderQr().solve(q);
    const Eigen::VectorXd resid = q - design * beta;

    EstimateReport report;
    report.log_theta_hat = beta(0);
    report.alpha_hat = beta(1);
    report.hurst_hat = beta(1) / 2.0;
    report.lags = curve.lags;
    report.residuals.assign(resid.data(), resid.data() + m);
    report.delta = curve.delta;

    double slw = 0.0, slw2 = 0.0;
    for (int k = 0; k < m; ++k) {
        const double lw = std::log(static_cast<double>(curve.lags[k]) / curve.lags[0]);
        slw += lw;
        slw2 += lw * lw;
    }
    report.c_w = m * slw2 - slw * slw;
    return report;
}

LagScheme lag_presets(LagPreset kind, int h_min, int h_max) {
    if (h_min < 1 || h_min >= h_max)
        throw domain_error("lag_presets: need 1 <= h_min < h_max");
    std::vector<int> lags;
    switch (kind) {
        case LagPreset::CONSECUTIVE:
            lags.resize(static_cast<std::size_t>(h_max - h_min) + 1);
            std::iota(lags.begin(), lags.end(), h_min);
            break;
        case LagPreset::PAIR:
            lags = {h_min, h_max};
            break;
        case LagPreset::DYADIC_TRIPLE:
            lags = {h_min, 2 * h_min, 4 * h_min};
            break;
    }
    return LagScheme::from_lags(lags);
}

std::string EstimateReport::to_json() const {
    nlohmann::json j;
    j["log_theta_hat"] = log_theta_hat;
    j["alpha_hat"] = alpha_hat;
    j["hurst_hat"] = hurst_hat;
    j["lags"] = lags;
    j["residuals"] = residuals;
    j["c_w"] = c_w;
    j["delta"] = delta;
    return j.dump(2);
}

EstimateReport EstimateReport::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("invalid estimate JSON: ") + e.what());
    }
    EstimateReport report;
    try {
        report.log_theta_hat = j.at("log_theta_hat").get<double>();
        report.alpha_hat = j.at("alpha_hat").get<double>();
        report.hurst_hat = j.at("hurst_hat").get<double>();
        report.lags = j.at("lags").get<std::vector<int>>();
        report.residuals = j.at("residuals").get<std::vector<double>>();
        report.c_w = j.at("c_w").get<double>();
        report.delta = j.value("delta", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("invalid estimate JSON: ") + e.what());
    }
    return report;
}

}  // namespace msd
