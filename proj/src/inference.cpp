#include "msd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "msd/common.hpp"

namespace msd {

namespace {

void check_weights(const std::vector<double>& weights) {
    if (weights.size() < 2)
        throw domain_error("limit coefficients: need at least two weights");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] > 0.0))
            throw domain_error("limit coefficients: weights must be positive");
        if (k > 0 && !(weights[k] > weights[k - 1]))
            throw domain_error("limit coefficients: weights must be strictly increasing");
    }
}

}  // namespace

AsymptoticLaw asymptotic_law(const ProcessModel& model, const std::vector<double>& weights,
                             double quad_tol, int n_quad) {
    check_weights(weights);
    AsymptoticLaw law;
    law.alpha = model.alpha;
    law.theta = theta_constant(model);
    law.regime = classify_regime(model.alpha);
    law.weights = weights;
    law.tau = tau(model);
    switch (law.regime) {
        case Regime::SUBCRITICAL:
            law.sigma = sigma_gaussian(model, weights, quad_tol);
            break;
        case Regime::CRITICAL:
            law.sigma = sigma_critical(model, static_cast<int>(weights.size()));
            break;
        case Regime::SUPERCRITICAL:
            law.psi = psi_alpha(model.alpha);
            law.rosenblatt = std::make_shared<const RosenblattParams>(
                make_rosenblatt_params(model, n_quad));
            break;
    }
    return law;
}

LsLimitCoefficients ls_limit_coefficients(const std::vector<double>& weights, double theta,
                                          double alpha, long n, int h) {
    check_weights(weights);
    if (!(theta > 0.0)) throw domain_error("ls_limit_coefficients: theta must be positive");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw domain_error("ls_limit_coefficients: alpha must lie in (0,2)");
    if (n < 2 || h < 1) throw domain_error("ls_limit_coefficients: need n >= 2, h >= 1");

    const int m = static_cast<int>(weights.size());
    LsLimitCoefficients coefs;
    coefs.alpha = alpha;
    coefs.regime = classify_regime(alpha);

    double slw = 0.0, slw2 = 0.0;
    std::vector<double> lw(weights.size());
    for (int k = 0; k < m; ++k) {
        lw[static_cast<std::size_t>(k)] = std::log(weights[static_cast<std::size_t>(k)]);
        slw += lw[static_cast<std::size_t>(k)];
        slw2 += lw[static_cast<std::size_t>(k)] * lw[static_cast<std::size_t>(k)];
    }
    coefs.c_w = m * slw2 - slw * slw;
    if (!(coefs.c_w > 0.0))
        throw domain_error("ls_limit_coefficients: degenerate weights (zero design determinant)");

    coefs.u_vector.resize(weights.size());
    coefs.a_diag.resize(weights.size());
    for (int j = 0; j < m; ++j) {
        coefs.u_vector[static_cast<std::size_t>(j)] =
            (slw - m * lw[static_cast<std::size_t>(j)]) / coefs.c_w;
        const double w = weights[static_cast<std::size_t>(j)];
        coefs.a_diag[static_cast<std::size_t>(j)] =
            zeta_value(alpha, w, coefs.regime) / (theta * std::pow(w, alpha));
    }

    const NormalizationPair norm = normalization(alpha, n, h);
    coefs.rate_factor = norm.eta * norm.zeta_per_lag[0] /
                        (static_cast<double>(n) * std::pow(static_cast<double>(h), alpha));
    return coefs;
}

double estimator_limit_sd(const LsLimitCoefficients& coefs, const AsymptoticLaw& law) {
    if (law.regime == Regime::CRITICAL)
        throw domain_error(
            "estimator_limit_sd: the critical regime has no interval theory; "
            "only the open subregions are supported");
    const int m = static_cast<int>(coefs.u_vector.size());
    if (m != static_cast<int>(coefs.a_diag.size()))
        throw domain_error("estimator_limit_sd: inconsistent coefficient arrays");

    std::vector<double> v(static_cast<std::size_t>(m));  // (U^T A)_j
    for (int j = 0; j < m; ++j)
        v[static_cast<std::size_t>(j)] = coefs.u_vector[static_cast<std::size_t>(j)] *
                                         coefs.a_diag[static_cast<std::size_t>(j)];

    if (law.regime == Regime::SUBCRITICAL) {
        if (law.sigma.m != m)
            throw domain_error("estimator_limit_sd: Sigma dimension mismatch");
        double q = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                q += v[static_cast<std::size_t>(i)] * law.sigma.at(i, j) *
                     v[static_cast<std::size_t>(j)];
        return std::sqrt(std::max(q, 0.0));
    }

    if (!(law.psi > 0.0))
        throw domain_error("estimator_limit_sd: supercritical law lacks psi");
    double s = 0.0;
    for (double vj : v) s += vj;
    return std::abs(s) * law.tau / law.psi;
}

namespace {

// Clamp the plug-in exponent away from the boundaries and the critical point
// so every downstream constant (Sigma quadratures, Rosenblatt spectrum) stays
// well-conditioned. Estimates can stray outside (0,2) at small sample sizes.
double clamp_plugin_alpha(double alpha_hat, Regime regime) {
    if (regime == Regime::SUBCRITICAL) return std::clamp(alpha_hat, 0.05, 1.45);
    return std::clamp(alpha_hat, 1.55, 1.95);
}

ConfidenceInterval make_interval(const char* parameter, double a, double b, double level,
                                 Regime regime, const char* source, bool degenerate) {
    ConfidenceInterval ci;
    ci.lower = std::min(a, b);
    ci.upper = std::max(a, b);
    ci.level = level;
    ci.parameter = parameter;
    ci.regime = regime;
    ci.quantile_source = source;
    ci.degenerate = degenerate;
    return ci;
}

}  // namespace

std::pair<ConfidenceInterval, ConfidenceInterval> confidence_interval(
    const EstimateReport& report, long n, int h, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw domain_error("confidence_interval: level must lie in (0,1)");
    if (n < 2 || h < 1) throw domain_error("confidence_interval: need n >= 2, h >= 1");
    if (report.lags.size() < 2)
        throw domain_error("confidence_interval: report must carry at least two lags");
    if (report.lags[0] != h)
        throw domain_error(
            "confidence_interval: h must be the base lag of the fitted scheme "
            "(lags h_k = w_k * h with w_1 = 1)");
    if (!std::isfinite(report.alpha_hat) || !std::isfinite(report.log_theta_hat))
        throw domain_error("confidence_interval: estimates must be finite");

    const double alpha_hat = report.alpha_hat;
    if (std::abs(alpha_hat - 1.5) < 0.01)
        throw domain_error(
            "confidence_interval: alpha_hat falls in the critical band around 3/2, "
            "where the limit is Gaussian at a sqrt(n log n) rate but the interval "
            "theory covers only the open subregions; re-fit with different lags or "
            "report the normalization without an interval");

    const Regime regime = alpha_hat < 1.5 ? Regime::SUBCRITICAL : Regime::SUPERCRITICAL;
    const double alpha_c = clamp_plugin_alpha(alpha_hat, regime);
    const double theta_hat = std::exp(report.log_theta_hat);

    std::vector<double> weights(report.lags.size());
    for (std::size_t k = 0; k < weights.size(); ++k)
        weights[k] = static_cast<double>(report.lags[k]) / h;

    // The limit constants depend on the model only through (theta, alpha), so
    // the plug-in evaluates them on an fBm surrogate with matching values.
    ProcessModel plug = ProcessModel::fbm(alpha_c / 2.0, theta_hat);
    const LsLimitCoefficients coefs = ls_limit_coefficients(weights, theta_hat, alpha_c, n, h);
    const AsymptoticLaw law = asymptotic_law(plug, weights);
    const double sd = estimator_limit_sd(coefs, law);

    const double rate = coefs.rate_factor;
    const double logh = std::log(static_cast<double>(h));
    const double half = (1.0 - level) / 2.0;

    // alpha      = alpha_hat     - rate * L,          L = -U^T A Z = sign * sd * Z_std
    // log theta  = log_theta_hat + rate * log h * L
    // where sign = -sign(sum_j (U^T A)_j) in the rank-1 regime (+1 when the law
    // is symmetric and the sign is immaterial).
    double q_lo, q_hi, sign = 1.0;
    const char* source;
    if (regime == Regime::SUBCRITICAL) {
        boost::math::normal_distribution<double> gauss(0.0, 1.0);
        q_hi = boost::math::quantile(gauss, 1.0 - half);
        q_lo = -q_hi;
        source = "normal";
    } else {
        const RosenblattParams& rp = *law.rosenblatt;
        q_lo = rosenblatt_quantile(rp, half, rp.psi);
        q_hi = rosenblatt_quantile(rp, 1.0 - half, rp.psi);
        double s = 0.0;
        for (std::size_t j = 0; j < weights.size(); ++j)
            s += coefs.u_vector[j] * coefs.a_diag[j];
        sign = s > 0.0 ? -1.0 : 1.0;
        source = "rosenblatt";
    }

    const bool sd_zero = !(sd > 0.0);
    ConfidenceInterval alpha_ci =
        make_interval("alpha", alpha_hat - rate * sign * sd * q_hi,
                      alpha_hat - rate * sign * sd * q_lo, level, regime, source, sd_zero);
    // log h = 0 when h = 1: the intercept error is rate * log h * L, so the
    // interval collapses; flagged as degenerate rather than inventing width.
    ConfidenceInterval theta_ci = make_interval(
        "log_theta", report.log_theta_hat + rate * logh * sign * sd * q_lo,
        report.log_theta_hat + rate * logh * sign * sd * q_hi, level, regime, source,
        sd_zero || logh == 0.0);
    return {alpha_ci, theta_ci};
}

std::string ConfidenceInterval::to_json() const {
    nlohmann::json j;
    j["lower"] = lower;
    j["upper"] = upper;
    j["level"] = level;
    j["parameter"] = parameter;
    j["regime"] = regime_name(regime);
    j["quantile_source"] = quantile_source;
    j["degenerate"] = degenerate;
    return j.dump(2);
}

std::string AsymptoticLaw::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["theta"] = theta;
    j["regime"] = regime_name(regime);
    j["weights"] = weights;
    j["tau"] = tau;
    if (regime == Regime::SUPERCRITICAL) {
        j["psi"] = psi;
        if (rosenblatt) {
            nlohmann::json r;
            r["n_quad"] = rosenblatt->n_quad;
            r["c_s"] = rosenblatt->c_s;
            r["var_far"] = rosenblatt->var_far;
            j["rosenblatt"] = r;
        }
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < sigma.m; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < sigma.m; ++k) row.push_back(sigma.at(i, k));
            rows.push_back(row);
        }
        j["sigma"] = rows;
    }
    return j.dump(2);
}

}  // namespace msd
