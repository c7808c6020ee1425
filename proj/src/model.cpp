#include "msd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msd/asymptotics.hpp"

namespace msd {

namespace {

void validate_common(double H, double sigma2) {
    if (!(H > 0.0 && H < 1.0)) throw domain_error("Hurst index must lie in (0,1)");
    if (!(sigma2 > 0.0)) throw domain_error("sigma2 must be positive");
}

}  // namespace

ProcessModel ProcessModel::fbm(double H, double sigma2) {
    validate_common(H, sigma2);
    ProcessModel m;
    m.kind = ProcessKind::FBM;
    m.H = H;
    m.alpha = 2.0 * H;
    m.sigma2 = sigma2;
    m.lambda = 0.0;
    // fBm meets the spectral assumption with C_alpha = sigma * C_H and a
    // constant short-range term, so delta0 is arbitrary; keep the default.
    m.c_alpha = std::sqrt(sigma2) * c_H(H);
    m.delta0 = 2.0;
    m.eps0 = 1.0;
    return m;
}

ProcessModel ProcessModel::ifou(double H, double sigma2, double lambda) {
    validate_common(H, sigma2);
    if (!(lambda > 0.0)) throw domain_error("ifOU relaxation rate lambda must be positive");
    ProcessModel m;
    m.kind = ProcessKind::IFOU;
    m.H = H;
    m.alpha = 2.0 * H;
    m.sigma2 = sigma2;
    m.lambda = lambda;
    // Near x = 0 the velocity spectral factor is s(x) = lambda/(lambda+ix)
    // up to normalization: |s(x)|^2 = lambda^2/(lambda^2+x^2), so
    // | |s|^2 - 1 | <= (x/lambda)^2 and the regularity pair is (2, lambda).
    m.c_alpha = std::sqrt(sigma2) * c_H(H) / lambda;
    m.delta0 = 2.0;
    m.eps0 = lambda;
    return m;
}

double theta_constant(const ProcessModel& model) {
    switch (model.kind) {
        case ProcessKind::FBM:
            return model.sigma2;
        case ProcessKind::IFOU:
            return model.sigma2 / (model.lambda * model.lambda);
    }
    throw domain_error("unknown process kind");
}

std::string ProcessModel::to_json() const {
    nlohmann::json j;
    j["kind"] = (kind == ProcessKind::FBM) ? "fbm" : "ifou";
    j["H"] = H;
    j["sigma2"] = sigma2;
    j["lambda"] = lambda;
    j["delta0"] = delta0;
    return j.dump();
}

ProcessModel ProcessModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("invalid model JSON: ") + e.what());
    }
    if (!j.contains("kind") || !j.contains("H"))
        throw domain_error("model JSON requires at least {\"kind\", \"H\"}");
    const std::string kind = j["kind"].get<std::string>();
    const double H = j["H"].get<double>();
    const double sigma2 = j.value("sigma2", 1.0);
    ProcessModel m;
    if (kind == "fbm") {
        m = ProcessModel::fbm(H, sigma2);
    } else if (kind == "ifou") {
        m = ProcessModel::ifou(H, sigma2, j.value("lambda", 1.0));
    } else {
        throw domain_error("model kind must be \"fbm\" or \"ifou\", got \"" + kind + "\"");
    }
    if (j.contains("delta0")) {
        const double d0 = j["delta0"].get<double>();
        if (!(d0 > 0.0)) throw domain_error("delta0 must be positive");
        m.delta0 = d0;
    }
    return m;
}

std::vector<int> LagScheme::lags() const {
    std::vector<int> out;
    out.reserve(weights.size());
    for (double w : weights) {
        const double lag = w * base_lag;
        out.push_back(static_cast<int>(std::lround(lag)));
    }
    return out;
}

void LagScheme::validate(int n) const {
    if (base_lag < 1) throw domain_error("base lag must be >= 1");
    if (weights.empty()) throw domain_error("lag scheme needs at least one weight");
    double prev = 0.0;
    for (double w : weights) {
        if (!(w > prev)) throw domain_error("lag weights must be strictly increasing and positive");
        const double lag = w * base_lag;
        if (std::abs(lag - std::lround(lag)) > 1e-9)
            throw domain_error("weights must give integer lags w_k * h");
        prev = w;
    }
    if (n > 0) {
        const auto hs = lags();
        if (hs.back() > n - 1)
            throw domain_error("largest lag " + std::to_string(hs.back()) +
                               " exceeds n-1 = " + std::to_string(n - 1));
    }
}

LagScheme LagScheme::from_lags(const std::vector<int>& lags) {
    if (lags.empty()) throw domain_error("empty lag list");
    LagScheme s;
    s.base_lag = lags.front();
    if (s.base_lag < 1) throw domain_error("lags must be positive");
    s.weights.reserve(lags.size());
    for (int h : lags) s.weights.push_back(static_cast<double>(h) / s.base_lag);
    s.validate();
    return s;
}

Regime classify_regime(double alpha, double tol) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw domain_error("alpha must lie in (0,2), got " + std::to_string(alpha));
    if (tol < 0.0) throw domain_error("critical tolerance must be >= 0");
    if (alpha < 1.5 - tol) return Regime::SUBCRITICAL;
    if (alpha > 1.5 + tol) return Regime::SUPERCRITICAL;
    return Regime::CRITICAL;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SUBCRITICAL: return "subcritical";
        case Regime::CRITICAL: return "critical";
        case Regime::SUPERCRITICAL: return "supercritical";
    }
    return "?";
}

double delta_exponent(const ProcessModel& model) {
    const double d = std::min(model.alpha / 2.0, model.delta0 / 2.0);
    if (!(d > 0.0)) throw domain_error("delta exponent must be positive");
    return d;
}

A2Diagnostics check_a2_regime(long n, long h, double delta, double warn_threshold) {
    if (n < 2) throw domain_error("n must be >= 2");
    if (h < 1) throw domain_error("h must be >= 1");
    if (!(delta > 0.0)) throw domain_error("delta must be positive");
    A2Diagnostics d;
    const double ln = std::log(static_cast<double>(n));
    d.q1 = static_cast<double>(h) * ln * ln / static_cast<double>(n);
    d.q2 = static_cast<double>(n) / std::pow(static_cast<double>(h), 1.0 + delta / 2.0);
    d.warn = std::max(d.q1, d.q2) > warn_threshold;
    return d;
}

}  // namespace msd
