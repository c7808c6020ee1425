#include "msd/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "msd/common.hpp"

namespace msd {

double c_H(double H) {
    if (!(H > 0.0) || !(H < 1.0)) throw domain_error("c_H: H must lie in (0,1)");
    return std::sqrt(H * std::tgamma(2.0 * H) * std::sin(H * std::numbers::pi) /
                     std::numbers::pi);
}

double tau(const ProcessModel& model) {
    const double alpha = model.alpha;
    return theta_constant(model) * alpha * (alpha - 1.0) / 2.0;
}

double psi_alpha(double alpha) {
    if (!(alpha > 1.5) || !(alpha < 2.0))
        throw domain_error("psi_alpha: alpha must lie in (3/2, 2)");
    return std::sqrt((2.0 * alpha - 3.0) * (alpha - 1.0) / 2.0);
}

double rosenblatt_c2_closed_form(double alpha) {
    if (!(alpha > 1.5) || !(alpha < 2.0))
        throw domain_error("rosenblatt_c2_closed_form: alpha must lie in (3/2, 2)");
    return 1.0 / ((2.0 * alpha - 3.0) * (alpha - 1.0));
}

double zeta_value(double alpha, double h, Regime regime) {
    switch (regime) {
        case Regime::SUBCRITICAL: return std::pow(h, alpha + 0.5);
        case Regime::CRITICAL:
        case Regime::SUPERCRITICAL: return h * h;
    }
    throw domain_error("zeta_value: bad regime");
}

NormalizationPair normalization(double alpha, long n, const std::vector<int>& lags,
                                double tol) {
    if (n < 2) throw domain_error("normalization: n must be >= 2");
    NormalizationPair out;
    out.regime = classify_regime(alpha, tol);
    const double nd = static_cast<double>(n);
    switch (out.regime) {
        case Regime::SUBCRITICAL: out.eta = std::sqrt(nd); break;
        case Regime::CRITICAL: out.eta = std::sqrt(nd * std::log(nd)); break;
        case Regime::SUPERCRITICAL: out.eta = std::pow(nd, alpha - 1.0); break;
    }
    out.zeta_per_lag.reserve(lags.size());
    for (int h : lags) {
        if (h < 1) throw domain_error("normalization: lag must be >= 1");
        out.zeta_per_lag.push_back(zeta_value(alpha, static_cast<double>(h), out.regime));
    }
    return out;
}

NormalizationPair normalization(double alpha, long n, int h, double tol) {
    return normalization(alpha, n, std::vector<int>{h}, tol);
}

namespace {

// Cross-covariance kernel of normalized lag-w1 and lag-w2 increments of an
// H-self-similar process with stationary increments, at offset u:
//   G(u) = [|u+w1|^2H - |u+w1-w2|^2H - |u|^2H + |u-w2|^2H] / 2.
double incr_cross_kernel(double u, double w1, double w2, double twoH) {
    return 0.5 * (std::pow(std::abs(u + w1), twoH) - std::pow(std::abs(u + w1 - w2), twoH) -
                  std::pow(std::abs(u), twoH) + std::pow(std::abs(u - w2), twoH));
}

// Far-field kernel, valid once every |.| argument in G is positive (u > w2).
// Written as a difference of two first differences computed via expm1/log1p,
// so the result carries the O(u^(2H-2)) second difference instead of rounding
// noise: the naive four-term form loses all digits once u exceeds ~1e8.
double incr_cross_kernel_far(double u, double w1, double w2, double twoH) {
    const auto first_diff = [&](double x) {  // (x + w1)^2H - x^2H
        return std::pow(x, twoH) * std::expm1(twoH * std::log1p(w1 / x));
    };
    return 0.5 * (first_diff(u) - first_diff(u - w2));
}

// int_U^inf G(u; w1, w2)^2 du from the expansion of G in powers of 1/u,
//   G(u) = (1/2) sum_{k>=2} binom(2H, k) m_k u^(2H-k),
//   m_k = w1^k - (w1 - w2)^k + (-w2)^k,
// keeping squared-series terms through u^(4H-6); the first omitted term is
// down by (w/U)^3 relative to the leading one.
double tail_series(double U, double w1, double w2, double a) {
    const double c2 = a * (a - 1.0) / 2.0;
    const double c3 = c2 * (a - 2.0) / 3.0;
    const double c4 = c3 * (a - 3.0) / 4.0;
    const double m2 = 2.0 * w1 * w2;
    const double d = w1 - w2;
    const double m3 = w1 * w1 * w1 - d * d * d - w2 * w2 * w2;
    const double m4 = w1 * w1 * w1 * w1 - d * d * d * d + w2 * w2 * w2 * w2;
    return 0.25 * (c2 * c2 * m2 * m2 * std::pow(U, 2.0 * a - 3.0) / (3.0 - 2.0 * a) +
                   2.0 * c2 * c3 * m2 * m3 * std::pow(U, 2.0 * a - 4.0) / (4.0 - 2.0 * a) +
                   (c3 * c3 * m3 * m3 + 2.0 * c2 * c4 * m2 * m4) *
                       std::pow(U, 2.0 * a - 5.0) / (5.0 - 2.0 * a));
}

// int_R G(u; w1, w2)^2 du. The kernel has cusps where any |.| argument
// vanishes; integrate panel-by-panel between those points with tanh_sinh
// (which tolerates endpoint cusps). Each unbounded tail is mapped to a finite
// interval by u = 1/t and cut off where the far-field kernel still holds
// ~6 correct digits; the remainder beyond the cutoff is the closed-form
// series above (relative weight ~(w/U)^(3-2 alpha) of the total, so its own
// error is far below quad_tol).
double int_g_squared(double w1, double w2, double twoH, double quad_tol) {
    boost::math::quadrature::tanh_sinh<double> integ;
    auto g2 = [&](double u) {
        const double g = incr_cross_kernel(u, w1, w2, twoH);
        return g * g;
    };

    std::vector<double> brk = {-w1, 0.0, w2 - w1, w2};
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i)
        total += integ.integrate(g2, brk[i], brk[i + 1], quad_tol);

    // Near tails beyond the last cusp: raw kernel, still fully accurate here.
    const double span = brk.back() - brk.front();
    const double lo = brk.front() - span, hi = brk.back() + span;
    total += integ.integrate(g2, brk.back(), hi, quad_tol);
    total += integ.integrate(g2, lo, brk.front(), quad_tol);

    // Far tails. The negative side at u = -v < lo has all arguments negative,
    // and folding the absolute values shows G(-v; w1, w2) = G(v; w2, w1).
    const double cap = 1e6 * span;
    auto tail_pos = [&](double t) {
        const double u = 1.0 / t;
        const double g = incr_cross_kernel_far(u, w1, w2, twoH);
        return g * g * u * u;  // du = -dt/t^2 = -u^2 dt
    };
    auto tail_neg = [&](double t) {
        const double v = 1.0 / t;
        const double g = incr_cross_kernel_far(v, w2, w1, twoH);
        return g * g * v * v;
    };
    total += integ.integrate(tail_pos, 1.0 / cap, 1.0 / hi, quad_tol);
    total += integ.integrate(tail_neg, 1.0 / cap, 1.0 / (-lo), quad_tol);
    total += tail_series(cap, w1, w2, twoH);
    total += tail_series(cap, w2, w1, twoH);
    return total;
}

}  // namespace

SigmaMatrix sigma_gaussian(const ProcessModel& model, const std::vector<double>& weights,
                           double quad_tol) {
    const double alpha = model.alpha;
    if (classify_regime(alpha) != Regime::SUBCRITICAL)
        throw domain_error("sigma_gaussian: defined only for alpha < 3/2");
    if (weights.empty()) throw domain_error("sigma_gaussian: weights must be non-empty");
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0))
            throw domain_error("sigma_gaussian: weights must be positive");
        if (i > 0 && !(weights[i] > weights[i - 1]))
            throw domain_error("sigma_gaussian: weights must be strictly increasing");
    }

    const int m = static_cast<int>(weights.size());
    const double theta = theta_constant(model);
    const double twoH = alpha;

    SigmaMatrix out;
    out.m = m;
    out.alpha = alpha;
    out.weights = weights;
    out.entries.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const double w1 = std::min(weights[i], weights[j]);
            const double w2 = std::max(weights[i], weights[j]);
            const double value = 2.0 * std::pow(w1 * w2, -(alpha + 0.5)) * theta * theta *
                                 int_g_squared(w1, w2, twoH, quad_tol);
            out.entries[static_cast<std::size_t>(i) * m + j] = value;
            out.entries[static_cast<std::size_t>(j) * m + i] = value;
        }
    }
    return out;
}

SigmaMatrix sigma_critical(const ProcessModel& model, int m) {
    if (classify_regime(model.alpha) != Regime::CRITICAL)
        throw domain_error("sigma_critical: defined only at alpha = 3/2");
    if (m < 1) throw domain_error("sigma_critical: m must be >= 1");
    const double t = tau(model);
    SigmaMatrix out;
    out.m = m;
    out.alpha = model.alpha;
    out.weights.assign(m, 0.0);
    out.entries.assign(static_cast<std::size_t>(m) * m, 4.0 * t * t);
    return out;
}

}  // namespace msd
