#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "msd/asymptotics.hpp"
#include "msd/common.hpp"

// Numerics for the Rosenblatt-type limit law
//   X = scale * sum_k lambda_k (xi_k^2 - 1),   xi_k iid N(0,1),
// where {lambda_k} is the spectrum of the integral operator with kernel
// |x - y|^(alpha - 2) on [0,1]. Sum lambda_k^2 = c_2 = 1/((2a-3)(a-1)) in
// closed form, which anchors the tail completion below.

namespace msd {

namespace {

constexpr long kTailSumCutoff = 2'000'000;  // direct tail summation horizon

// Gauss-Legendre nodes/weights on [0,1] via the Jacobi (tridiagonal) matrix;
// nodes are its eigenvalues, weights 2 * (first eigenvector component)^2.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x.resize(n);
    w.resize(n);
    for (int k = 0; k < n; ++k) {
        x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);           // map [-1,1] -> [0,1]
        const double v0 = es.eigenvectors()(0, k);
        w[k] = v0 * v0;                                     // 2 v0^2, halved by the map
    }
}

// Coefficient of the large-k eigenvalue law lambda_k ~ co * k^(1 - alpha).
double widom_coefficient(double alpha) {
    return 2.0 * std::tgamma(alpha - 1.0) * std::sin(std::numbers::pi * alpha / 2.0) *
           std::pow(std::numbers::pi, 1.0 - alpha);
}

// Second antiderivative of |t|^(alpha-2); double cell integrals of the kernel
// reduce to second differences of this.
double phi_anti(double t, double alpha) {
    return std::pow(std::abs(t), alpha) / (alpha * (alpha - 1.0));
}

// Eigenvalues (descending) of the piecewise-constant Galerkin compression of
// the kernel on a uniform n-cell mesh. Entries are exact cell averages, so
// the diagonal singularity is handled without regularization, and the
// compression never overshoots the kernel's L2 mass (sum lambda^2 <= c_2).
std::vector<double> galerkin_head(double alpha, int n) {
    const double D = 1.0 / n;
    std::vector<double> col(n);
    for (int d = 0; d < n; ++d)
        col[d] = (phi_anti((d + 1) * D, alpha) - 2.0 * phi_anti(d * D, alpha) +
                  phi_anti((d - 1) * D, alpha)) /
                 D;  // D * (cell-average) = (double integral) / D
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = col[std::abs(i - j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(lam.rbegin(), lam.rend());
    for (double& v : lam) v = std::max(v, 0.0);  // clip eigensolver roundoff
    return lam;
}

void check_alpha_super(double alpha, const char* who) {
    if (!(alpha > 1.5) || !(alpha < 2.0))
        throw domain_error(std::string(who) + ": alpha must lie in (3/2, 2)");
}

}  // namespace

std::vector<double> rosenblatt_eigenvalues(double alpha, int n_quad) {
    check_alpha_super(alpha, "rosenblatt_eigenvalues");
    if (n_quad < 16) throw domain_error("rosenblatt_eigenvalues: n_quad must be >= 16");

    std::vector<double> x, w;
    gauss_legendre_01(n_quad, x, w);

    // Cell edges at midpoints between adjacent nodes; the diagonal entry is
    // the exact average of |x_i - y|^(alpha-2) over node i's cell, which is
    // what the quadrature "sees" through the integrable singularity.
    std::vector<double> edges(n_quad + 1);
    edges[0] = 0.0;
    edges[n_quad] = 1.0;
    for (int i = 1; i < n_quad; ++i) edges[i] = 0.5 * (x[i - 1] + x[i]);

    Eigen::MatrixXd A(n_quad, n_quad);
    for (int i = 0; i < n_quad; ++i) {
        for (int j = 0; j < i; ++j) {
            const double k = std::pow(std::abs(x[i] - x[j]), alpha - 2.0);
            const double v = std::sqrt(w[i] * w[j]) * k;
            A(i, j) = v;
            A(j, i) = v;
        }
        const double li = x[i] - edges[i];
        const double ri = edges[i + 1] - x[i];
        const double cell = edges[i + 1] - edges[i];
        A(i, i) = w[i] * (std::pow(li, alpha - 1.0) + std::pow(ri, alpha - 1.0)) /
                  ((alpha - 1.0) * cell);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n_quad);
    std::sort(lam.rbegin(), lam.rend());
    return lam;
}

// ----------------------------------------------------------------- inversion

namespace {

struct InversionTable {
    std::vector<double> t;          // quadrature nodes on (0, T]
    std::vector<double> wq;         // quadrature weights
    std::vector<std::complex<double>> phi;  // CF at the nodes
};

}  // namespace

struct RosenblattInversionCache {
    std::mutex mu;
    std::map<double, InversionTable> by_scale;
};

RosenblattParams make_rosenblatt_params(const ProcessModel& model, int n_quad, int s_max,
                                        int n_store) {
    const double alpha = model.alpha;
    check_alpha_super(alpha, "make_rosenblatt_params");
    if (n_quad < 8) throw domain_error("make_rosenblatt_params: n_quad must be >= 8");
    if (s_max < 2) throw domain_error("make_rosenblatt_params: s_max must be >= 2");
    if (n_store < n_quad)
        throw domain_error("make_rosenblatt_params: n_store must be >= n_quad");

    RosenblattParams p;
    p.alpha = alpha;
    p.tau = tau(model);
    p.psi = psi_alpha(alpha);
    p.n_quad = n_quad;
    p.s_max = s_max;
    p.inversion = std::make_shared<RosenblattInversionCache>();

    const double c2 = rosenblatt_c2_closed_form(alpha);
    const double co = widom_coefficient(alpha);
    std::vector<double> head = galerkin_head(alpha, n_quad);

    // Power sums of k^-(alpha-1) over the tail index ranges, all orders in
    // one pass: range A (n_quad, n_store] becomes explicit modes, range B
    // (n_store, cutoff] plus the integral remainder beyond the cutoff stays
    // aggregated.
    std::vector<double> sum_a(s_max + 1, 0.0), sum_b(s_max + 1, 0.0);
    for (long k = n_quad + 1; k < kTailSumCutoff; ++k) {
        const double u = std::pow(static_cast<double>(k), -(alpha - 1.0));
        std::vector<double>& dst = (k <= n_store) ? sum_a : sum_b;
        double us = u;
        for (int s = 2; s <= s_max; ++s) {
            us *= u;
            dst[s] += us;
        }
    }

    double head2 = 0.0;
    for (double v : head) head2 += v * v;
    const double rem2 = co * co *
                        std::pow(static_cast<double>(kTailSumCutoff), 3.0 - 2.0 * alpha) /
                        (2.0 * alpha - 3.0);
    const double deficit2 = std::max(c2 - head2, 0.0);
    // One global rescale of the power-law tail closes the L2 gap the finite
    // Galerkin head leaves; beta -> 1 as n_quad grows.
    const double beta =
        std::sqrt(deficit2 / (co * co * (sum_a[2] + sum_b[2]) + rem2));

    p.eigenvalues = head;
    p.eigenvalues.reserve(n_store);
    for (long k = n_quad + 1; k <= n_store; ++k)
        p.eigenvalues.push_back(beta * co * std::pow(static_cast<double>(k), 1.0 - alpha));
    std::sort(p.eigenvalues.rbegin(), p.eigenvalues.rend());

    double explicit2 = 0.0;
    for (double v : p.eigenvalues) explicit2 += v * v;
    p.var_far = std::max(c2 - explicit2, 0.0);

    p.c_s.assign(s_max - 1, 0.0);
    p.c_s[0] = c2;
    for (int s = 3; s <= s_max; ++s) {
        double acc = 0.0;
        for (double v : p.eigenvalues) acc += std::pow(v, s);
        const double ex = s * (alpha - 1.0) - 1.0;  // > 0 for s >= 2
        const double rem_s =
            std::pow(static_cast<double>(kTailSumCutoff), -ex) / ex;
        acc += std::pow(beta * co, s) * (sum_b[s] + rem_s);
        p.c_s[s - 2] = acc;
    }
    return p;
}

double rosenblatt_cs(const RosenblattParams& params, int s) {
    if (s < 2) throw domain_error("rosenblatt_cs: s must be >= 2");
    if (s - 2 < static_cast<int>(params.c_s.size())) return params.c_s[s - 2];
    // Beyond the cache the stored modes dominate utterly (the dropped tail is
    // O(lambda_store^(s-2)) relative); sum them directly.
    double acc = 0.0;
    for (double v : params.eigenvalues) acc += std::pow(v, s);
    return acc;
}

std::complex<double> rosenblatt_cf(const RosenblattParams& params, double t, double scale) {
    // log phi = sum_k [ -i t s lam_k - (1/2) log(1 - 2 i t s lam_k) ] - (t s)^2 var_far
    // with log(1 - i c) = (1/2) log(1 + c^2) - i atan(c); everything real.
    double re = 0.0, im = 0.0;
    const double ts = t * scale;
    for (double lam : params.eigenvalues) {
        const double c = 2.0 * ts * lam;
        re -= 0.25 * std::log1p(c * c);
        im += -ts * lam + 0.5 * std::atan(c);
    }
    re -= ts * ts * params.var_far;
    return std::polar(std::exp(re), im);
}

namespace {

// Gil-Pelaez: F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-itx} phi(t)) / t dt.
// Composite 15-point Gauss-Legendre panels of width 0.25 resolve the e^{-itx}
// oscillation comfortably for |x| <= 40 (10 radians per panel); panels stop
// once |phi| is negligible, which the aggregate Gaussian factor guarantees.
constexpr int kPanelOrder = 15;
constexpr double kPanelWidth = 0.25;
constexpr double kMinT = 20.0;
constexpr double kMaxT = 400.0;
constexpr double kPhiFloor = 1e-14;
constexpr double kXValid = 40.0;

const InversionTable& table_for(const RosenblattParams& params, double scale) {
    std::lock_guard<std::mutex> lock(params.inversion->mu);
    auto it = params.inversion->by_scale.find(scale);
    if (it != params.inversion->by_scale.end()) return it->second;

    std::vector<double> gx, gw;
    gauss_legendre_01(kPanelOrder, gx, gw);

    InversionTable tab;
    for (double t0 = 0.0; t0 < kMaxT; t0 += kPanelWidth) {
        for (int j = 0; j < kPanelOrder; ++j) {
            const double t = t0 + kPanelWidth * gx[j];
            tab.t.push_back(t);
            tab.wq.push_back(kPanelWidth * gw[j]);
            tab.phi.push_back(rosenblatt_cf(params, t, scale));
        }
        const double edge = t0 + kPanelWidth;
        if (edge >= kMinT && std::abs(rosenblatt_cf(params, edge, scale)) < kPhiFloor)
            break;
    }
    return params.inversion->by_scale.emplace(scale, std::move(tab)).first->second;
}

double cdf_from_table(const InversionTable& tab, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
        const double a = -tab.t[i] * x;
        const std::complex<double> e(std::cos(a), std::sin(a));
        acc += tab.wq[i] * std::imag(e * tab.phi[i]) / tab.t[i];
    }
    return std::clamp(0.5 - acc / std::numbers::pi, 0.0, 1.0);
}

}  // namespace

double rosenblatt_cdf(const RosenblattParams& params, double x, double scale, double tol) {
    if (!(scale > 0.0)) throw domain_error("rosenblatt_cdf: scale must be positive");
    (void)tol;  // the cached table is built well below any admissible tol
    if (std::abs(x) > kXValid)
        return x > 0.0 ? 1.0 : 0.0;  // beyond inversion validity; F is saturated there
    return cdf_from_table(table_for(params, scale), x);
}

double rosenblatt_quantile(const RosenblattParams& params, double p, double scale,
                           double tol) {
    if (!(scale > 0.0)) throw domain_error("rosenblatt_quantile: scale must be positive");
    if (!(p > 0.0) || !(p < 1.0))
        throw domain_error("rosenblatt_quantile: p must lie in (0, 1)");
    if (!(tol > 0.0)) throw domain_error("rosenblatt_quantile: tol must be positive");

    const InversionTable& tab = table_for(params, scale);
    const double sd = scale * std::sqrt(2.0 * rosenblatt_c2_closed_form(params.alpha));

    // Bracket the root of F(x) = p (F monotone), expanding geometrically; the
    // law is right-skewed so the upper arm starts wider.
    double lo = -4.0 * sd, hi = 8.0 * sd;
    while (cdf_from_table(tab, lo) > p) {
        lo *= 2.0;
        if (lo < -kXValid) throw numerical_error("rosenblatt_quantile: p below inversion range");
    }
    while (cdf_from_table(tab, hi) < p) {
        hi *= 2.0;
        if (hi > kXValid) throw numerical_error("rosenblatt_quantile: p above inversion range");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (cdf_from_table(tab, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace msd
