#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "msd/asymptotics.hpp"
#include "msd/model.hpp"

using namespace msd;

TEST_CASE("spectral constant of standard fbm") {
    // H = 1/2: sqrt(1/(2 pi))
    CHECK(c_H(0.5) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(c_H(0.75) == doctest::Approx(0.38678592935955836).epsilon(1e-12));
    CHECK_THROWS_AS(c_H(0.0), domain_error);
    CHECK_THROWS_AS(c_H(1.0), domain_error);
}

TEST_CASE("covariance tail scale tau") {
    CHECK(tau(ProcessModel::fbm(0.75)) == doctest::Approx(0.375).epsilon(1e-13));
    CHECK(tau(ProcessModel::fbm(0.5)) == doctest::Approx(0.0));  // alpha = 1
    // theta = sigma2/lambda^2 enters linearly
    CHECK(tau(ProcessModel::ifou(0.9, 2.0, 2.0)) == doctest::Approx(0.36).epsilon(1e-13));
}

TEST_CASE("rosenblatt standardization constants") {
    CHECK(psi_alpha(1.8) == doctest::Approx(0.4898979485566356).epsilon(1e-14));
    CHECK_THROWS_AS(psi_alpha(1.5), domain_error);
    CHECK_THROWS_AS(psi_alpha(2.0), domain_error);
    CHECK(rosenblatt_c2_closed_form(1.8) == doctest::Approx(2.0833333333333335).epsilon(1e-14));
    CHECK(rosenblatt_c2_closed_form(1.6) == doctest::Approx(8.333333333333334).epsilon(1e-14));
    for (double alpha : {1.55, 1.7, 1.85, 1.95}) {
        const double id = 2.0 * psi_alpha(alpha) * psi_alpha(alpha) *
                          rosenblatt_c2_closed_form(alpha);
        CHECK(id == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("normalization rates per regime") {
    const auto sub = normalization(0.5, 1024, 4);
    CHECK(sub.regime == Regime::SUBCRITICAL);
    CHECK(sub.eta == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(sub.zeta_per_lag[0] == doctest::Approx(4.0).epsilon(1e-14));  // h^(alpha+1/2)

    const auto crit = normalization(1.5, 1024, 4);
    CHECK(crit.regime == Regime::CRITICAL);
    CHECK(crit.eta == doctest::Approx(std::sqrt(1024.0 * std::log(1024.0))).epsilon(1e-14));
    CHECK(crit.zeta_per_lag[0] == doctest::Approx(16.0).epsilon(1e-14));

    const auto sup = normalization(1.8, 1024, 4);
    CHECK(sup.regime == Regime::SUPERCRITICAL);
    CHECK(sup.eta == doctest::Approx(std::pow(1024.0, 0.8)).epsilon(1e-14));
    CHECK(sup.zeta_per_lag[0] == doctest::Approx(16.0).epsilon(1e-14));

    // near-critical exponents snap to the critical rate within tolerance
    CHECK(normalization(1.5 + 1e-8, 1024, 4).regime == Regime::CRITICAL);

    const std::vector<int> lags{2, 4, 8};
    const auto multi = normalization(0.5, 1024, lags);
    REQUIRE(multi.zeta_per_lag.size() == 3);
    for (std::size_t k = 0; k < lags.size(); ++k)
        CHECK(multi.zeta_per_lag[k] ==
              doctest::Approx(zeta_value(0.5, lags[k], Regime::SUBCRITICAL)).epsilon(1e-14));

    CHECK_THROWS_AS(normalization(0.5, 1, 1), domain_error);
    CHECK_THROWS_AS(normalization(0.5, 16, 0), domain_error);
}

TEST_CASE("gaussian limit covariance: Brownian anchor") {
    const SigmaMatrix s = sigma_gaussian(ProcessModel::fbm(0.5), {1.0});
    REQUIRE(s.m == 1);
    CHECK(s.at(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("gaussian limit covariance: structure") {
    const ProcessModel m = ProcessModel::fbm(0.25);
    const SigmaMatrix s = sigma_gaussian(m, {1.0, 2.0, 4.0});
    REQUIRE(s.m == 3);
    // symmetry
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(s.at(i, j) == doctest::Approx(s.at(j, i)).epsilon(1e-12));
    // positive semidefinite: check 2x2 and 3x3 leading minors
    CHECK(s.at(0, 0) > 0.0);
    CHECK(s.at(0, 0) * s.at(1, 1) - s.at(0, 1) * s.at(0, 1) > 0.0);
    // diagonal entries do not depend on the weight (the w-scaling of the
    // squared cross-covariance integral cancels the prefactor exactly)
    for (int i = 1; i < 3; ++i)
        CHECK(s.at(i, i) == doctest::Approx(s.at(0, 0)).epsilon(1e-7));

    // theta^2 scaling through sigma2
    const SigmaMatrix s2 = sigma_gaussian(ProcessModel::fbm(0.25, 3.0), {1.0, 2.0, 4.0});
    CHECK(s2.at(0, 1) == doctest::Approx(9.0 * s.at(0, 1)).epsilon(1e-9));

    CHECK_THROWS_AS(sigma_gaussian(ProcessModel::fbm(0.8), {1.0}), domain_error);
    CHECK_THROWS_AS(sigma_gaussian(m, {}), domain_error);
    CHECK_THROWS_AS(sigma_gaussian(m, {2.0, 1.0}), domain_error);
}

TEST_CASE("gaussian limit covariance: independent quadrature cross-check") {
    // re-integrate the squared increment cross-covariance with a flat panel
    // scheme; tails fall off like |u|^(2 alpha - 4)
    const double alpha = 0.5, H = alpha / 2.0;
    const double w1 = 1.0, w2 = 2.0;
    const auto G = [&](double u) {
        return 0.5 * (std::pow(std::abs(u + w1), alpha) -
                      std::pow(std::abs(u + w1 - w2), alpha) - std::pow(std::abs(u), alpha) +
                      std::pow(std::abs(u - w2), alpha));
    };
    const auto G2 = [&](double u) { return G(u) * G(u); };
    double integral = 0.0;
    const double cut = 60.0;
    for (double a = -cut; a < cut; a += 0.5)
        integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            G2, a, a + 0.5, 10, 1e-12);
    // tail bound: |G(u)| ~ H w1 w2 (alpha-1) |u|^(alpha-2) so G^2 integrates
    // to O(cut^(2 alpha - 3)); at alpha = 0.5 that is ~1e-4 absolute
    const double want = 2.0 * std::pow(w1 * w2, -(alpha + 0.5)) * integral;
    const SigmaMatrix s = sigma_gaussian(ProcessModel::fbm(H), {w1, w2});
    CHECK(s.at(0, 1) == doctest::Approx(want).epsilon(2e-4));
}

TEST_CASE("critical covariance is constant 4 tau^2") {
    const ProcessModel m = ProcessModel::fbm(0.75, 2.0);  // alpha = 1.5, tau = 0.75
    const SigmaMatrix s = sigma_critical(m, 3);
    REQUIRE(s.m == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(s.at(i, j) == doctest::Approx(4.0 * 0.75 * 0.75).epsilon(1e-13));
    CHECK_THROWS_AS(sigma_critical(ProcessModel::fbm(0.25), 2), domain_error);
}

TEST_CASE("kernel eigenvalues: discretization self-consistency") {
    CHECK_THROWS_AS(rosenblatt_eigenvalues(1.8, 8), domain_error);
    const auto lo = rosenblatt_eigenvalues(1.8, 128);
    const auto hi = rosenblatt_eigenvalues(1.8, 256);
    REQUIRE(lo.size() == 128);
    REQUIRE(hi.size() == 256);
    // descending and positive at the top of the spectrum
    for (std::size_t k = 1; k < 32; ++k) CHECK(lo[k] <= lo[k - 1]);
    CHECK(lo[0] > 0.0);
    // leading eigenvalues have converged
    for (int k = 0; k < 8; ++k) CHECK(hi[k] == doctest::Approx(lo[k]).epsilon(5e-3));
}

TEST_CASE("kernel spectrum tail follows the power law") {
    const double alpha = 1.8;
    const auto ev = rosenblatt_eigenvalues(alpha, 512);
    // lambda_k ~ co * k^(1-alpha), co = 2 Gamma(alpha-1) sin(pi alpha/2) pi^(1-alpha)
    const double co = 0.28795932100314253;
    double ratio = 0.0;
    int used = 0;
    for (int k = 64; k < 128; ++k) {
        ratio += ev[k] / (co * std::pow(static_cast<double>(k + 1), 1.0 - alpha));
        ++used;
    }
    ratio /= used;
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("completed spectrum: power sums and cumulant identities") {
    const ProcessModel m = ProcessModel::fbm(0.9);  // alpha = 1.8
    const RosenblattParams params = make_rosenblatt_params(m);
    CHECK(params.alpha == doctest::Approx(1.8));
    CHECK(params.tau == doctest::Approx(tau(m)).epsilon(1e-13));
    CHECK(params.psi == doctest::Approx(psi_alpha(1.8)).epsilon(1e-13));
    CHECK(params.var_far >= 0.0);
    REQUIRE(!params.eigenvalues.empty());
    for (std::size_t k = 1; k < params.eigenvalues.size(); ++k) {
        CHECK(params.eigenvalues[k] <= params.eigenvalues[k - 1]);
        CHECK(params.eigenvalues[k] > 0.0);
    }

    // c_2 is pinned to the closed form by the tail completion
    const double c2 = rosenblatt_cs(params, 2);
    CHECK(c2 == doctest::Approx(rosenblatt_c2_closed_form(1.8)).epsilon(1e-10));

    // direct power sums agree with the cache
    double s3 = 0.0;
    for (double l : params.eigenvalues) s3 += l * l * l;
    CHECK(rosenblatt_cs(params, 3) == doctest::Approx(s3).epsilon(1e-6));

    // log-convexity of power sums of a positive spectrum
    for (int s = 3; s < params.s_max; ++s) {
        const double a = rosenblatt_cs(params, s - 1);
        const double b = rosenblatt_cs(params, s);
        const double c = rosenblatt_cs(params, s + 1);
        CHECK(b * b <= a * c * (1.0 + 1e-12));
    }

    CHECK_THROWS_AS(make_rosenblatt_params(ProcessModel::fbm(0.5)), domain_error);
    CHECK_THROWS_AS(rosenblatt_cs(params, 1), domain_error);
}

TEST_CASE("characteristic function basics") {
    const RosenblattParams params = make_rosenblatt_params(ProcessModel::fbm(0.9));
    const double psi = params.psi;
    CHECK(rosenblatt_cf(params, 0.0, psi).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rosenblatt_cf(params, 0.0, psi).imag() == doctest::Approx(0.0));
    for (double t : {0.3, 1.0, 5.0, 20.0}) {
        const auto phi = rosenblatt_cf(params, t, psi);
        CHECK(std::abs(phi) <= 1.0 + 1e-12);
        const auto phim = rosenblatt_cf(params, -t, psi);
        CHECK(phim.real() == doctest::Approx(phi.real()).epsilon(1e-12));
        CHECK(phim.imag() == doctest::Approx(-phi.imag()).epsilon(1e-12));
    }
    // the standardized law has variance 2 psi^2 c_2 = 1: recover it from the
    // curvature of the characteristic function at the origin
    const double eps = 1e-3;
    const double var_fd =
        (2.0 - 2.0 * rosenblatt_cf(params, eps, psi).real()) / (eps * eps);
    CHECK(var_fd == doctest::Approx(1.0).epsilon(1e-4));
    // centered: the imaginary part vanishes to second order at the origin
    CHECK(std::abs(rosenblatt_cf(params, eps, psi).imag()) < 5.0 * eps * eps);
}
