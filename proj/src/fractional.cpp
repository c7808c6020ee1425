#include "msd/fractional.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include "msd/common.hpp"
#include "msd/rng.hpp"

namespace msd {

namespace {

// ------------------------------------------------------------------- planner
// FFTW's planner is not thread-safe; executions on caller-owned buffers are.
// One estimate-mode plan pair per transform size, created under a global
// mutex and executed through the new-array interface. All buffers come from
// fftw_malloc so their alignment matches the planning-time arrays.

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex& fftw_mutex() {
    static std::mutex mu;
    return mu;
}

PlanPair plans_for(std::size_t m) {
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    double* re = fftw_alloc_real(m);
    fftw_complex* cx = fftw_alloc_complex(m / 2 + 1);
    if (!re || !cx) throw numerical_error("fftw allocation failed");
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(m), re, cx, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(m), cx, re, FFTW_ESTIMATE);
    fftw_free(re);
    fftw_free(cx);
    if (!p.r2c || !p.c2r) throw numerical_error("fftw planning failed");
    return cache.emplace(m, p).first->second;
}

struct FftwRealBuf {
    double* p = nullptr;
    explicit FftwRealBuf(std::size_t count) : p(fftw_alloc_real(count)) {
        if (!p) throw numerical_error("fftw allocation failed");
    }
    ~FftwRealBuf() { fftw_free(p); }
    FftwRealBuf(const FftwRealBuf&) = delete;
    FftwRealBuf& operator=(const FftwRealBuf&) = delete;
};

struct FftwComplexBuf {
    fftw_complex* p = nullptr;
    explicit FftwComplexBuf(std::size_t count) : p(fftw_alloc_complex(count)) {
        if (!p) throw numerical_error("fftw allocation failed");
    }
    ~FftwComplexBuf() { fftw_free(p); }
    FftwComplexBuf(const FftwComplexBuf&) = delete;
    FftwComplexBuf& operator=(const FftwComplexBuf&) = delete;
};

std::size_t next_pow2(std::size_t x) {
    std::size_t m = 1;
    while (m < x) m <<= 1;
    return m;
}

}  // namespace

// ------------------------------------------------------------- covariances

double fgn_autocov(const ProcessModel& model, long z, int h, double w1, double w2) {
    if (model.kind != ProcessKind::FBM)
        throw domain_error("fgn_autocov: closed form exists only for the fBm model");
    if (h < 1) throw domain_error("fgn_autocov: h must be >= 1");
    const double h1 = w1 * h, h2 = w2 * h;
    if (std::abs(h1 - std::llround(h1)) > 1e-9 || std::abs(h2 - std::llround(h2)) > 1e-9)
        throw domain_error("fgn_autocov: w1*h and w2*h must be integers");
    const double a = model.alpha;
    const double zd = static_cast<double>(z);
    return 0.5 * model.sigma2 *
           (std::pow(std::abs(zd + h1), a) - std::pow(std::abs(zd + h1 - h2), a) -
            std::pow(std::abs(zd), a) + std::pow(std::abs(zd - h2), a));
}

namespace {

// Memo cache for fou_autocov: the ifOU embedding asks for the same grid of
// gaps once per (model, oversample) and every replication reuses it.
struct FouKey {
    double H, sigma2, lambda, s, tol;
    bool operator==(const FouKey&) const = default;
};

struct FouKeyHash {
    std::size_t operator()(const FouKey& k) const {
        std::uint64_t acc = 0x9e3779b97f4a7c15ULL;
        for (double v : {k.H, k.sigma2, k.lambda, k.s, k.tol})
            acc = splitmix64(acc ^ std::bit_cast<std::uint64_t>(v));
        return static_cast<std::size_t>(acc);
    }
};

// Power-law expansion of the velocity autocovariance at large gaps:
//   gamma_V(s) ~ (sigma2/2) sum_n lambda^-2n [prod_{k=0}^{2n-1}(2H-k)] s^(2H-2n).
double fou_asympt_term(double s, double H, double lambda, double sigma2, int n) {
    double prod = 1.0;
    for (int k = 0; k < 2 * n; ++k) prod *= 2.0 * H - k;
    return 0.5 * sigma2 * std::pow(lambda, -2.0 * n) * prod * std::pow(s, 2.0 * H - 2.0 * n);
}

// Direct evaluation for moderate gaps. The cosine transform is computed on
// the 45-degree ray x = r e^{i pi/4}: the rotation turns cos(sx) into the
// damping factor e^{-sr/sqrt2} (no pole or branch cut is crossed), giving
//   I(s) = int_0^inf r^(1-2H) e^(-sr/sqrt2)
//          [lambda^2 cos(phi) + r^2 sin(phi)] / (lambda^4 + r^4) dr,
//   phi(r) = sr/sqrt2 + pi(1-H)/2,
// a smooth absolutely convergent integral whose only delicate point is the
// r^(1-2H) endpoint. Panels grow geometrically from the endpoint, capped so
// no panel spans more than a few oscillation periods.
double fou_direct(double s, double H, double lambda, double sigma2, double quad_tol) {
    const double pref = sigma2 * std::tgamma(2.0 * H + 1.0) *
                        std::sin(std::numbers::pi * H) / std::numbers::pi;
    const double damp = s / std::numbers::sqrt2;
    const double phase0 = std::numbers::pi * (1.0 - H) / 2.0;
    const double l4 = lambda * lambda * lambda * lambda;
    auto f = [&](double r) {
        const double phi = damp * r + phase0;
        const double r2 = r * r;
        // Each rational factor keeps huge r in a denominator: the naive
        // (lambda^2 cos + r^2 sin)/(lambda^4 + r^4) form overflows r^4 to
        // inf for r beyond ~1e77 (reachable here, since R ~ 64/s) and turns
        // the quotient into NaN.
        const double t1 = lambda * lambda / (l4 + r2 * r2);
        const double t2 = 1.0 / (l4 / r2 + r2);
        return std::pow(r, 1.0 - 2.0 * H) * std::exp(-damp * r) *
               (t1 * std::cos(phi) + t2 * std::sin(phi));
    };

    const double a = std::min(1.0, lambda);
    const double R = std::max({64.0 / s, 8.0 * lambda, 8.0});
    double total = 0.0, err_acc = 0.0;

    // First panel [0, a]: substituting y = r^(2-2H) absorbs the r^(1-2H)
    // factor exactly (r^(1-2H) dr = dy/(2-2H)), leaving a bounded integrand.
    // Integrating the raw form instead leaves the rule's error estimate
    // floored near 4e-12 relative once the endpoint exponent nears -1.
    const double p = 2.0 - 2.0 * H;
    auto f_sub = [&](double y) {
        const double r = std::pow(y, 1.0 / p);
        const double phi = damp * r + phase0;
        const double r2 = r * r;
        const double t1 = lambda * lambda / (l4 + r2 * r2);
        const double t2 = 1.0 / (l4 / r2 + r2);
        return std::exp(-damp * r) * (t1 * std::cos(phi) + t2 * std::sin(phi));
    };
    // Ask for more than anyone requests: the integrand is smooth, so the
    // extra refinement level is cheap and keeps the reported error estimate
    // comfortably inside every caller's tolerance.
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    total += ts.integrate(f_sub, 0.0, std::pow(a, p), 1e-14, &err, &l1) / p;
    err_acc += err / p;

    const double osc_cap = 32.0 / std::max(damp, 1e-300);  // ~5 periods per panel
    double lo = a, width = a;
    while (lo < R) {
        width = std::min(2.0 * width, osc_cap);
        const double hi = std::min(lo + width, R);
        double perr = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, lo, hi, 12, 1e-13, &perr);
        err_acc += perr;
        lo = hi;
    }
    // Truncation beyond R: e^(-sR/sqrt2) <= e^-45 times an O(1) envelope.
    // The guard is relative to the integral's own scale: the per-panel error
    // estimates are magnitude-proportional, so a flat absolute cutoff would
    // reject perfectly converged results whenever the covariance is O(1).
    if (err_acc > quad_tol * std::max(1.0, std::abs(total))) {
        std::ostringstream msg;
        msg << "fou_autocov: quadrature achieved " << err_acc << " > requested " << quad_tol
            << " at s=" << s;
        throw numerical_error(msg.str());
    }
    return pref * total;
}

}  // namespace

double fou_autocov(const ProcessModel& model, double s, double quad_tol) {
    if (model.kind != ProcessKind::IFOU)
        throw domain_error("fou_autocov: velocity covariance is defined for the ifOU model");
    if (!(s >= 0.0)) throw domain_error("fou_autocov: s must be >= 0");
    if (!(quad_tol > 0.0)) throw domain_error("fou_autocov: quad_tol must be positive");

    const double H = model.H, sigma2 = model.sigma2, lambda = model.lambda;
    if (s == 0.0)
        return 0.5 * sigma2 * std::pow(lambda, -2.0 * H) * std::tgamma(2.0 * H + 1.0);
    if (H == 0.5) return 0.5 * sigma2 / lambda * std::exp(-lambda * s);  // classical OU

    static std::shared_mutex mu;
    static std::unordered_map<FouKey, double, FouKeyHash> cache;
    const FouKey key{H, sigma2, lambda, s, quad_tol};
    {
        std::shared_lock<std::shared_mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    double value;
    // Two-term expansion once the first omitted term is below tolerance.
    if (std::abs(fou_asympt_term(s, H, lambda, sigma2, 3)) < quad_tol)
        value = fou_asympt_term(s, H, lambda, sigma2, 1) +
                fou_asympt_term(s, H, lambda, sigma2, 2);
    else
        value = fou_direct(s, H, lambda, sigma2, quad_tol);

    std::unique_lock<std::shared_mutex> lock(mu);
    cache.emplace(key, value);
    return value;
}

// ---------------------------------------------------------------- embedding

CirculantEmbedding build_circulant_embedding(const std::function<double(long)>& autocov,
                                             long n, int max_doublings,
                                             bool allow_cholesky) {
    if (n < 1) throw domain_error("build_circulant_embedding: n must be >= 1");
    CirculantEmbedding emb;
    emb.n = n;

    const std::size_t base =
        next_pow2(std::max<std::size_t>(2, 2 * static_cast<std::size_t>(n - 1)));
    for (int d = 0; d <= max_doublings; ++d) {
        const std::size_t m = base << d;
        FftwRealBuf c(m);
        FftwComplexBuf out(m / 2 + 1);
        const std::size_t half = m / 2;
        for (std::size_t j = 0; j <= half; ++j) c.p[j] = autocov(static_cast<long>(j));
        for (std::size_t j = half + 1; j < m; ++j) c.p[j] = c.p[m - j];

        fftw_execute_dft_r2c(plans_for(m).r2c, c.p, out.p);

        double lam_min = out.p[0][0], lam_max = out.p[0][0];
        for (std::size_t k = 1; k <= half; ++k) {
            lam_min = std::min(lam_min, out.p[k][0]);
            lam_max = std::max(lam_max, out.p[k][0]);
        }
        if (lam_min >= -1e-8 * std::max(lam_max, 0.0)) {
            emb.m = m;
            emb.eigenvalues.resize(half + 1);
            for (std::size_t k = 0; k <= half; ++k)
                emb.eigenvalues[k] = std::max(out.p[k][0], 0.0);
            return emb;
        }
    }

    if (!allow_cholesky)
        throw numerical_error(
            "build_circulant_embedding: embedding is indefinite after doubling "
            "(unexpected for this covariance family)");
    if (n > 4096)
        throw numerical_error(
            "build_circulant_embedding: dense Cholesky fallback capped at n=4096");

    Eigen::MatrixXd cov(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = autocov(i - j);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw numerical_error(
            "build_circulant_embedding: covariance matrix is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    emb.cholesky = true;
    emb.chol.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
    std::size_t idx = 0;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= i; ++j) emb.chol[idx++] = L(i, j);
    return emb;
}

std::vector<double> sample_stationary(const CirculantEmbedding& emb, std::uint64_t seed) {
    const long n = emb.n;
    Xoshiro256pp rng(seed);

    if (emb.cholesky) {
        std::vector<double> z(static_cast<std::size_t>(n));
        rng.gaussians(z.data(), z.size());
        std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        std::size_t idx = 0;
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (long j = 0; j <= i; ++j) acc += emb.chol[idx++] * z[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = acc;
        }
        return x;
    }

    const std::size_t m = emb.m, half = m / 2;
    std::vector<double> z(m);
    rng.gaussians(z.data(), m);
    FftwComplexBuf w(half + 1);
    const double md = static_cast<double>(m);
    w.p[0][0] = std::sqrt(emb.eigenvalues[0] / md) * z[0];
    w.p[0][1] = 0.0;
    w.p[half][0] = std::sqrt(emb.eigenvalues[half] / md) * z[1];
    w.p[half][1] = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        const double c = std::sqrt(emb.eigenvalues[k] / (2.0 * md));
        w.p[k][0] = c * z[2 * k];
        w.p[k][1] = c * z[2 * k + 1];
    }
    FftwRealBuf x(m);
    fftw_execute_dft_c2r(plans_for(m).c2r, w.p, x.p);
    return std::vector<double>(x.p, x.p + n);
}

// ----------------------------------------------------------------- samplers

namespace {

// Reusable embeddings: constructing one costs an FFT plus (for ifOU) many
// covariance quadratures, while every replication only needs a fresh draw.
std::shared_ptr<const CirculantEmbedding> cached_embedding(
    const std::string& key, const std::function<CirculantEmbedding()>& build) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const CirculantEmbedding>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto built = std::make_shared<const CirculantEmbedding>(build());
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, built).first->second;
}

std::string model_cache_key(const char* tag, const ProcessModel& model, long n, int extra) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s|%a|%a|%a|%ld|%d", tag, model.H, model.sigma2,
                  model.lambda, n, extra);
    return buf;
}

}  // namespace

std::vector<double> simulate_fgn(const ProcessModel& model, long n, std::uint64_t seed) {
    if (model.kind != ProcessKind::FBM)
        throw domain_error("simulate_fgn: requires the fBm model");
    if (n < 1) throw domain_error("simulate_fgn: n must be >= 1");
    auto emb = cached_embedding(model_cache_key("fgn", model, n, 0), [&] {
        return build_circulant_embedding(
            [&](long z) { return fgn_autocov(model, z, 1, 1.0, 1.0); }, n,
            /*max_doublings=*/0, /*allow_cholesky=*/false);
    });
    return sample_stationary(*emb, seed);
}

SamplePath simulate_fbm(const ProcessModel& model, long n, std::uint64_t seed) {
    std::vector<double> g = simulate_fgn(model, n, seed);
    SamplePath path;
    path.model = model;
    path.seed = seed;
    path.delta = 1.0;
    path.values.resize(static_cast<std::size_t>(n) + 1);
    path.values[0] = 0.0;
    for (long i = 0; i < n; ++i)
        path.values[static_cast<std::size_t>(i) + 1] =
            path.values[static_cast<std::size_t>(i)] + g[static_cast<std::size_t>(i)];
    return path;
}

SamplePath simulate_ifou(const ProcessModel& model, long n, int oversample,
                         std::uint64_t seed) {
    if (model.kind != ProcessKind::IFOU)
        throw domain_error("simulate_ifou: requires the ifOU model");
    if (n < 1) throw domain_error("simulate_ifou: n must be >= 1");
    if (oversample < 1) throw domain_error("simulate_ifou: oversample must be >= 1");

    const long ng = n * static_cast<long>(oversample) + 1;  // velocity grid {j/oversample}
    auto emb = cached_embedding(model_cache_key("ifou", model, ng, oversample), [&] {
        return build_circulant_embedding(
            [&](long j) {
                return fou_autocov(model, static_cast<double>(j) / oversample, 1e-10);
            },
            ng, /*max_doublings=*/3, /*allow_cholesky=*/true);
    });
    const std::vector<double> v = sample_stationary(*emb, seed);

    SamplePath path;
    path.model = model;
    path.seed = seed;
    path.delta = 1.0;
    path.values.resize(static_cast<std::size_t>(n) + 1);
    path.values[0] = 0.0;
    const double step = 1.0 / oversample;
    for (long i = 1; i <= n; ++i) {
        const std::size_t base = static_cast<std::size_t>(i - 1) * oversample;
        double acc = 0.5 * (v[base] + v[base + oversample]);
        for (int j = 1; j < oversample; ++j) acc += v[base + j];
        path.values[static_cast<std::size_t>(i)] =
            path.values[static_cast<std::size_t>(i - 1)] + acc * step;
    }
    return path;
}

IncrementArray increments(const SamplePath& path, int h) {
    const long n = path.n();
    if (h < 1 || h > n - 1) throw domain_error("increments: need 1 <= h <= n-1");
    IncrementArray out;
    out.lag = h;
    out.values.resize(static_cast<std::size_t>(n - h));
    for (long i = 1; i <= n - h; ++i)
        out.values[static_cast<std::size_t>(i - 1)] =
            path.values[static_cast<std::size_t>(i + h)] - path.values[static_cast<std::size_t>(i)];
    return out;
}

// ------------------------------------------------------------------ export

void export_path_csv(const SamplePath& path, const std::string& file) {
    std::ofstream os(file);
    if (!os) throw domain_error("export_path_csv: cannot open " + file);
    os << "t,x\n";
    char buf[64];
    for (std::size_t j = 0; j < path.values.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.delta * static_cast<double>(j),
                      path.values[j]);
        os << buf;
    }
    if (!os) throw numerical_error("export_path_csv: write failed for " + file);
}

namespace {

void put_u64_le(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint64_t get_u64_le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64_le(std::ostream& os, double d) { put_u64_le(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64_le(std::istream& is) { return std::bit_cast<double>(get_u64_le(is)); }

}  // namespace

void export_path_binary(const SamplePath& path, const std::string& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw domain_error("export_path_binary: cannot open " + file);
    os.write("MSDP", 4);
    os.put(1);  // format version
    put_u64_le(os, path.values.size());
    put_f64_le(os, path.delta);
    for (double v : path.values) put_f64_le(os, v);
    if (!os) throw numerical_error("export_path_binary: write failed for " + file);
}

SamplePath import_path_binary(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw domain_error("import_path_binary: cannot open " + file);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "MSDP", 4) != 0)
        throw domain_error("import_path_binary: bad magic in " + file);
    const int version = is.get();
    if (version != 1) throw domain_error("import_path_binary: unsupported version");
    const std::uint64_t count = get_u64_le(is);
    if (!is || count < 2 || count > (1ULL << 32))
        throw domain_error("import_path_binary: implausible sample count");
    SamplePath path;
    path.delta = get_f64_le(is);
    path.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) path.values[i] = get_f64_le(is);
    if (!is) throw domain_error("import_path_binary: truncated file " + file);
    return path;
}

}  // namespace msd
