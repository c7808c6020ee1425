#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msd/model.hpp"

// Exact simulation of fGn/fBm and fOU/ifOU sample paths via circulant
// embedding, plus evaluation of their covariance functions. All samplers are
// deterministic functions of (model, n, seed) so replications reproduce
// bit-for-bit regardless of scheduling.

namespace msd {

struct SamplePath {
    std::vector<double> values;  // X(0), X(delta), ..., X(n*delta); length n+1
    double delta = 1.0;
    ProcessModel model;
    std::uint64_t seed = 0;
    long path_id = 0;

    long n() const { return static_cast<long>(values.size()) - 1; }
};

struct IncrementArray {
    std::vector<double> values;  // X(i+h) - X(i) for i = 1..n-h (j=0 excluded)
    int lag = 0;
};

// Increment cross-covariance of fBm at integer gap z:
//   E[Y_{j+z}(w1 h) Y_j(w2 h)]
//     = (sigma2/2) [ |z+h1|^a - |z+h1-h2|^a - |z|^a + |z-h2|^a ],  h_i = w_i h.
double fgn_autocov(const ProcessModel& model, long z, int h, double w1, double w2);

// Stationary velocity autocovariance of the fOU process at real gap s >= 0:
// the cosine transform of the spectral density
//   sigma2 Gamma(2H+1) sin(pi H) |x|^(1-2H) / ((lambda^2 + x^2) 2 pi),
// evaluated to absolute accuracy quad_tol. Large gaps switch to the two-term
// power-law expansion once its next-term bound drops below quad_tol. Results
// are memoized (keyed by model parameters, s, tol) behind a shared lock.
double fou_autocov(const ProcessModel& model, double s, double quad_tol = 1e-10);

// n stationary fGn draws (unit spacing): exact Gaussian sampling through a
// nonnegative circulant embedding of the autocovariance. The fGn embedding is
// provably nonnegative, so the Cholesky fallback path is disabled here and a
// negative eigenvalue raises an internal error.
std::vector<double> simulate_fgn(const ProcessModel& model, long n, std::uint64_t seed);

// Cumulative sum of simulate_fgn with X(0) = 0, delta = 1.
SamplePath simulate_fbm(const ProcessModel& model, long n, std::uint64_t seed);

// ifOU path on the unit grid: stationary velocity sampled exactly on the
// refined grid {j/oversample} via circulant embedding of fou_autocov (with
// embedding-size doubling, then dense Cholesky as a last resort), then
// integrated by the trapezoidal rule. X(0) = 0, delta = 1.
SamplePath simulate_ifou(const ProcessModel& model, long n, int oversample,
                         std::uint64_t seed);

// Lagged increments X(i+h) - X(i), i = 1..n-h (the index-0 increment is
// excluded from the MSD statistic's sum, and from this array).
IncrementArray increments(const SamplePath& path, int h);

// --------------------------------------------------- generic exact sampler

// Circulant embedding of a stationary autocovariance sequence: eigenvalues of
// the length-m circle whose first row wraps gamma(0..m/2) (true values, not
// zero padding). When the embedding has negative eigenvalues beyond roundoff
// the circle is doubled up to max_doublings times; if still indefinite and
// allow_cholesky is set, a dense Toeplitz Cholesky factor is kept instead
// (guarded to n <= 4096).
struct CirculantEmbedding {
    long n = 0;                       // samples producible per draw
    std::size_t m = 0;                // embedding circle size (power of two)
    std::vector<double> eigenvalues;  // m/2 + 1 DFT eigenvalues (when usable)
    bool cholesky = false;
    std::vector<double> chol;         // n x n lower triangle, row-major, when cholesky
};

CirculantEmbedding build_circulant_embedding(const std::function<double(long)>& autocov,
                                             long n, int max_doublings = 3,
                                             bool allow_cholesky = false);

// One exact draw of the stationary sequence (length n). Consumes a fixed
// number of normals in a frozen order, so outputs are stable across platforms
// given the same seed.
std::vector<double> sample_stationary(const CirculantEmbedding& embedding,
                                      std::uint64_t seed);

// ------------------------------------------------------------------- export

// CSV with header "t,x", t = delta * j, full round-trip precision.
void export_path_csv(const SamplePath& path, const std::string& file);

// Compact binary: magic "MSDP", version byte 1, then little-endian u64 count,
// f64 delta, f64 values[count].
void export_path_binary(const SamplePath& path, const std::string& file);
SamplePath import_path_binary(const std::string& file);

}  // namespace msd
