#include "msd/mc.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "msd/asymptotics.hpp"
#include "msd/common.hpp"
#include "msd/estimator.hpp"
#include "msd/fractional.hpp"
#include "msd/kernels.hpp"
#include "msd/msd.hpp"
#include "msd/rng.hpp"

namespace msd {

namespace {

int resolve_workers(int hint) {
    if (hint > 0) return hint;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(0) on the calling thread first — the first replication populates
// the embedding/covariance caches, so the parallel phase only draws samples —
// then distributes the remaining indices over a worker pool. Results land in
// preallocated slots, so scheduling cannot change any output.
void run_replications(int count, int workers, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    fn(0);
    if (count == 1) return;
    workers = std::min(workers, count - 1);
    if (workers <= 1) {
        for (int i = 1; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{1};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string scheme_label(const std::vector<int>& lags) {
    if (lags.size() >= 3 &&
        lags.back() - lags.front() + 1 == static_cast<int>(lags.size()))
        return std::to_string(lags.front()) + ".." + std::to_string(lags.back());
    std::string out = "{";
    for (std::size_t k = 0; k < lags.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(lags[k]);
    }
    return out + "}";
}

SamplePath simulate_for(const ProcessModel& model, long n, int oversample,
                        std::uint64_t seed) {
    return model.kind == ProcessKind::FBM ? simulate_fbm(model, n, seed)
                                          : simulate_ifou(model, n, oversample, seed);
}

double column_mean(const std::vector<ReplicationRecord>& records, int first, int count,
                   std::size_t col) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = records[static_cast<std::size_t>(first + i)].values[col];
    return kernels::sum(v.data(), v.size()) / count;
}

double column_sd(const std::vector<ReplicationRecord>& records, int first, int count,
                 std::size_t col, double mean) {
    if (count < 2) return 0.0;
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = records[static_cast<std::size_t>(first + i)].values[col];
    return std::sqrt(kernels::sum_sq_dev(v.data(), v.size(), mean) / (count - 1));
}

double sample_skewness(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = kernels::sum(v.data(), v.size()) / n;
    const double m2 = kernels::sum_sq_dev(v.data(), v.size(), mean) / n;
    double m3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m3 += d * d * d;
    }
    m3 /= n;
    return m3 / std::pow(m2, 1.5);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace

CellStats run_estimation_cell(const ProcessModel& model, long n, const LagScheme& scheme,
                              int replications, std::uint64_t master_seed,
                              const std::string& cell_id, int workers, int oversample,
                              int cell_index, std::vector<ReplicationRecord>& records) {
    if (replications < 1) throw domain_error("run_estimation_cell: replications must be >= 1");
    scheme.validate(static_cast<int>(n));
    const std::uint64_t cell_key = fnv1a(cell_id);
    const int first = static_cast<int>(records.size());
    records.resize(records.size() + static_cast<std::size_t>(replications));

    run_replications(replications, resolve_workers(workers), [&](int r) {
        const std::uint64_t seed = derive_seed(master_seed, cell_key, static_cast<std::uint64_t>(r));
        const SamplePath path = simulate_for(model, n, oversample, seed);
        const EstimateReport fit = fit_loglog(msd_curve(path, scheme));
        ReplicationRecord& rec = records[static_cast<std::size_t>(first + r)];
        rec.cell = cell_index;
        rec.rep = r;
        rec.seed = seed;
        rec.values = {fit.hurst_hat, fit.alpha_hat, fit.log_theta_hat};
    });

    CellStats stats;
    stats.cell_id = cell_id;
    stats.n = n;
    stats.hurst_true = model.H;
    stats.scheme_label = scheme_label(scheme.lags());
    stats.replications = replications;
    const double mean_h = column_mean(records, first, replications, 0);
    stats.scalars["mean_H"] = mean_h;
    stats.scalars["sd_H"] = column_sd(records, first, replications, 0, mean_h);
    const double mean_lt = column_mean(records, first, replications, 2);
    stats.scalars["mean_log_theta"] = mean_lt;
    stats.scalars["sd_log_theta"] = column_sd(records, first, replications, 2, mean_lt);
    return stats;
}

ExperimentSummary run_table1(const ExperimentConfig& config) {
    if (config.model.kind != ProcessKind::FBM)
        throw domain_error("run_table1: the grid is an fBm experiment");
    Timer timer;
    ExperimentSummary summary;
    summary.kind = "table1";
    summary.columns = {"hurst_hat", "alpha_hat", "log_theta_hat"};
    summary.master_seed = config.master_seed;

    const std::array<double, 2> hursts{0.25, 0.9};
    const std::array<long, 4> lengths{512, 1024, 2048, 4096};
    int cell_index = 0;
    for (double H : hursts) {
        for (long n : lengths) {
            for (int preset = 0; preset < 2; ++preset) {
                const LagScheme scheme = preset == 0
                                             ? lag_presets(LagPreset::CONSECUTIVE, 2, 128)
                                             : lag_presets(LagPreset::PAIR, 2, 128);
                const std::string cell_id = "table1/H=" + fmt_g(H) + "/n=" + std::to_string(n) +
                                            (preset == 0 ? "/consecutive" : "/pair");
                const ProcessModel model = ProcessModel::fbm(H, config.model.sigma2);
                summary.cells.push_back(run_estimation_cell(
                    model, n, scheme, config.replications, config.master_seed, cell_id,
                    config.workers, config.oversample, cell_index, summary.records));
                ++cell_index;
            }
        }
    }
    summary.wall_seconds = timer.seconds();
    return summary;
}

ExperimentSummary run_table2(const ExperimentConfig& config) {
    if (config.model.kind != ProcessKind::IFOU)
        throw domain_error("run_table2: the grid is an ifOU experiment");
    Timer timer;
    ExperimentSummary summary;
    summary.kind = "table2";
    summary.columns = {"hurst_hat", "alpha_hat", "log_theta_hat"};
    summary.master_seed = config.master_seed;

    const long n = 4096;
    const std::array<double, 2> hursts{0.25, 0.9};
    const std::array<int, 4> base_lags{8, 16, 32, 64};
    int cell_index = 0;
    for (double H : hursts) {
        for (int h : base_lags) {
            const LagScheme scheme = lag_presets(LagPreset::DYADIC_TRIPLE, h, 4 * h);
            const std::string cell_id = "table2/H=" + fmt_g(H) +
                                        "/lags=" + scheme_label(scheme.lags());
            const ProcessModel model =
                ProcessModel::ifou(H, config.model.sigma2, config.model.lambda);
            summary.cells.push_back(run_estimation_cell(
                model, n, scheme, config.replications, config.master_seed, cell_id,
                config.workers, config.oversample, cell_index, summary.records));
            ++cell_index;
        }
    }
    summary.wall_seconds = timer.seconds();
    return summary;
}

ExperimentSummary run_msd_histogram(const ExperimentConfig& config) {
    if (config.replications < 1)
        throw domain_error("run_msd_histogram: replications must be >= 1");
    Timer timer;
    const LagScheme scheme =
        config.schemes.empty() ? LagScheme::from_lags({1}) : config.schemes.front();
    const int h = scheme.lags().front();
    const long n = config.n;
    if (h > n - 1) throw domain_error("run_msd_histogram: lag too large for n");
    const ProcessModel& model = config.model;

    const double ex2 = exact_msd_moment(model, h);
    const long count = n - h;
    const NormalizationPair norm = normalization(model.alpha, count, h);
    const double factor = static_cast<double>(count) / (norm.eta * norm.zeta_per_lag[0]);

    ExperimentSummary summary;
    summary.kind = "msd_histogram";
    summary.columns = {"mu2", "t_norm"};
    summary.master_seed = config.master_seed;

    const std::string cell_id = "msd_histogram/" +
                                std::string(model.kind == ProcessKind::FBM ? "fbm" : "ifou") +
                                "/H=" + fmt_g(model.H) + "/n=" + std::to_string(n) +
                                "/h=" + std::to_string(h);
    const std::uint64_t cell_key = fnv1a(cell_id);
    summary.records.resize(static_cast<std::size_t>(config.replications));
    run_replications(config.replications, resolve_workers(config.workers), [&](int r) {
        const std::uint64_t seed =
            derive_seed(config.master_seed, cell_key, static_cast<std::uint64_t>(r));
        const SamplePath path = simulate_for(model, n, config.oversample, seed);
        const double mu2 = msd(path, h);
        ReplicationRecord& rec = summary.records[static_cast<std::size_t>(r)];
        rec.cell = 0;
        rec.rep = r;
        rec.seed = seed;
        rec.values = {mu2, factor * (mu2 - ex2)};
    });

    CellStats stats;
    stats.cell_id = cell_id;
    stats.n = n;
    stats.hurst_true = model.H;
    stats.scheme_label = scheme_label({h});
    stats.replications = config.replications;
    const int reps = config.replications;
    const double mean_mu2 = column_mean(summary.records, 0, reps, 0);
    stats.scalars["mean_mu2"] = mean_mu2;
    stats.scalars["sd_mu2"] = column_sd(summary.records, 0, reps, 0, mean_mu2);
    const double mean_t = column_mean(summary.records, 0, reps, 1);
    stats.scalars["mean_t"] = mean_t;
    stats.scalars["sd_t"] = column_sd(summary.records, 0, reps, 1, mean_t);
    std::vector<double> t_col(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i)
        t_col[static_cast<std::size_t>(i)] = summary.records[static_cast<std::size_t>(i)].values[1];
    if (reps >= 3) stats.scalars["skew_t"] = sample_skewness(t_col);
    stats.scalars["skew_se"] = std::sqrt(6.0 / reps);
    stats.scalars["exact_moment"] = ex2;
    stats.scalars["norm_factor"] = factor;
    // The Gaussian reference curve overlaid on the histogram is the moment fit.
    stats.scalars["gauss_fit_mean"] = mean_t;
    stats.scalars["gauss_fit_sd"] = stats.scalars["sd_t"];
    summary.cells.push_back(std::move(stats));
    summary.wall_seconds = timer.seconds();
    return summary;
}

ExperimentSummary run_limit_check(const ExperimentConfig& config) {
    if (config.replications < 2)
        throw domain_error("run_limit_check: need at least two replications for a variance");
    if (config.schemes.empty())
        throw domain_error("run_limit_check: a lag scheme is required");
    Timer timer;
    const LagScheme& scheme = config.schemes.front();
    scheme.validate(static_cast<int>(config.n));
    const ProcessModel& model = config.model;
    const long n = config.n;
    const std::vector<int> lags = scheme.lags();
    const int m = static_cast<int>(lags.size());

    std::vector<double> ex2(lags.size()), factor(lags.size());
    for (int k = 0; k < m; ++k) {
        const int hk = lags[static_cast<std::size_t>(k)];
        const long count = n - hk;
        ex2[static_cast<std::size_t>(k)] = exact_msd_moment(model, hk);
        const NormalizationPair norm = normalization(model.alpha, count, hk);
        factor[static_cast<std::size_t>(k)] =
            static_cast<double>(count) / (norm.eta * norm.zeta_per_lag[0]);
    }

    ExperimentSummary summary;
    summary.kind = "limit_check";
    for (int hk : lags) summary.columns.push_back("t_h" + std::to_string(hk));
    summary.master_seed = config.master_seed;

    const std::string cell_id = "limit_check/" +
                                std::string(model.kind == ProcessKind::FBM ? "fbm" : "ifou") +
                                "/H=" + fmt_g(model.H) + "/n=" + std::to_string(n) +
                                "/lags=" + scheme_label(lags);
    const std::uint64_t cell_key = fnv1a(cell_id);
    const int reps = config.replications;
    summary.records.resize(static_cast<std::size_t>(reps));
    run_replications(reps, resolve_workers(config.workers), [&](int r) {
        const std::uint64_t seed =
            derive_seed(config.master_seed, cell_key, static_cast<std::uint64_t>(r));
        const SamplePath path = simulate_for(model, n, config.oversample, seed);
        const MsdCurve curve = msd_curve(path, scheme);
        ReplicationRecord& rec = summary.records[static_cast<std::size_t>(r)];
        rec.cell = 0;
        rec.rep = r;
        rec.seed = seed;
        rec.values.resize(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            rec.values[static_cast<std::size_t>(k)] =
                factor[static_cast<std::size_t>(k)] *
                (curve.values[static_cast<std::size_t>(k)] - ex2[static_cast<std::size_t>(k)]);
    });

    CellStats stats;
    stats.cell_id = cell_id;
    stats.n = n;
    stats.hurst_true = model.H;
    stats.scheme_label = scheme_label(lags);
    stats.replications = reps;

    const Regime regime = classify_regime(model.alpha);
    if (regime != Regime::SUPERCRITICAL) {
        // Sample covariance (ddof 1) of the normalized vector vs the predicted
        // limit covariance; diagonal z-scores use SE(S_kk) ~ Sigma_kk sqrt(2/(N-1)).
        std::vector<double> means(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            means[static_cast<std::size_t>(k)] = column_mean(summary.records, 0, reps, static_cast<std::size_t>(k));
        stats.sample_cov.assign(static_cast<std::size_t>(m),
                                std::vector<double>(static_cast<std::size_t>(m), 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double acc = 0.0;
                for (int r = 0; r < reps; ++r) {
                    const auto& v = summary.records[static_cast<std::size_t>(r)].values;
                    acc += (v[static_cast<std::size_t>(i)] - means[static_cast<std::size_t>(i)]) *
                           (v[static_cast<std::size_t>(j)] - means[static_cast<std::size_t>(j)]);
                }
                stats.sample_cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    stats.sample_cov[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                        acc / (reps - 1);
            }
        const SigmaMatrix target = regime == Regime::CRITICAL
                                       ? sigma_critical(model, m)
                                       : sigma_gaussian(model, scheme.weights);
        stats.target_cov.assign(static_cast<std::size_t>(m),
                                std::vector<double>(static_cast<std::size_t>(m), 0.0));
        double max_abs_z = 0.0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j)
                stats.target_cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    target.at(i, j);
            const double se = target.at(i, i) * std::sqrt(2.0 / (reps - 1));
            const double z = (stats.sample_cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] -
                              target.at(i, i)) / se;
            stats.scalars["z_var_h" + std::to_string(lags[static_cast<std::size_t>(i)])] = z;
            max_abs_z = std::max(max_abs_z, std::abs(z));
        }
        stats.scalars["max_abs_z"] = max_abs_z;
    } else {
        // Per-lag KS distance of the sample against the predicted limit CDF.
        const RosenblattParams params = make_rosenblatt_params(model);
        const double scale = tau(model);
        double max_ks = 0.0;
        for (int k = 0; k < m; ++k) {
            std::vector<double> col(static_cast<std::size_t>(reps));
            for (int r = 0; r < reps; ++r)
                col[static_cast<std::size_t>(r)] =
                    summary.records[static_cast<std::size_t>(r)].values[static_cast<std::size_t>(k)];
            std::sort(col.begin(), col.end());
            double ks = 0.0;
            for (int i = 0; i < reps; ++i) {
                const double cdf = rosenblatt_cdf(params, col[static_cast<std::size_t>(i)], scale);
                ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / reps));
                ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / reps));
            }
            stats.scalars["ks_h" + std::to_string(lags[static_cast<std::size_t>(k)])] = ks;
            max_ks = std::max(max_ks, ks);
        }
        stats.scalars["max_ks"] = max_ks;
        stats.scalars["ks_band_1pct"] = 1.628 / std::sqrt(static_cast<double>(reps));
        stats.scalars["target_sd"] = tau(model) / psi_alpha(model.alpha);
    }
    summary.cells.push_back(std::move(stats));
    summary.wall_seconds = timer.seconds();
    return summary;
}

// ------------------------------------------------------------ serialization

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("invalid experiment JSON: ") + e.what());
    }
    ExperimentConfig config;
    try {
        config.model = ProcessModel::from_json(j.at("model").dump());
        config.kind = j.value("kind", config.kind);
        config.n = j.value("n", config.n);
        config.replications = j.at("replications").get<int>();
        config.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("scheme")) {
            const auto& s = j.at("scheme");
            if (!s.empty() && s.front().is_array())
                for (const auto& one : s)
                    config.schemes.push_back(LagScheme::from_lags(one.get<std::vector<int>>()));
            else
                config.schemes.push_back(LagScheme::from_lags(s.get<std::vector<int>>()));
        }
        config.outputs = j.value("outputs", config.outputs);
        config.workers = j.value("workers", config.workers);
        config.oversample = j.value("oversample", config.oversample);
        config.run_id = j.value("run_id", config.run_id);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("invalid experiment JSON: ") + e.what());
    }
    if (config.replications < 1)
        throw domain_error("experiment config: replications must be >= 1");
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw domain_error("experiment config: cannot open " + file);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json(buf.str());
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["model"] = nlohmann::json::parse(model.to_json());
    j["kind"] = kind;
    j["n"] = n;
    j["replications"] = replications;
    j["master_seed"] = master_seed;
    nlohmann::json schemes_json = nlohmann::json::array();
    for (const auto& s : schemes) schemes_json.push_back(s.lags());
    j["scheme"] = schemes_json;
    j["outputs"] = outputs;
    j["workers"] = workers;
    j["oversample"] = oversample;
    j["run_id"] = run_id;
    return j.dump(2);
}

std::string ExperimentSummary::records_csv() const {
    std::ostringstream os;
    os << "cell_id,rep,seed";
    for (const auto& c : columns) os << "," << c;
    os << "\n";
    char buf[64];
    for (const auto& rec : records) {
        os << cells[static_cast<std::size_t>(rec.cell)].cell_id << "," << rec.rep << ","
           << rec.seed;
        for (double v : rec.values) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string ExperimentSummary::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["master_seed"] = master_seed;
    j["wall_seconds"] = wall_seconds;
    j["columns"] = columns;
    j["replication_rows"] = records.size();
    nlohmann::json cells_json = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json cj;
        cj["cell_id"] = c.cell_id;
        cj["n"] = c.n;
        cj["hurst_true"] = c.hurst_true;
        cj["scheme"] = c.scheme_label;
        cj["replications"] = c.replications;
        cj["scalars"] = c.scalars;
        if (!c.sample_cov.empty()) {
            cj["sample_cov"] = c.sample_cov;
            cj["target_cov"] = c.target_cov;
        }
        cells_json.push_back(cj);
    }
    j["cells"] = cells_json;
    return j.dump(2);
}

void write_outputs(const ExperimentSummary& summary, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir + "/records.csv", std::ios::binary);
        if (!os) throw domain_error("write_outputs: cannot open " + dir + "/records.csv");
        os << summary.records_csv();
        if (!os) throw numerical_error("write_outputs: write failed in " + dir);
    }
    {
        std::ofstream os(dir + "/summary.json", std::ios::binary);
        if (!os) throw domain_error("write_outputs: cannot open " + dir + "/summary.json");
        os << summary.to_json() << "\n";
        if (!os) throw numerical_error("write_outputs: write failed in " + dir);
    }
}

}  // namespace msd
