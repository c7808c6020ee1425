#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msd/model.hpp"

namespace msd {

// One Monte Carlo experiment description. Tables build their own model/lag
// grids from this (using the config's sigma2/lambda), so `n` and `schemes`
// matter only for the single-cell runs (histogram, limit check).
struct ExperimentConfig {
    ProcessModel model;
    std::string kind = "table1";  // table1 | table2 | msd_histogram | limit_check | spaghetti
    long n = 1024;
    int replications = 1000;
    std::vector<LagScheme> schemes;
    std::uint64_t master_seed = 1;
    std::vector<std::string> outputs;  // "estimates", "msd_distribution", "normalized_statistic"
    int workers = 0;                   // 0 = all hardware threads
    int oversample = 32;               // ifOU velocity grid refinement
    std::string run_id = "run";

    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& file);
    std::string to_json() const;
};

// One replication's outputs. Replication seeds are
// derive_seed(master_seed, fnv1a(cell_id), rep), so values depend only on the
// master seed and the cell, never on scheduling.
struct ReplicationRecord {
    int cell = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;
};

struct CellStats {
    std::string cell_id;
    long n = 0;
    double hurst_true = 0.0;
    std::string scheme_label;
    int replications = 0;
    std::map<std::string, double> scalars;
    // Limit-check runs in the Gaussian regimes: sample covariance of the
    // normalized statistic vector next to the predicted limit covariance.
    std::vector<std::vector<double>> sample_cov;
    std::vector<std::vector<double>> target_cov;
};

struct ExperimentSummary {
    std::string kind;                  // table1 | table2 | msd_histogram | limit_check
    std::vector<std::string> columns;  // names of the per-replication value columns
    std::vector<ReplicationRecord> records;  // ordered by (cell, rep)
    std::vector<CellStats> cells;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;

    // Header "cell_id,rep,seed,<columns>", one row per replication, full
    // round-trip precision. Byte-identical across worker counts.
    std::string records_csv() const;
    std::string to_json() const;
};

// Grid of fBm estimation cells: n in {2^9..2^12} x H in {0.25, 0.9} x
// {consecutive lags 2..128, lag pair {2,128}}; reports per-cell mean/sd of
// the fitted Hurst exponent. The config supplies sigma2, replications, seeds.
ExperimentSummary run_table1(const ExperimentConfig& config);

// Grid of ifOU estimation cells at n = 2^12: H in {0.25, 0.9} x dyadic lag
// triples {h,2h,4h}, h in {8,16,32,64}. The config supplies sigma2, lambda,
// oversample, replications, seeds.
ExperimentSummary run_table2(const ExperimentConfig& config);

// Distribution of the single-lag MSD statistic: per replication, msd at the
// scheme's base lag plus the regime-normalized deviation
// (N/(eta(N) zeta(h))) (msd - E X^2(h)); summary includes moments, skewness,
// and the best Gaussian fit of the normalized column.
ExperimentSummary run_msd_histogram(const ExperimentConfig& config);

// Normalized statistic vector across the scheme's lags
// (N_k/(eta(N_k) zeta(h_k))) (msd(h_k) - E X^2(h_k)): in the Gaussian regimes
// the summary holds the sample covariance against the predicted limit
// covariance (diagonal z-scores in the scalars); in the strongly
// superdiffusive regime, per-lag Kolmogorov-Smirnov distances against the
// predicted limit CDF.
ExperimentSummary run_limit_check(const ExperimentConfig& config);

// Single estimation cell (the building block of the table runs): `reps`
// replications of simulate -> msd_curve -> fit, with per-replication columns
// {hurst_hat, alpha_hat, log_theta_hat}.
CellStats run_estimation_cell(const ProcessModel& model, long n, const LagScheme& scheme,
                              int replications, std::uint64_t master_seed,
                              const std::string& cell_id, int workers, int oversample,
                              int cell_index, std::vector<ReplicationRecord>& records);

// Writes records.csv and summary.json (and nothing else) under dir, creating
// the directory if needed.
void write_outputs(const ExperimentSummary& summary, const std::string& dir);

}  // namespace msd
