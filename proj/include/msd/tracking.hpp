#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "msd/estimator.hpp"
#include "msd/inference.hpp"
#include "msd/model.hpp"

namespace msd {

// Which CSV columns hold what. An empty particle_id column means the file is
// a single trajectory.
struct ColumnMapping {
    std::string time;
    std::vector<std::string> axes;
    std::string particle_id;
    char delimiter = ',';
};

// One particle's trajectory on a uniform time grid.
struct TrackingRecord {
    std::string particle_id;
    std::vector<double> times;              // strictly increasing, equally spaced
    std::vector<std::vector<double>> axes;  // one position array per axis
    double delta = 1.0;                     // inferred time step

    long n() const { return static_cast<long>(times.size()) - 1; }
};

// Streaming single-pass CSV ingestion. The time grid must be uniform within
// the relative tolerance (the MSD statistic assumes a constant sampling
// interval; resampling would distort the increment covariances, so
// non-uniform grids are rejected instead). All errors carry the 1-based data
// row number. Units pass through untouched.
std::vector<TrackingRecord> ingest_csv(std::istream& in, const ColumnMapping& mapping,
                                       double uniform_rel_tol = 1e-6);
std::vector<TrackingRecord> ingest_csv(const std::string& file, const ColumnMapping& mapping,
                                       double uniform_rel_tol = 1e-6);

// One axis' estimation pipeline output. When the fitted exponent lands where
// the interval theory does not apply (the critical band), has_ci is false and
// warning says why.
struct AxisAnalysis {
    std::string axis;
    EstimateReport fit;
    Regime regime = Regime::SUBCRITICAL;
    bool has_ci = false;
    ConfidenceInterval alpha_ci;
    ConfidenceInterval log_theta_ci;
    std::string warning;

    std::string to_json() const;
};

// Full pipeline per axis: MSD curve in physical time units -> log-log fit
// (regressor log(delta * h_k)) -> regime classification -> confidence
// intervals where the regime admits them.
std::vector<AxisAnalysis> analyze_track(const TrackingRecord& record, const LagScheme& scheme,
                                        double level);

}  // namespace msd
