#include "msd/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msd/common.hpp"
#include "msd/msd.hpp"

namespace msd {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, delim)) {
        // trim surrounding spaces
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == delim) fields.push_back("");
    return fields;
}

[[noreturn]] void row_error(long row, const std::string& what) {
    throw domain_error("ingest_csv: data row " + std::to_string(row) + ": " + what);
}

double parse_number(const std::string& s, long row, const std::string& column) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) row_error(row, "trailing characters in column " + column);
        return v;
    } catch (const std::exception&) {
        row_error(row, "cannot parse '" + s + "' in column " + column);
    }
}

}  // namespace

std::vector<TrackingRecord> ingest_csv(std::istream& in, const ColumnMapping& mapping,
                                       double uniform_rel_tol) {
    if (mapping.time.empty()) throw domain_error("ingest_csv: time column name is required");
    if (mapping.axes.empty()) throw domain_error("ingest_csv: at least one axis column required");

    std::string line;
    if (!std::getline(in, line)) throw domain_error("ingest_csv: empty input (no header)");
    const std::vector<std::string> header = split_line(line, mapping.delimiter);
    auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw domain_error("ingest_csv: column '" + name + "' not found in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t time_col = column_index(mapping.time);
    std::vector<std::size_t> axis_cols;
    for (const auto& a : mapping.axes) axis_cols.push_back(column_index(a));
    const bool has_id = !mapping.particle_id.empty();
    const std::size_t id_col = has_id ? column_index(mapping.particle_id) : 0;

    // Particles keep their order of first appearance.
    std::vector<TrackingRecord> records;
    std::map<std::string, std::size_t> index_of;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line, mapping.delimiter);
        const std::size_t needed =
            std::max({time_col, has_id ? id_col : std::size_t{0},
                      *std::max_element(axis_cols.begin(), axis_cols.end())});
        if (fields.size() <= needed) row_error(row, "too few fields");

        const std::string id = has_id ? fields[id_col] : "";
        auto found = index_of.find(id);
        if (found == index_of.end()) {
            found = index_of.emplace(id, records.size()).first;
            records.emplace_back();
            records.back().particle_id = id;
            records.back().axes.resize(mapping.axes.size());
        }
        TrackingRecord& rec = records[found->second];

        const double t = parse_number(fields[time_col], row, mapping.time);
        if (!rec.times.empty() && !(t > rec.times.back()))
            row_error(row, "time is not strictly increasing for particle '" + id + "'");
        rec.times.push_back(t);
        for (std::size_t a = 0; a < axis_cols.size(); ++a) {
            const double v = parse_number(fields[axis_cols[a]], row, mapping.axes[a]);
            if (std::isnan(v)) row_error(row, "NaN coordinate in column " + mapping.axes[a]);
            rec.axes[a].push_back(v);
        }
        // Uniform-grid check against the particle's first step, as soon as a
        // second step exists — reporting the first offending row.
        const std::size_t k = rec.times.size();
        if (k >= 3) {
            const double dt0 = rec.times[1] - rec.times[0];
            const double dt = rec.times[k - 1] - rec.times[k - 2];
            if (std::abs(dt - dt0) > uniform_rel_tol * std::abs(dt0))
                row_error(row, "non-uniform time step for particle '" + id + "' (got " +
                                   std::to_string(dt) + ", expected " + std::to_string(dt0) +
                                   "); gaps/missing frames are not supported");
        }
    }

    for (auto& rec : records) {
        if (rec.times.size() < 2)
            throw domain_error("ingest_csv: particle '" + rec.particle_id +
                               "' has fewer than two samples");
        rec.delta = (rec.times.back() - rec.times.front()) /
                    static_cast<double>(rec.times.size() - 1);
    }
    return records;
}

std::vector<TrackingRecord> ingest_csv(const std::string& file, const ColumnMapping& mapping,
                                       double uniform_rel_tol) {
    std::ifstream is(file);
    if (!is) throw domain_error("ingest_csv: cannot open " + file);
    return ingest_csv(is, mapping, uniform_rel_tol);
}

std::vector<AxisAnalysis> analyze_track(const TrackingRecord& record, const LagScheme& scheme,
                                        double level) {
    const long n = record.n();
    if (n < 2) throw domain_error("analyze_track: trajectory too short");
    scheme.validate(static_cast<int>(n));

    std::vector<AxisAnalysis> out;
    for (std::size_t a = 0; a < record.axes.size(); ++a) {
        if (record.axes[a].size() != record.times.size())
            throw domain_error("analyze_track: axis length mismatch");
        SamplePath path;
        path.values = record.axes[a];
        path.delta = record.delta;

        AxisAnalysis analysis;
        analysis.axis = "axis" + std::to_string(a);
        analysis.fit = fit_loglog(msd_curve(path, scheme));
        analysis.regime = classify_regime(analysis.fit.alpha_hat, 0.01);
        try {
            auto [alpha_ci, theta_ci] =
                confidence_interval(analysis.fit, n, scheme.lags().front(), level);
            analysis.alpha_ci = alpha_ci;
            analysis.log_theta_ci = theta_ci;
            analysis.has_ci = true;
        } catch (const domain_error& e) {
            analysis.has_ci = false;
            analysis.warning = e.what();
        }
        out.push_back(std::move(analysis));
    }
    return out;
}

std::string AxisAnalysis::to_json() const {
    nlohmann::json j;
    j["axis"] = axis;
    j["fit"] = nlohmann::json::parse(fit.to_json());
    j["regime"] = regime_name(regime);
    j["has_ci"] = has_ci;
    if (has_ci) {
        j["alpha_ci"] = nlohmann::json::parse(alpha_ci.to_json());
        j["log_theta_ci"] = nlohmann::json::parse(log_theta_ci.to_json());
    } else {
        j["warning"] = warning;
    }
    return j.dump(2);
}

}  // namespace msd
