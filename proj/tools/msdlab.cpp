// msdlab: command-line front-end for the simulation/estimation library.
// Every subcommand is a thin adapter over library calls; exit codes are
// 0 = success, 1 = domain/validation error, 2 = numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "msd/asymptotics.hpp"
#include "msd/common.hpp"
#include "msd/estimator.hpp"
#include "msd/fractional.hpp"
#include "msd/inference.hpp"
#include "msd/mc.hpp"
#include "msd/model.hpp"
#include "msd/msd.hpp"
#include "msd/rng.hpp"
#include "msd/svg.hpp"
#include "msd/tracking.hpp"

namespace {

using msd::LagScheme;
using msd::ProcessModel;

std::vector<int> parse_lags(const std::string& text) {
    std::vector<int> lags;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            lags.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw msd::domain_error("cannot parse lag '" + tok + "'");
        }
    }
    if (lags.empty()) throw msd::domain_error("no lags given");
    return lags;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw msd::domain_error("cannot parse number '" + tok + "'");
        }
    }
    return out;
}

std::string read_file(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw msd::domain_error("cannot open " + file);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const std::string& file, const std::string& content) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw msd::domain_error("cannot open " + file + " for writing");
    os << content;
    if (!os) throw msd::numerical_error("write failed for " + file);
}

ProcessModel model_from_flags(const std::string& kind, double hurst, double sigma2,
                              double lambda) {
    if (kind == "fbm") return ProcessModel::fbm(hurst, sigma2);
    if (kind == "ifou") return ProcessModel::ifou(hurst, sigma2, lambda);
    throw msd::domain_error("unknown model kind '" + kind + "' (expected fbm or ifou)");
}

msd::SamplePath load_path(const std::string& csv_file, const std::string& bin_file) {
    if (!bin_file.empty()) return msd::import_path_binary(bin_file);
    if (csv_file.empty()) throw msd::domain_error("no input path given (--in or --in-binary)");
    msd::ColumnMapping mapping;
    mapping.time = "t";
    mapping.axes = {"x"};
    const auto records = msd::ingest_csv(csv_file, mapping);
    if (records.size() != 1) throw msd::domain_error("expected a single-trajectory file");
    msd::SamplePath path;
    path.values = records[0].axes[0];
    path.delta = records[0].delta;
    return path;
}

msd::MsdCurve load_msd_csv(const std::string& file, double delta) {
    std::ifstream is(file);
    if (!is) throw msd::domain_error("cannot open " + file);
    std::string line;
    if (!std::getline(is, line) || line != "lag,msd,count")
        throw msd::domain_error(file + ": expected header 'lag,msd,count'");
    msd::MsdCurve curve;
    curve.delta = delta;
    long row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        int lag = 0;
        long count = 0;
        double value = 0.0;
        if (std::sscanf(line.c_str(), "%d,%lf,%ld", &lag, &value, &count) != 3)
            throw msd::domain_error(file + ": cannot parse row " + std::to_string(row));
        curve.lags.push_back(lag);
        curve.values.push_back(value);
        curve.counts.push_back(count);
    }
    if (curve.lags.empty()) throw msd::domain_error(file + ": no data rows");
    curve.n = curve.counts.front() + curve.lags.front();
    return curve;
}

LagScheme scheme_from_flags(const std::string& lags_flag, const std::string& preset,
                            int h_min, int h_max) {
    if (!lags_flag.empty()) return LagScheme::from_lags(parse_lags(lags_flag));
    if (preset == "consecutive") return msd::lag_presets(msd::LagPreset::CONSECUTIVE, h_min, h_max);
    if (preset == "pair") return msd::lag_presets(msd::LagPreset::PAIR, h_min, h_max);
    if (preset == "dyadic") return msd::lag_presets(msd::LagPreset::DYADIC_TRIPLE, h_min, 4 * h_min);
    throw msd::domain_error("no lag scheme given (--lags or --preset)");
}

// ------------------------------------------------------------- subcommands

int cmd_simulate(const std::string& kind, double hurst, double sigma2, double lambda, long n,
                 std::uint64_t seed, int oversample, const std::string& out_csv,
                 const std::string& out_bin) {
    const ProcessModel model = model_from_flags(kind, hurst, sigma2, lambda);
    const msd::SamplePath path = model.kind == msd::ProcessKind::FBM
                                     ? msd::simulate_fbm(model, n, seed)
                                     : msd::simulate_ifou(model, n, oversample, seed);
    if (!out_csv.empty()) msd::export_path_csv(path, out_csv);
    if (!out_bin.empty()) msd::export_path_binary(path, out_bin);
    std::printf("simulated %s path: n=%ld seed=%llu -> %s%s%s\n", kind.c_str(), n,
                static_cast<unsigned long long>(seed), out_csv.c_str(),
                (!out_csv.empty() && !out_bin.empty()) ? " and " : "", out_bin.c_str());
    return 0;
}

int cmd_msd(const std::string& in_csv, const std::string& in_bin, const std::string& lags_flag,
            const std::string& preset, int h_min, int h_max, const std::string& out) {
    const msd::SamplePath path = load_path(in_csv, in_bin);
    const LagScheme scheme = scheme_from_flags(lags_flag, preset, h_min, h_max);
    const msd::MsdCurve curve = msd::msd_curve(path, scheme);
    msd::export_msd_csv(curve, out);
    std::printf("msd: %d lags over n=%ld -> %s\n", curve.m(), curve.n, out.c_str());
    return 0;
}

int cmd_fit(const std::string& msd_file, double delta, const std::string& out_json) {
    const msd::MsdCurve curve = load_msd_csv(msd_file, delta);
    const msd::EstimateReport report = msd::fit_loglog(curve);
    std::printf("%8s %16s %16s\n", "lag", "msd", "residual");
    for (std::size_t k = 0; k < curve.lags.size(); ++k)
        std::printf("%8d %16.8g %16.3e\n", curve.lags[k], curve.values[k],
                    report.residuals[k]);
    std::printf("alpha_hat=%.6f hurst_hat=%.6f log_theta_hat=%.6f\n", report.alpha_hat,
                report.hurst_hat, report.log_theta_hat);
    if (!out_json.empty()) write_file(out_json, report.to_json() + "\n");
    return 0;
}

int cmd_asympt(double alpha, double theta, const std::string& weights_flag, int n_quad,
               const std::string& quantiles_flag, const std::string& out_json) {
    const ProcessModel model = ProcessModel::fbm(alpha / 2.0, theta);
    std::vector<double> weights =
        weights_flag.empty() ? std::vector<double>{1.0, 2.0} : parse_doubles(weights_flag);
    const msd::AsymptoticLaw law = msd::asymptotic_law(model, weights, 1e-10, n_quad);
    std::printf("alpha=%g theta=%g regime=%s tau=%.10g\n", alpha, theta,
                msd::regime_name(law.regime), law.tau);
    if (law.regime != msd::Regime::SUPERCRITICAL) {
        std::printf("Sigma (weights");
        for (double w : weights) std::printf(" %g", w);
        std::printf("):\n");
        for (int i = 0; i < law.sigma.m; ++i) {
            for (int j = 0; j < law.sigma.m; ++j) std::printf(" %14.8g", law.sigma.at(i, j));
            std::printf("\n");
        }
    } else {
        std::printf("psi=%.10g\n", law.psi);
        for (int s = 2; s <= std::min(6, law.rosenblatt->s_max); ++s)
            std::printf("c_%d=%.10g\n", s, msd::rosenblatt_cs(*law.rosenblatt, s));
        const std::vector<double> probs = quantiles_flag.empty()
                                              ? std::vector<double>{0.025, 0.5, 0.975}
                                              : parse_doubles(quantiles_flag);
        std::printf("standardized quantiles:\n");
        for (double p : probs)
            std::printf("  q(%g) = %.8g\n", p,
                        msd::rosenblatt_quantile(*law.rosenblatt, p, law.rosenblatt->psi));
    }
    if (!out_json.empty()) write_file(out_json, law.to_json() + "\n");
    return 0;
}

int cmd_ci(const std::string& report_file, long n, int h, double level,
           const std::string& out_json) {
    const msd::EstimateReport report = msd::EstimateReport::from_json(read_file(report_file));
    const auto [alpha_ci, theta_ci] = msd::confidence_interval(report, n, h, level);
    std::printf("alpha: [%.6f, %.6f]  log_theta: [%.6f, %.6f]  (level %.3g, %s quantiles)\n",
                alpha_ci.lower, alpha_ci.upper, theta_ci.lower, theta_ci.upper, level,
                alpha_ci.quantile_source.c_str());
    if (!out_json.empty()) {
        nlohmann::json j;
        j["alpha"] = nlohmann::json::parse(alpha_ci.to_json());
        j["log_theta"] = nlohmann::json::parse(theta_ci.to_json());
        write_file(out_json, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_mc(const std::string& config_file, const std::string& out_dir, int workers_override) {
    msd::ExperimentConfig config = msd::ExperimentConfig::from_json_file(config_file);
    if (workers_override > 0) config.workers = workers_override;
    const std::string run_dir = out_dir + "/" + config.run_id;

    if (config.kind == "spaghetti") {
        // Figure-style overlay: one MSD curve per replication, all drawn into
        // a single log-log plot.
        if (config.schemes.empty())
            throw msd::domain_error("spaghetti run: a lag scheme is required");
        const std::string cell_id = "spaghetti/" + config.run_id;
        const std::uint64_t cell_key = msd::fnv1a(cell_id);
        std::vector<msd::MsdCurve> curves;
        for (int r = 0; r < config.replications; ++r) {
            const std::uint64_t seed =
                msd::derive_seed(config.master_seed, cell_key, static_cast<std::uint64_t>(r));
            const msd::SamplePath path =
                config.model.kind == msd::ProcessKind::FBM
                    ? msd::simulate_fbm(config.model, config.n, seed)
                    : msd::simulate_ifou(config.model, config.n, config.oversample, seed);
            curves.push_back(msd::msd_curve(path, config.schemes.front()));
        }
        std::filesystem::create_directories(run_dir);
        msd::svg::write_text_file(run_dir + "/spaghetti.svg",
                                  msd::svg::loglog_msd_svg(curves, "pathwise MSD"));
        std::printf("mc spaghetti: %d curves -> %s/spaghetti.svg\n", config.replications,
                    run_dir.c_str());
        return 0;
    }

    msd::ExperimentSummary summary;
    if (config.kind == "table1")
        summary = msd::run_table1(config);
    else if (config.kind == "table2")
        summary = msd::run_table2(config);
    else if (config.kind == "msd_histogram")
        summary = msd::run_msd_histogram(config);
    else if (config.kind == "limit_check")
        summary = msd::run_limit_check(config);
    else
        throw msd::domain_error("unknown experiment kind '" + config.kind + "'");

    msd::write_outputs(summary, run_dir);
    if (config.kind == "msd_histogram") {
        std::vector<double> mu2(summary.records.size());
        for (std::size_t i = 0; i < summary.records.size(); ++i)
            mu2[i] = summary.records[i].values[0];
        msd::svg::write_text_file(run_dir + "/hist.svg",
                                  msd::svg::histogram_svg(mu2, 40, "MSD statistic distribution"));
    }
    std::printf("mc %s: %zu cells, %zu records, %.1fs -> %s\n", summary.kind.c_str(),
                summary.cells.size(), summary.records.size(), summary.wall_seconds,
                run_dir.c_str());
    return 0;
}

int cmd_ingest(const std::string& in_file, const std::string& time_col,
               const std::string& axes_flag, const std::string& id_col,
               const std::string& lags_flag, const std::string& preset, int h_min, int h_max,
               double level, const std::string& out_dir) {
    msd::ColumnMapping mapping;
    mapping.time = time_col;
    std::istringstream is(axes_flag);
    std::string tok;
    while (std::getline(is, tok, ',')) mapping.axes.push_back(tok);
    mapping.particle_id = id_col;

    const auto records = msd::ingest_csv(in_file, mapping);
    const LagScheme scheme = scheme_from_flags(lags_flag, preset, h_min, h_max);
    std::filesystem::create_directories(out_dir);
    for (const auto& rec : records) {
        const auto analyses = msd::analyze_track(rec, scheme, level);
        for (std::size_t a = 0; a < analyses.size(); ++a) {
            const std::string tag =
                (rec.particle_id.empty() ? std::string("track") : rec.particle_id) + "_" +
                mapping.axes[a];
            write_file(out_dir + "/analysis_" + tag + ".json", analyses[a].to_json() + "\n");
            std::printf("%s: alpha_hat=%.4f regime=%s%s\n", tag.c_str(),
                        analyses[a].fit.alpha_hat, msd::regime_name(analyses[a].regime),
                        analyses[a].has_ci ? "" : " (no interval)");
        }
    }
    return 0;
}

void print_help_json(const CLI::App& app) {
    nlohmann::json j = nlohmann::json::array();
    for (const CLI::App* sub : app.get_subcommands({})) {
        nlohmann::json s;
        s["name"] = sub->get_name();
        s["description"] = sub->get_description();
        nlohmann::json opts = nlohmann::json::array();
        for (const CLI::Option* opt : sub->get_options()) {
            nlohmann::json o;
            o["name"] = opt->get_name();
            o["description"] = opt->get_description();
            o["required"] = opt->get_required();
            opts.push_back(o);
        }
        s["options"] = opts;
        j.push_back(s);
    }
    std::printf("%s\n", j.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anomalous-diffusion MSD toolkit"};
    app.require_subcommand(0, 1);
    bool help_json = false;
    app.add_flag("--help-json", help_json, "print machine-readable subcommand reference");

    // simulate
    std::string sim_kind = "fbm", sim_csv = "path.csv", sim_bin;
    double sim_h = 0.5, sim_sigma2 = 1.0, sim_lambda = 1.0;
    long sim_n = 1024;
    std::uint64_t sim_seed = 0;
    int sim_oversample = 32;
    CLI::App* simulate = app.add_subcommand("simulate", "draw one exact sample path");
    simulate->add_option("--model", sim_kind, "fbm or ifou");
    simulate->add_option("--H", sim_h, "Hurst index in (0,1)")->required();
    simulate->add_option("--sigma2", sim_sigma2, "noise variance scale");
    simulate->add_option("--lambda", sim_lambda, "ifOU relaxation rate");
    simulate->add_option("--n", sim_n, "number of unit-spaced steps")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed (required: no wall-clock seeding)")
        ->required();
    simulate->add_option("--oversample", sim_oversample, "ifOU velocity grid refinement");
    simulate->add_option("--out", sim_csv, "output CSV (t,x)");
    simulate->add_option("--out-binary", sim_bin, "output binary path file");

    // msd
    std::string msd_in, msd_inbin, msd_lags, msd_preset, msd_out = "msd.csv";
    int msd_hmin = 2, msd_hmax = 128;
    CLI::App* msdcmd = app.add_subcommand("msd", "pathwise MSD curve of a stored path");
    msdcmd->add_option("--in", msd_in, "input path CSV (t,x)");
    msdcmd->add_option("--in-binary", msd_inbin, "input binary path file");
    msdcmd->add_option("--lags", msd_lags, "comma-separated lags, e.g. 2,4,8");
    msdcmd->add_option("--preset", msd_preset, "consecutive | pair | dyadic");
    msdcmd->add_option("--hmin", msd_hmin, "preset lower lag");
    msdcmd->add_option("--hmax", msd_hmax, "preset upper lag");
    msdcmd->add_option("--out", msd_out, "output curve CSV (lag,msd,count)");

    // fit
    std::string fit_in, fit_json = "fit.json";
    double fit_delta = 1.0;
    CLI::App* fit = app.add_subcommand("fit", "log-log least-squares fit of an MSD curve");
    fit->add_option("--msd", fit_in, "input curve CSV (lag,msd,count)")->required();
    fit->add_option("--delta", fit_delta, "sampling interval of the source path");
    fit->add_option("--json", fit_json, "output report JSON");

    // asympt
    double as_alpha = 0.0, as_theta = 1.0;
    std::string as_weights, as_quantiles, as_json;
    int as_nquad = 256;
    CLI::App* asympt = app.add_subcommand("asympt", "limit-law constants for an exponent");
    asympt->add_option("--alpha", as_alpha, "diffusion exponent in (0,2)")->required();
    asympt->add_option("--theta", as_theta, "diffusivity scale");
    asympt->add_option("--weights", as_weights, "lag weights, e.g. 1,2,4");
    asympt->add_option("--n-quad", as_nquad, "spectral discretization size");
    asympt->add_option("--quantiles", as_quantiles, "probabilities for the quantile table");
    asympt->add_option("--json", as_json, "output law JSON");

    // ci
    std::string ci_report, ci_json;
    long ci_n = 0;
    int ci_h = 0;
    double ci_level = 0.95;
    CLI::App* ci = app.add_subcommand("ci", "confidence intervals from a fit report");
    // the lag option is spelled --h, so this subcommand keeps only the long help flag
    ci->set_help_flag("--help", "print help and exit");
    ci->add_option("--report", ci_report, "input report JSON from fit")->required();
    ci->add_option("--n", ci_n, "path length the report came from")->required();
    ci->add_option("--h", ci_h, "base lag of the fitted scheme")->required();
    ci->add_option("--level", ci_level, "confidence level in (0,1)");
    ci->add_option("--json", ci_json, "output interval JSON");

    // mc
    std::string mc_config, mc_out = ".";
    int mc_workers = 0;
    CLI::App* mc = app.add_subcommand("mc", "run a Monte Carlo experiment from a config");
    mc->add_option("--config", mc_config, "experiment config JSON")->required();
    mc->add_option("--out", mc_out, "output directory (run_id subdirectory is created)");
    mc->add_option("--workers", mc_workers, "worker threads (0 = all cores)");

    // ingest
    std::string ing_in, ing_time = "t", ing_axes = "x", ing_id, ing_lags, ing_preset;
    int ing_hmin = 2, ing_hmax = 128;
    double ing_level = 0.95;
    std::string ing_out = "analysis";
    CLI::App* ingest = app.add_subcommand("ingest", "analyze tracked trajectories from CSV");
    ingest->add_option("--in", ing_in, "input tracking CSV")->required();
    ingest->add_option("--time", ing_time, "time column name");
    ingest->add_option("--axes", ing_axes, "axis column names, comma-separated");
    ingest->add_option("--id", ing_id, "particle-id column name (omit for single track)");
    ingest->add_option("--lags", ing_lags, "comma-separated lags");
    ingest->add_option("--preset", ing_preset, "consecutive | pair | dyadic");
    ingest->add_option("--hmin", ing_hmin, "preset lower lag");
    ingest->add_option("--hmax", ing_hmax, "preset upper lag");
    ingest->add_option("--level", ing_level, "confidence level");
    ingest->add_option("--out-dir", ing_out, "directory for per-axis analysis JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits 0; bad flags exit 1
    }

    try {
        if (help_json) {
            print_help_json(app);
            return 0;
        }
        if (simulate->parsed())
            return cmd_simulate(sim_kind, sim_h, sim_sigma2, sim_lambda, sim_n, sim_seed,
                                sim_oversample, sim_csv, sim_bin);
        if (msdcmd->parsed())
            return cmd_msd(msd_in, msd_inbin, msd_lags, msd_preset, msd_hmin, msd_hmax, msd_out);
        if (fit->parsed()) return cmd_fit(fit_in, fit_delta, fit_json);
        if (asympt->parsed())
            return cmd_asympt(as_alpha, as_theta, as_weights, as_nquad, as_quantiles, as_json);
        if (ci->parsed()) return cmd_ci(ci_report, ci_n, ci_h, ci_level, ci_json);
        if (mc->parsed()) return cmd_mc(mc_config, mc_out, mc_workers);
        if (ingest->parsed())
            return cmd_ingest(ing_in, ing_time, ing_axes, ing_id, ing_lags, ing_preset, ing_hmin,
                              ing_hmax, ing_level, ing_out);
        std::fprintf(stderr, "no subcommand given (see --help)\n");
        return 1;
    } catch (const msd::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const msd::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
