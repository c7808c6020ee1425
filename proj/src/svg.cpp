#include "msd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "msd/common.hpp"

namespace msd::svg {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 64.0, kRight = 24.0, kTop = 40.0, kBottom = 48.0;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Affine data->pixel maps for the plot area (y axis inverted).
struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const {
        return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

void open_svg(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
       << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " "
       << fmt(kHeight) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xlab,
          const std::string& ylab) {
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
       << fmt(kWidth - kLeft - kRight) << "\" height=\"" << fmt(kHeight - kTop - kBottom)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // Four plain ticks per axis; labels carry the data values.
    for (int i = 0; i <= 3; ++i) {
        const double tx = f.x0 + (f.x1 - f.x0) * i / 3.0;
        const double ty = f.y0 + (f.y1 - f.y0) * i / 3.0;
        os << "<text x=\"" << fmt(f.px(tx)) << "\" y=\"" << fmt(kHeight - kBottom + 16)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << fmt(tx) << "</text>\n";
        os << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(f.py(ty) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(ty)
           << "</text>\n";
    }
    os << "<text x=\"" << fmt(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\""
       << fmt(kHeight - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlab
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(kTop + (kHeight - kTop - kBottom) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << fmt(kTop + (kHeight - kTop - kBottom) / 2) << ")\">" << ylab << "</text>\n";
}

}  // namespace

std::string histogram_svg(const std::vector<double>& values, int bins,
                          const std::string& title) {
    if (values.empty()) throw domain_error("histogram_svg: empty sample");
    if (bins < 1) throw domain_error("histogram_svg: bins must be >= 1");

    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double lo = *mn_it, hi = *mx_it;
    if (lo == hi) {  // all-equal sample: give the single spike a visible box
        lo -= 0.5;
        hi += 0.5;
    }
    const double bw = (hi - lo) / bins;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / bw);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const double ntot = static_cast<double>(values.size());
    double dens_max = 0.0;
    for (long c : counts) dens_max = std::max(dens_max, static_cast<double>(c) / (ntot * bw));

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= ntot;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(var / (ntot - 1.0)) : 0.0;
    const double peak = sd > 0.0 ? 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi)) : dens_max;
    dens_max = std::max(dens_max, peak) * 1.05;

    Frame f{lo, hi, 0.0, dens_max};
    std::ostringstream os;
    open_svg(os, title);
    axes(os, f, "value", "density");
    for (int b = 0; b < bins; ++b) {
        const double d = static_cast<double>(counts[static_cast<std::size_t>(b)]) / (ntot * bw);
        if (d <= 0.0) continue;
        const double x = f.px(lo + b * bw);
        const double w = f.px(lo + (b + 1) * bw) - x;
        const double y = f.py(d);
        os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
           << "\" height=\"" << fmt(f.py(0.0) - y)
           << "\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"/>\n";
    }
    if (sd > 0.0) {
        os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
        const int pts = 160;
        for (int i = 0; i <= pts; ++i) {
            const double x = lo + (hi - lo) * i / pts;
            const double z = (x - mean) / sd;
            const double d = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
            os << fmt(f.px(x)) << "," << fmt(f.py(d)) << (i < pts ? " " : "");
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string loglog_msd_svg(const std::vector<MsdCurve>& curves, const std::string& title) {
    if (curves.empty()) throw domain_error("loglog_msd_svg: no curves");
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool any = false;
    for (const auto& c : curves) {
        for (int k = 0; k < c.m(); ++k) {
            if (!(c.values[static_cast<std::size_t>(k)] > 0.0)) continue;
            const double lx = std::log10(static_cast<double>(c.lags[static_cast<std::size_t>(k)]) *
                                         c.delta);
            const double ly = std::log10(c.values[static_cast<std::size_t>(k)]);
            if (!any) {
                x0 = x1 = lx;
                y0 = y1 = ly;
                any = true;
            } else {
                x0 = std::min(x0, lx);
                x1 = std::max(x1, lx);
                y0 = std::min(y0, ly);
                y1 = std::max(y1, ly);
            }
        }
    }
    if (!any) throw domain_error("loglog_msd_svg: no positive MSD values to plot");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;

    Frame f{x0, x1, y0, y1};
    std::ostringstream os;
    open_svg(os, title);
    axes(os, f, "log10 lag", "log10 MSD");
    for (const auto& c : curves) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-opacity=\"0.45\" "
              "stroke-width=\"1\" points=\"";
        bool first = true;
        for (int k = 0; k < c.m(); ++k) {
            if (!(c.values[static_cast<std::size_t>(k)] > 0.0)) continue;
            const double lx = std::log10(static_cast<double>(c.lags[static_cast<std::size_t>(k)]) *
                                         c.delta);
            const double ly = std::log10(c.values[static_cast<std::size_t>(k)]);
            if (!first) os << " ";
            os << fmt(f.px(lx)) << "," << fmt(f.py(ly));
            first = false;
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::string& file, const std::string& content) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw domain_error("write_text_file: cannot open " + file);
    os << content;
    if (!os) throw numerical_error("write_text_file: write failed for " + file);
}

}  // namespace msd::svg
