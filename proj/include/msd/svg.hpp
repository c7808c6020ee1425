#pragma once

#include <string>
#include <vector>

#include "msd/msd.hpp"

// Direct SVG text emission for the two standard plots. Output is a pure
// function of the inputs (fixed canvas, fixed formatting, no timestamps), so
// repeated runs produce byte-identical files.

namespace msd::svg {

// Histogram of the sample as a density (bar area sums to one) with the
// Gaussian density of matching mean/sd overlaid. Throws a domain error on an
// empty sample or non-positive bin count.
std::string histogram_svg(const std::vector<double>& values, int bins,
                          const std::string& title);

// Log-log spaghetti plot: one polyline per MSD curve. Throws a domain error
// when no curve or no positive value is supplied.
std::string loglog_msd_svg(const std::vector<MsdCurve>& curves, const std::string& title);

void write_text_file(const std::string& file, const std::string& content);

}  // namespace msd::svg
