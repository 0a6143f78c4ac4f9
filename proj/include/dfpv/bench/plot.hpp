#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dfpv/bench/report.hpp"

namespace dfpv::bench {

struct SvgPlot {
  std::string filename;  // <dgp>_<metric>.svg with ':' replaced by '_'
  std::string svg;
};

// One plot per (dgp, metric): log10 of the metric against size, a median polyline per
// estimator and a shaded 25-75 percentile band. Pure function of the rows.
std::vector<SvgPlot> render_plots(const std::vector<SummaryRow>& rows);

}  // namespace dfpv::bench
