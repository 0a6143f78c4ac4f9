#include "dfpv/bench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace dfpv::bench {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string color_for(const std::string& estimator) {
  if (estimator == "dfpv") return kPalette[0];
  if (estimator == "fixed_feature") return kPalette[1];
  if (estimator == "direct_ridge") return "#7f7f7f";
  std::size_t h = 0;
  for (char c : estimator) h = h * 31 + static_cast<unsigned char>(c);
  return kPalette[2 + h % 4];
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string f6(double x) { return format_g6(x); }

std::string render_one(const std::string& dgp, const std::string& metric, const std::vector<const SummaryRow*>& rows) {
  std::vector<std::string> estimators;
  std::set<std::size_t> sizes;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double min_pos = std::numeric_limits<double>::infinity();
  for (const auto* r : rows) {
    if (std::find(estimators.begin(), estimators.end(), r->estimator) == estimators.end())
      estimators.push_back(r->estimator);
    sizes.insert(r->size);
    for (double v : {r->p25, r->median, r->p75})
      if (v > 0.0 && std::isfinite(v)) min_pos = std::min(min_pos, v);
  }
  if (!std::isfinite(min_pos)) min_pos = 1.0;
  const double floor_v = min_pos / 10.0;
  auto ly = [&](double v) { return std::log10(std::isfinite(v) && v > 0.0 ? v : floor_v); };
  for (const auto* r : rows)
    for (double v : {r->p25, r->median, r->p75}) {
      lo = std::min(lo, ly(v));
      hi = std::max(hi, ly(v));
    }
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;

  const double xs0 = std::log10(static_cast<double>(*sizes.begin()));
  const double xs1 = std::log10(static_cast<double>(*sizes.rbegin()));
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](std::size_t n) {
    if (xs1 == xs0) return kLeft + pw / 2.0;
    return kLeft + pw * (std::log10(static_cast<double>(n)) - xs0) / (xs1 - xs0);
  };
  auto py = [&](double v) { return kTop + ph * (1.0 - (ly(v) - lo) / (hi - lo)); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f6(kWidth) + "\" height=\"" +
       f6(kHeight) + "\" viewBox=\"0 0 " + f6(kWidth) + " " + f6(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + f6(kWidth) + "\" height=\"" + f6(kHeight) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + f6(kLeft) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(dgp) +
       ": " + xml_escape(metric) + "</text>\n";
  // axes
  s += "<line x1=\"" + f6(kLeft) + "\" y1=\"" + f6(kTop + ph) + "\" x2=\"" + f6(kLeft + pw) + "\" y2=\"" +
       f6(kTop + ph) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + f6(kLeft) + "\" y1=\"" + f6(kTop) + "\" x2=\"" + f6(kLeft) + "\" y2=\"" + f6(kTop + ph) +
       "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
    const double y = kTop + ph * (1.0 - (e - lo) / (hi - lo));
    s += "<line x1=\"" + f6(kLeft - 4) + "\" y1=\"" + f6(y) + "\" x2=\"" + f6(kLeft + pw) + "\" y2=\"" + f6(y) +
         "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + f6(kLeft - 8) + "\" y=\"" + f6(y + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
  }
  for (std::size_t n : sizes) {
    s += "<text x=\"" + f6(px(n)) + "\" y=\"" + f6(kTop + ph + 18) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(n) + "</text>\n";
  }
  s += "<text x=\"" + f6(kLeft + pw / 2) + "\" y=\"" + f6(kHeight - 16) +
       "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">samples per stage</text>\n";
  s += "<text x=\"16\" y=\"" + f6(kTop + ph / 2) + "\" font-family=\"sans-serif\" font-size=\"12\" "
       "text-anchor=\"middle\" transform=\"rotate(-90 16 " + f6(kTop + ph / 2) + ")\">" + xml_escape(metric) +
       " (log scale)</text>\n";

  double legend_y = kTop + 10;
  for (const auto& est : estimators) {
    std::vector<const SummaryRow*> series;
    for (const auto* r : rows)
      if (r->estimator == est) series.push_back(r);
    std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->size < b->size; });
    const std::string col = color_for(est);
    std::string band, line;
    for (const auto* r : series) band += f6(px(r->size)) + "," + f6(py(r->p75)) + " ";
    for (auto it = series.rbegin(); it != series.rend(); ++it)
      band += f6(px((*it)->size)) + "," + f6(py((*it)->p25)) + " ";
    for (const auto* r : series) line += f6(px(r->size)) + "," + f6(py(r->median)) + " ";
    band.pop_back();
    line.pop_back();
    s += "<polygon points=\"" + band + "\" fill=\"" + col + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
    for (const auto* r : series) {
      s += "<circle cx=\"" + f6(px(r->size)) + "\" cy=\"" + f6(py(r->median)) + "\" r=\"3\" fill=\"" + col +
           "\"/>\n";
      // IQR whisker keeps single-size plots readable.
      s += "<line x1=\"" + f6(px(r->size)) + "\" y1=\"" + f6(py(r->p25)) + "\" x2=\"" + f6(px(r->size)) +
           "\" y2=\"" + f6(py(r->p75)) + "\" stroke=\"" + col + "\" stroke-opacity=\"0.6\"/>\n";
    }
    const double lx = kWidth - kRight + 16;
    s += "<line x1=\"" + f6(lx) + "\" y1=\"" + f6(legend_y) + "\" x2=\"" + f6(lx + 20) + "\" y2=\"" + f6(legend_y) +
         "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + f6(lx + 26) + "\" y=\"" + f6(legend_y + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
         xml_escape(est) + "</text>\n";
    legend_y += 18;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::vector<SvgPlot> render_plots(const std::vector<SummaryRow>& rows) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const SummaryRow*>> groups;
  for (const auto& r : rows) {
    if (r.n_runs == 0) continue;
    auto k = std::make_pair(r.dgp, r.metric);
    if (!groups.count(k)) keys.push_back(k);
    groups[k].push_back(&r);
  }
  std::vector<SvgPlot> out;
  for (const auto& k : keys) {
    std::string name = k.first + "_" + k.second + ".svg";
    std::replace(name.begin(), name.end(), ':', '_');
    out.push_back({name, render_one(k.first, k.second, groups[k])});
  }
  return out;
}

}  // namespace dfpv::bench
