#include "gcformer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gcf {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::vector<SvgSeries>& series) {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t longest = 0;
  bool first = true;
  for (const auto& s : series) {
    longest = std::max(longest, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const double x_den = longest > 1 ? static_cast<double>(longest - 1) : 1.0;
  auto px = [&](std::size_t i) { return kMargin + plot_w * static_cast<double>(i) / x_den; };
  auto py = [&](double v) { return kMargin + plot_h * (hi - v) / (hi - lo); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape(title) + "</text>\n";
  out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kMargin + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label(hi) + "</text>\n";
  out += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kHeight - kMargin + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label(lo) + "</text>\n";
  out += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kHeight - kMargin + 16) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         std::to_string(longest > 0 ? longest - 1 : 0) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].values.size(); ++i) {
      const double v = std::isfinite(series[k].values[i]) ? series[k].values[i] : lo;
      out += (i ? " " : "") + num(px(i)) + "," + num(py(v));
    }
    out += "\"/>\n";
    const double ly = kMargin + 14.0 + 16.0 * static_cast<double>(k);
    out += "<text x=\"" + num(kMargin + 8) + "\" y=\"" + num(ly) + "\" fill=\"" + color +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(series[k].label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gcf
