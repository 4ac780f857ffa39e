#include "gaugelab/cli/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gaugelab/core/error.hpp"

namespace gaugelab::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;  // legend column
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-300 ? 0.0 : v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-12, 0.5 * std::abs(hi));
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

/// Round tick spacing: 1, 2 or 5 times a power of ten, about 6 ticks.
double tick_step(const Range& r) {
  const double raw = (r.hi - r.lo) / 6.0;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * p >= raw) return m * p;
  }
  return 10.0 * p;
}

/// Non-finite values are serialised as null; read them back as NaN.
std::vector<double> values(const nlohmann::json& array) {
  std::vector<double> out;
  for (const auto& v : array) out.push_back(v.is_number() ? v.get<double>() : std::nan(""));
  return out;
}

}  // namespace

std::string render_svg(const nlohmann::json& series, const std::string& config_hash) {
  Range xr, yr;
  for (const auto& c : series.at("curves")) {
    for (double v : values(c.at("x"))) xr.add(v);
    for (double v : values(c.at("y"))) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft) << "\" y=\"28\" font-size=\"16\">" << escape(series.value("title", "")) << "</text>\n";

  // Axes and grid.
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int axis = 0; axis < 2; ++axis) {
    const Range& r = axis == 0 ? xr : yr;
    const double step = tick_step(r);
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi; t += step) {
      if (axis == 0) {
        os << "<line x1=\"" << num(sx(t)) << "\" x2=\"" << num(sx(t)) << "\" y1=\"" << num(kTop) << "\" y2=\""
           << num(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
           << tick_label(t) << "</text>\n";
      } else {
        os << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(sy(t)) << "\" y2=\""
           << num(sy(t)) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">"
           << tick_label(t) << "</text>\n";
      }
    }
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 32) << "\" text-anchor=\"middle\">"
     << escape(series.value("xlabel", "")) << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(series.value("ylabel", "")) << "</text>\n";

  // Curves and legend.
  int index = 0;
  for (const auto& c : series.at("curves")) {
    const char* colour = kPalette[index % 8];
    const auto xs = values(c.at("x"));
    const auto ys = values(c.at("y"));
    const std::size_t n = std::min(xs.size(), ys.size());
    if (c.value("style", "line") == "points") {
      for (std::size_t k = 0; k < n; ++k) {
        const double x = xs[k], y = ys[k];
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < n; ++k) {
        const double x = xs[k], y = ys[k];
        if (std::isfinite(x) && std::isfinite(y)) os << num(sx(x)) << "," << num(sy(y)) << " ";
      }
      os << "\"/>\n";
    }
    const double ly = kTop + 14 + 18 * index;
    os << "<rect x=\"" << num(kWidth - kRight + 12) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
       << colour << "\"/>\n";
    os << "<text x=\"" << num(kWidth - kRight + 30) << "\" y=\"" << num(ly) << "\">" << escape(c.value("label", ""))
       << "</text>\n";
    ++index;
  }

  const std::string note = series.value("annotation", "");
  if (!note.empty()) {
    os << "<text x=\"" << num(kLeft + 8) << "\" y=\"" << num(kTop + 16) << "\" fill=\"#444\">" << escape(note)
       << "</text>\n";
  }
  os << "<text x=\"" << num(kWidth - 8) << "\" y=\"" << num(kHeight - 8)
     << "\" text-anchor=\"end\" font-size=\"10\" fill=\"#888\">config " << escape(config_hash) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> write_plots(const nlohmann::json& report, const std::string& dir) {
  if (!report.contains("series") || report.at("series").empty()) {
    throw Error("report has no plottable series");
  }
  const std::string hash = report.value("config_hash", "");
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (const auto& s : report.at("series")) {
    const std::string name = s.at("name").get<std::string>() + ".svg";
    std::ofstream out(std::filesystem::path(dir) / name);
    out << render_svg(s, hash);
    if (!out) throw Error("cannot write plot '" + name + "'");
    names.push_back(name);
  }
  return names;
}

}  // namespace gaugelab::cli
