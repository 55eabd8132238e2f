#include "bivadj/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bivadj::svg {

namespace {

constexpr int kWidth = 640, kHeight = 440;
constexpr int kLeft = 64, kRight = 20, kTop = 28, kBottom = 48;

struct Axes {
  double xlo, xhi, ylo, yhi;

  double px(double x) const { return kLeft + (x - xlo) / (xhi - xlo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - ylo) / (yhi - ylo) * (kHeight - kTop - kBottom);
  }
};

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (raw <= mult * mag) return mult * mag;
  return 10.0 * mag;
}

void open_figure(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Axes& ax, const std::string& xlabel,
               const std::string& ylabel) {
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  const double xs = nice_step(ax.xhi - ax.xlo);
  for (double x = std::ceil(ax.xlo / xs) * xs; x <= ax.xhi + 1e-9; x += xs) {
    out << "<line x1=\"" << ax.px(x) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << ax.px(x)
        << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ax.px(x) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << x
        << "</text>\n";
  }
  const double ys = nice_step(ax.yhi - ax.ylo);
  for (double y = std::ceil(ax.ylo / ys) * ys; y <= ax.yhi + 1e-9; y += ys) {
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << ax.py(y) << "\" x2=\"" << kLeft << "\" y2=\""
        << ax.py(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << ax.py(y) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << y
        << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel << "</text>\n";
}

void polyline(std::ostringstream& out, const Axes& ax,
              const std::vector<std::pair<double, double>>& pts, const std::string& color,
              bool dashed = false) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dashed) out << " stroke-dasharray=\"5,4\"";
  out << " points=\"";
  for (const auto& [x, y] : pts) out << ax.px(x) << "," << ax.py(y) << " ";
  out << "\"/>\n";
}

}  // namespace

std::string confidence_curve(const ConfidenceCurve& curve, const std::vector<double>& levels) {
  std::ostringstream out;
  out.precision(10);
  Axes ax{curve.grid.front(), curve.grid.back(), 0.0, 1.0};
  open_figure(out, "confidence curve for " + curve.param_name);
  draw_axes(out, ax, curve.param_name, "confidence");

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    if (curve.ok[i]) pts.emplace_back(curve.grid[i], curve.cc[i]);
  polyline(out, ax, pts, "black");

  for (double level : levels) {
    polyline(out, ax, {{ax.xlo, level}, {ax.xhi, level}}, "#888888", true);
    const auto iv = curve.interval(level);
    for (double end : {iv.lo, iv.hi}) {
      out << "<line x1=\"" << ax.px(end) << "\" y1=\"" << ax.py(level) - 6 << "\" x2=\""
          << ax.px(end) << "\" y2=\"" << ax.py(level) + 6 << "\" stroke=\"#c00000\" stroke-width=\"1.5\"/>\n";
    }
  }
  out << "<line x1=\"" << ax.px(curve.point_estimate) << "\" y1=\"" << ax.py(0.0) << "\" x2=\""
      << ax.px(curve.point_estimate) << "\" y2=\"" << ax.py(0.03)
      << "\" stroke=\"#c00000\" stroke-width=\"2\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string marginal_overlay(const PairSample& sample, double rate1, double rate2, int max_count) {
  std::ostringstream out;
  out.precision(10);
  const double n = static_cast<double>(sample.size());
  std::vector<double> fx(max_count + 1, 0.0), fy(max_count + 1, 0.0);
  for (const auto& [x, y] : sample.pairs) {
    ++fx[std::min(x, max_count)];
    ++fy[std::min(y, max_count)];
  }
  for (auto& v : fx) v /= n;
  for (auto& v : fy) v /= n;

  const MarginalSpec p1 = MarginalSpec::poisson(rate1);
  const MarginalSpec p2 = MarginalSpec::poisson(rate2);
  std::vector<double> g1(max_count + 1), g2(max_count + 1);
  for (int k = 0; k <= max_count; ++k) {
    g1[k] = k < max_count ? p1.pmf_or_pdf(k) : 1.0 - p1.cdf(max_count - 1);
    g2[k] = k < max_count ? p2.pmf_or_pdf(k) : 1.0 - p2.cdf(max_count - 1);
  }
  double top = 0.0;
  for (int k = 0; k <= max_count; ++k)
    top = std::max({top, fx[k], fy[k], g1[k], g2[k]});

  Axes ax{0.0, static_cast<double>(max_count), 0.0, 1.1 * top};
  open_figure(out, "observed frequencies vs fitted Poisson");
  draw_axes(out, ax, "count", "frequency");
  auto series = [&](const std::vector<double>& v) {
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= max_count; ++k) pts.emplace_back(k, v[k]);
    return pts;
  };
  polyline(out, ax, series(fx), "black");
  polyline(out, ax, series(fy), "#c00000");
  polyline(out, ax, series(g1), "black", true);
  polyline(out, ax, series(g2), "#c00000", true);
  out << "</svg>\n";
  return out.str();
}

std::string scatter(const PairSample& sample) {
  std::ostringstream out;
  out.precision(10);
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& [x, y] : sample.pairs) {
    xlo = std::min(xlo, static_cast<double>(x));
    xhi = std::max(xhi, static_cast<double>(x));
    ylo = std::min(ylo, static_cast<double>(y));
    yhi = std::max(yhi, static_cast<double>(y));
  }
  const double mx = 0.06 * (xhi - xlo + 1), my = 0.06 * (yhi - ylo + 1);
  Axes ax{xlo - mx, xhi + mx, ylo - my, yhi + my};
  open_figure(out, sample.provenance);
  draw_axes(out, ax, "x", "y");
  for (const auto& [x, y] : sample.pairs)
    out << "<circle cx=\"" << ax.px(x) << "\" cy=\"" << ax.py(y)
        << "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace bivadj::svg
