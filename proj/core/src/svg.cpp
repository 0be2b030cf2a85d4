#include "utat/svg.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include "utat/errors.hpp"

namespace utat::svg {

namespace {

constexpr double kWidth = 480.0, kHeight = 320.0;
constexpr double kLeft = 56.0, kRight = 16.0, kTop = 28.0, kBottom = 40.0;

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string render_marginal(const disagg::ValueModel& model, int k, int j, bool normalized) {
  if (k < 0 || k >= static_cast<int>(model.w.size()) || j < 0 ||
      j >= static_cast<int>(model.w[k].size())) {
    throw Error("validation-error", "plot indices outside the model's measure/criterion table");
  }
  const auto& breakpoints = model.scales[k][j].breakpoints;
  const auto& weights = model.w[k][j];

  // Cumulative value at each breakpoint: 0 at the first, then partial sums.
  std::vector<double> values(breakpoints.size(), 0.0);
  for (std::size_t l = 0; l < weights.size(); ++l) values[l + 1] = values[l] + weights[l];
  const double top = values.back();
  if (normalized && top > 0.0) {
    for (double& v : values) v /= top;
  }
  const double ymax = normalized ? 1.0 : (top > 0.0 ? top : 1.0);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto x_at = [&](std::size_t idx) {
    return kLeft + plot_w * (breakpoints.size() == 1
                                 ? 0.0
                                 : static_cast<double>(idx) /
                                       static_cast<double>(breakpoints.size() - 1));
  };
  const auto y_at = [&](double v) { return kTop + plot_h * (1.0 - v / ymax); };

  std::string title = "u[" + model.measures[k] + "][" + model.criteria[j].id + "]";
  if (normalized) title += " (normalized)";

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\" "
         "viewBox=\"0 0 480 320\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"320\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + coord(kWidth / 2) +
         "\" y=\"18\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" + title +
         "</text>\n";

  // Axes.
  out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kTop) + "\" x2=\"" + coord(kLeft) +
         "\" y2=\"" + coord(kHeight - kBottom) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kHeight - kBottom) + "\" x2=\"" +
         coord(kWidth - kRight) + "\" y2=\"" + coord(kHeight - kBottom) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  // Y ticks at quarters of the range.
  for (int q = 0; q <= 4; ++q) {
    const double v = ymax * q / 4.0;
    const double y = y_at(v);
    out += "<line x1=\"" + coord(kLeft - 4) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft) +
           "\" y2=\"" + coord(y) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) +
           "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">" + tick_label(v) +
           "</text>\n";
  }

  // X ticks: one per breakpoint, labeled with the breakpoint value.
  for (std::size_t idx = 0; idx < breakpoints.size(); ++idx) {
    const double x = x_at(idx);
    out += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(kHeight - kBottom) + "\" x2=\"" +
           coord(x) + "\" y2=\"" + coord(kHeight - kBottom + 4) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + coord(x) + "\" y=\"" + coord(kHeight - kBottom + 16) +
           "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">" +
           tick_label(breakpoints[idx]) + "</text>\n";
  }

  // Staircase: horizontal run to the next breakpoint, then the vertical step.
  std::string path = "M " + coord(x_at(0)) + " " + coord(y_at(values[0]));
  for (std::size_t idx = 1; idx < breakpoints.size(); ++idx) {
    path += " H " + coord(x_at(idx));
    path += " V " + coord(y_at(values[idx]));
  }
  out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>\n";

  // Breakpoint markers on the curve.
  for (std::size_t idx = 0; idx < breakpoints.size(); ++idx) {
    out += "<circle cx=\"" + coord(x_at(idx)) + "\" cy=\"" + coord(y_at(values[idx])) +
           "\" r=\"2.5\" fill=\"#1f4e9c\"/>\n";
  }

  out += "</svg>\n";
  return out;
}

}  // namespace utat::svg
