#include "gdpx/svg_render.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>

namespace gdpx::svg {
namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 52.0;
constexpr double kPlotWidth = kWidth - kMarginLeft - kMarginRight;
constexpr double kPlotHeight = kHeight - kMarginTop - kMarginBottom;

/// Fixed two-decimal coordinate text keeps the output byte-stable.
std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, end);
}

std::string esc(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Round tick step: 1, 2 or 5 times a power of ten, at least 1.
std::int64_t tick_step(std::int64_t range, std::int64_t max_ticks) {
  std::int64_t step = 1;
  while (true) {
    for (std::int64_t mult : {1, 2, 5}) {
      if (range / (step * mult) <= max_ticks) return step * mult;
    }
    step *= 10;
  }
}

struct Frame {
  std::int64_t quarters{1};  // plotted bucket count, at least 1
  double y_max{1.0};

  double x(double quarter_offset) const {
    return kMarginLeft + kPlotWidth * quarter_offset / static_cast<double>(quarters);
  }
  double y(double count) const { return kMarginTop + kPlotHeight * (1.0 - count / y_max); }
};

void append_step_path(std::string& out, const Frame& fr, const std::vector<std::int64_t>& cum,
                      const char* color, const char* dash) {
  if (cum.empty()) return;
  std::string d = "M" + num(fr.x(0)) + " " + num(fr.y(static_cast<double>(cum[0])));
  for (std::size_t i = 0; i < cum.size(); ++i) {
    d += " H" + num(fr.x(static_cast<double>(i + 1)));
    if (i + 1 < cum.size() && cum[i + 1] != cum[i]) {
      d += " V" + num(fr.y(static_cast<double>(cum[i + 1])));
    }
  }
  out += "  <path d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\" stroke-dasharray=\"" + dash + "\"/>\n";
}

/// Shades the band where `upper` exceeds `lower`, one rectangle per quarter.
void append_band(std::string& out, const Frame& fr, const std::vector<std::int64_t>& upper,
                 const std::vector<std::int64_t>& lower, const char* color, const char* opacity) {
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (upper[i] <= lower[i]) continue;
    const double top = fr.y(static_cast<double>(upper[i]));
    const double bottom = fr.y(static_cast<double>(lower[i]));
    out += "  <rect x=\"" + num(fr.x(static_cast<double>(i))) + "\" y=\"" + num(top) +
           "\" width=\"" + num(kPlotWidth / static_cast<double>(fr.quarters)) + "\" height=\"" +
           num(bottom - top) + "\" fill=\"" + color + "\" fill-opacity=\"" + opacity + "\"/>\n";
  }
}

void append_text(std::string& out, double x, double y, const std::string& text,
                 const char* anchor, const char* extra = "") {
  out += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
         "\" font-family=\"sans-serif\" font-size=\"12\"" + extra + ">" + esc(text) + "</text>\n";
}

}  // namespace

std::string render_diagram_svg(const QueueingDiagram& diagram) {
  const std::size_t n = diagram.size();
  Frame fr;
  fr.quarters = std::max<std::int64_t>(static_cast<std::int64_t>(n), 1);
  std::int64_t peak = 1;
  if (n > 0) {
    peak = std::max({diagram.actual.back(), diagram.planned_model.back(),
                     diagram.served_model.back(), std::int64_t{1}});
  }
  fr.y_max = static_cast<double>(peak);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  out += "  <rect width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"#ffffff\"/>\n";

  const std::string title =
      diagram.airport.empty() ? std::string{"queueing diagram"}
                              : diagram.airport + " cumulative arrivals";
  append_text(out, kMarginLeft, 22.0, title, "start", " font-weight=\"bold\"");

  // legend
  append_text(out, kMarginLeft + 16.0, 38.0, "actual", "start");
  append_text(out, kMarginLeft + 146.0, 38.0, "demand w/o holds", "start");
  append_text(out, kMarginLeft + 326.0, 38.0, "served w/o holds", "start");
  out += "  <line x1=\"" + num(kMarginLeft - 12.0) + "\" y1=\"34\" x2=\"" +
         num(kMarginLeft + 12.0) + "\" y2=\"34\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  out += "  <line x1=\"" + num(kMarginLeft + 118.0) + "\" y1=\"34\" x2=\"" +
         num(kMarginLeft + 142.0) +
         "\" y2=\"34\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
  out += "  <line x1=\"" + num(kMarginLeft + 298.0) + "\" y1=\"34\" x2=\"" +
         num(kMarginLeft + 322.0) +
         "\" y2=\"34\" stroke=\"#2ca02c\" stroke-width=\"2\" stroke-dasharray=\"2 4\"/>\n";

  // plot frame
  out += "  <rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
         num(kPlotWidth) + "\" height=\"" + num(kPlotHeight) +
         "\" fill=\"none\" stroke=\"#404040\"/>\n";

  // y ticks: cumulative flight counts
  const std::int64_t y_step = tick_step(peak, 6);
  for (std::int64_t v = 0; v <= peak; v += y_step) {
    const double yy = fr.y(static_cast<double>(v));
    out += "  <line x1=\"" + num(kMarginLeft - 4.0) + "\" y1=\"" + num(yy) + "\" x2=\"" +
           num(kMarginLeft) + "\" y2=\"" + num(yy) + "\" stroke=\"#404040\"/>\n";
    append_text(out, kMarginLeft - 8.0, yy + 4.0, std::to_string(v), "end");
  }

  // x ticks: absolute quarter-hour index
  const std::int64_t x_step = tick_step(fr.quarters, 8);
  for (std::int64_t i = 0; i <= fr.quarters; i += x_step) {
    const double xx = fr.x(static_cast<double>(i));
    out += "  <line x1=\"" + num(xx) + "\" y1=\"" + num(kMarginTop + kPlotHeight) + "\" x2=\"" +
           num(xx) + "\" y2=\"" + num(kMarginTop + kPlotHeight + 4.0) + "\" stroke=\"#404040\"/>\n";
    append_text(out, xx, kMarginTop + kPlotHeight + 18.0, std::to_string(diagram.first.value + i),
                "middle");
  }
  append_text(out, kMarginLeft + kPlotWidth / 2.0, kHeight - 14.0, "quarter-hour index",
              "middle");
  out += "  <text x=\"18\" y=\"" + num(kMarginTop + kPlotHeight / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 " +
         num(kMarginTop + kPlotHeight / 2.0) + ")\">cumulative flights</text>\n";

  if (n == 0) {
    append_text(out, kMarginLeft + kPlotWidth / 2.0, kMarginTop + kPlotHeight / 2.0,
                "no arrivals", "middle");
    out += "</svg>\n";
    return out;
  }

  // shaded areas first, curves on top
  append_band(out, fr, diagram.served_model, diagram.actual, "#2ca02c", "0.25");
  append_band(out, fr, diagram.planned_model, diagram.served_model, "#d62728", "0.18");
  append_step_path(out, fr, diagram.actual, "#1f77b4", "none");
  append_step_path(out, fr, diagram.planned_model, "#d62728", "6 4");
  append_step_path(out, fr, diagram.served_model, "#2ca02c", "2 4");

  out += "</svg>\n";
  return out;
}

}  // namespace gdpx::svg
