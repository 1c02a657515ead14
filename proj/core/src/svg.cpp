#include "gripscribe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

namespace gripscribe::svg {
namespace {

std::vector<double> nice_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (!(span > 0.0)) return ticks;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

Plot::Plot(double width_px, double height_px, const Vec2& data_min, const Vec2& data_max,
           bool log_x, double margin_px)
    : width_(width_px), height_(height_px), min_(data_min), max_(data_max), log_x_(log_x),
      margin_(margin_px) {}

double Plot::map_x(double x) const {
  if (log_x_) {
    return (std::log10(x) - std::log10(min_.x())) /
           (std::log10(max_.x()) - std::log10(min_.x()));
  }
  return (x - min_.x()) / (max_.x() - min_.x());
}

Vec2 Plot::to_px(const Vec2& p) const {
  const double u = map_x(p.x());
  const double v = (p.y() - min_.y()) / (max_.y() - min_.y());
  return {margin_ + u * (width_ - 2.0 * margin_),
          height_ - margin_ - v * (height_ - 2.0 * margin_)};
}

void Plot::polyline(const std::vector<Vec2>& pts, std::string_view style) {
  if (pts.empty()) return;
  std::string coords;
  coords.reserve(pts.size() * 16);
  for (const Vec2& p : pts) {
    const Vec2 q = to_px(p);
    fmt::format_to(std::back_inserter(coords), "{:.2f},{:.2f} ", q.x(), q.y());
  }
  coords.pop_back();
  fmt::format_to(std::back_inserter(body_), "<polyline points=\"{}\" style=\"fill:none;{}\"/>\n",
                 coords, style);
}

void Plot::line(const Vec2& a, const Vec2& b, std::string_view style) {
  const Vec2 p = to_px(a);
  const Vec2 q = to_px(b);
  fmt::format_to(std::back_inserter(body_),
                 "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" style=\"{}\"/>\n",
                 p.x(), p.y(), q.x(), q.y(), style);
}

void Plot::circle(const Vec2& center, double radius, std::string_view style) {
  const double scale = (width_ - 2.0 * margin_) / (max_.x() - min_.x());
  const Vec2 c = to_px(center);
  fmt::format_to(std::back_inserter(body_),
                 "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" style=\"{}\"/>\n", c.x(), c.y(),
                 radius * scale, style);
}

void Plot::circle_px(const Vec2& center, double radius_px, std::string_view style) {
  const Vec2 c = to_px(center);
  fmt::format_to(std::back_inserter(body_),
                 "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" style=\"{}\"/>\n", c.x(), c.y(),
                 radius_px, style);
}

void Plot::rect(const Vec2& min_corner, const Vec2& size, std::string_view style) {
  const Vec2 a = to_px(min_corner);
  const Vec2 b = to_px(min_corner + size);
  fmt::format_to(std::back_inserter(body_),
                 "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" style=\"{}\"/>\n",
                 std::min(a.x(), b.x()), std::min(a.y(), b.y()), std::abs(b.x() - a.x()),
                 std::abs(b.y() - a.y()), style);
}

void Plot::text(const Vec2& at, std::string_view label, std::string_view style) {
  const Vec2 p = to_px(at);
  fmt::format_to(std::back_inserter(body_),
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" style=\"font-family:sans-serif;font-size:11px;{}\">{}</text>\n",
                 p.x(), p.y(), style, escape(label));
}

void Plot::title(std::string_view label) {
  fmt::format_to(std::back_inserter(body_),
                 "<text x=\"{:.2f}\" y=\"20\" style=\"font-family:sans-serif;font-size:14px;text-anchor:middle\">{}</text>\n",
                 width_ / 2.0, escape(label));
}

void Plot::axes(std::string_view x_label, std::string_view y_label) {
  const double x0 = margin_;
  const double x1 = width_ - margin_;
  const double y0 = height_ - margin_;
  const double y1 = margin_;
  fmt::format_to(std::back_inserter(body_),
                 "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" style=\"fill:none;stroke:#444;stroke-width:1\"/>\n",
                 x0, y1, x1 - x0, y0 - y1);

  std::vector<double> xt;
  if (log_x_) {
    for (double d = std::pow(10.0, std::floor(std::log10(min_.x()))); d <= max_.x() * 1.0001; d *= 10.0) {
      for (double m : {1.0, 2.0, 5.0}) {
        const double v = d * m;
        if (v >= min_.x() * 0.9999 && v <= max_.x() * 1.0001) xt.push_back(v);
      }
    }
  } else {
    xt = nice_ticks(min_.x(), max_.x());
  }
  for (double v : xt) {
    const double px = to_px({v, min_.y()}).x();
    fmt::format_to(std::back_inserter(body_),
                   "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" style=\"stroke:#ddd\"/>\n"
                   "<text x=\"{0:.2f}\" y=\"{3:.2f}\" style=\"font-family:sans-serif;font-size:10px;text-anchor:middle\">{4:g}</text>\n",
                   px, y0, y1, y0 + 14.0, v);
  }
  for (double v : nice_ticks(min_.y(), max_.y())) {
    const double py = to_px({min_.x(), v}).y();
    fmt::format_to(std::back_inserter(body_),
                   "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" style=\"stroke:#ddd\"/>\n"
                   "<text x=\"{3:.2f}\" y=\"{4:.2f}\" style=\"font-family:sans-serif;font-size:10px;text-anchor:end\">{5:g}</text>\n",
                   x0, py, x1, x0 - 4.0, py + 3.0, v);
  }
  fmt::format_to(std::back_inserter(body_),
                 "<text x=\"{:.2f}\" y=\"{:.2f}\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">{}</text>\n",
                 (x0 + x1) / 2.0, height_ - 8.0, escape(x_label));
  fmt::format_to(std::back_inserter(body_),
                 "<text transform=\"translate(12,{:.2f}) rotate(-90)\" style=\"font-family:sans-serif;font-size:12px;text-anchor:middle\">{}</text>\n",
                 (y0 + y1) / 2.0, escape(y_label));
}

void Plot::legend(const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = margin_ + 14.0;
  const double x = width_ - margin_ - 150.0;
  for (const auto& [style, label] : entries) {
    fmt::format_to(std::back_inserter(body_),
                   "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" style=\"{3}\"/>\n"
                   "<text x=\"{4:.2f}\" y=\"{5:.2f}\" style=\"font-family:sans-serif;font-size:11px\">{6}</text>\n",
                   x, y, x + 24.0, style, x + 30.0, y + 4.0, escape(label));
    y += 16.0;
  }
}

std::string Plot::str() const {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:g}\" height=\"{1:g}\" viewBox=\"0 0 {0:g} {1:g}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0:g}\" height=\"{1:g}\" style=\"fill:#fff\"/>\n"
      "{2}</svg>\n",
      width_, height_, body_);
}

}  // namespace gripscribe::svg
