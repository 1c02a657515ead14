#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gripscribe/angles.hpp"

namespace gripscribe::svg {

std::string escape(std::string_view text);

/// Minimal SVG 1.1 writer with a data-to-pixel mapping (y up in data space).
class Plot {
public:
  Plot(double width_px, double height_px, const Vec2& data_min, const Vec2& data_max,
       bool log_x = false, double margin_px = 48.0);

  Vec2 to_px(const Vec2& p) const;

  void polyline(const std::vector<Vec2>& pts, std::string_view style);
  void line(const Vec2& a, const Vec2& b, std::string_view style);
  /// Radius in data units, scaled with the x axis.
  void circle(const Vec2& center, double radius, std::string_view style);
  void circle_px(const Vec2& center, double radius_px, std::string_view style);
  void rect(const Vec2& min_corner, const Vec2& size, std::string_view style);
  void text(const Vec2& at, std::string_view label, std::string_view style = "");
  void title(std::string_view label);
  /// Axis box with tick labels.
  void axes(std::string_view x_label, std::string_view y_label);
  /// Small legend in the top-right corner; entries are (style, label).
  void legend(const std::vector<std::pair<std::string, std::string>>& entries);

  std::string str() const;

private:
  double map_x(double x) const;

  double width_;
  double height_;
  Vec2 min_;
  Vec2 max_;
  bool log_x_;
  double margin_;
  std::string body_;
};

}  // namespace gripscribe::svg
