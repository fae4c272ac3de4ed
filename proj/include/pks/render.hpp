#pragma once

#include <string>

#include "pks/drawing.hpp"

namespace pks {

enum class RenderMode { Lines, Potential };

struct RenderStyle {
  RenderMode mode = RenderMode::Lines;
  double pixels_per_unit = 12;
  double width_per_unit = 1.5;  // stroke width per unit of |intensity|
  double min_width = 0.4, max_width = 8;
};

/// SVG image of the drawing. Lines mode: positive intensities red, negative
/// blue, zero gray, stroke width proportional to |intensity|. Potential mode
/// fills every face by its potential (requires a Kirchhoff-valid drawing) and
/// draws the lines thin on top.
std::string render_svg(const Drawing& d, const RenderStyle& style = {});

}  // namespace pks
