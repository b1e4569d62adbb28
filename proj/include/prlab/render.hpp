#pragma once

// SVG drawing of a piecewise affine function: shaded cells, jump segments
// stroked by jump size, normals as ticks.

#include "prlab/pr_core.hpp"

#include <string>

namespace prlab {

struct SvgStyle {
  int width = 640;  // pixels; height follows the aspect ratio
  int margin = 24;
  double threshold = 1e-12;  // jumps below are not stroked
  bool normals = true;
  bool shade_cells = true;
};

/// Stroke width and color grow with log₁₀(|[u]| / threshold).
std::string render_svg(const PiecewiseAffine& u, const SvgStyle& style = {});

}  // namespace prlab
