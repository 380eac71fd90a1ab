#pragma once

#include "geobuild/interpreter.hpp"

#include <stdexcept>
#include <string>

namespace geobuild {

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RenderOptions {
    int width = 800;
    int height = 800;
    double margin_fraction = 0.1;
    bool label_points = true;

    double point_radius = 3.0;
    double line_width = 1.0;
    double segment_width = 1.5;
    double circle_width = 1.0;
    double angle_width = 1.0;

    /// Throws RenderError unless the canvas is positive and the margin lies in [0, 0.5).
    void validate() const;
};

struct ViewBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

/// Box around all points, segment endpoints and full circle extents, grown by
/// `margin_fraction` of its size on each side. A zero-sized dimension becomes
/// the other dimension's size, or 1 when both are zero. Throws RenderError
/// when the state has nothing with a position.
ViewBox compute_viewport(const ConstructionState& state, double margin_fraction = 0.1);

/// SVG document with one <g> element per object, in construction order.
/// Scalars produce no element.
std::string render_svg(const ConstructionState& state, const RenderOptions& opts = {});

} // namespace geobuild
