#include "geobuild/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace geobuild {

namespace {

std::string num(double v)
{
    std::string s = fmt::format("{:.6f}", v);
    if (s == "-0.000000") {
        s.erase(0, 1);
    }
    return s;
}

class Canvas {
public:
    Canvas(const ViewBox& box, const RenderOptions& opts) : box_(box)
    {
        scale_ = std::min(opts.width / box.width(), opts.height / box.height());
        off_x_ = (opts.width - box.width() * scale_) / 2.0;
        off_y_ = (opts.height - box.height() * scale_) / 2.0;
    }

    Vec2 map(Vec2 p) const { return {off_x_ + (p.x - box_.min_x) * scale_, off_y_ + (box_.max_y - p.y) * scale_}; }
    double scale() const { return scale_; }
    const ViewBox& box() const { return box_; }

private:
    ViewBox box_;
    double scale_ = 1.0;
    double off_x_ = 0.0;
    double off_y_ = 0.0;
};

/// Clips base + t*dir, t in [t0, t1], to the box (Liang-Barsky).
std::optional<std::pair<Vec2, Vec2>> clip(Vec2 base, Vec2 dir, double t0, double t1, const ViewBox& b)
{
    const double p[4] = {-dir.x, dir.x, -dir.y, dir.y};
    const double q[4] = {base.x - b.min_x, b.max_x - base.x, base.y - b.min_y, b.max_y - base.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) {
                return std::nullopt;
            }
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, r);
        } else {
            t1 = std::min(t1, r);
        }
    }
    if (t0 > t1) {
        return std::nullopt;
    }
    return std::make_pair(base + dir * t0, base + dir * t1);
}

void line_element(std::string& out, const Canvas& c, Vec2 a, Vec2 b, double width, std::string_view extra = {})
{
    const Vec2 p = c.map(a);
    const Vec2 q = c.map(b);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"{}\"{}/>",
                       num(p.x), num(p.y), num(q.x), num(q.y), num(width), extra);
}

void render_object(std::string& out, const Canvas& c, const Binding& b, const RenderOptions& opts)
{
    const double inf = std::numeric_limits<double>::infinity();
    const GeoObject& o = b.object;
    out += fmt::format("<g id=\"{}\" class=\"{}\">", b.name, to_string(o.kind()));
    if (const auto* pt = o.get_if<Point>()) {
        const Vec2 p = c.map(pt->at);
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>", num(p.x), num(p.y),
                           num(opts.point_radius));
        if (opts.label_points) {
            out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"14\">{}</text>", num(p.x + 5.0), num(p.y - 5.0),
                               b.name);
        }
    } else if (const auto* l = o.get_if<Line>()) {
        if (auto s = clip(l->base, l->dir, -inf, inf, c.box())) {
            line_element(out, c, s->first, s->second, opts.line_width, " stroke-dasharray=\"6 3\"");
        }
    } else if (const auto* r = o.get_if<Ray>()) {
        if (auto s = clip(r->origin, r->dir, 0.0, inf, c.box())) {
            line_element(out, c, s->first, s->second, opts.line_width);
        }
    } else if (const auto* s = o.get_if<Segment>()) {
        line_element(out, c, s->a, s->b, opts.segment_width);
    } else if (const auto* k = o.get_if<Circle>()) {
        const Vec2 p = c.map(k->center);
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>",
                           num(p.x), num(p.y), num(k->radius * c.scale()), num(opts.circle_width));
    } else if (const auto* a = o.get_if<Angle>()) {
        const double radius = 0.05 * std::min(opts.width, opts.height);
        const double theta = kernel::measure_angle(*a).oriented_degrees;
        const Vec2 v = c.map(a->vertex);
        const Vec2 p = v + Vec2{a->first.x, -a->first.y} * radius;
        const Vec2 q = v + Vec2{a->second.x, -a->second.y} * radius;
        // Counterclockwise in model space is clockwise on screen: sweep flag 0.
        out += fmt::format("<path d=\"M {} {} A {} {} 0 {} 0 {} {}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>",
                           num(p.x), num(p.y), num(radius), num(radius), theta > 180.0 ? 1 : 0, num(q.x), num(q.y),
                           num(opts.angle_width));
        const double mid = std::atan2(a->first.y, a->first.x) + theta * std::numbers::pi / 360.0;
        const Vec2 t = v + Vec2{std::cos(mid), -std::sin(mid)} * (radius * 1.6);
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">{}\xC2\xB0</text>", num(t.x), num(t.y),
                           fmt::format("{:.1f}", theta));
    }
    out += "</g>\n";
}

} // namespace

void RenderOptions::validate() const
{
    if (width <= 0 || height <= 0) {
        throw RenderError("canvas dimensions must be positive");
    }
    if (!(margin_fraction >= 0.0 && margin_fraction < 0.5)) {
        throw RenderError("margin fraction must lie in [0, 0.5)");
    }
}

ViewBox compute_viewport(const ConstructionState& state, double margin_fraction)
{
    const double inf = std::numeric_limits<double>::infinity();
    ViewBox box{inf, inf, -inf, -inf};
    const auto add = [&](Vec2 p) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    };
    for (const Binding& b : state.bindings()) {
        if (const auto* p = b.object.get_if<Point>()) {
            add(p->at);
        } else if (const auto* s = b.object.get_if<Segment>()) {
            add(s->a);
            add(s->b);
        } else if (const auto* c = b.object.get_if<Circle>()) {
            add(c->center - Vec2{c->radius, c->radius});
            add(c->center + Vec2{c->radius, c->radius});
        }
    }
    if (box.min_x > box.max_x) {
        throw RenderError("empty-state: nothing to frame");
    }
    const double mx = box.width() * margin_fraction;
    const double my = box.height() * margin_fraction;
    box.min_x -= mx;
    box.max_x += mx;
    box.min_y -= my;
    box.max_y += my;

    const auto grow = [](double& lo, double& hi, double size) {
        const double mid = (lo + hi) / 2.0;
        lo = mid - size / 2.0;
        hi = mid + size / 2.0;
    };
    const double w = box.width();
    const double h = box.height();
    if (w <= 0.0 && h <= 0.0) {
        grow(box.min_x, box.max_x, 1.0);
        grow(box.min_y, box.max_y, 1.0);
    } else if (w <= 0.0) {
        grow(box.min_x, box.max_x, h);
    } else if (h <= 0.0) {
        grow(box.min_y, box.max_y, w);
    }
    return box;
}

std::string render_svg(const ConstructionState& state, const RenderOptions& opts)
{
    opts.validate();
    const Canvas canvas(compute_viewport(state, opts.margin_fraction), opts);
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        opts.width, opts.height);
    for (const Binding& b : state.bindings()) {
        if (b.object.kind() == ObjectKind::Scalar) {
            continue;
        }
        render_object(out, canvas, b, opts);
    }
    out += "</svg>\n";
    return out;
}

} // namespace geobuild
