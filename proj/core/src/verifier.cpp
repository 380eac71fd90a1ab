#include "geobuild/verifier.hpp"

#include "geobuild/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace geobuild {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::string_view kAngleSign = "\xE2\x88\xA0"; // U+2220

struct Unresolved {
    std::string name;
};

struct Malformed {
    std::string what;
};

struct Box {
    double min_x = kInf, min_y = kInf, max_x = -kInf, max_y = -kInf;

    void add(Vec2 p)
    {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    bool empty() const { return min_x > max_x; }
};

struct Check {
    double residual = 0.0;
    double tolerance = 0.0;
    std::string_view what;
};

ConditionResult combine(std::initializer_list<Check> checks)
{
    ConditionResult result{true, 0.0, {}};
    double worst = -1.0;
    for (const Check& c : checks) {
        const bool ok = c.residual <= c.tolerance;
        const double ratio = c.tolerance > 0.0 ? c.residual / c.tolerance : (ok ? 0.0 : kInf);
        if (!ok && result.satisfied) {
            result.satisfied = false;
            result.reason = "out-of-tolerance: " + std::string(c.what);
            result.residual = c.residual;
            worst = kInf;
        } else if (result.satisfied && ratio > worst) {
            worst = ratio;
            result.residual = c.residual;
        }
    }
    return result;
}

ConditionResult violated(std::string reason, double residual = kInf)
{
    return ConditionResult{false, residual, std::move(reason)};
}

/// Acute angle between two directions, in degrees, in [0, 90].
double line_angle(Vec2 d1, Vec2 d2)
{
    return std::atan2(std::abs(cross(d1, d2)), std::abs(dot(d1, d2))) * 180.0 / std::numbers::pi;
}

double magnitude(Vec2 a, Vec2 vertex, Vec2 c) { return kernel::measure_angle(a, vertex, c).magnitude_degrees; }

struct AngleTriple {
    Vec2 a;
    Vec2 vertex;
    Vec2 c;
};

class Resolver {
public:
    Resolver(const ConstructionState& state, double diameter, const Tolerances& tol)
        : state_(state), diameter_(diameter), tol_(tol)
    {
        for (const Binding& b : state.bindings()) {
            if (b.object.kind() == ObjectKind::Point) {
                point_names_.push_back(b.name);
            }
        }
    }

    Vec2 point(const ObjectRef& ref) const
    {
        if (ref.parts.size() != 1) {
            throw Malformed{"expected one point label, got '" + ref.display() + "'"};
        }
        return point_named(ref.parts.front());
    }

    Vec2 point_named(const std::string& name) const
    {
        const GeoObject* o = state_.object(name);
        if (!o) {
            throw Unresolved{name};
        }
        if (const auto* p = o->get_if<Point>()) {
            return p->at;
        }
        throw Malformed{"'" + name + "' is a " + std::string(to_string(o->kind())) + ", not a point"};
    }

    std::vector<Vec2> points(const ObjectRef& ref, std::size_t count) const
    {
        std::vector<std::string> labels;
        if (ref.explicit_list || ref.parts.size() > 1) {
            labels = ref.parts;
        } else {
            std::string_view text = ref.parts.front();
            if (text.starts_with(kAngleSign)) {
                text.remove_prefix(kAngleSign.size());
            }
            labels = split_labels(text, point_names_, count);
            if (labels.empty()) {
                throw Unresolved{ref.display()};
            }
        }
        if (count != 0 && labels.size() != count) {
            throw Malformed{"'" + ref.display() + "' does not name " + std::to_string(count) + " points"};
        }
        std::vector<Vec2> out;
        for (const std::string& l : labels) {
            out.push_back(point_named(l));
        }
        return out;
    }

    /// A line, segment or ray; two point labels resolve to a segment.
    GeoObject linear(const ObjectRef& ref) const
    {
        if (ref.parts.size() == 1 && !ref.explicit_list) {
            if (const GeoObject* o = state_.object(ref.parts.front()); o && o->is_linear()) {
                return *o;
            }
        }
        const auto pts = points(ref, 2);
        if (!(distance(pts[0], pts[1]) > 0.0)) {
            throw Malformed{"'" + ref.display() + "' has coincident endpoints"};
        }
        return Segment{pts[0], pts[1]};
    }

    Segment segment(const ObjectRef& ref) const
    {
        if (ref.parts.size() == 1 && !ref.explicit_list) {
            if (const GeoObject* o = state_.object(ref.parts.front())) {
                if (const auto* s = o->get_if<Segment>()) {
                    return *s;
                }
            }
        }
        const auto pts = points(ref, 2);
        return Segment{pts[0], pts[1]};
    }

    Circle circle(const ObjectRef& ref) const
    {
        if (ref.parts.size() != 1) {
            throw Malformed{"expected a circle, got '" + ref.display() + "'"};
        }
        const std::string& name = ref.parts.front();
        const GeoObject* o = state_.object(name);
        if (!o) {
            throw Unresolved{name};
        }
        if (const auto* c = o->get_if<Circle>()) {
            return *c;
        }
        if (const auto* p = o->get_if<Point>()) {
            if (auto c = circle_centered_at(name, p->at)) {
                return *c;
            }
            throw Unresolved{"circle " + name};
        }
        throw Malformed{"'" + name + "' is not a circle"};
    }

    std::optional<Circle> circle_centered_at(const std::string& label, Vec2 at) const
    {
        for (const Binding& b : state_.bindings()) {
            if (b.object.kind() == ObjectKind::Circle && b.command == "circle" && !b.references.empty() &&
                b.references.front() == label) {
                return b.object.as<Circle>();
            }
        }
        for (const Binding& b : state_.bindings()) {
            if (const auto* c = b.object.get_if<Circle>();
                c && distance(c->center, at) <= tol_.length_fraction * diameter_) {
                return *c;
            }
        }
        return std::nullopt;
    }

    Circle only_circle() const
    {
        std::optional<Circle> found;
        for (const Binding& b : state_.bindings()) {
            if (const auto* c = b.object.get_if<Circle>()) {
                if (found) {
                    throw Malformed{"circle not named and the construction has several"};
                }
                found = *c;
            }
        }
        if (!found) {
            throw Unresolved{"circle"};
        }
        return *found;
    }

    Circle circle_arg(std::span<const ObjectRef> refs, std::size_t index) const
    {
        return refs.size() > index ? circle(refs[index]) : only_circle();
    }

    AngleTriple angle(const ObjectRef& ref) const
    {
        if (ref.parts.size() == 1 && !ref.explicit_list) {
            if (const GeoObject* o = state_.object(ref.parts.front())) {
                if (const auto* a = o->get_if<Angle>()) {
                    return {a->vertex + a->first, a->vertex, a->vertex + a->second};
                }
            }
        }
        const auto pts = points(ref, 3);
        return {pts[0], pts[1], pts[2]};
    }

    /// Vertices of a polygon given either as one reference or as a list of
    /// point references starting at `first`.
    std::vector<Vec2> polygon(std::span<const ObjectRef> refs) const
    {
        std::vector<Vec2> out;
        if (refs.size() == 1) {
            out = points(refs.front(), 0);
        } else {
            for (const ObjectRef& r : refs) {
                out.push_back(point(r));
            }
        }
        if (out.size() < 3) {
            throw Malformed{"a polygon needs at least 3 vertices"};
        }
        return out;
    }

private:
    const ConstructionState& state_;
    double diameter_;
    const Tolerances& tol_;
    std::vector<std::string> point_names_;
};

double polygon_perimeter(std::span<const Vec2> v)
{
    double p = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        p += distance(v[i], v[(i + 1) % v.size()]);
    }
    return p;
}

std::vector<double> side_lengths(std::span<const Vec2> v)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(distance(v[i], v[(i + 1) % v.size()]));
    }
    return out;
}

std::vector<double> interior_magnitudes(std::span<const Vec2> v)
{
    std::vector<double> out;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(magnitude(v[(i + n - 1) % n], v[i], v[(i + 1) % n]));
    }
    return out;
}

double relative_spread(std::span<const double> values)
{
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

double spread(std::span<const double> values)
{
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
}

double collinear_residual(std::span<const Vec2> pts)
{
    std::size_t bi = 0;
    std::size_t bj = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (const double d = distance(pts[i], pts[j]); d > best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    }
    if (best == 0.0) {
        return 0.0;
    }
    const Line l = kernel::make_line(pts[bi], pts[bj]);
    double worst = 0.0;
    for (Vec2 p : pts) {
        worst = std::max(worst, kernel::distance_to_line(p, l));
    }
    return worst;
}

/// Smallest distance from a vertex to the line through the other two.
double min_altitude(Vec2 a, Vec2 b, Vec2 c)
{
    const auto alt = [](Vec2 p, Vec2 q, Vec2 r) {
        const double base = distance(q, r);
        return base > 0.0 ? std::abs(cross(q - p, r - p)) / base : 0.0;
    };
    return std::min({alt(a, b, c), alt(b, c, a), alt(c, a, b)});
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
    const auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Signed exterior turning angles, in degrees.
std::vector<double> turning_angles(std::span<const Vec2> v)
{
    std::vector<double> out;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e1 = v[i] - v[(i + n - 1) % n];
        const Vec2 e2 = v[(i + 1) % n] - v[i];
        out.push_back(std::atan2(cross(e1, e2), dot(e1, e2)) * 180.0 / std::numbers::pi);
    }
    return out;
}

class ConditionChecker {
public:
    ConditionChecker(const ConstructionState& state, const ScaleFit& scale, const Tolerances& tol)
        : state_(state), scale_(scale), tol_(tol), diameter_(diagram_diameter(state)),
          resolve_(state, diameter_, tol)
    {
    }

    ConditionResult check(const Condition& c) const
    {
        const Arity arity = condition_arity(c.type);
        if (c.objects.size() < arity.min || c.objects.size() > arity.max) {
            return violated("bad-arguments: " + std::string(to_string(c.type)) + " takes " +
                            std::to_string(arity.min) + ".." +
                            (arity.max == std::numeric_limits<std::size_t>::max() ? std::string("n")
                                                                                  : std::to_string(arity.max)) +
                            " objects");
        }
        try {
            return dispatch(c);
        } catch (const Unresolved& u) {
            return violated("undefined-reference: " + u.name);
        } catch (const Malformed& m) {
            return violated("bad-arguments: " + m.what);
        } catch (const KernelError& e) {
            return violated("degenerate: " + std::string(e.what()));
        }
    }

    /// Absolute length measured by a distance_equals or perimeter condition.
    std::optional<double> measure(const Condition& c) const
    {
        try {
            return absolute_length(c);
        } catch (const Unresolved&) {
        } catch (const Malformed&) {
        } catch (const KernelError&) {
        }
        return std::nullopt;
    }

private:
    double len(double distance_value) const { return distance_value / diameter_; }
    double tol_len() const { return tol_.length_fraction; }

    double target(const Condition& c) const
    {
        if (c.value) {
            return *c.value;
        }
        if (c.values.size() == 2 && c.values[1] != 0.0) {
            return c.values[0] / c.values[1];
        }
        throw Malformed{"missing numeric target"};
    }

    double positive_target(const Condition& c) const
    {
        const double t = target(c);
        if (!(t > 0.0)) {
            throw Malformed{"target must be positive"};
        }
        return t;
    }

    ConditionResult dispatch(const Condition& c) const
    {
        const auto& o = c.objects;
        switch (c.type) {
        case ConditionType::Parallel:
        case ConditionType::Perpendicular: {
            const double a = line_angle(kernel::direction(resolve_.linear(o[0])),
                                        kernel::direction(resolve_.linear(o[1])));
            const double r = c.type == ConditionType::Parallel ? a : 90.0 - a;
            return combine({{r, tol_.angle_degrees, "direction"}});
        }
        case ConditionType::Collinear: {
            std::vector<Vec2> pts;
            for (const auto& r : o) {
                pts.push_back(resolve_.point(r));
            }
            return combine({{len(collinear_residual(pts)), tol_len(), "collinearity"}});
        }
        case ConditionType::Concurrent: return concurrent(o);
        case ConditionType::Concyclic: {
            std::vector<Vec2> pts;
            for (const auto& r : o) {
                pts.push_back(resolve_.point(r));
            }
            return combine({{concyclic_residual(pts), tol_len(), "concyclicity"}});
        }
        case ConditionType::AngleValue: {
            const AngleTriple t = resolve_.angle(o[0]);
            const double theta = kernel::measure_angle(t.a, t.vertex, t.c).oriented_degrees;
            return combine({{angle_residual(theta, target(c)), tol_.angle_degrees, "angle"}});
        }
        case ConditionType::AngleEquality: {
            std::vector<double> m;
            for (const auto& r : o) {
                m.push_back(angle_magnitude(r));
            }
            return combine({{spread(m), tol_.angle_degrees, "angle equality"}});
        }
        case ConditionType::AngleSum: {
            double sum = 0.0;
            for (const auto& r : o) {
                sum += angle_magnitude(r);
            }
            return combine({{std::abs(sum - target(c)), tol_.angle_degrees, "angle sum"}});
        }
        case ConditionType::AngleRatio: {
            const double ratio = positive_target(c);
            const double r = std::abs(angle_magnitude(o[0]) - ratio * angle_magnitude(o[1]));
            return combine({{r, tol_.angle_degrees, "angle ratio"}});
        }
        case ConditionType::AngleBisector: {
            const Line l = kernel::supporting_line(resolve_.linear(o[0]));
            const AngleTriple t = resolve_.angle(o[1]);
            const Vec2 x = t.vertex + l.dir;
            const double r = std::abs(magnitude(t.a, t.vertex, x) - magnitude(x, t.vertex, t.c));
            return combine({{len(kernel::distance_to_line(t.vertex, l)), tol_len(), "vertex on bisector"},
                            {r, tol_.angle_degrees, "bisected angles"}});
        }
        case ConditionType::SegmentEquality: {
            std::vector<double> lengths;
            for (const auto& r : o) {
                lengths.push_back(segment_length(r));
            }
            return combine({{relative_spread(lengths), tol_.relative, "segment equality"}});
        }
        case ConditionType::SegmentRatio: {
            const double ratio = positive_target(c);
            const double l0 = segment_length(o[0]);
            const double l1 = segment_length(o[1]);
            if (!(l1 > 0.0)) {
                return violated("zero-length: " + o[1].display());
            }
            return combine({{std::abs(l0 / l1 - ratio) / ratio, tol_.relative, "segment ratio"}});
        }
        case ConditionType::DistanceEquals:
        case ConditionType::Perimeter: {
            const double t = positive_target(c);
            const double measured = absolute_length(c);
            if (!(measured > 0.0)) {
                return violated("zero-length: measured length is 0", 1.0);
            }
            const double s = scale_.applicable ? scale_.scale : 1.0;
            return combine({{std::abs(s * measured - t) / t, tol_.relative,
                             c.type == ConditionType::Perimeter ? "perimeter" : "distance"}});
        }
        case ConditionType::PointOnSegment: {
            const Vec2 p = resolve_.point(o[0]);
            return combine({{len(kernel::distance_to_linear(p, resolve_.linear(o[1]))), tol_len(), "incidence"}});
        }
        case ConditionType::PointOnLine: {
            const Vec2 p = resolve_.point(o[0]);
            const Line l = kernel::supporting_line(resolve_.linear(o[1]));
            return combine({{len(kernel::distance_to_line(p, l)), tol_len(), "incidence"}});
        }
        case ConditionType::PointOnCircle: {
            const Vec2 p = resolve_.point(o[0]);
            const Circle k = resolve_.circle_arg(o, 1);
            return combine({{len(std::abs(distance(p, k.center) - k.radius)), tol_len(), "incidence"}});
        }
        case ConditionType::MidpointOf: {
            const Vec2 m = resolve_.point(o[0]);
            Segment s;
            if (o.size() == 3) {
                s = Segment{resolve_.point(o[1]), resolve_.point(o[2])};
            } else {
                s = resolve_.segment(o[1]);
            }
            return combine({{len(distance(m, kernel::midpoint(s.a, s.b))), tol_len(), "midpoint"}});
        }
        case ConditionType::OrderOnLine: return order_on_line(o);
        case ConditionType::TangentLine:
        case ConditionType::LineIsTangent:
        case ConditionType::TangentAtPoint: {
            const GeoObject linear = resolve_.linear(o[0]);
            const Line l = kernel::supporting_line(linear);
            const Circle k = resolve_.circle_arg(o, 1);
            const double contact = len(std::abs(kernel::distance_to_line(k.center, l) - k.radius));
            if (c.type != ConditionType::TangentAtPoint) {
                return combine({{contact, tol_len(), "tangency"}});
            }
            const Vec2 p = resolve_.point(o[2]);
            return combine({{contact, tol_len(), "tangency"},
                            {len(kernel::distance_to_line(p, l)), tol_len(), "contact point on line"},
                            {len(std::abs(distance(p, k.center) - k.radius)), tol_len(), "contact point on circle"}});
        }
        case ConditionType::Diameter: {
            const Segment s = resolve_.segment(o[0]);
            const Circle k = resolve_.circle_arg(o, 1);
            return combine({{len(distance(kernel::midpoint(s.a, s.b), k.center)), tol_len(), "chord through center"},
                            {len(std::abs(distance(s.a, s.b) - 2.0 * k.radius)), tol_len(), "chord length 2r"}});
        }
        case ConditionType::PerpendicularBisector: {
            const Line l = kernel::supporting_line(resolve_.linear(o[0]));
            const Segment s = resolve_.segment(o[1]);
            const double a = line_angle(l.dir, s.b - s.a);
            return combine({{90.0 - a, tol_.angle_degrees, "perpendicularity"},
                            {len(kernel::distance_to_line(kernel::midpoint(s.a, s.b), l)), tol_len(),
                             "midpoint on line"}});
        }
        case ConditionType::TriangleValid: {
            const auto v = triangle(o);
            return triangle_valid(v);
        }
        case ConditionType::IsoscelesTriangle: {
            const auto v = triangle(o);
            if (auto bad = invalid_triangle(v)) {
                return *bad;
            }
            const auto s = side_lengths(v);
            double best = kInf;
            for (std::size_t i = 0; i < 3; ++i) {
                const double a = s[i];
                const double b = s[(i + 1) % 3];
                best = std::min(best, std::abs(a - b) / std::max(a, b));
            }
            return combine({{best, tol_.relative, "two equal sides"}});
        }
        case ConditionType::RightTriangle: {
            const bool apex_given = o.size() == 2 || o.size() == 4;
            const auto v = triangle(std::span(o).first(apex_given ? o.size() - 1 : o.size()));
            if (auto bad = invalid_triangle(v)) {
                return *bad;
            }
            const auto m = interior_magnitudes(v);
            double r = kInf;
            if (apex_given) {
                const Vec2 apex = resolve_.point(o.back());
                for (std::size_t i = 0; i < 3; ++i) {
                    if (distance(v[i], apex) <= tol_len() * diameter_) {
                        r = std::abs(m[i] - 90.0);
                    }
                }
                if (r == kInf) {
                    throw Malformed{"right-angle vertex is not a triangle vertex"};
                }
            } else {
                for (double a : m) {
                    r = std::min(r, std::abs(a - 90.0));
                }
            }
            return combine({{r, tol_.angle_degrees, "right angle"}});
        }
        case ConditionType::Square: {
            const auto v = polygon(o);
            if (v.size() != 4) {
                return violated("bad-arguments: a square has 4 vertices");
            }
            return square(v);
        }
        case ConditionType::RegularPolygon: return regular(polygon(o), 0);
        case ConditionType::PolygonType: return polygon_type(c);
        case ConditionType::PolygonProperty: return polygon_property(c);
        }
        return violated("unsupported-condition");
    }

    double angle_magnitude(const ObjectRef& ref) const
    {
        const AngleTriple t = resolve_.angle(ref);
        return magnitude(t.a, t.vertex, t.c);
    }

    double segment_length(const ObjectRef& ref) const
    {
        const Segment s = resolve_.segment(ref);
        return distance(s.a, s.b);
    }

    double absolute_length(const Condition& c) const
    {
        if (c.type == ConditionType::Perimeter) {
            return polygon_perimeter(polygon(c.objects));
        }
        if (c.objects.size() == 2) {
            return distance(resolve_.point(c.objects[0]), resolve_.point(c.objects[1]));
        }
        return segment_length(c.objects[0]);
    }

    std::vector<Vec2> polygon(std::span<const ObjectRef> refs) const { return resolve_.polygon(refs); }

    std::vector<Vec2> triangle(std::span<const ObjectRef> refs) const
    {
        auto v = polygon(refs);
        if (v.size() != 3) {
            throw Malformed{"a triangle has 3 vertices"};
        }
        return v;
    }

    std::optional<ConditionResult> invalid_triangle(std::span<const Vec2> v) const
    {
        ConditionResult r = triangle_valid(v);
        if (r.satisfied) {
            return std::nullopt;
        }
        return r;
    }

    ConditionResult triangle_valid(std::span<const Vec2> v) const
    {
        const double h = len(min_altitude(v[0], v[1], v[2]));
        if (h > tol_len()) {
            return ConditionResult{true, h, {}};
        }
        return violated("degenerate: triangle has (near) zero area", h);
    }

    double concyclic_residual(std::span<const Vec2> pts) const
    {
        for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
            for (std::size_t j = i + 1; j + 1 < pts.size(); ++j) {
                for (std::size_t k = j + 1; k < pts.size(); ++k) {
                    if (len(min_altitude(pts[i], pts[j], pts[k])) <= tol_len()) {
                        continue;
                    }
                    const Circle circle = kernel::circumcircle(pts[i], pts[j], pts[k]);
                    double worst = 0.0;
                    for (Vec2 p : pts) {
                        worst = std::max(worst, std::abs(distance(p, circle.center) - circle.radius));
                    }
                    return len(worst);
                }
            }
        }
        throw Malformed{"points are collinear"};
    }

    ConditionResult concurrent(std::span<const ObjectRef> refs) const
    {
        std::vector<Line> lines;
        for (const auto& r : refs) {
            lines.push_back(kernel::supporting_line(resolve_.linear(r)));
        }
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                if (std::abs(cross(lines[i].dir, lines[j].dir)) <= 1e-12) {
                    continue;
                }
                const Vec2 x = kernel::intersect(lines[i], lines[j]).front();
                double worst = 0.0;
                for (const Line& l : lines) {
                    worst = std::max(worst, kernel::distance_to_line(x, l));
                }
                return combine({{len(worst), tol_len(), "common point"}});
            }
        }
        return violated("out-of-tolerance: lines are parallel");
    }

    ConditionResult order_on_line(std::span<const ObjectRef> refs) const
    {
        std::vector<Vec2> pts;
        for (const auto& r : refs) {
            pts.push_back(resolve_.point(r));
        }
        if (!(distance(pts.front(), pts.back()) > 0.0)) {
            return violated("degenerate: first and last points coincide");
        }
        const Line l = kernel::make_line(pts.front(), pts.back());
        ConditionResult collinear = combine({{len(collinear_residual(pts)), tol_len(), "collinearity"}});
        if (!collinear.satisfied) {
            return collinear;
        }
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double step = kernel::project(pts[i + 1], l) - kernel::project(pts[i], l);
            if (!(step > 0.0)) {
                return violated("out-of-tolerance: order along the line", len(-step));
            }
        }
        return collinear;
    }

    ConditionResult square(std::span<const Vec2> v) const
    {
        const auto sides = side_lengths(v);
        if (*std::min_element(sides.begin(), sides.end()) <= 0.0) {
            return violated("degenerate: zero-length side");
        }
        double right = 0.0;
        for (double m : interior_magnitudes(v)) {
            right = std::max(right, std::abs(m - 90.0));
        }
        return combine({{relative_spread(sides), tol_.relative, "equal sides"},
                        {right, tol_.angle_degrees, "right angles"}});
    }

    ConditionResult convexity(std::span<const Vec2> v) const
    {
        const auto turns = turning_angles(v);
        double total = 0.0;
        double pos = 0.0;
        double neg = 0.0;
        for (double t : turns) {
            total += t;
            pos = std::max(pos, t);
            neg = std::max(neg, -t);
        }
        const double wrong_way = std::min(pos, neg);
        return combine({{wrong_way, tol_.angle_degrees, "convex turns"},
                        {std::abs(std::abs(total) - 360.0), tol_.angle_degrees, "simple boundary"}});
    }

    ConditionResult regular(std::span<const Vec2> v, std::size_t expected) const
    {
        if (expected != 0 && v.size() != expected) {
            return violated("bad-arguments: expected " + std::to_string(expected) + " vertices");
        }
        const auto sides = side_lengths(v);
        if (*std::min_element(sides.begin(), sides.end()) <= 0.0) {
            return violated("degenerate: zero-length side");
        }
        const double n = static_cast<double>(v.size());
        const double interior = (n - 2.0) * 180.0 / n;
        double angle_err = 0.0;
        for (double m : interior_magnitudes(v)) {
            angle_err = std::max(angle_err, std::abs(m - interior));
        }
        ConditionResult convex = convexity(v);
        if (!convex.satisfied) {
            return convex;
        }
        return combine({{relative_spread(sides), tol_.relative, "equal sides"},
                        {angle_err, tol_.angle_degrees, "equal angles"}});
    }

    ConditionResult quadrilateral(std::span<const Vec2> v) const
    {
        if (v.size() != 4) {
            return violated("bad-arguments: expected 4 vertices");
        }
        if (segments_cross(v[0], v[1], v[2], v[3]) || segments_cross(v[1], v[2], v[3], v[0])) {
            return violated("out-of-tolerance: self-intersecting boundary");
        }
        double flat = kInf;
        for (double m : interior_magnitudes(v)) {
            flat = std::min({flat, m, 180.0 - m});
        }
        if (flat <= tol_.angle_degrees) {
            return violated("degenerate: three consecutive vertices are collinear", flat);
        }
        return ConditionResult{true, 0.0, {}};
    }

    ConditionResult polygon_type(const Condition& c) const
    {
        if (!c.label) {
            return violated("bad-arguments: polygon_type needs a shape name");
        }
        const std::string& shape = *c.label;
        if (!is_supported_polygon_type(shape)) {
            return violated("unsupported-condition: polygon type '" + shape + "'");
        }
        const auto v = polygon(c.objects);
        if (shape == "triangle") {
            if (v.size() != 3) {
                return violated("bad-arguments: expected 3 vertices");
            }
            return triangle_valid(v);
        }
        if (shape.starts_with("regular")) {
            std::size_t n = 0;
            if (shape.size() > 8 && shape != "regular_n") {
                n = static_cast<std::size_t>(std::stoul(shape.substr(8)));
            }
            return regular(v, n);
        }
        ConditionResult quad = quadrilateral(v);
        if (!quad.satisfied || shape == "quadrilateral") {
            return quad;
        }
        const auto dir = [&](std::size_t i) { return v[(i + 1) % 4] - v[i]; };
        const double p1 = line_angle(dir(0), dir(2));
        const double p2 = line_angle(dir(1), dir(3));
        if (shape == "trapezoid") {
            return combine({{std::min(p1, p2), tol_.angle_degrees, "a pair of parallel sides"}});
        }
        if (shape == "square") {
            return square(v);
        }
        const auto sides = side_lengths(v);
        double right = 0.0;
        for (double m : interior_magnitudes(v)) {
            right = std::max(right, std::abs(m - 90.0));
        }
        if (shape == "rectangle") {
            return combine({{p1, tol_.angle_degrees, "opposite sides parallel"},
                            {p2, tol_.angle_degrees, "opposite sides parallel"},
                            {right, tol_.angle_degrees, "right angles"}});
        }
        if (shape == "rhombus") {
            return combine({{p1, tol_.angle_degrees, "opposite sides parallel"},
                            {p2, tol_.angle_degrees, "opposite sides parallel"},
                            {relative_spread(sides), tol_.relative, "equal sides"}});
        }
        // parallelogram
        return combine({{p1, tol_.angle_degrees, "opposite sides parallel"},
                        {p2, tol_.angle_degrees, "opposite sides parallel"}});
    }

    ConditionResult polygon_property(const Condition& c) const
    {
        if (!c.label) {
            return violated("bad-arguments: polygon_property needs a property name");
        }
        const std::string& prop = *c.label;
        const auto v = polygon(c.objects);
        if (prop == "convex") {
            return convexity(v);
        }
        if (prop == "cyclic") {
            if (v.size() == 3) {
                return triangle_valid(v);
            }
            return combine({{concyclic_residual(v), tol_len(), "concyclicity"}});
        }
        if (prop == "equilateral") {
            return combine({{relative_spread(side_lengths(v)), tol_.relative, "equal sides"}});
        }
        if (prop == "equiangular") {
            const auto m = interior_magnitudes(v);
            return combine({{spread(m), tol_.angle_degrees, "equal angles"}});
        }
        return violated("unsupported-condition: polygon property '" + prop + "'");
    }

    const ConstructionState& state_;
    const ScaleFit& scale_;
    const Tolerances& tol_;
    double diameter_;
    Resolver resolve_;
};

std::string pair_name(const std::pair<std::string, std::string>& p) { return p.first + p.second; }

bool same_pair(const std::vector<std::string>& refs, const std::pair<std::string, std::string>& want)
{
    return refs.size() == 2 && ((refs[0] == want.first && refs[1] == want.second) ||
                                (refs[0] == want.second && refs[1] == want.first));
}

class CoverageChecker {
public:
    CoverageChecker(const ConstructionState& state, const Tolerances& tol)
        : state_(state), eps_(tol.length_fraction * diagram_diameter(state))
    {
    }

    std::optional<Vec2> point(const std::string& name) const
    {
        if (const GeoObject* o = state_.object(name)) {
            if (const auto* p = o->get_if<Point>()) {
                return p->at;
            }
        }
        return std::nullopt;
    }

    bool has_segment(const std::pair<std::string, std::string>& want) const
    {
        for (const Binding& b : state_.bindings()) {
            if (b.object.kind() == ObjectKind::Segment && b.command == "segment" && same_pair(b.references, want)) {
                return true;
            }
        }
        const auto a = point(want.first);
        const auto c = point(want.second);
        if (!a || !c) {
            return false;
        }
        for (const Binding& b : state_.bindings()) {
            if (const auto* s = b.object.get_if<Segment>()) {
                const bool fwd = distance(s->a, *a) <= eps_ && distance(s->b, *c) <= eps_;
                const bool rev = distance(s->a, *c) <= eps_ && distance(s->b, *a) <= eps_;
                if (fwd || rev) {
                    return true;
                }
            }
        }
        return false;
    }

    /// Lines are also satisfied by segments and rays through both points.
    bool has_line(const std::pair<std::string, std::string>& want) const
    {
        for (const Binding& b : state_.bindings()) {
            if (b.object.is_linear() && (b.command == "line" || b.command == "segment" || b.command == "ray") &&
                same_pair(b.references, want)) {
                return true;
            }
        }
        const auto a = point(want.first);
        const auto c = point(want.second);
        if (!a || !c || !(distance(*a, *c) > eps_)) {
            return false;
        }
        for (const Binding& b : state_.bindings()) {
            if (!b.object.is_linear()) {
                continue;
            }
            const Line l = kernel::supporting_line(b.object);
            if (kernel::distance_to_line(*a, l) <= eps_ && kernel::distance_to_line(*c, l) <= eps_) {
                return true;
            }
        }
        return false;
    }

    bool has_circle(const std::string& name) const
    {
        const GeoObject* o = state_.object(name);
        if (!o) {
            return false;
        }
        if (o->kind() == ObjectKind::Circle) {
            return true;
        }
        const auto center = point(name);
        if (!center) {
            return false;
        }
        for (const Binding& b : state_.bindings()) {
            if (b.object.kind() != ObjectKind::Circle) {
                continue;
            }
            if ((b.command == "circle" && !b.references.empty() && b.references.front() == name) ||
                distance(b.object.as<Circle>().center, *center) <= eps_) {
                return true;
            }
        }
        return false;
    }

private:
    const ConstructionState& state_;
    double eps_;
};

/// Conditions whose circle may be left implicit.
bool takes_optional_circle(const Condition& c)
{
    switch (c.type) {
    case ConditionType::PointOnCircle:
    case ConditionType::TangentLine:
    case ConditionType::LineIsTangent:
    case ConditionType::Diameter: return c.objects.size() == 1 + (c.type == ConditionType::PointOnCircle ? 1 : 0);
    default: return false;
    }
}

} // namespace

double angle_residual(double measured_degrees, double target_degrees)
{
    return std::min(std::abs(measured_degrees - target_degrees),
                    std::abs((360.0 - measured_degrees) - target_degrees));
}

double diagram_diameter(const ConstructionState& state)
{
    Box box;
    for (const Binding& b : state.bindings()) {
        if (const auto* p = b.object.get_if<Point>()) {
            box.add(p->at);
        } else if (const auto* c = b.object.get_if<Circle>()) {
            box.add(c->center - Vec2{c->radius, c->radius});
            box.add(c->center + Vec2{c->radius, c->radius});
        } else if (const auto* s = b.object.get_if<Segment>()) {
            box.add(s->a);
            box.add(s->b);
        }
    }
    if (box.empty()) {
        return 1.0;
    }
    const double d = std::hypot(box.max_x - box.min_x, box.max_y - box.min_y);
    return d > 0.0 ? d : 1.0;
}

std::vector<MissingObject> check_object_coverage(const ConstructionState& state, const RequiredObjects& required)
{
    const CoverageChecker cov(state, Tolerances{});
    std::vector<MissingObject> missing;
    for (const std::string& p : required.points) {
        if (!cov.point(p)) {
            missing.push_back({ObjectType::Point, p});
        }
    }
    for (const auto& s : required.segments) {
        if (!cov.has_segment(s)) {
            missing.push_back({ObjectType::Segment, pair_name(s)});
        }
    }
    for (const auto& l : required.lines) {
        if (!cov.has_line(l)) {
            missing.push_back({ObjectType::Line, pair_name(l)});
        }
    }
    for (const std::string& c : required.circles) {
        if (!cov.has_circle(c)) {
            missing.push_back({ObjectType::Circle, c});
        }
    }
    for (const auto& poly : required.polygons) {
        bool present = poly.size() >= 3;
        for (std::size_t i = 0; present && i < poly.size(); ++i) {
            present = cov.has_segment({poly[i], poly[(i + 1) % poly.size()]});
        }
        if (!present) {
            std::string name;
            for (const auto& v : poly) {
                name += v;
            }
            missing.push_back({ObjectType::Polygon, name});
        }
    }
    return missing;
}

ScaleFit fit_global_scale(const ConstructionState& state, std::span<const Condition> conditions)
{
    const ScaleFit identity{};
    const ConditionChecker checker(state, identity, Tolerances{});
    std::vector<double> ratios;
    for (const Condition& c : conditions) {
        if (c.type != ConditionType::DistanceEquals && c.type != ConditionType::Perimeter) {
            continue;
        }
        if (!c.value || !(*c.value > 0.0)) {
            continue;
        }
        if (const auto measured = checker.measure(c); measured && *measured > 0.0) {
            ratios.push_back(*c.value / *measured);
        }
    }
    if (ratios.empty()) {
        return identity;
    }
    std::sort(ratios.begin(), ratios.end());
    return ScaleFit{ratios[ratios.size() / 2], true};
}

ConditionResult check_condition(const ConstructionState& state, const Condition& condition, const ScaleFit& scale,
                                const Tolerances& tol)
{
    return ConditionChecker(state, scale, tol).check(condition);
}

VerificationReport verify(const ExecutionTrace& trace, const RequiredObjects& required,
                          std::span<const Condition> conditions, const Tolerances& tol)
{
    VerificationReport report;
    report.executable = trace.ok();
    const ConstructionState& state = trace.final_state;
    report.missing_objects = check_object_coverage(state, required);
    report.scale = fit_global_scale(state, conditions);
    bool all = true;
    for (const Condition& c : conditions) {
        if (takes_optional_circle(c) && required.circles.size() == 1) {
            Condition with_circle = c;
            with_circle.objects.push_back(ObjectRef{{required.circles.front()}, false});
            report.condition_results.push_back(check_condition(state, with_circle, report.scale, tol));
        } else {
            report.condition_results.push_back(check_condition(state, c, report.scale, tol));
        }
        all = all && report.condition_results.back().satisfied;
    }
    report.success = report.executable && report.missing_objects.empty() && all;
    return report;
}

VerificationReport verify_task(const ExecutionTrace& trace, const Task& task, const Tolerances& tol)
{
    return verify(trace, task.required, task.conditions, tol);
}

} // namespace geobuild
