#include "geobuild/kernel.hpp"

#include <algorithm>
#include <numbers>

namespace geobuild {

std::string_view to_string(ObjectKind kind)
{
    switch (kind) {
    case ObjectKind::Point: return "point";
    case ObjectKind::Line: return "line";
    case ObjectKind::Segment: return "segment";
    case ObjectKind::Ray: return "ray";
    case ObjectKind::Circle: return "circle";
    case ObjectKind::Angle: return "angle";
    case ObjectKind::Scalar: return "scalar";
    }
    return "point";
}

std::string_view to_string(KernelErrorKind kind)
{
    switch (kind) {
    case KernelErrorKind::InfeasibleConstruction: return "infeasible-construction";
    case KernelErrorKind::DegenerateInput: return "degenerate-input";
    case KernelErrorKind::DomainError: return "domain-error";
    case KernelErrorKind::DivisionByZero: return "division-by-zero";
    }
    return "domain-error";
}

namespace kernel {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

[[noreturn]] void degenerate(const std::string& what)
{
    throw KernelError(KernelErrorKind::DegenerateInput, what);
}

[[noreturn]] void infeasible(const std::string& what)
{
    throw KernelError(KernelErrorKind::InfeasibleConstruction, what);
}

Vec2 unit(Vec2 v, const char* what)
{
    const double n = norm(v);
    if (!(n > kKernelTolerance)) {
        degenerate(std::string(what) + ": coincident points");
    }
    return v / n;
}

void require_finite(Vec2 v, const char* what)
{
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
        throw KernelError(KernelErrorKind::DomainError, std::string(what) + ": non-finite coordinate");
    }
}

void require_triangle(Vec2 a, Vec2 b, Vec2 c, const char* what)
{
    const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
    if (!(longest > kKernelTolerance) ||
        std::abs(cross(b - a, c - a)) <= 1e-12 * longest * longest) {
        degenerate(std::string(what) + ": vertices are collinear");
    }
}

bool lex_less(Vec2 p, Vec2 q)
{
    if (std::abs(p.x - q.x) > kKernelTolerance) {
        return p.x < q.x;
    }
    return p.y < q.y;
}

std::vector<Vec2> line_line(const Line& l1, const Line& l2)
{
    const double denom = cross(l1.dir, l2.dir);
    if (std::abs(denom) <= 1e-12) {
        infeasible("lines are parallel");
    }
    const double t = cross(l2.base - l1.base, l2.dir) / denom;
    return {l1.base + l1.dir * t};
}

std::vector<Vec2> line_circle(const Line& l, const Circle& c)
{
    const Vec2 foot = l.base + l.dir * dot(c.center - l.base, l.dir);
    const double h = distance(c.center, foot);
    if (h > c.radius + kKernelTolerance) {
        infeasible("line misses the circle");
    }
    if (std::abs(h - c.radius) <= kKernelTolerance) {
        return {foot};
    }
    const double half = std::sqrt(c.radius * c.radius - h * h);
    return {foot - l.dir * half, foot + l.dir * half};
}

std::vector<Vec2> circle_circle(const Circle& c1, const Circle& c2)
{
    const double d = distance(c1.center, c2.center);
    if (d <= kKernelTolerance) {
        infeasible("circles are concentric");
    }
    const double outer = c1.radius + c2.radius;
    const double inner = std::abs(c1.radius - c2.radius);
    if (d > outer + kKernelTolerance || d < inner - kKernelTolerance) {
        infeasible("circles do not meet");
    }
    const Vec2 u = (c2.center - c1.center) / d;
    const double along = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    const Vec2 base = c1.center + u * along;
    if (std::abs(d - outer) <= kKernelTolerance || std::abs(d - inner) <= kKernelTolerance) {
        return {base};
    }
    const double h = std::sqrt(std::max(0.0, c1.radius * c1.radius - along * along));
    return {base - perp(u) * h, base + perp(u) * h};
}

} // namespace

Line make_line(Vec2 a, Vec2 b)
{
    require_finite(a, "line");
    require_finite(b, "line");
    return Line{a, unit(b - a, "line")};
}

Segment make_segment(Vec2 a, Vec2 b)
{
    require_finite(a, "segment");
    require_finite(b, "segment");
    unit(b - a, "segment");
    return Segment{a, b};
}

Ray make_ray(Vec2 origin, Vec2 through)
{
    require_finite(origin, "ray");
    require_finite(through, "ray");
    return Ray{origin, unit(through - origin, "ray")};
}

Circle make_circle(Vec2 center, Vec2 through)
{
    return make_circle(center, distance(center, through));
}

Circle make_circle(Vec2 center, double radius)
{
    require_finite(center, "circle");
    if (!std::isfinite(radius)) {
        throw KernelError(KernelErrorKind::DomainError, "circle: non-finite radius");
    }
    if (!(radius > 0.0)) {
        degenerate("circle: radius must be positive");
    }
    return Circle{center, radius};
}

Angle make_angle(Vec2 a, Vec2 vertex, Vec2 c)
{
    return Angle{vertex, unit(a - vertex, "angle"), unit(c - vertex, "angle")};
}

Vec2 sample_point(const GeoObject& on)
{
    switch (on.kind()) {
    case ObjectKind::Line: {
        const auto& l = on.as<Line>();
        return l.base + l.dir * 0.25;
    }
    case ObjectKind::Ray: {
        const auto& r = on.as<Ray>();
        return r.origin + r.dir * 0.25;
    }
    case ObjectKind::Segment: {
        const auto& s = on.as<Segment>();
        return s.a + (s.b - s.a) * 0.25;
    }
    case ObjectKind::Circle: {
        const auto& c = on.as<Circle>();
        const double t = std::numbers::pi / 4.0;
        return c.center + Vec2{std::cos(t), std::sin(t)} * c.radius;
    }
    default:
        throw KernelError(KernelErrorKind::DomainError,
                          "cannot sample a point on a " + std::string(to_string(on.kind())));
    }
}

Vec2 free_point(std::size_t k)
{
    constexpr double golden = 137.50776405003785 / kDegPerRad;
    const double r = 50.0 * std::sqrt(static_cast<double>(k) + 1.0);
    const double t = golden * static_cast<double>(k);
    return {r * std::cos(t), r * std::sin(t)};
}

Line supporting_line(const GeoObject& linear)
{
    switch (linear.kind()) {
    case ObjectKind::Line: return linear.as<Line>();
    case ObjectKind::Ray: return Line{linear.as<Ray>().origin, linear.as<Ray>().dir};
    case ObjectKind::Segment: {
        const auto& s = linear.as<Segment>();
        return make_line(s.a, s.b);
    }
    default:
        throw KernelError(KernelErrorKind::DomainError,
                          std::string(to_string(linear.kind())) + " has no direction");
    }
}

Vec2 direction(const GeoObject& linear) { return supporting_line(linear).dir; }

std::vector<Vec2> intersect(const GeoObject& first, const GeoObject& second)
{
    const auto curve = [](const GeoObject& o) {
        return o.is_linear() || o.kind() == ObjectKind::Circle;
    };
    if (!curve(first) || !curve(second)) {
        throw KernelError(KernelErrorKind::DomainError,
                          "cannot intersect " + std::string(to_string(first.kind())) + " with " +
                              std::string(to_string(second.kind())));
    }

    std::vector<Vec2> points;
    const bool c1 = first.kind() == ObjectKind::Circle;
    const bool c2 = second.kind() == ObjectKind::Circle;
    if (c1 && c2) {
        points = circle_circle(first.as<Circle>(), second.as<Circle>());
    } else if (c1) {
        points = line_circle(supporting_line(second), first.as<Circle>());
    } else if (c2) {
        points = line_circle(supporting_line(first), second.as<Circle>());
    } else {
        points = line_line(supporting_line(first), supporting_line(second));
    }

    const auto on_bounded = [](const GeoObject& o, Vec2 p) {
        if (o.kind() == ObjectKind::Segment || o.kind() == ObjectKind::Ray) {
            return distance_to_linear(p, o) <= kKernelTolerance;
        }
        return true;
    };
    std::erase_if(points, [&](Vec2 p) { return !on_bounded(first, p) || !on_bounded(second, p); });
    if (points.empty()) {
        infeasible("intersection lies outside the bounded object");
    }
    std::sort(points.begin(), points.end(), lex_less);
    return points;
}

Line parallel_line(Vec2 through, const GeoObject& reference)
{
    require_finite(through, "parallel_line");
    return Line{through, direction(reference)};
}

Line orthogonal_line(Vec2 through, const GeoObject& reference)
{
    require_finite(through, "orthogonal_line");
    return Line{through, perp(direction(reference))};
}

Vec2 midpoint(Vec2 a, Vec2 b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

Line line_bisector(Vec2 a, Vec2 b)
{
    const Vec2 d = unit(b - a, "line_bisector");
    return Line{midpoint(a, b), perp(d)};
}

Line angular_bisector(Vec2 a, Vec2 b, Vec2 c)
{
    const Vec2 u1 = unit(a - b, "angular_bisector");
    const Vec2 u2 = unit(c - b, "angular_bisector");
    if (std::abs(cross(u1, u2)) <= 1e-12) {
        degenerate("angular_bisector: rays are collinear");
    }
    return Line{b, unit(u1 + u2, "angular_bisector")};
}

Vec2 rotate(Vec2 p, double radians, Vec2 center)
{
    if (!std::isfinite(radians)) {
        throw KernelError(KernelErrorKind::DomainError, "rotate: non-finite angle");
    }
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    const Vec2 v = p - center;
    return center + Vec2{c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c)
{
    require_triangle(a, b, c, "circumcenter");
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = dot(ab, ab);
    const double ac2 = dot(ac, ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

Vec2 incenter(Vec2 a, Vec2 b, Vec2 c)
{
    require_triangle(a, b, c, "incenter");
    return line_line(angular_bisector(c, a, b), angular_bisector(a, b, c)).front();
}

Circle circumcircle(Vec2 a, Vec2 b, Vec2 c)
{
    const Vec2 center = circumcenter(a, b, c);
    return Circle{center, distance(center, a)};
}

Circle incircle(Vec2 a, Vec2 b, Vec2 c)
{
    const Vec2 center = incenter(a, b, c);
    return Circle{center, distance_to_line(center, make_line(a, b))};
}

AngleMeasure measure_angle(Vec2 a, Vec2 vertex, Vec2 c)
{
    const Vec2 u1 = a - vertex;
    const Vec2 u2 = c - vertex;
    if (!(norm(u1) > 0.0) || !(norm(u2) > 0.0)) {
        degenerate("angle: arm point coincides with the vertex");
    }
    const double signed_deg = std::atan2(cross(u1, u2), dot(u1, u2)) * kDegPerRad;
    double oriented = signed_deg < 0.0 ? signed_deg + 360.0 : signed_deg;
    if (oriented >= 360.0) {
        oriented = 0.0;
    }
    return AngleMeasure{oriented, std::abs(signed_deg)};
}

AngleMeasure measure_angle(const Angle& angle)
{
    return measure_angle(angle.vertex + angle.first, angle.vertex, angle.vertex + angle.second);
}

double scalar_arith(ArithOp op, double a, double b)
{
    switch (op) {
    case ArithOp::Sum: return a + b;
    case ArithOp::Minus: return a - b;
    case ArithOp::Product: return a * b;
    case ArithOp::Ratio:
        if (b == 0.0) {
            throw KernelError(KernelErrorKind::DivisionByZero, "ratio: division by zero");
        }
        return a / b;
    }
    return 0.0;
}

double distance_to_line(Vec2 p, const Line& line) { return std::abs(cross(p - line.base, line.dir)); }

double project(Vec2 p, const Line& line) { return dot(p - line.base, line.dir); }

double distance_to_linear(Vec2 p, const GeoObject& linear)
{
    switch (linear.kind()) {
    case ObjectKind::Line: return distance_to_line(p, linear.as<Line>());
    case ObjectKind::Ray: {
        const auto& r = linear.as<Ray>();
        const double t = std::max(0.0, dot(p - r.origin, r.dir));
        return distance(p, r.origin + r.dir * t);
    }
    case ObjectKind::Segment: {
        const auto& s = linear.as<Segment>();
        const Vec2 d = s.b - s.a;
        const double len2 = dot(d, d);
        const double t = len2 > 0.0 ? std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0) : 0.0;
        return distance(p, s.a + d * t);
    }
    default:
        throw KernelError(KernelErrorKind::DomainError,
                          std::string(to_string(linear.kind())) + " is not linear");
    }
}

} // namespace kernel
} // namespace geobuild
