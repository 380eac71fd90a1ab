#pragma once

#include "geobuild/expression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geobuild {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

/// Absolute tolerance for kernel postconditions, in canvas units.
inline constexpr double kKernelTolerance = 1e-9;

struct Point {
    Vec2 at;
};

struct Line {
    Vec2 base;
    Vec2 dir; // unit
};

struct Segment {
    Vec2 a;
    Vec2 b;
};

struct Ray {
    Vec2 origin;
    Vec2 dir; // unit
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

/// Angle at `vertex` from the ray along `first` to the ray along `second`.
struct Angle {
    Vec2 vertex;
    Vec2 first;  // unit
    Vec2 second; // unit
};

struct Scalar {
    double value = 0.0;
    Unit unit = Unit::Dimensionless;
};

enum class ObjectKind { Point, Line, Segment, Ray, Circle, Angle, Scalar };

std::string_view to_string(ObjectKind kind);

class GeoObject {
public:
    using Payload = std::variant<Point, Line, Segment, Ray, Circle, Angle, Scalar>;

    GeoObject(Point p) : payload_(p) {}
    GeoObject(Line l) : payload_(l) {}
    GeoObject(Segment s) : payload_(s) {}
    GeoObject(Ray r) : payload_(r) {}
    GeoObject(Circle c) : payload_(c) {}
    GeoObject(Angle a) : payload_(a) {}
    GeoObject(Scalar s) : payload_(s) {}

    ObjectKind kind() const { return static_cast<ObjectKind>(payload_.index()); }
    bool is_linear() const
    {
        const auto k = kind();
        return k == ObjectKind::Line || k == ObjectKind::Segment || k == ObjectKind::Ray;
    }

    template <class T>
    const T* get_if() const { return std::get_if<T>(&payload_); }

    template <class T>
    const T& as() const { return std::get<T>(payload_); }

    const Payload& payload() const { return payload_; }

private:
    Payload payload_;
};

enum class KernelErrorKind { InfeasibleConstruction, DegenerateInput, DomainError, DivisionByZero };

std::string_view to_string(KernelErrorKind kind);

class KernelError : public std::runtime_error {
public:
    KernelError(KernelErrorKind kind, const std::string& detail)
        : std::runtime_error(detail), kind_(kind) {}

    KernelErrorKind kind() const noexcept { return kind_; }

private:
    KernelErrorKind kind_;
};

namespace kernel {

// Primitives. All throw KernelError(DegenerateInput) on coincident points or
// non-positive radii.
Line make_line(Vec2 a, Vec2 b);
Segment make_segment(Vec2 a, Vec2 b);
Ray make_ray(Vec2 origin, Vec2 through);
Circle make_circle(Vec2 center, Vec2 through);
Circle make_circle(Vec2 center, double radius);
Angle make_angle(Vec2 a, Vec2 vertex, Vec2 c);

/// Deterministic sample on a line, segment, ray or circle: 0.25 length units
/// along a line or ray direction, a quarter of the way along a segment, and
/// the 45 degree position on a circle.
Vec2 sample_point(const GeoObject& on);

/// Position for the k-th coordinate-free point of a program. Points follow a
/// golden-angle spiral so successive free points are distinct and not
/// collinear.
Vec2 free_point(std::size_t k);

/// Supporting line of a line, segment or ray.
Line supporting_line(const GeoObject& linear);
Vec2 direction(const GeoObject& linear);

/// Intersection of two objects drawn from {line, segment, ray, circle}. Returns
/// one or two points ordered by ascending x, then y. Points on segments and
/// rays must lie on the bounded object within kKernelTolerance.
///
/// Throws KernelError(InfeasibleConstruction) when the objects do not meet.
std::vector<Vec2> intersect(const GeoObject& first, const GeoObject& second);

Line parallel_line(Vec2 through, const GeoObject& reference);
Line orthogonal_line(Vec2 through, const GeoObject& reference);

Vec2 midpoint(Vec2 a, Vec2 b);
Line line_bisector(Vec2 a, Vec2 b);
/// Internal bisector of the angle ABC at vertex b.
Line angular_bisector(Vec2 a, Vec2 b, Vec2 c);

/// Counterclockwise rotation of p about center.
Vec2 rotate(Vec2 p, double radians, Vec2 center);

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);
Vec2 incenter(Vec2 a, Vec2 b, Vec2 c);
Circle circumcircle(Vec2 a, Vec2 b, Vec2 c);
Circle incircle(Vec2 a, Vec2 b, Vec2 c);

struct AngleMeasure {
    double oriented_degrees = 0.0;  // [0, 360), counterclockwise from first to second ray
    double magnitude_degrees = 0.0; // [0, 180]
};

AngleMeasure measure_angle(Vec2 a, Vec2 vertex, Vec2 c);
AngleMeasure measure_angle(const Angle& angle);

enum class ArithOp { Sum, Minus, Product, Ratio };

double scalar_arith(ArithOp op, double a, double b);

double distance_to_line(Vec2 p, const Line& line);
/// Distance to the bounded object: segment and ray clamp their parameter.
double distance_to_linear(Vec2 p, const GeoObject& linear);
double project(Vec2 p, const Line& line);

} // namespace kernel
} // namespace geobuild
