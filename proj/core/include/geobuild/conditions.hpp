#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geobuild {

enum class ConditionType {
    Parallel,
    Perpendicular,
    Collinear,
    Concurrent,
    Concyclic,
    AngleValue,
    AngleEquality,
    AngleSum,
    AngleRatio,
    AngleBisector,
    SegmentEquality,
    SegmentRatio,
    DistanceEquals,
    Perimeter,
    PointOnSegment,
    PointOnLine,
    PointOnCircle,
    MidpointOf,
    OrderOnLine,
    TangentLine,
    TangentAtPoint,
    LineIsTangent,
    Diameter,
    PerpendicularBisector,
    TriangleValid,
    IsoscelesTriangle,
    RightTriangle,
    PolygonType,
    PolygonProperty,
    Square,
    RegularPolygon,
};

std::span<const ConditionType> all_condition_types();
std::string_view to_string(ConditionType type);
std::optional<ConditionType> parse_condition_type(std::string_view text);

/// A reference to a geometric object inside a condition. Either one token
/// (`"PA"`, `"circle_O"`, `"APB"`) resolved against the state, or an explicit
/// list of point labels (`["P", "A"]`).
struct ObjectRef {
    std::vector<std::string> parts;
    bool explicit_list = false;

    std::string display() const;
    bool operator==(const ObjectRef&) const = default;
};

/// One verification condition. Argument encoding per type:
///
///   parallel, perpendicular           objects: [linear, linear]
///   collinear, concyclic, order_on_line  objects: [point, point, point, ...]
///   concurrent                        objects: [linear, linear, linear, ...]
///   angle_value                       objects: [angle], value: degrees
///   angle_equality                    objects: [angle, angle]
///   angle_sum                         objects: [angle, angle, ...], value: degrees
///   angle_ratio                       objects: [angle, angle], value or values [p, q]
///   angle_bisector                    objects: [linear, angle]
///   segment_equality                  objects: [segment, segment]
///   segment_ratio                     objects: [segment, segment], value or values [p, q]
///   distance_equals                   objects: [segment] or [point, point], value
///   perimeter                         objects: [polygon], value
///   point_on_segment / point_on_line  objects: [point, linear]
///   point_on_circle                   objects: [point, circle?]
///   midpoint_of                       objects: [point, segment]
///   tangent_line, line_is_tangent     objects: [linear, circle?]
///   tangent_at_point                  objects: [linear, circle, point]
///   diameter                          objects: [segment, circle?]
///   perpendicular_bisector            objects: [linear, segment]
///   triangle_valid, isosceles_triangle objects: [triangle]
///   right_triangle                    objects: [triangle] or [triangle, vertex]
///   square, regular_polygon           objects: [polygon]
///   polygon_type                      objects: [polygon], value: shape name
///   polygon_property                  objects: [polygon], value: property name
///
/// An angle is an angle object name or three point labels with the vertex in
/// the middle; a circle is a circle name or the label of its center point.
/// An omitted circle (`circle?`) means the only circle in the construction.
struct Condition {
    ConditionType type = ConditionType::Parallel;
    std::vector<ObjectRef> objects;
    std::optional<double> value;
    std::vector<double> values;
    std::optional<std::string> label; // textual value for polygon_type / polygon_property

    bool operator==(const Condition&) const = default;
};

struct Arity {
    std::size_t min = 0;
    std::size_t max = 0;
};

Arity condition_arity(ConditionType type);
bool needs_numeric_target(ConditionType type);
bool needs_label(ConditionType type);

std::span<const std::string_view> supported_polygon_types();
std::span<const std::string_view> supported_polygon_properties();
bool is_supported_polygon_type(std::string_view name);

enum class ObjectType { Point, Segment, Line, Circle, Polygon };

std::string_view to_string(ObjectType type);
std::span<const ObjectType> all_object_types();

struct RequiredObjects {
    std::vector<std::string> points;
    std::vector<std::pair<std::string, std::string>> segments;
    std::vector<std::pair<std::string, std::string>> lines;
    std::vector<std::string> circles;
    std::vector<std::vector<std::string>> polygons;

    bool operator==(const RequiredObjects&) const = default;
};

struct MissingObject {
    ObjectType type = ObjectType::Point;
    std::string name;

    bool operator==(const MissingObject&) const = default;
};

/// Splits `text` into a sequence of labels drawn from `known`, preferring the
/// shortest leading label. `count` of 0 accepts any length >= 1. Returns an
/// empty vector when no split exists.
std::vector<std::string> split_labels(std::string_view text, std::span<const std::string> known,
                                      std::size_t count = 0);

} // namespace geobuild
