#include "geobuild/conditions.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <functional>
#include <limits>

namespace geobuild {

namespace {

struct TypeInfo {
    ConditionType type;
    std::string_view name;
    Arity arity;
};

constexpr std::size_t kMany = std::numeric_limits<std::size_t>::max();

constexpr std::array<TypeInfo, 31> kTypes{{
    {ConditionType::Parallel, "parallel", {2, 2}},
    {ConditionType::Perpendicular, "perpendicular", {2, 2}},
    {ConditionType::Collinear, "collinear", {3, kMany}},
    {ConditionType::Concurrent, "concurrent", {3, kMany}},
    {ConditionType::Concyclic, "concyclic", {4, kMany}},
    {ConditionType::AngleValue, "angle_value", {1, 1}},
    {ConditionType::AngleEquality, "angle_equality", {2, kMany}},
    {ConditionType::AngleSum, "angle_sum", {2, kMany}},
    {ConditionType::AngleRatio, "angle_ratio", {2, 2}},
    {ConditionType::AngleBisector, "angle_bisector", {2, 2}},
    {ConditionType::SegmentEquality, "segment_equality", {2, kMany}},
    {ConditionType::SegmentRatio, "segment_ratio", {2, 2}},
    {ConditionType::DistanceEquals, "distance_equals", {1, 2}},
    {ConditionType::Perimeter, "perimeter", {1, kMany}},
    {ConditionType::PointOnSegment, "point_on_segment", {2, 2}},
    {ConditionType::PointOnLine, "point_on_line", {2, 2}},
    {ConditionType::PointOnCircle, "point_on_circle", {1, 2}},
    {ConditionType::MidpointOf, "midpoint_of", {2, 3}},
    {ConditionType::OrderOnLine, "order_on_line", {3, kMany}},
    {ConditionType::TangentLine, "tangent_line", {1, 2}},
    {ConditionType::TangentAtPoint, "tangent_at_point", {3, 3}},
    {ConditionType::LineIsTangent, "line_is_tangent", {1, 2}},
    {ConditionType::Diameter, "diameter", {1, 2}},
    {ConditionType::PerpendicularBisector, "perpendicular_bisector", {2, 2}},
    {ConditionType::TriangleValid, "triangle_valid", {1, 3}},
    {ConditionType::IsoscelesTriangle, "isosceles_triangle", {1, 3}},
    {ConditionType::RightTriangle, "right_triangle", {1, 4}},
    {ConditionType::PolygonType, "polygon_type", {1, kMany}},
    {ConditionType::PolygonProperty, "polygon_property", {1, kMany}},
    {ConditionType::Square, "square", {1, 4}},
    {ConditionType::RegularPolygon, "regular_polygon", {1, kMany}},
}};

constexpr std::array<ConditionType, 31> kTypeList = [] {
    std::array<ConditionType, 31> out{};
    for (std::size_t i = 0; i < kTypes.size(); ++i) {
        out[i] = kTypes[i].type;
    }
    return out;
}();

constexpr std::array<std::string_view, 8> kPolygonTypes{
    "triangle", "quadrilateral", "parallelogram", "rectangle",
    "rhombus",  "square",        "trapezoid",     "regular_n",
};

constexpr std::array<std::string_view, 4> kPolygonProperties{"convex", "cyclic", "equilateral",
                                                             "equiangular"};

constexpr std::array<ObjectType, 5> kObjectTypes{ObjectType::Point, ObjectType::Segment, ObjectType::Line,
                                                 ObjectType::Circle, ObjectType::Polygon};

const TypeInfo& info(ConditionType type) { return kTypes[static_cast<std::size_t>(type)]; }

} // namespace

std::span<const ConditionType> all_condition_types() { return kTypeList; }

std::string_view to_string(ConditionType type) { return info(type).name; }

std::optional<ConditionType> parse_condition_type(std::string_view text)
{
    for (const TypeInfo& t : kTypes) {
        if (t.name == text) {
            return t.type;
        }
    }
    return std::nullopt;
}

Arity condition_arity(ConditionType type) { return info(type).arity; }

bool needs_numeric_target(ConditionType type)
{
    switch (type) {
    case ConditionType::AngleValue:
    case ConditionType::AngleSum:
    case ConditionType::AngleRatio:
    case ConditionType::SegmentRatio:
    case ConditionType::DistanceEquals:
    case ConditionType::Perimeter: return true;
    default: return false;
    }
}

bool needs_label(ConditionType type)
{
    return type == ConditionType::PolygonType || type == ConditionType::PolygonProperty;
}

std::span<const std::string_view> supported_polygon_types() { return kPolygonTypes; }
std::span<const std::string_view> supported_polygon_properties() { return kPolygonProperties; }

bool is_supported_polygon_type(std::string_view name)
{
    if (std::find(kPolygonTypes.begin(), kPolygonTypes.end(), name) != kPolygonTypes.end()) {
        return true;
    }
    if (name == "regular") {
        return true;
    }
    if (name.starts_with("regular_")) {
        const std::string_view digits = name.substr(8);
        int n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        return ec == std::errc() && ptr == digits.data() + digits.size() && n >= 3;
    }
    return false;
}

std::string_view to_string(ObjectType type)
{
    switch (type) {
    case ObjectType::Point: return "points";
    case ObjectType::Segment: return "segments";
    case ObjectType::Line: return "lines";
    case ObjectType::Circle: return "circles";
    case ObjectType::Polygon: return "polygons";
    }
    return "points";
}

std::span<const ObjectType> all_object_types() { return kObjectTypes; }

std::string ObjectRef::display() const
{
    std::string out;
    for (const std::string& p : parts) {
        out += p;
    }
    return out;
}

std::vector<std::string> split_labels(std::string_view text, std::span<const std::string> known,
                                      std::size_t count)
{
    std::vector<std::string> current;
    std::function<bool(std::string_view)> search = [&](std::string_view rest) -> bool {
        if (rest.empty()) {
            return count == 0 ? !current.empty() : current.size() == count;
        }
        if (count != 0 && current.size() >= count) {
            return false;
        }
        for (std::size_t len = 1; len <= rest.size(); ++len) {
            const std::string_view head = rest.substr(0, len);
            if (std::find(known.begin(), known.end(), head) == known.end()) {
                continue;
            }
            current.emplace_back(head);
            if (search(rest.substr(len))) {
                return true;
            }
            current.pop_back();
        }
        return false;
    };
    if (!search(text)) {
        return {};
    }
    return current;
}

} // namespace geobuild
