#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geobuild {

enum class Unit { Dimensionless, Degrees, Radians };

std::string_view to_string(Unit unit);

/// A number together with the angle unit it was written in. Dimensionless
/// values used where an angle is expected are read as degrees.
struct Quantity {
    double value = 0.0;
    Unit unit = Unit::Dimensionless;

    double radians() const;
    double degrees() const;

    bool operator==(const Quantity&) const = default;
};

enum class ExpressionErrorKind { BadExpression, DivisionByZero };

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(ExpressionErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ExpressionErrorKind kind() const noexcept { return kind_; }

private:
    ExpressionErrorKind kind_;
};

/// Evaluates an inline GeoDSL expression such as `100*sin(60°)` or
/// `1.5708rad`. Supports + - * / parentheses, sin/cos/tan and the unit
/// suffixes `°`, `deg`, `rad`, `r`. Whitespace is not part of the grammar.
Quantity eval_expression(std::string_view text);

} // namespace geobuild
