#include "geobuild/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace geobuild {

std::string_view to_string(Unit unit)
{
    switch (unit) {
    case Unit::Dimensionless: return "dimensionless";
    case Unit::Degrees: return "degrees";
    case Unit::Radians: return "radians";
    }
    return "dimensionless";
}

double Quantity::radians() const
{
    if (unit == Unit::Radians) {
        return value;
    }
    return value * std::numbers::pi / 180.0;
}

double Quantity::degrees() const
{
    if (unit == Unit::Radians) {
        return value * 180.0 / std::numbers::pi;
    }
    return value;
}

namespace {

constexpr std::string_view kDegreeSign = "\xC2\xB0";

bool is_angle(Unit u) { return u != Unit::Dimensionless; }

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    Quantity parse()
    {
        if (text_.empty()) {
            fail("empty expression");
        }
        Quantity q = parse_sum();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(text_.substr(pos_, 1)) + "'");
        }
        return q;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ExpressionError(ExpressionErrorKind::BadExpression,
                              "bad expression '" + std::string(text_) + "': " + what);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    bool consume(char c)
    {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Quantity parse_sum()
    {
        Quantity lhs = parse_product();
        for (;;) {
            if (consume('+')) {
                lhs = add(lhs, parse_product(), +1.0);
            } else if (consume('-')) {
                lhs = add(lhs, parse_product(), -1.0);
            } else {
                return lhs;
            }
        }
    }

    Quantity parse_product()
    {
        Quantity lhs = parse_unary();
        for (;;) {
            if (consume('*')) {
                lhs = multiply(lhs, parse_unary());
            } else if (consume('/')) {
                lhs = divide(lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Quantity parse_unary()
    {
        if (consume('-')) {
            Quantity q = parse_unary();
            q.value = -q.value;
            return q;
        }
        if (consume('+')) {
            return parse_unary();
        }
        return parse_postfix();
    }

    Quantity parse_postfix()
    {
        Quantity q = parse_primary();
        if (auto unit = parse_unit_suffix()) {
            if (is_angle(q.unit)) {
                fail("unit applied twice");
            }
            q.unit = *unit;
        }
        return q;
    }

    std::optional<Unit> parse_unit_suffix()
    {
        if (text_.substr(pos_, kDegreeSign.size()) == kDegreeSign) {
            pos_ += kDegreeSign.size();
            return Unit::Degrees;
        }
        if (!std::isalpha(static_cast<unsigned char>(peek()))) {
            return std::nullopt;
        }
        std::string_view word = read_word();
        if (word == "deg") {
            return Unit::Degrees;
        }
        if (word == "rad" || word == "r") {
            return Unit::Radians;
        }
        fail("unknown unit '" + std::string(word) + "'");
    }

    std::string_view read_word()
    {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    Quantity parse_primary()
    {
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Quantity{parse_number(), Unit::Dimensionless};
        }
        if (consume('(')) {
            Quantity q = parse_sum();
            if (!consume(')')) {
                fail("unbalanced parentheses");
            }
            return q;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string_view name = read_word();
            if (name != "sin" && name != "cos" && name != "tan") {
                fail("unknown function '" + std::string(name) + "'");
            }
            if (!consume('(')) {
                fail("expected '(' after " + std::string(name));
            }
            Quantity arg = parse_sum();
            if (!consume(')')) {
                fail("unbalanced parentheses");
            }
            const double rad = arg.radians();
            double v = 0.0;
            if (name == "sin") {
                v = std::sin(rad);
            } else if (name == "cos") {
                v = std::cos(rad);
            } else {
                v = std::tan(rad);
            }
            return Quantity{v, Unit::Dimensionless};
        }
        if (at_end()) {
            fail("unexpected end of expression");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    double parse_number()
    {
        const std::size_t start = pos_;
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
            digits = true;
        }
        if (consume('.')) {
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) {
            fail("malformed number");
        }
        // Exponent only when followed by digits, so `2e` stays an error
        // rather than silently becoming a unit.
        if (peek() == 'e' || peek() == 'E') {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) {
                ++look;
            }
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            fail("malformed number");
        }
        return value;
    }

    Quantity add(Quantity a, Quantity b, double sign)
    {
        if (is_angle(a.unit) && is_angle(b.unit) && a.unit != b.unit) {
            return Quantity{a.degrees() + sign * b.degrees(), Unit::Degrees};
        }
        const Unit unit = is_angle(a.unit) ? a.unit : b.unit;
        return Quantity{a.value + sign * b.value, unit};
    }

    Quantity multiply(Quantity a, Quantity b)
    {
        if (is_angle(a.unit) && is_angle(b.unit)) {
            fail("product of two angles");
        }
        const Unit unit = is_angle(a.unit) ? a.unit : b.unit;
        return Quantity{a.value * b.value, unit};
    }

    Quantity divide(Quantity a, Quantity b)
    {
        if (b.value == 0.0) {
            throw ExpressionError(ExpressionErrorKind::DivisionByZero,
                                  "division by zero in '" + std::string(text_) + "'");
        }
        if (is_angle(a.unit) && is_angle(b.unit)) {
            return Quantity{a.degrees() / b.degrees(), Unit::Dimensionless};
        }
        if (is_angle(b.unit)) {
            fail("division by an angle");
        }
        return Quantity{a.value / b.value, a.unit};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Quantity eval_expression(std::string_view text)
{
    return ExpressionParser(text).parse();
}

} // namespace geobuild
