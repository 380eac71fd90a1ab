#include "geobuild/interpreter.hpp"

#include "geobuild/expression.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

namespace geobuild {

bool ConstructionState::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

const Binding* ConstructionState::find(std::string_view name) const
{
    const auto it = index_.find(name);
    return it == index_.end() ? nullptr : &bindings_[it->second];
}

const GeoObject* ConstructionState::object(std::string_view name) const
{
    const Binding* b = find(name);
    return b ? &b->object : nullptr;
}

void ConstructionState::bind(Binding binding)
{
    if (contains(binding.name)) {
        throw std::logic_error("label '" + binding.name + "' is already defined");
    }
    index_.emplace(binding.name, bindings_.size());
    bindings_.push_back(std::move(binding));
}

std::size_t ConstructionState::count(ObjectKind kind) const
{
    return static_cast<std::size_t>(std::count_if(bindings_.begin(), bindings_.end(),
                                                  [kind](const Binding& b) { return b.object.kind() == kind; }));
}

std::string_view to_string(FailureCategory category)
{
    switch (category) {
    case FailureCategory::UndefinedReference: return "undefined_reference";
    case FailureCategory::SyntaxError: return "syntax_error";
    case FailureCategory::OutputMismatch: return "output_mismatch";
    case FailureCategory::InfeasibleConstruction: return "infeasible_construction";
    case FailureCategory::Redefinition: return "redefinition";
    case FailureCategory::ArithmeticError: return "arithmetic_error";
    }
    return "syntax_error";
}

std::optional<FailureCategory> parse_failure_category(std::string_view text)
{
    for (auto c : {FailureCategory::UndefinedReference, FailureCategory::SyntaxError,
                   FailureCategory::OutputMismatch, FailureCategory::InfeasibleConstruction,
                   FailureCategory::Redefinition, FailureCategory::ArithmeticError}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Hallucination h)
{
    switch (h) {
    case Hallucination::UndefinedReference: return "undefined_reference";
    case Hallucination::SyntaxError: return "syntax_error";
    case Hallucination::OutputMismatch: return "output_mismatch";
    }
    return "syntax_error";
}

std::optional<Hallucination> parse_hallucination(std::string_view text)
{
    for (auto h : {Hallucination::UndefinedReference, Hallucination::SyntaxError,
                   Hallucination::OutputMismatch}) {
        if (to_string(h) == text) {
            return h;
        }
    }
    return std::nullopt;
}

namespace {

struct Failure {
    FailureCategory category;
    std::string detail;
};

constexpr std::array<std::string_view, 5> kConstTypeTags{"int", "Measure", "measure", "float", "length"};

/// Expected input count range per command.
std::pair<std::size_t, std::size_t> input_arity(std::string_view name)
{
    if (name == "point") return {0, 2};
    if (name == "angle" || name == "rotate" || name == "angular_bisector" || name == "incenter" ||
        name == "circumcenter" || name == "incircle" || name == "circumcircle") {
        return {3, 3};
    }
    if (name == "const") return {1, 2};
    if (name == "midpoint" || name == "line_bisector") return {1, 2};
    return {2, 2};
}

class CommandRunner {
public:
    CommandRunner(const ConstructionState& state, const dsl::Command& cmd) : state_(state), cmd_(cmd) {}

    std::vector<Binding> run()
    {
        check_shape();
        resolve_references();
        check_outputs();

        std::vector<GeoObject> produced = compute();
        if (produced.size() != cmd_.outputs.size()) {
            fail(FailureCategory::OutputMismatch,
                 cmd_.name + " produced " + std::to_string(produced.size()) + " object(s) but " +
                     std::to_string(cmd_.outputs.size()) + " output name(s) were declared");
        }

        std::vector<Binding> out;
        out.reserve(produced.size());
        for (std::size_t i = 0; i < produced.size(); ++i) {
            out.push_back(Binding{cmd_.outputs[i], produced[i], cmd_.source_line, cmd_.name, references_});
        }
        return out;
    }

private:
    [[noreturn]] void fail(FailureCategory category, const std::string& detail) const
    {
        throw Failure{category, "line " + std::to_string(cmd_.source_line) + ": " + detail};
    }

    std::span<const dsl::Arg> args() const
    {
        std::span<const dsl::Arg> a = cmd_.inputs;
        if (has_type_tag()) {
            a = a.subspan(1);
        }
        return a;
    }

    bool has_type_tag() const
    {
        return cmd_.name == "const" && cmd_.inputs.size() == 2 &&
               cmd_.inputs[0].kind == dsl::ArgKind::Name &&
               std::find(kConstTypeTags.begin(), kConstTypeTags.end(), cmd_.inputs[0].text) !=
                   kConstTypeTags.end();
    }

    void check_shape() const
    {
        if (!dsl::is_known_command(cmd_.name)) {
            fail(FailureCategory::SyntaxError, "unknown command '" + cmd_.name + "'");
        }
        const auto [lo, hi] = input_arity(cmd_.name);
        const std::size_t n = cmd_.inputs.size();
        if (n < lo || n > hi || (cmd_.name == "const" && n == 2 && !has_type_tag())) {
            fail(FailureCategory::SyntaxError,
                 cmd_.name + " does not accept " + std::to_string(n) + " input(s)");
        }
        if (cmd_.outputs.empty()) {
            fail(FailureCategory::SyntaxError, cmd_.name + " declares no outputs");
        }
    }

    void resolve_references()
    {
        for (const dsl::Arg& arg : args()) {
            if (arg.kind != dsl::ArgKind::Name) {
                continue;
            }
            if (!state_.contains(arg.text)) {
                fail(FailureCategory::UndefinedReference, "'" + arg.text + "' is not defined");
            }
            references_.push_back(arg.text);
        }
    }

    void check_outputs() const
    {
        std::set<std::string_view> seen;
        for (const std::string& name : cmd_.outputs) {
            if (state_.contains(name) || !seen.insert(name).second) {
                fail(FailureCategory::Redefinition, "label '" + name + "' is already defined");
            }
        }
        if (cmd_.name != "intersect" && cmd_.outputs.size() != 1) {
            fail(FailureCategory::OutputMismatch,
                 cmd_.name + " produces 1 object but " + std::to_string(cmd_.outputs.size()) +
                     " output names were declared");
        }
    }

    const GeoObject& object(std::size_t i) const
    {
        const dsl::Arg& arg = args()[i];
        if (arg.kind != dsl::ArgKind::Name) {
            fail(FailureCategory::SyntaxError,
                 cmd_.name + " input " + std::to_string(i + 1) + " must be an object name, got '" +
                     arg.text + "'");
        }
        return *state_.object(arg.text);
    }

    [[noreturn]] void wrong_kind(std::size_t i, std::string_view expected) const
    {
        fail(FailureCategory::SyntaxError,
             cmd_.name + " input " + std::to_string(i + 1) + " ('" + args()[i].text + "') must be a " +
                 std::string(expected) + ", got a " + std::string(to_string(object(i).kind())));
    }

    Vec2 point(std::size_t i) const
    {
        const GeoObject& o = object(i);
        if (const auto* p = o.get_if<Point>()) {
            return p->at;
        }
        wrong_kind(i, "point");
    }

    const GeoObject& linear(std::size_t i) const
    {
        const GeoObject& o = object(i);
        if (!o.is_linear()) {
            wrong_kind(i, "line, segment or ray");
        }
        return o;
    }

    const GeoObject& curve(std::size_t i) const
    {
        const GeoObject& o = object(i);
        if (!o.is_linear() && o.kind() != ObjectKind::Circle) {
            wrong_kind(i, "line, segment, ray or circle");
        }
        return o;
    }

    /// A numeric input: literal, expression, scalar object or angle object.
    Quantity number(std::size_t i, bool oriented_angles = false) const
    {
        const dsl::Arg& arg = args()[i];
        if (arg.kind != dsl::ArgKind::Name) {
            try {
                return eval_expression(arg.text);
            } catch (const ExpressionError& e) {
                fail(e.kind() == ExpressionErrorKind::DivisionByZero ? FailureCategory::ArithmeticError
                                                                     : FailureCategory::SyntaxError,
                     e.what());
            }
        }
        const GeoObject& o = object(i);
        if (const auto* s = o.get_if<Scalar>()) {
            return Quantity{s->value, s->unit};
        }
        if (const auto* a = o.get_if<Angle>()) {
            const auto m = kernel::measure_angle(*a);
            return Quantity{oriented_angles ? m.oriented_degrees : m.magnitude_degrees, Unit::Degrees};
        }
        wrong_kind(i, "number");
    }

    bool is_object(std::size_t i, ObjectKind kind) const
    {
        return args()[i].kind == dsl::ArgKind::Name && object(i).kind() == kind;
    }

    std::vector<GeoObject> compute() const
    {
        try {
            return dispatch();
        } catch (const KernelError& e) {
            fail(e.kind() == KernelErrorKind::DivisionByZero ? FailureCategory::ArithmeticError
                                                             : FailureCategory::InfeasibleConstruction,
                 cmd_.name + ": " + e.what());
        }
    }

    std::vector<GeoObject> dispatch() const
    {
        const std::string& n = cmd_.name;
        const std::size_t argc = args().size();

        if (n == "point") {
            if (argc == 0) {
                return {Point{kernel::free_point(state_.count(ObjectKind::Point))}};
            }
            if (argc == 1) {
                return {Point{kernel::sample_point(curve(0))}};
            }
            return {Point{{number(0).value, number(1).value}}};
        }
        if (n == "line") return {kernel::make_line(point(0), point(1))};
        if (n == "segment") return {kernel::make_segment(point(0), point(1))};
        if (n == "ray") return {kernel::make_ray(point(0), point(1))};
        if (n == "circle") {
            if (is_object(1, ObjectKind::Point)) {
                return {kernel::make_circle(point(0), point(1))};
            }
            return {kernel::make_circle(point(0), number(1).value)};
        }
        if (n == "angle") return {kernel::make_angle(point(0), point(1), point(2))};
        if (n == "const") {
            const Quantity q = number(0);
            return {Scalar{q.value, q.unit}};
        }
        if (n == "intersect") {
            std::vector<GeoObject> out;
            for (Vec2 p : kernel::intersect(curve(0), curve(1))) {
                out.emplace_back(Point{p});
            }
            return out;
        }
        if (n == "parallel_line") return {kernel::parallel_line(point(0), linear(1))};
        if (n == "orthogonal_line") return {kernel::orthogonal_line(point(0), linear(1))};
        if (n == "midpoint" || n == "line_bisector") {
            Vec2 a;
            Vec2 b;
            if (argc == 1) {
                const GeoObject& o = object(0);
                const auto* s = o.get_if<Segment>();
                if (!s) {
                    wrong_kind(0, "segment");
                }
                a = s->a;
                b = s->b;
            } else {
                a = point(0);
                b = point(1);
            }
            if (n == "midpoint") {
                if (!(distance(a, b) > 0.0)) {
                    throw KernelError(KernelErrorKind::DegenerateInput, "midpoint: coincident points");
                }
                return {Point{kernel::midpoint(a, b)}};
            }
            return {kernel::line_bisector(a, b)};
        }
        if (n == "rotate") {
            return {Point{kernel::rotate(point(0), number(1, true).radians(), point(2))}};
        }
        if (n == "angular_bisector") return {kernel::angular_bisector(point(0), point(1), point(2))};
        if (n == "incenter") return {Point{kernel::incenter(point(0), point(1), point(2))}};
        if (n == "circumcenter") return {Point{kernel::circumcenter(point(0), point(1), point(2))}};
        if (n == "incircle") return {kernel::incircle(point(0), point(1), point(2))};
        if (n == "circumcircle") return {kernel::circumcircle(point(0), point(1), point(2))};
        if (n == "distance") return {Scalar{distance(point(0), point(1)), Unit::Dimensionless}};

        const kernel::ArithOp op = n == "sum"       ? kernel::ArithOp::Sum
                                   : n == "minus"   ? kernel::ArithOp::Minus
                                   : n == "product" ? kernel::ArithOp::Product
                                                    : kernel::ArithOp::Ratio;
        const Quantity a = number(0);
        const Quantity b = number(1);
        const bool a_angle = a.unit != Unit::Dimensionless;
        const bool b_angle = b.unit != Unit::Dimensionless;
        const double av = a_angle ? a.degrees() : a.value;
        const double bv = b_angle ? b.degrees() : b.value;
        Unit unit = Unit::Dimensionless;
        switch (op) {
        case kernel::ArithOp::Sum:
        case kernel::ArithOp::Minus: unit = (a_angle || b_angle) ? Unit::Degrees : Unit::Dimensionless; break;
        case kernel::ArithOp::Product: unit = (a_angle != b_angle) ? Unit::Degrees : Unit::Dimensionless; break;
        case kernel::ArithOp::Ratio: unit = (a_angle && !b_angle) ? Unit::Degrees : Unit::Dimensionless; break;
        }
        return {Scalar{kernel::scalar_arith(op, av, bv), unit}};
    }

    const ConstructionState& state_;
    const dsl::Command& cmd_;
    std::vector<std::string> references_;
};

} // namespace

std::optional<ExecutionFailure> execute_command(ConstructionState& state, const dsl::Command& command)
{
    std::vector<Binding> produced;
    try {
        produced = CommandRunner(state, command).run();
    } catch (const Failure& f) {
        return ExecutionFailure{command.source_line, f.category, f.detail};
    }
    for (Binding& b : produced) {
        state.bind(std::move(b));
    }
    return std::nullopt;
}

ExecutionTrace execute_program(std::span<const dsl::Command> program, ConstructionState initial)
{
    ExecutionTrace trace;
    trace.program_length = program.size();
    trace.final_state = std::move(initial);
    for (const dsl::Command& cmd : program) {
        if (auto failure = execute_command(trace.final_state, cmd)) {
            trace.failure = std::move(failure);
            return trace;
        }
        ++trace.executed_steps;
    }
    return trace;
}

ExecutionFailure to_failure(const dsl::ParseError& error)
{
    return ExecutionFailure{error.line, FailureCategory::SyntaxError,
                            std::string(dsl::to_string(error.kind)) + ": " + error.message};
}

ExecutionTrace execute_source(std::string_view source)
{
    dsl::ParseResult parsed = dsl::parse_program(source);
    if (!parsed.ok()) {
        ExecutionTrace trace;
        trace.failure = to_failure(*parsed.error);
        return trace;
    }
    return execute_program(parsed.commands);
}

std::optional<Hallucination> classify_failure(const ExecutionFailure& failure)
{
    switch (failure.category) {
    case FailureCategory::UndefinedReference: return Hallucination::UndefinedReference;
    case FailureCategory::SyntaxError: return Hallucination::SyntaxError;
    case FailureCategory::OutputMismatch: return Hallucination::OutputMismatch;
    case FailureCategory::InfeasibleConstruction:
    case FailureCategory::Redefinition:
    case FailureCategory::ArithmeticError: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Hallucination> classify_failure(const dsl::ParseError&)
{
    return Hallucination::SyntaxError;
}

} // namespace geobuild
