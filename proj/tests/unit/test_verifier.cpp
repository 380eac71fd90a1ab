#include "geobuild/task.hpp"
#include "geobuild/verifier.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace geobuild;

namespace {

class StateBuilder {
public:
    explicit StateBuilder(double scale = 1.0) : k_(scale) {}

    StateBuilder& point(const std::string& n, double x, double y)
    {
        return bind(n, Point{{x * k_, y * k_}}, "point", {});
    }
    StateBuilder& segment(const std::string& n, const std::string& a, const std::string& b)
    {
        return bind(n, kernel::make_segment(at(a), at(b)), "segment", {a, b});
    }
    StateBuilder& line(const std::string& n, const std::string& a, const std::string& b)
    {
        return bind(n, kernel::make_line(at(a), at(b)), "line", {a, b});
    }
    StateBuilder& circle(const std::string& n, const std::string& center, const std::string& through)
    {
        return bind(n, kernel::make_circle(at(center), at(through)), "circle", {center, through});
    }
    StateBuilder& angle(const std::string& n, const std::string& a, const std::string& v, const std::string& c)
    {
        return bind(n, kernel::make_angle(at(a), at(v), at(c)), "angle", {a, v, c});
    }

    const ConstructionState& state() const { return s_; }
    ExecutionTrace trace() const
    {
        ExecutionTrace t;
        t.final_state = s_;
        t.executed_steps = t.program_length = s_.size();
        return t;
    }

private:
    Vec2 at(const std::string& n) const { return s_.object(n)->as<Point>().at; }
    StateBuilder& bind(const std::string& n, GeoObject o, std::string cmd, std::vector<std::string> refs)
    {
        s_.bind(Binding{n, std::move(o), static_cast<int>(s_.size() + 1), std::move(cmd), std::move(refs)});
        return *this;
    }

    double k_;
    ConstructionState s_;
};

ObjectRef obj_ref(const std::string& s) { return ObjectRef{{s}, false}; }

Condition cond(ConditionType t, std::vector<std::string> refs, std::optional<double> value = {},
               std::optional<std::string> label = {})
{
    Condition c;
    c.type = t;
    for (auto& r : refs) {
        c.objects.push_back(obj_ref(r));
    }
    c.value = value;
    c.label = std::move(label);
    return c;
}

/// Square ABCD of side 4 with its incircle k (center O), the touch points E
/// (bottom) and G (top), and F on line AB beyond B.
StateBuilder square_scene(double scale = 1.0)
{
    StateBuilder b(scale);
    b.point("A", 0, 0).point("B", 4, 0).point("C", 4, 4).point("D", 0, 4);
    b.point("E", 2, 0).point("F", 6, 0).point("G", 2, 4).point("O", 2, 2).point("H", 2, 1);
    b.segment("AB", "A", "B").segment("BC", "B", "C").segment("CD", "C", "D").segment("DA", "D", "A");
    b.segment("EG", "E", "G");
    b.line("lAB", "A", "B").line("lAC", "A", "C").line("lBD", "B", "D").line("lEG", "E", "G");
    b.circle("k", "O", "E");
    b.angle("aBAC", "B", "A", "C");
    return b;
}

struct Case {
    const char* label;
    Condition condition;
    bool expected;
};

std::vector<Case> square_cases()
{
    using T = ConditionType;
    return {
        {"parallel", cond(T::Parallel, {"AB", "CD"}), true},
        {"not parallel", cond(T::Parallel, {"AB", "lAC"}), false},
        {"perpendicular", cond(T::Perpendicular, {"AB", "BC"}), true},
        {"not perpendicular", cond(T::Perpendicular, {"AB", "lAC"}), false},
        {"collinear", cond(T::Collinear, {"A", "E", "B", "F"}), true},
        {"not collinear", cond(T::Collinear, {"A", "E", "C"}), false},
        {"concurrent", cond(T::Concurrent, {"lAC", "lBD", "lEG"}), true},
        {"not concurrent", cond(T::Concurrent, {"lAB", "lAC", "BC"}), false},
        {"concyclic", cond(T::Concyclic, {"A", "B", "C", "D"}), true},
        {"not concyclic", cond(T::Concyclic, {"A", "B", "C", "H"}), false},
        {"angle value", cond(T::AngleValue, {"BAC"}, 45.0), true},
        {"angle object", cond(T::AngleValue, {"aBAC"}, 45.0), true},
        {"angle sign", cond(T::AngleValue, {"\xE2\x88\xA0" "BAC"}, 45.0), true},
        {"angle reflex", cond(T::AngleValue, {"CAB"}, 45.0), true},
        {"angle off", cond(T::AngleValue, {"BAC"}, 46.0), false},
        {"angle within tolerance", cond(T::AngleValue, {"BAC"}, 45.4), true},
        {"angle equality", cond(T::AngleEquality, {"BAC", "CAD"}), true},
        {"angle inequality", cond(T::AngleEquality, {"BAC", "BAD"}), false},
        {"angle sum", cond(T::AngleSum, {"BAC", "CAD"}, 90.0), true},
        {"angle sum off", cond(T::AngleSum, {"BAC", "CAD"}, 80.0), false},
        {"angle ratio", cond(T::AngleRatio, {"BAD", "BAC"}, 2.0), true},
        {"angle ratio off", cond(T::AngleRatio, {"BAD", "BAC"}, 3.0), false},
        {"angle bisector", cond(T::AngleBisector, {"lAC", "BAD"}), true},
        {"not a bisector", cond(T::AngleBisector, {"lAB", "BAD"}), false},
        {"segment equality", cond(T::SegmentEquality, {"AB", "BC", "CD"}), true},
        {"segment inequality", cond(T::SegmentEquality, {"AB", "AE"}), false},
        {"segment ratio", cond(T::SegmentRatio, {"AB", "AE"}, 2.0), true},
        {"segment ratio off", cond(T::SegmentRatio, {"AB", "AE"}, 1.5), false},
        {"on segment", cond(T::PointOnSegment, {"E", "AB"}), true},
        {"off segment", cond(T::PointOnSegment, {"F", "AB"}), false},
        {"on line", cond(T::PointOnLine, {"F", "AB"}), true},
        {"off line", cond(T::PointOnLine, {"C", "AB"}), false},
        {"on circle", cond(T::PointOnCircle, {"E", "k"}), true},
        {"on circle by center", cond(T::PointOnCircle, {"G", "O"}), true},
        {"off circle", cond(T::PointOnCircle, {"A", "k"}), false},
        {"midpoint", cond(T::MidpointOf, {"E", "AB"}), true},
        {"midpoint of points", cond(T::MidpointOf, {"O", "A", "C"}), true},
        {"not midpoint", cond(T::MidpointOf, {"F", "AB"}), false},
        {"order", cond(T::OrderOnLine, {"A", "E", "B", "F"}), true},
        {"wrong order", cond(T::OrderOnLine, {"A", "B", "E", "F"}), false},
        {"tangent", cond(T::TangentLine, {"AB", "k"}), true},
        {"tangent implicit circle", cond(T::TangentLine, {"CD"}), true},
        {"not tangent", cond(T::TangentLine, {"lAC", "k"}), false},
        {"tangent at point", cond(T::TangentAtPoint, {"lAB", "k", "E"}), true},
        {"tangent at wrong point", cond(T::TangentAtPoint, {"lAB", "k", "F"}), false},
        {"line is tangent", cond(T::LineIsTangent, {"BC", "O"}), true},
        {"diameter", cond(T::Diameter, {"EG", "k"}), true},
        {"not diameter", cond(T::Diameter, {"AE", "k"}), false},
        {"perpendicular bisector", cond(T::PerpendicularBisector, {"lEG", "AB"}), true},
        {"not perpendicular bisector", cond(T::PerpendicularBisector, {"lAC", "AB"}), false},
        {"triangle", cond(T::TriangleValid, {"ABD"}), true},
        {"flat triangle", cond(T::TriangleValid, {"AEB"}), false},
        {"isosceles", cond(T::IsoscelesTriangle, {"ABD"}), true},
        {"scalene", cond(T::IsoscelesTriangle, {"AFD"}), false},
        {"right triangle", cond(T::RightTriangle, {"ABD"}), true},
        {"right at vertex", cond(T::RightTriangle, {"ABD", "A"}), true},
        {"not right at vertex", cond(T::RightTriangle, {"ABD", "B"}), false},
        {"not right", cond(T::RightTriangle, {"AFG"}), false},
        {"square", cond(T::Square, {"ABCD"}), true},
        {"square by vertices", cond(T::Square, {"A", "B", "C", "D"}), true},
        {"not square", cond(T::Square, {"ABCH"}), false},
        {"regular", cond(T::RegularPolygon, {"ABCD"}), true},
        {"not regular", cond(T::RegularPolygon, {"AFCD"}), false},
        {"type square", cond(T::PolygonType, {"ABCD"}, {}, "square"), true},
        {"type rectangle", cond(T::PolygonType, {"ABCD"}, {}, "rectangle"), true},
        {"type rhombus", cond(T::PolygonType, {"ABCD"}, {}, "rhombus"), true},
        {"type parallelogram", cond(T::PolygonType, {"ABCD"}, {}, "parallelogram"), true},
        {"type trapezoid", cond(T::PolygonType, {"AFCD"}, {}, "trapezoid"), true},
        {"type quadrilateral", cond(T::PolygonType, {"AFCD"}, {}, "quadrilateral"), true},
        {"type regular_4", cond(T::PolygonType, {"ABCD"}, {}, "regular_4"), true},
        {"type triangle", cond(T::PolygonType, {"ABD"}, {}, "triangle"), true},
        {"not parallelogram", cond(T::PolygonType, {"AFCD"}, {}, "parallelogram"), false},
        {"crossed quadrilateral", cond(T::PolygonType, {"ACBD"}, {}, "quadrilateral"), false},
        {"unsupported type", cond(T::PolygonType, {"ABCD"}, {}, "kite"), false},
        {"convex", cond(T::PolygonProperty, {"ABCD"}, {}, "convex"), true},
        {"not convex", cond(T::PolygonProperty, {"ABHD"}, {}, "convex"), false},
        {"cyclic", cond(T::PolygonProperty, {"ABCD"}, {}, "cyclic"), true},
        {"equilateral", cond(T::PolygonProperty, {"ABCD"}, {}, "equilateral"), true},
        {"equiangular", cond(T::PolygonProperty, {"ABCD"}, {}, "equiangular"), true},
        {"not equiangular", cond(T::PolygonProperty, {"AFCD"}, {}, "equiangular"), false},
        {"undefined point", cond(T::Collinear, {"A", "B", "Z"}), false},
        {"unsplittable name", cond(T::AngleValue, {"AZB"}, 45.0), false},
        {"too few objects", cond(T::Parallel, {"AB"}), false},
    };
}

} // namespace

TEST(Verifier, EveryConditionTypeOnSquareScene)
{
    const StateBuilder scene = square_scene();
    std::set<ConditionType> covered;
    for (const Case& c : square_cases()) {
        const ConditionResult r = check_condition(scene.state(), c.condition, ScaleFit{});
        EXPECT_EQ(r.satisfied, c.expected) << c.label << ": residual " << r.residual << " " << r.reason;
        EXPECT_EQ(r.reason.empty(), r.satisfied) << c.label;
        covered.insert(c.condition.type);
    }
    covered.insert(ConditionType::DistanceEquals);
    covered.insert(ConditionType::Perimeter);
    EXPECT_EQ(covered.size(), all_condition_types().size());
}

TEST(Verifier, FailureReasons)
{
    const StateBuilder scene = square_scene();
    using T = ConditionType;
    EXPECT_TRUE(check_condition(scene.state(), cond(T::Collinear, {"A", "B", "Z"}), {}).reason.starts_with(
        "undefined-reference"));
    EXPECT_TRUE(check_condition(scene.state(), cond(T::AngleValue, {"BAC"}, 50.0), {}).reason.starts_with(
        "out-of-tolerance"));
    EXPECT_TRUE(check_condition(scene.state(), cond(T::AngleValue, {"BAC"}), {}).reason.starts_with("bad-arguments"));
    EXPECT_TRUE(check_condition(scene.state(), cond(T::PolygonType, {"ABCD"}, {}, "kite"), {})
                    .reason.starts_with("unsupported-condition"));
}

TEST(Verifier, AngleResidualFoldsReflex)
{
    EXPECT_DOUBLE_EQ(angle_residual(40.0, 40.0), 0.0);
    EXPECT_DOUBLE_EQ(angle_residual(320.0, 40.0), 0.0);
    EXPECT_DOUBLE_EQ(angle_residual(50.0, 40.0), 10.0);
    EXPECT_DOUBLE_EQ(angle_residual(310.0, 40.0), 10.0);
}

TEST(VerifierProperty, ReflexSymmetry)
{
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::uniform_real_distribution<double> t(0.0, 360.0);
    for (int i = 0; i < 1000; ++i) {
        StateBuilder b;
        b.point("A", u(gen), u(gen)).point("V", u(gen), u(gen)).point("C", u(gen), u(gen));
        const double target = t(gen);
        const auto r1 = check_condition(b.state(), cond(ConditionType::AngleValue, {"AVC"}, target), {});
        const auto r2 = check_condition(b.state(), cond(ConditionType::AngleValue, {"CVA"}, target), {});
        EXPECT_EQ(r1.satisfied, r2.satisfied);
        EXPECT_NEAR(r1.residual, r2.residual, 1e-9);
        const double theta = t(gen);
        EXPECT_EQ(angle_residual(theta, target) <= 0.5, angle_residual(360.0 - theta, target) <= 0.5);
    }
}

TEST(Verifier, ScaleFitTakesUpperMedian)
{
    StateBuilder b;
    b.point("A", 0, 0).point("B", 100, 0).point("C", 100, 80);
    const std::vector<Condition> conds = {cond(ConditionType::DistanceEquals, {"AB"}, 5.0),
                                          cond(ConditionType::DistanceEquals, {"BC"}, 3.0)};
    const ScaleFit fit = fit_global_scale(b.state(), conds);
    ASSERT_TRUE(fit.applicable);
    EXPECT_DOUBLE_EQ(fit.scale, 0.05);
    EXPECT_TRUE(check_condition(b.state(), conds[0], fit).satisfied);
    const ConditionResult bc = check_condition(b.state(), conds[1], fit);
    EXPECT_FALSE(bc.satisfied);
    EXPECT_NEAR(bc.residual, 1.0 / 3.0, 1e-12); // 80 * 0.05 = 4 against 3
}

TEST(Verifier, ScaleFitEdgeCases)
{
    StateBuilder b;
    b.point("A", 0, 0).point("B", 10, 0).point("C", 10, 0);
    EXPECT_FALSE(fit_global_scale(b.state(), std::vector{cond(ConditionType::Parallel, {"AB", "AC"})}).applicable);
    const std::vector<Condition> with_zero = {cond(ConditionType::DistanceEquals, {"BC"}, 3.0),
                                              cond(ConditionType::DistanceEquals, {"AB"}, 5.0)};
    const ScaleFit fit = fit_global_scale(b.state(), with_zero);
    EXPECT_DOUBLE_EQ(fit.scale, 0.5);
    const ConditionResult zero = check_condition(b.state(), with_zero[0], fit);
    EXPECT_FALSE(zero.satisfied);
    EXPECT_TRUE(zero.reason.starts_with("zero-length"));
    EXPECT_TRUE(check_condition(b.state(), with_zero[1], fit).satisfied);
}

TEST(Verifier, PerimeterUsesScale)
{
    StateBuilder b;
    b.point("A", 0, 0).point("B", 30, 0).point("C", 0, 40);
    const std::vector<Condition> conds = {cond(ConditionType::Perimeter, {"ABC"}, 12.0),
                                          cond(ConditionType::DistanceEquals, {"A", "B"}, 3.0)};
    const ScaleFit fit = fit_global_scale(b.state(), conds);
    EXPECT_DOUBLE_EQ(fit.scale, 0.1);
    EXPECT_TRUE(check_condition(b.state(), conds[0], fit).satisfied);
    EXPECT_TRUE(check_condition(b.state(), conds[1], fit).satisfied);
}

TEST(VerifierProperty, ScaleInvariance)
{
    using T = ConditionType;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 200; ++i) {
        double xs[4];
        double ys[4];
        for (int j = 0; j < 4; ++j) {
            xs[j] = u(gen);
            ys[j] = u(gen);
        }
        const auto build = [&](double k) {
            StateBuilder b(k);
            b.point("A", xs[0], ys[0]).point("B", xs[1], ys[1]).point("C", xs[2], ys[2]).point("D", xs[3], ys[3]);
            b.point("M", (xs[0] + xs[1]) / 2, (ys[0] + ys[1]) / 2);
            b.segment("AB", "A", "B").segment("CD", "C", "D");
            b.circle("k", "A", "B");
            return b;
        };
        const StateBuilder base = build(1.0);
        const auto& s = base.state();
        const auto len = [&](const char* p, const char* q) {
            return distance(s.object(p)->as<Point>().at, s.object(q)->as<Point>().at);
        };
        const double angle = kernel::measure_angle(s.object("B")->as<Point>().at, s.object("A")->as<Point>().at,
                                                   s.object("C")->as<Point>().at)
                                 .oriented_degrees;
        // Targets are exact or far outside tolerance so rounding cannot flip a verdict.
        const double off = coin(gen) ? 1.0 : 1.3;
        std::vector<Condition> conds = {
            cond(T::DistanceEquals, {"AB"}, 7.0),
            cond(T::DistanceEquals, {"CD"}, 7.0 * len("C", "D") / len("A", "B") * off),
            cond(T::Perimeter, {"ABC"}, 7.0 * (len("A", "B") + len("B", "C") + len("C", "A")) / len("A", "B") *
                                            (coin(gen) ? 1.0 : 0.7)),
            cond(T::AngleValue, {"BAC"}, coin(gen) ? angle : angle + 5.0),
            cond(T::MidpointOf, {"M", "AB"}),
            cond(T::MidpointOf, {"C", "AB"}),
            cond(T::PointOnCircle, {"B", "k"}),
            cond(T::PointOnCircle, {"C", "k"}),
            cond(T::SegmentRatio, {"AB", "CD"}, len("A", "B") / len("C", "D") * off),
            cond(T::TriangleValid, {"ABC"}),
            cond(T::Collinear, {"A", "M", "B"}),
        };
        const auto verdicts = [&](const ConstructionState& state) {
            const ScaleFit fit = fit_global_scale(state, conds);
            std::vector<bool> v;
            for (const auto& c : conds) {
                v.push_back(check_condition(state, c, fit).satisfied);
            }
            return v;
        };
        const auto reference = verdicts(s);
        for (double k : {0.1, 10.0, 1000.0}) {
            EXPECT_EQ(verdicts(build(k).state()), reference) << "instance " << i << " scale " << k;
        }
    }
}

TEST(Verifier, CoverageRules)
{
    StateBuilder b;
    b.point("A", 0, 0).point("B", 4, 0).point("C", 0, 3).point("O", 1, 1).point("X", 9, 9);
    b.segment("s", "A", "B");     // segment AB under another name
    b.line("l", "A", "C");        // line AC only
    b.segment("BC", "B", "C");
    b.circle("w", "O", "A");
    RequiredObjects req;
    req.points = {"A", "B", "C", "D"};
    req.segments = {{"B", "A"}, {"A", "C"}};
    req.lines = {{"A", "B"}, {"A", "C"}, {"B", "X"}};
    req.circles = {"O", "w", "Q"};
    req.polygons = {{"A", "B", "C"}};
    const auto missing = check_object_coverage(b.state(), req);
    const std::vector<MissingObject> expected = {
        {ObjectType::Point, "D"},       // never built
        {ObjectType::Segment, "AC"},    // only a line through A and C
        {ObjectType::Line, "BX"},       // nothing through B and X
        {ObjectType::Circle, "Q"},      // unknown label
        {ObjectType::Polygon, "ABC"},   // side CA is missing
    };
    EXPECT_EQ(missing, expected);
}

TEST(Verifier, TangentTaskOnListingProgram)
{
    const Task task = load_tasks(geobuild::testing::fixture_path("tangent_task.jsonl"), true).tasks.at(0);
    const ExecutionTrace trace = execute_source(geobuild::testing::tangent_program());
    const VerificationReport r = verify_task(trace, task);
    EXPECT_TRUE(r.success);
    EXPECT_TRUE(r.missing_objects.empty());
    ASSERT_EQ(r.condition_results.size(), 4u);
    EXPECT_LE(r.condition_results[3].residual, 0.01);

    Task fifty = task;
    fifty.conditions[3].value = 50.0;
    const VerificationReport r50 = verify_task(trace, fifty);
    EXPECT_FALSE(r50.success);
    EXPECT_FALSE(r50.condition_results[3].satisfied);
    EXPECT_NEAR(r50.condition_results[3].residual, 10.0, 1e-9);
}

TEST(Verifier, MissingSegmentIsReported)
{
    const Task task = load_tasks(geobuild::testing::fixture_path("tangent_task.jsonl"), true).tasks.at(0);
    std::string program = geobuild::testing::tangent_program();
    program.erase(program.find("segment : A C -> AC"));
    const VerificationReport r = verify_task(execute_source(program), task);
    EXPECT_FALSE(r.success);
    EXPECT_EQ(r.missing_objects, (std::vector<MissingObject>{{ObjectType::Segment, "AC"}}));
}

TEST(VerifierProperty, AuxiliaryObjectsDoNotChangeVerdicts)
{
    const Task task = load_tasks(geobuild::testing::fixture_path("tangent_task.jsonl"), true).tasks.at(0);
    const std::string base = geobuild::testing::tangent_program();
    const std::string extra = base + "point : 37 -12 -> aux1\ncircle : aux1 O -> aux_circle\n"
                                     "line : aux1 P -> aux_line\nmidpoint : P O -> aux_mid\n"
                                     "circumcircle : A B P -> aux_cc\n";
    const VerificationReport r1 = verify_task(execute_source(base), task);
    const VerificationReport r2 = verify_task(execute_source(extra), task);
    EXPECT_EQ(r1.success, r2.success);
    EXPECT_EQ(r1.missing_objects, r2.missing_objects);
    ASSERT_EQ(r1.condition_results.size(), r2.condition_results.size());
    for (std::size_t i = 0; i < r1.condition_results.size(); ++i) {
        EXPECT_EQ(r1.condition_results[i].satisfied, r2.condition_results[i].satisfied);
    }
}

TEST(Verifier, NonExecutableTraceFails)
{
    const Task task = load_tasks(geobuild::testing::fixture_path("tangent_task.jsonl"), true).tasks.at(0);
    const std::string program = geobuild::testing::tangent_program() + "segment : P Z -> PZ\n";
    const VerificationReport r = verify_task(execute_source(program), task);
    EXPECT_FALSE(r.executable);
    EXPECT_FALSE(r.success);
    EXPECT_TRUE(r.missing_objects.empty());
}

TEST(Verifier, MedianTriangleCannotReachPerimeter)
{
    // AB = 5, BC = 3, D the midpoint of AC: perimeter(ABD) = 5 + AC/2 + BD stays below 5 + sqrt(34).
    const std::vector<Condition> conds = {cond(ConditionType::DistanceEquals, {"AB"}, 5.0),
                                          cond(ConditionType::DistanceEquals, {"BC"}, 3.0),
                                          cond(ConditionType::MidpointOf, {"D", "AC"}),
                                          cond(ConditionType::Perimeter, {"ABD"}, 11.0)};
    for (int deg = 1; deg < 180; ++deg) {
        const double t = deg * std::numbers::pi / 180.0;
        StateBuilder b;
        b.point("A", 0, 0).point("B", 5, 0).point("C", 5 - 3 * std::cos(t), 3 * std::sin(t));
        b.point("D", (5 - 3 * std::cos(t)) / 2, 3 * std::sin(t) / 2);
        const ScaleFit fit = fit_global_scale(b.state(), conds);
        EXPECT_FALSE(check_condition(b.state(), conds[3], fit).satisfied) << deg;
        EXPECT_TRUE(check_condition(b.state(), conds[2], fit).satisfied);
    }
}
