#include "geobuild/kernel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace geobuild;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    Vec2 point(double r = 100.0) { return {uniform(-r, r), uniform(-r, r)}; }
};

double twice_area(Vec2 a, Vec2 b, Vec2 c) { return std::abs(cross(b - a, c - a)); }

/// Random triangle whose smallest altitude is at least 5% of its longest side.
std::array<Vec2, 3> random_triangle(Rng& rng)
{
    for (;;) {
        const Vec2 a = rng.point();
        const Vec2 b = rng.point();
        const Vec2 c = rng.point();
        const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
        if (longest > 1.0 && twice_area(a, b, c) / longest > 0.05 * longest) {
            return {a, b, c};
        }
    }
}

// Cramer's rule on |X-A|^2 = |X-B|^2 and |X-A|^2 = |X-C|^2.
Vec2 circumcenter_oracle(Vec2 a, Vec2 b, Vec2 c)
{
    const double a11 = 2 * (b.x - a.x), a12 = 2 * (b.y - a.y);
    const double a21 = 2 * (c.x - a.x), a22 = 2 * (c.y - a.y);
    const double r1 = dot(b, b) - dot(a, a);
    const double r2 = dot(c, c) - dot(a, a);
    const double det = a11 * a22 - a12 * a21;
    return {(r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det};
}

// Weighted by the opposite side lengths.
Vec2 incenter_oracle(Vec2 a, Vec2 b, Vec2 c)
{
    const double la = distance(b, c);
    const double lb = distance(c, a);
    const double lc = distance(a, b);
    return (a * la + b * lb + c * lc) / (la + lb + lc);
}

double dist_to_line(Vec2 p, Vec2 a, Vec2 b) { return std::abs(cross(b - a, p - a)) / distance(a, b); }

// Line base + t*dir against a circle: roots of |base + t dir - center|^2 = r^2.
std::vector<Vec2> line_circle_oracle(Vec2 base, Vec2 dir, Vec2 center, double r)
{
    const Vec2 f = base - center;
    const double qa = dot(dir, dir);
    const double qb = 2 * dot(f, dir);
    const double qc = dot(f, f) - r * r;
    const double disc = qb * qb - 4 * qa * qc;
    if (disc < 0) {
        return {};
    }
    const double s = std::sqrt(disc);
    std::vector<Vec2> out{base + dir * ((-qb - s) / (2 * qa)), base + dir * ((-qb + s) / (2 * qa))};
    std::sort(out.begin(), out.end(), [](Vec2 p, Vec2 q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
    return out;
}

} // namespace

TEST(KernelOracle, CircumcenterMatchesLinearSolve)
{
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto [a, b, c] = random_triangle(rng);
        const Vec2 got = kernel::circumcenter(a, b, c);
        EXPECT_LE(distance(got, circumcenter_oracle(a, b, c)), 1e-6);
        EXPECT_NEAR(distance(got, a), distance(got, b), 1e-6);
        EXPECT_NEAR(distance(got, a), distance(got, c), 1e-6);
    }
}

TEST(KernelOracle, CircumcenterMatchesGridSearch)
{
    // Coarse-to-fine search for the point minimizing the spread of vertex distances.
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto [a, b, c] = random_triangle(rng);
        const auto spread = [&](Vec2 p) {
            const double da = distance(p, a), db = distance(p, b), dc = distance(p, c);
            return std::max({da, db, dc}) - std::min({da, db, dc});
        };
        Vec2 best = circumcenter_oracle(a, b, c) + Vec2{3.0, -2.0};
        double step = 8.0;
        while (step > 1e-9) {
            Vec2 next = best;
            for (int dx = -4; dx <= 4; ++dx) {
                for (int dy = -4; dy <= 4; ++dy) {
                    const Vec2 p = best + Vec2{dx * step, dy * step};
                    if (spread(p) < spread(next)) {
                        next = p;
                    }
                }
            }
            if (next == best) {
                step /= 4.0;
            }
            best = next;
        }
        EXPECT_LE(distance(kernel::circumcenter(a, b, c), best), 1e-6);
    }
}

TEST(KernelOracle, IncenterMatchesWeightedAverage)
{
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto [a, b, c] = random_triangle(rng);
        const Vec2 got = kernel::incenter(a, b, c);
        EXPECT_LE(distance(got, incenter_oracle(a, b, c)), 1e-6);
        const Circle in = kernel::incircle(a, b, c);
        EXPECT_NEAR(dist_to_line(in.center, a, b), in.radius, 1e-6);
        EXPECT_NEAR(dist_to_line(in.center, b, c), in.radius, 1e-6);
        EXPECT_NEAR(dist_to_line(in.center, c, a), in.radius, 1e-6);
    }
}

TEST(KernelOracle, AngularBisectorIsEquidistantFromSides)
{
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto [a, b, c] = random_triangle(rng);
        const Line l = kernel::angular_bisector(a, b, c);
        EXPECT_LE(distance(l.base, b), 1e-9);
        const Vec2 x = b + l.dir * 10.0;
        EXPECT_NEAR(dist_to_line(x, b, a), dist_to_line(x, b, c), 1e-6);
        const double half = kernel::measure_angle(a, b, c).magnitude_degrees / 2.0;
        EXPECT_NEAR(kernel::measure_angle(a, b, x).magnitude_degrees, half, 1e-6);
        EXPECT_NEAR(kernel::measure_angle(x, b, c).magnitude_degrees, half, 1e-6);
    }
}

TEST(KernelOracle, PerpendicularBisector)
{
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
        const Vec2 a = rng.point();
        const Vec2 b = rng.point();
        const Line l = kernel::line_bisector(a, b);
        const Vec2 x = l.base + l.dir * rng.uniform(-50, 50);
        EXPECT_NEAR(distance(x, a), distance(x, b), 1e-6);
    }
}

TEST(KernelOracle, LineLineIntersection)
{
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p1 = rng.point(), p2 = rng.point(), q1 = rng.point(), q2 = rng.point();
        const Vec2 d1 = p2 - p1, d2 = q2 - q1;
        const double det = cross(d1, d2);
        if (std::abs(det) < 1e-3 * norm(d1) * norm(d2)) {
            continue;
        }
        const double t = cross(q1 - p1, d2) / det;
        const Vec2 oracle = p1 + d1 * t;
        const auto got = kernel::intersect(kernel::make_line(p1, p2), kernel::make_line(q1, q2));
        ASSERT_EQ(got.size(), 1u);
        EXPECT_LE(distance(got[0], oracle), 1e-6);
    }
}

TEST(KernelOracle, LineCircleIntersection)
{
    Rng rng(6);
    int checked = 0;
    for (int i = 0; i < 300 && checked < 100; ++i) {
        const Vec2 center = rng.point();
        const double r = rng.uniform(5, 80);
        const Vec2 p = rng.point();
        const Vec2 q = rng.point();
        const Vec2 dir = (q - p) / distance(p, q);
        const auto oracle = line_circle_oracle(p, dir, center, r);
        if (oracle.size() != 2 || distance(oracle[0], oracle[1]) < 1e-3) {
            EXPECT_THROW(kernel::intersect(kernel::make_line(p, q), kernel::make_circle(center, r)), KernelError);
            continue;
        }
        const auto got = kernel::intersect(kernel::make_line(p, q), kernel::make_circle(center, r));
        ASSERT_EQ(got.size(), 2u);
        EXPECT_LE(distance(got[0], oracle[0]), 1e-6);
        EXPECT_LE(distance(got[1], oracle[1]), 1e-6);
        ++checked;
    }
    EXPECT_GE(checked, 50);
}

TEST(KernelOracle, CircleCircleIntersectionLiesOnBoth)
{
    Rng rng(7);
    int checked = 0;
    for (int i = 0; i < 400 && checked < 100; ++i) {
        const Circle c1 = kernel::make_circle(rng.point(), rng.uniform(10, 80));
        const Circle c2 = kernel::make_circle(rng.point(), rng.uniform(10, 80));
        const double d = distance(c1.center, c2.center);
        if (d >= c1.radius + c2.radius - 1e-3 || d <= std::abs(c1.radius - c2.radius) + 1e-3) {
            continue;
        }
        const auto got = kernel::intersect(c1, c2);
        ASSERT_EQ(got.size(), 2u);
        for (Vec2 p : got) {
            EXPECT_NEAR(distance(p, c1.center), c1.radius, 1e-6);
            EXPECT_NEAR(distance(p, c2.center), c2.radius, 1e-6);
        }
        EXPECT_TRUE(got[0].x <= got[1].x);
        ++checked;
    }
    EXPECT_GE(checked, 50);
}

TEST(Kernel, IntersectionsOrderedByXThenY)
{
    const auto pts = kernel::intersect(kernel::make_line({0, -5}, {0, 5}), kernel::make_circle({0, 0}, 2.0));
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_NEAR(pts[0].y, -2.0, 1e-12);
    EXPECT_NEAR(pts[1].y, 2.0, 1e-12);
}

TEST(Kernel, BoundedObjectsFilterIntersections)
{
    const Circle c = kernel::make_circle({0, 0}, 1.0);
    const auto seg = kernel::intersect(kernel::make_segment({0, 0}, {5, 0}), c);
    ASSERT_EQ(seg.size(), 1u);
    EXPECT_NEAR(seg[0].x, 1.0, 1e-12);
    const auto ray = kernel::intersect(kernel::make_ray({0, 0}, {-1, 0}), c);
    ASSERT_EQ(ray.size(), 1u);
    EXPECT_NEAR(ray[0].x, -1.0, 1e-12);
    EXPECT_THROW(kernel::intersect(kernel::make_segment({2, 0}, {5, 0}), c), KernelError);
}

TEST(Kernel, TangentCircleAndLineMeetOnce)
{
    const auto pts = kernel::intersect(kernel::make_line({-5, 1}, {5, 1}), kernel::make_circle({0, 0}, 1.0));
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].x, 0.0, 1e-12);
}

TEST(Kernel, InfeasibleIntersections)
{
    try {
        kernel::intersect(kernel::make_line({0, 0}, {1, 0}), kernel::make_line({0, 1}, {1, 1}));
        FAIL();
    } catch (const KernelError& e) {
        EXPECT_EQ(e.kind(), KernelErrorKind::InfeasibleConstruction);
    }
    EXPECT_THROW(kernel::intersect(kernel::make_circle({0, 0}, 1.0), kernel::make_circle({0, 0}, 2.0)), KernelError);
    EXPECT_THROW(kernel::intersect(kernel::make_circle({0, 0}, 1.0), kernel::make_circle({5, 0}, 1.0)), KernelError);
}

TEST(KernelProperty, RotationComposes)
{
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p = rng.point();
        const Vec2 o = rng.point();
        const double a = rng.uniform(-400, 400) * kDeg;
        const double b = rng.uniform(-400, 400) * kDeg;
        const Vec2 twice = kernel::rotate(kernel::rotate(p, a, o), b, o);
        EXPECT_LE(distance(twice, kernel::rotate(p, a + b, o)), 1e-9);
        EXPECT_NEAR(distance(kernel::rotate(p, a, o), o), distance(p, o), 1e-9);
    }
    EXPECT_LE(distance(kernel::rotate({1, 0}, 90 * kDeg, {0, 0}), Vec2{0, 1}), 1e-15);
}

TEST(KernelProperty, OrthogonalLineThroughCirclePointIsTangent)
{
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const Vec2 center = rng.point();
        const double r = rng.uniform(1, 100);
        const double t = rng.uniform(0, 360) * kDeg;
        const Vec2 p = center + Vec2{std::cos(t), std::sin(t)} * r;
        const Line tangent = kernel::orthogonal_line(p, kernel::make_line(center, p));
        EXPECT_NEAR(kernel::distance_to_line(center, tangent), r, 1e-9 * std::max(1.0, r));
    }
}

TEST(Kernel, AngleMeasureIsCounterclockwise)
{
    const auto m = kernel::measure_angle({1, 0}, {0, 0}, {0, 1});
    EXPECT_NEAR(m.oriented_degrees, 90.0, 1e-12);
    EXPECT_NEAR(m.magnitude_degrees, 90.0, 1e-12);
    const auto r = kernel::measure_angle({0, 1}, {0, 0}, {1, 0});
    EXPECT_NEAR(r.oriented_degrees, 270.0, 1e-12);
    EXPECT_NEAR(r.magnitude_degrees, 90.0, 1e-12);
    EXPECT_THROW(kernel::measure_angle({0, 0}, {0, 0}, {1, 0}), KernelError);
}

TEST(Kernel, DegenerateInputs)
{
    EXPECT_THROW(kernel::make_line({1, 1}, {1, 1}), KernelError);
    EXPECT_THROW(kernel::make_circle({0, 0}, 0.0), KernelError);
    EXPECT_THROW(kernel::make_circle({0, 0}, -1.0), KernelError);
    EXPECT_THROW(kernel::circumcenter({0, 0}, {1, 1}, {2, 2}), KernelError);
    EXPECT_THROW(kernel::angular_bisector({1, 0}, {0, 0}, {-1, 0}), KernelError);
}

TEST(Kernel, ScalarArithmetic)
{
    EXPECT_DOUBLE_EQ(kernel::scalar_arith(kernel::ArithOp::Sum, 2, 3), 5);
    EXPECT_DOUBLE_EQ(kernel::scalar_arith(kernel::ArithOp::Minus, 2, 3), -1);
    EXPECT_DOUBLE_EQ(kernel::scalar_arith(kernel::ArithOp::Product, 2, 3), 6);
    EXPECT_DOUBLE_EQ(kernel::scalar_arith(kernel::ArithOp::Ratio, 3, 2), 1.5);
    try {
        kernel::scalar_arith(kernel::ArithOp::Ratio, 1, 0);
        FAIL();
    } catch (const KernelError& e) {
        EXPECT_EQ(e.kind(), KernelErrorKind::DivisionByZero);
    }
}

TEST(Kernel, FreePointsAreDistinctAndNotCollinear)
{
    for (std::size_t k = 0; k + 2 < 30; ++k) {
        const Vec2 a = kernel::free_point(k), b = kernel::free_point(k + 1), c = kernel::free_point(k + 2);
        EXPECT_GT(distance(a, b), 1.0);
        EXPECT_GT(twice_area(a, b, c), 1.0);
    }
}

TEST(Kernel, SamplePoints)
{
    EXPECT_LE(distance(kernel::sample_point(kernel::make_segment({0, 0}, {4, 0})), Vec2{1, 0}), 1e-12);
    const Vec2 on_circle = kernel::sample_point(kernel::make_circle({0, 0}, 2.0));
    EXPECT_NEAR(norm(on_circle), 2.0, 1e-12);
    EXPECT_NEAR(on_circle.x, on_circle.y, 1e-12);
}
