#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include <linefib/lemmas.hpp>

#include "helpers.hpp"

using namespace linefib;
using testutil::random_points;

TEST_CASE("winding of the skew example is +1 at the origin") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    WindingResult w = winding_number(skew, Point3::Zero(), 0.1);
    REQUIRE_FALSE(w.degenerate);
    CHECK(w.winding == 1);
    CHECK(w.min_abs_w > 1e-3);
}

TEST_CASE("winding at random rank-2 base points of an audited fibration") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    for (const Point3& p : random_points(21, 20, -1.0, 1.0)) {
        WindingResult w = winding_number(skew, p, 0.05);
        REQUIRE_FALSE(w.degenerate);
        INFO("base point " << p.transpose());
        CHECK(w.winding == 1);
    }
}

TEST_CASE("winding is stable in epsilon") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    for (const Point3& p : random_points(22, 10, -1.0, 1.0)) {
        WindingResult a = winding_number(skew, p, 0.05);
        WindingResult b = winding_number(skew, p, 0.025);
        REQUIRE_FALSE(a.degenerate);
        REQUIRE_FALSE(b.degenerate);
        CHECK(a.winding == b.winding);
    }
}

TEST_CASE("winding is rotation invariant") {
    Mat3 R = testutil::fixed_rotation();
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    auto rot = rotated(skew, R);
    for (const Point3& p : random_points(23, 5, -1.0, 1.0)) {
        WindingResult w = winding_number(rot, R * p, 0.05);
        REQUIRE_FALSE(w.degenerate);
        CHECK(w.winding == 1);
    }
}

TEST_CASE("winding resamples until the increments are resolved") {
    // Horizontal part of the complex 5th power: W winds 5 times around the
    // z-axis, so 16 samples give increments ~1.96 > pi/2 and the guard
    // forces one doubling.
    auto quintic = parse_field("x^5-10*x^3*y^2+5*x*y^4", "5*x^4*y-10*x^2*y^3+y^5", "1");
    WindingResult w = winding_number(quintic, Point3::Zero(), 0.1, 16);
    REQUIRE_FALSE(w.degenerate);
    CHECK(w.winding == 5);
    CHECK(w.samples_used == 32);
}

TEST_CASE("winding degenerates on the rank-1 twist field") {
    // W vanishes where the circle meets the line of constant V through p0.
    auto theta = parse_field("cos(z)", "-sin(z)", "0");
    WindingResult w = winding_number(theta, Point3::Zero(), 0.1);
    CHECK(w.degenerate);
    CHECK(w.min_abs_w < 1e-9);
}

TEST_CASE("kernel line field of the twist family") {
    auto theta = parse_field("cos(z)", "-sin(z)", "0");

    Vec3 x0 = kernel_line_field(theta, Point3::Zero());
    CHECK((x0 - Vec3(0, 1, 0)).norm() < 1e-12);

    // At z = 1 the kernel plane is still horizontal but ker ∩ ξ has turned
    // with the field: the unique unit direction is (sin 1, cos 1, 0).
    Vec3 x1 = kernel_line_field(theta, Point3(0, 0, 1));
    CHECK((x1 - Vec3(std::sin(1.0), std::cos(1.0), 0.0)).norm() < 1e-12);

    auto constant = parse_field("1", "0", "0");
    CHECK_THROWS_AS(kernel_line_field(constant, Point3::Zero()), NumericalError);

    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    CHECK_THROWS_AS(kernel_line_field(skew, Point3::Zero()), NumericalError);
}

TEST_CASE("kernel line field lies in ker dV and in xi") {
    auto cubic = parse_field("cos(z+z^3/3)", "-sin(z+z^3/3)", "0");
    for (const Point3& p : random_points(24, 50)) {
        Vec3 x = kernel_line_field(cubic, p);
        Jet jet = evaluate_jet(cubic, p);
        CHECK((jet.jacobian * x).norm() < 1e-8);
        CHECK(std::abs(x.dot(jet.value)) < 1e-10);
        CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("kernel flow of the twist field runs straight along constant-V lines") {
    auto theta = parse_field("cos(z)", "-sin(z)", "0");

    SECTION("from the origin: the y-axis") {
        FlowCurve curve = flow_kernel_field(theta, Point3::Zero(), 2.0, 1e-3);
        CHECK(curve.points.size() == curve.times.size());
        CHECK((curve.points.back() - Point3(0, 2, 0)).norm() < 1e-9);
        CHECK((curve.points.front() - Point3(0, -2, 0)).norm() < 1e-9);
        CHECK(constancy_along_flow(theta, curve) < 1e-8);
        CHECK(projected_straightness(curve, evaluate(theta, Point3::Zero())) < 1e-8);
    }

    SECTION("from (0,0,1): a straight horizontal line with V = (cos 1, -sin 1, 0)") {
        Point3 p0(0, 0, 1);
        FlowCurve curve = flow_kernel_field(theta, p0, 1.0, 1e-3);
        Vec3 v0 = evaluate(theta, p0);
        CHECK((v0 - Vec3(std::cos(1.0), -std::sin(1.0), 0.0)).norm() < 1e-15);
        CHECK(constancy_along_flow(theta, curve) < 1e-8);
        CHECK(projected_straightness(curve, v0) < 1e-8);
        Point3 expected = p0 + 1.0 * Vec3(std::sin(1.0), std::cos(1.0), 0.0);
        CHECK((curve.points.back() - expected).norm() < 1e-9);
    }

    SECTION("step bound: the generator is unit length") {
        FlowCurve curve = flow_kernel_field(theta, Point3::Zero(), 0.5, 1e-2);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            double dt = curve.times[i] - curve.times[i - 1];
            CHECK((curve.points[i] - curve.points[i - 1]).norm() <= (1.0 + 1e-9) * dt);
        }
    }
}

TEST_CASE("kernel flow refuses rank-2 fields") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    CHECK_THROWS_AS(flow_kernel_field(skew, Point3::Zero(), 0.1), NumericalError);
}

TEST_CASE("projected straightness of a synthetic helix exceeds 0.1") {
    FlowCurve helix;
    helix.step = 0.01;
    for (int i = 0; i <= 314; ++i) {
        double t = 0.01 * i;  // half a turn
        helix.times.push_back(t);
        helix.points.emplace_back(t, std::cos(t), std::sin(t));
    }
    CHECK(projected_straightness(helix, Vec3(1, 0, 0)) > 0.1);
}

TEST_CASE("projected straightness of a two-point curve is zero by definition") {
    FlowCurve segment;
    segment.times = {0.0, 1.0};
    segment.points = {Point3(0, 0, 0), Point3(0.3, 1, 0)};
    CHECK(projected_straightness(segment, Vec3(1, 0, 0)) == 0.0);
}

TEST_CASE("projection collapse is reported") {
    FlowCurve along;
    for (int i = 0; i <= 10; ++i) {
        along.times.push_back(0.1 * i);
        along.points.emplace_back(0.1 * i, 0, 0);  // parallel to the projection axis
    }
    CHECK_THROWS_AS(projected_straightness(along, Vec3(1, 0, 0)), NumericalError);
}

TEST_CASE("constancy along synthetic curves") {
    auto theta = parse_field("cos(z)", "-sin(z)", "0");

    FlowCurve vertical;  // straight segment along z, not tangent to ker dV
    for (int i = 0; i <= 50; ++i) {
        vertical.times.push_back(0.02 * i);
        vertical.points.emplace_back(0, 0, 0.02 * i);
    }
    CHECK(constancy_along_flow(theta, vertical) > 0.1);

    auto constant = parse_field("1", "0", "0");
    CHECK(constancy_along_flow(constant, vertical) == 0.0);
}
