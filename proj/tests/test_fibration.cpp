#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include <linefib/fibration.hpp>
#include <linefib/gallery.hpp>
#include <linefib/report.hpp>

#include "helpers.hpp"

using namespace linefib;
using testutil::random_points;

namespace {

const Box kUnitBox{Point3(-1, -1, -1), Point3(1, 1, 1)};

Line make_line(const Point3& base, const Vec3& dir) { return Line{base, dir.normalized()}; }

}  // namespace

TEST_CASE("line_through uses the normalized field direction") {
    auto constant = parse_field("1", "0", "0");
    Line l = line_through(constant, Point3::Zero());
    CHECK(l.direction == Vec3(1, 0, 0));

    auto theta = parse_field("cos(z)", "-sin(z)", "0");
    Line l2 = line_through(theta, Point3(0, 5, 0));
    CHECK(l2.base == Point3(0, 5, 0));
    CHECK((l2.direction - Vec3(1, 0, 0)).norm() < 1e-15);

    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    CHECK((line_through(skew, Point3::Zero()).direction - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("closest approach of classic line pairs") {
    Line xaxis = make_line(Point3::Zero(), Vec3(1, 0, 0));

    SECTION("skew pair at distance 1") {
        Line other = make_line(Point3(0, 0, 1), Vec3(0, 1, 0));
        auto ca = lines_closest_approach(xaxis, other);
        CHECK_FALSE(ca.parallel);
        CHECK(ca.gap == Catch::Approx(1.0));
    }
    SECTION("transversal crossing at (1,0,0)") {
        Line other = make_line(Point3(1, -1, 0), Vec3(0, 1, 0));
        auto ca = lines_closest_approach(xaxis, other);
        CHECK_FALSE(ca.parallel);
        CHECK(ca.t1 == Catch::Approx(1.0));
        CHECK(ca.t2 == Catch::Approx(1.0));
        CHECK(ca.gap == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("parallel offset pair") {
        double eps = 1e-3;
        Line other = make_line(Point3(0, 0, eps), Vec3(1, 0, 0));
        auto ca = lines_closest_approach(xaxis, other);
        CHECK(ca.parallel);
        CHECK(ca.t1 == 0.0);
        CHECK(ca.t2 == 0.0);
        CHECK(ca.gap == Catch::Approx(eps));
    }
}

TEST_CASE("closest approach is exactly symmetric under swapping") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        Vec3 d1(u(rng), u(rng), u(rng));
        Vec3 d2(u(rng), u(rng), u(rng));
        if (d1.norm() < 1e-2 || d2.norm() < 1e-2) continue;
        Line l1 = make_line(Point3(u(rng), u(rng), u(rng)), d1);
        Line l2 = make_line(Point3(u(rng), u(rng), u(rng)), d2);
        auto ab = lines_closest_approach(l1, l2);
        auto ba = lines_closest_approach(l2, l1);
        REQUIRE(ab.parallel == ba.parallel);
        REQUIRE(ab.t1 == ba.t2);  // bitwise
        REQUIRE(ab.t2 == ba.t1);
        REQUIRE(ab.gap == ba.gap);

        if (!ab.parallel && ab.gap < 1e-9) {
            Point3 c1 = l1.base + ab.t1 * l1.direction;
            Point3 c2 = l2.base + ab.t2 * l2.direction;
            CHECK((c1 - c2).norm() < 1e-9);
        }
    }
}

TEST_CASE("straightness defect separates fibrations from helices") {
    auto constant = parse_field("1", "0", "0");
    CHECK(straightness_defect(constant, Point3(1, 2, 3)) == 0.0);

    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    for (const Point3& p : random_points(12, 100))
        CHECK(straightness_defect(skew, p) < 1e-10);

    auto helix = parse_field("-y", "x", "1", true);
    CHECK(straightness_defect(helix, Point3(1, 0, 0)) > 0.1);
}

TEST_CASE("audit of the skew example finds a clean rank-2 fibration") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    AuditReport r = fibration_audit(skew, kUnitBox, 5);
    CHECK(r.intersections.empty());
    CHECK(r.parallel_pairs.empty());
    CHECK(r.rank_profile == RankProfile::Constant2);
    CHECK(r.is_fibration_on_box);
    CHECK(r.is_contact_on_box);
    CHECK(r.point_errors.empty());
    CHECK(r.unit_defect_max < 1e-10);
    CHECK(r.straightness_defect_max < 1e-8);
}

TEST_CASE("audit of the horizontal twist field finds parallel lines, no crossings") {
    auto theta = parse_field("cos(z)", "-sin(z)", "0");
    AuditReport r = fibration_audit(theta, kUnitBox, 5);
    CHECK(r.intersections.empty());
    CHECK(r.parallel_pairs.size() > 100);  // whole planes of parallel lines
    CHECK(r.rank_profile == RankProfile::Constant1);
    CHECK(r.is_fibration_on_box);
}

TEST_CASE("audit flags the helix field as not a fibration") {
    auto helix = parse_field("-y", "x", "1", true);
    AuditReport r = fibration_audit(helix, kUnitBox, 5);
    CHECK(r.straightness_defect_max > 0.1);
    CHECK_FALSE(r.is_fibration_on_box);
}

TEST_CASE("audit of the constant field: parallel everywhere, not contact") {
    auto constant = parse_field("1", "0", "0");
    AuditReport r = fibration_audit(constant, kUnitBox, 4);
    CHECK(r.intersections.empty());
    CHECK(r.is_fibration_on_box);
    CHECK_FALSE(r.is_contact_on_box);
    CHECK(r.zero_set_detected);
    CHECK(r.rank_profile == RankProfile::Constant0);
    // 4 points per line along x; 16 lines; all distinct pairs parallel.
    std::size_t lines = 16, per_line = 4;
    std::size_t total_pairs = (lines * per_line) * (lines * per_line - 1) / 2;
    std::size_t same_line_pairs = lines * (per_line * (per_line - 1) / 2);
    CHECK(r.parallel_pairs.size() == total_pairs - same_line_pairs);
}

TEST_CASE("evaluation failures are recorded per point, not fatal") {
    auto spiky = parse_field("1/x", "0", "1");  // undefined on the x = 0 plane
    AuditReport r = fibration_audit(spiky, kUnitBox, 3);
    CHECK(!r.point_errors.empty());
    CHECK_FALSE(r.is_fibration_on_box);
}

TEST_CASE("parallel pair scan matches the audit and respects distinct-line rule") {
    auto theta = parse_field("cos(z)", "-sin(z)", "0");
    auto pairs = parallel_pairs(theta, kUnitBox, 5, 1e-6);
    AuditReport r = fibration_audit(theta, kUnitBox, 5);
    CHECK(pairs.size() == r.parallel_pairs.size());

    // Directions of this field depend only on z, so every reported pair
    // lies within one horizontal plane.
    auto pts = std::vector<Point3>{};
    for (int iz = 0; iz < 5; ++iz)
        for (int iy = 0; iy < 5; ++iy)
            for (int ix = 0; ix < 5; ++ix)
                pts.emplace_back(-1 + 0.5 * ix, -1 + 0.5 * iy, -1 + 0.5 * iz);
    REQUIRE(!pairs.empty());
    for (const auto& pr : pairs)
        CHECK(pts[static_cast<std::size_t>(pr.i)].z() ==
              pts[static_cast<std::size_t>(pr.j)].z());

    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    CHECK(parallel_pairs(skew, kUnitBox, 5, 1e-3).empty());
}

TEST_CASE("degenerate boxes are rejected") {
    auto constant = parse_field("1", "0", "0");
    Box bad{Point3(1, -1, -1), Point3(-1, 1, 1)};
    CHECK_THROWS_AS(fibration_audit(constant, bad, 3), Error);
    CHECK_THROWS_AS(fibration_audit(constant, kUnitBox, 1), Error);
}

TEST_CASE("pointwise and line-level views agree on audited fibrations") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    AuditReport r = fibration_audit(skew, kUnitBox, 4);
    REQUIRE(r.is_fibration_on_box);
    Box enlarged = kUnitBox.scaled(1.5);
    for (const Point3& p : testutil::random_points(20, 20, -1.0, 1.0)) {
        Line l = line_through(skew, p);
        auto clip = clip_line_to_box(l, enlarged);
        REQUIRE(clip.has_value());
        Vec3 v0 = evaluate(skew, p);
        for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            double t = clip->first + f * (clip->second - clip->first);
            CHECK((evaluate(skew, p + t * l.direction) - v0).norm() < 1e-8);
        }
    }
}

TEST_CASE("audit reports are deterministic") {
    auto skew = parse_field("z*x-y", "x+z*y", "1+z^2", true);
    AuditReport a = fibration_audit(skew, kUnitBox, 5);
    AuditReport b = fibration_audit(skew, kUnitBox, 5);
    CHECK(audit_block(a).dump() == audit_block(b).dump());
    CHECK(contact_block(a).dump() == contact_block(b).dump());
}
