#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "linefib/diffgeo.hpp"
#include "linefib/errors.hpp"
#include "linefib/field.hpp"
#include "linefib/geometry.hpp"

namespace linefib {

/// Oriented affine line.
struct Line {
    Point3 base;
    Vec3 direction;  // unit
};

inline Line line_through(const VectorFieldSpec& f, const Point3& p) {
    Vec3 v = evaluate(f, p);
    double n = v.norm();
    if (n == 0.0) throw DomainError("line_through: field vanishes at the base point");
    return Line{p, v / n};
}

/// ||J(p) V(p)||, the directional derivative of V along itself. Zero exactly
/// when the integral curve through p has locally constant direction.
inline double straightness_defect_from_jet(const Jet& jet) {
    return (jet.jacobian * jet.value).norm();
}

inline double straightness_defect(const VectorFieldSpec& f, const Point3& p) {
    return straightness_defect_from_jet(evaluate_jet(f, p));
}

/// Mutual closest points of two lines. For near-parallel directions
/// (|d1.d2| > 1 - 1e-12) the solver is singular; `parallel` is set, the
/// parameters are 0 and `gap` is the inter-line distance. Swapping the
/// arguments swaps t1/t2 and preserves `gap` bit-for-bit.
struct ClosestApproach {
    double t1, t2, gap;
    bool parallel;
};

inline ClosestApproach lines_closest_approach(const Line& l1, const Line& l2) {
    const Vec3& d1 = l1.direction;
    const Vec3& d2 = l2.direction;
    double b = d1.dot(d2);
    Vec3 w0 = l1.base - l2.base;
    if (std::abs(b) > 1.0 - 1e-12) {
        Vec3 offset = w0 - w0.dot(d1) * d1;
        return {0.0, 0.0, offset.norm(), true};
    }
    double d = w0.dot(d1);
    double e = w0.dot(d2);
    double denom = 1.0 - b * b;
    double t1 = (e * b - d) / denom;
    double t2 = (e - d * b) / denom;
    Vec3 c1 = l1.base + t1 * d1;
    Vec3 c2 = l2.base + t2 * d2;
    return {t1, t2, (c1 - c2).norm(), false};
}

/// Unoriented angle between two line directions, in [0, pi/2].
inline double line_angle(const Vec3& d1, const Vec3& d2) {
    return std::atan2(d1.cross(d2).norm(), std::abs(d1.dot(d2)));
}

/// Axis-aligned audit window.
struct Box {
    Point3 min, max;

    Point3 center() const { return 0.5 * (min + max); }
    double diagonal() const { return (max - min).norm(); }

    Box scaled(double factor) const {
        Point3 c = center();
        Point3 h = 0.5 * factor * (max - min);
        return Box{c - h, c + h};
    }
};

/// Parameter interval of line ∩ box (slab method); empty when they miss.
inline std::optional<std::pair<double, double>> clip_line_to_box(const Line& l,
                                                                 const Box& box) {
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        double d = l.direction(i), o = l.base(i);
        if (std::abs(d) < 1e-15) {
            if (o < box.min(i) || o > box.max(i)) return std::nullopt;
            continue;
        }
        double t0 = (box.min(i) - o) / d;
        double t1 = (box.max(i) - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        tlo = std::max(tlo, t0);
        thi = std::min(thi, t1);
        if (thi < tlo) return std::nullopt;
    }
    return std::make_pair(tlo, thi);
}

struct AuditTolerances {
    double unit = 1e-10;
    double straightness = 1e-8;
    double intersection_gap = 1e-7;
    double angle = 1e-6;  // radians
    double contact = 1e-9;
    double rank = kDefaultRankTol;
};

struct IntersectionRecord {
    int i, j;  // grid point indices
    double t1, t2, gap;
};

struct ParallelRecord {
    int i, j;
    double angle;
};

struct PointError {
    int index;
    std::string message;
};

enum class RankProfile { Constant0, Constant1, Constant2, Mixed };

inline const char* to_string(RankProfile r) {
    switch (r) {
        case RankProfile::Constant0: return "constant 0";
        case RankProfile::Constant1: return "constant 1";
        case RankProfile::Constant2: return "constant 2";
        case RankProfile::Mixed: return "mixed";
    }
    return "?";
}

/// Grid-based evidence for "is {V} a fibration by lines on this box, and is
/// the induced plane field contact there". Verdicts are pure functions of
/// the recorded numbers and the tolerances; audits are evidence at the given
/// resolution, not proof.
struct AuditReport {
    std::array<int, 3> grid_dims{};
    Box box{};
    AuditTolerances tolerances{};

    double unit_defect_max = 0.0;
    double straightness_defect_max = 0.0;
    std::vector<IntersectionRecord> intersections;
    std::vector<ParallelRecord> parallel_pairs;
    std::array<long, 4> rank_histogram{};  // ranks 0..3
    double contact_defect_min = 0.0;
    double contact_defect_max = 0.0;
    std::vector<PointError> point_errors;

    bool is_fibration_on_box = false;
    bool is_contact_on_box = false;
    RankProfile rank_profile = RankProfile::Mixed;
    bool zero_set_detected = false;
};

namespace detail {

struct GridSample {
    int index;
    Point3 p;
    Jet jet;
    Line line;
    double tlo, thi;  // clip interval on the enlarged box
    double unit_defect, straightness, contact;
    int rank;
};

/// Regular grid over the box, index = (iz * n + iy) * n + ix.
inline std::vector<Point3> grid_points(const Box& box, int n) {
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(n) * n * n);
    Vec3 span = box.max - box.min;
    auto coord = [&](int i, int axis) {
        return n == 1 ? box.center()(axis)
                      : box.min(axis) + span(axis) * static_cast<double>(i) / (n - 1);
    };
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                pts.emplace_back(coord(ix, 0), coord(iy, 1), coord(iz, 2));
    return pts;
}

inline bool same_line(const ClosestApproach& ca, double gap_tol) {
    return ca.parallel && ca.gap < gap_tol;
}

}  // namespace detail

/// Samples the regular n^3 grid, records unit/straightness defects, clips
/// each sampled line to the box enlarged 1.5x about its center, and tests
/// all pairs of distinct lines for closest approach. Intersections are
/// flagged only when both closest points lie inside the enlarged box.
/// Evaluation failures at grid points are recorded per point, not fatal.
inline AuditReport fibration_audit(const VectorFieldSpec& field, const Box& box,
                                   int n_per_axis,
                                   const AuditTolerances& tol = AuditTolerances{}) {
    if (n_per_axis < 2) throw Error("fibration_audit: need at least 2 samples per axis");
    for (int i = 0; i < 3; ++i)
        if (!(box.min(i) < box.max(i)))
            throw Error("fibration_audit: box must satisfy min < max per axis");

    AuditReport report;
    report.grid_dims = {n_per_axis, n_per_axis, n_per_axis};
    report.box = box;
    report.tolerances = tol;

    Box enlarged = box.scaled(1.5);
    std::vector<detail::GridSample> samples;
    auto pts = detail::grid_points(box, n_per_axis);
    samples.reserve(pts.size());

    for (std::size_t k = 0; k < pts.size(); ++k) {
        detail::GridSample s;
        s.index = static_cast<int>(k);
        s.p = pts[k];
        try {
            s.jet = evaluate_jet(field, s.p);
            double norm = s.jet.value.norm();
            if (norm == 0.0) throw DomainError("field vanishes at grid point");
            s.line = Line{s.p, s.jet.value / norm};
            s.unit_defect = std::abs(norm - 1.0);
            s.straightness = straightness_defect_from_jet(s.jet);
            s.contact = contact_defect_from_jet(s.jet);
            s.rank = rank_from_jacobian(s.jet.jacobian, tol.rank).rank;
            auto clip = clip_line_to_box(s.line, enlarged);
            s.tlo = clip ? clip->first : 0.0;
            s.thi = clip ? clip->second : 0.0;
        } catch (const DomainError& err) {
            report.point_errors.push_back({s.index, err.what()});
            continue;
        }
        samples.push_back(std::move(s));
    }

    bool first = true;
    for (const auto& s : samples) {
        report.unit_defect_max = std::max(report.unit_defect_max, s.unit_defect);
        report.straightness_defect_max =
            std::max(report.straightness_defect_max, s.straightness);
        report.rank_histogram[static_cast<std::size_t>(std::min(s.rank, 3))]++;
        if (first) {
            report.contact_defect_min = report.contact_defect_max = s.contact;
            first = false;
        } else {
            report.contact_defect_min = std::min(report.contact_defect_min, s.contact);
            report.contact_defect_max = std::max(report.contact_defect_max, s.contact);
        }
    }

    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const auto& a = samples[i];
            const auto& b = samples[j];
            ClosestApproach ca = lines_closest_approach(a.line, b.line);
            if (detail::same_line(ca, tol.intersection_gap)) continue;
            double angle = line_angle(a.line.direction, b.line.direction);
            if (angle < tol.angle)
                report.parallel_pairs.push_back({a.index, b.index, angle});
            if (!ca.parallel && ca.gap < tol.intersection_gap && ca.t1 >= a.tlo &&
                ca.t1 <= a.thi && ca.t2 >= b.tlo && ca.t2 <= b.thi)
                report.intersections.push_back({a.index, b.index, ca.t1, ca.t2, ca.gap});
        }
    }

    report.is_fibration_on_box = report.point_errors.empty() &&
                                 report.unit_defect_max <= tol.unit &&
                                 report.straightness_defect_max <= tol.straightness &&
                                 report.intersections.empty();
    report.zero_set_detected = samples.empty() ||
                               (report.contact_defect_min <= tol.contact &&
                                report.contact_defect_max >= -tol.contact);
    report.is_contact_on_box = !samples.empty() && !report.zero_set_detected;

    const auto& h = report.rank_histogram;
    long total = h[0] + h[1] + h[2] + h[3];
    if (total > 0 && h[0] == total)
        report.rank_profile = RankProfile::Constant0;
    else if (total > 0 && h[1] == total)
        report.rank_profile = RankProfile::Constant1;
    else if (total > 0 && h[2] == total)
        report.rank_profile = RankProfile::Constant2;
    else
        report.rank_profile = RankProfile::Mixed;

    return report;
}

/// All grid-point pairs lying on distinct lines whose directions are within
/// `angle_tol` of parallel (as unoriented lines). "Distinct" uses the same
/// test as the audit: parallel directions plus inter-line gap below the
/// intersection tolerance means one line sampled twice.
inline std::vector<ParallelRecord> parallel_pairs(const VectorFieldSpec& field,
                                                  const Box& box, int n_per_axis,
                                                  double angle_tol,
                                                  double gap_tol = 1e-7) {
    if (n_per_axis < 2) throw Error("parallel_pairs: need at least 2 samples per axis");
    auto pts = detail::grid_points(box, n_per_axis);
    std::vector<std::pair<int, Line>> lines;
    lines.reserve(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        try {
            lines.emplace_back(static_cast<int>(k), line_through(field, pts[k]));
        } catch (const DomainError&) {
            continue;
        }
    }
    std::vector<ParallelRecord> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            ClosestApproach ca = lines_closest_approach(lines[i].second, lines[j].second);
            if (detail::same_line(ca, gap_tol)) continue;
            double angle = line_angle(lines[i].second.direction, lines[j].second.direction);
            if (angle < angle_tol)
                out.push_back({lines[i].first, lines[j].first, angle});
        }
    }
    return out;
}

}  // namespace linefib
