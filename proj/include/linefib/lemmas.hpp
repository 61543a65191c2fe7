#pragma once

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <vector>

#include "linefib/diffgeo.hpp"
#include "linefib/errors.hpp"
#include "linefib/field.hpp"
#include "linefib/geometry.hpp"

namespace linefib {

inline constexpr double kWindingDegeneracyTol = 1e-9;

/// Winding of the projected field around a circle in the plane orthogonal
/// to V(p0). `degenerate` is set when |W| drops below the degeneracy
/// threshold somewhere on the circle, in which case `winding` carries no
/// meaning.
struct WindingResult {
    int winding = 0;
    double min_abs_w = 0.0;
    int samples_used = 0;
    bool degenerate = false;
};

/// Samples V on the circle of radius `epsilon` about p0 inside the plane
/// orthogonal to V(p0), projects out the V(p0) component, and accumulates
/// the angle increments of the projected vector in the (e1, e2) frame of
/// xi_frame (so "positive" means counterclockwise seen from the tip of
/// V(p0)). Each increment is taken in (-pi, pi]; any increment above pi/2
/// triggers resampling at twice the density, up to 3 times, before the run
/// is abandoned as under-sampled.
inline WindingResult winding_number(const VectorFieldSpec& field, const Point3& p0,
                                    double epsilon, int n_samples = 64) {
    if (epsilon <= 0.0) throw Error("winding_number: epsilon must be positive");
    if (n_samples < 16) throw Error("winding_number: need at least 16 samples");

    PlaneFrame frame = xi_frame(field, p0);
    const Vec3& v0 = frame.normal;

    int m = n_samples;
    for (int attempt = 0; attempt < 4; ++attempt, m *= 2) {
        std::vector<double> angles(static_cast<std::size_t>(m));
        double min_abs = std::numeric_limits<double>::infinity();
        bool degenerate = false;
        for (int k = 0; k < m; ++k) {
            double phi = 2.0 * std::numbers::pi * k / m;
            Point3 p = p0 + epsilon * (std::cos(phi) * frame.e1 + std::sin(phi) * frame.e2);
            Vec3 v = evaluate(field, p);
            Vec3 w = v - v.dot(v0) * v0;
            double wx = w.dot(frame.e1), wy = w.dot(frame.e2);
            double norm = std::hypot(wx, wy);
            min_abs = std::min(min_abs, norm);
            if (norm < kWindingDegeneracyTol) {
                degenerate = true;
                break;
            }
            angles[static_cast<std::size_t>(k)] = std::atan2(wy, wx);
        }
        if (degenerate) return {0, min_abs, m, true};

        double total = 0.0;
        bool under_sampled = false;
        for (int k = 0; k < m; ++k) {
            double d = angles[static_cast<std::size_t>((k + 1) % m)] -
                       angles[static_cast<std::size_t>(k)];
            while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
            while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
            if (std::abs(d) > std::numbers::pi / 2.0) {
                under_sampled = true;
                break;
            }
            total += d;
        }
        if (under_sampled) continue;
        WindingResult r;
        r.winding = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
        r.min_abs_w = min_abs;
        r.samples_used = m;
        r.degenerate = false;
        return r;
    }
    throw NumericalError("winding_number: under-sampled after retries");
}

/// Unit vector spanning ker dV ∩ ξ at a rank-1 point. With J = s1 u1 v1^T,
/// the kernel is the plane orthogonal to v1 and ξ the plane orthogonal to
/// V, so their intersection is spanned by v1 x V. The sign is fixed by
/// making the largest-magnitude component positive.
inline Vec3 kernel_line_field(const VectorFieldSpec& field, const Point3& p,
                              double tol = kDefaultRankTol) {
    Jet jet = evaluate_jet(field, p);
    RankClass rc = rank_from_jacobian(jet.jacobian, tol);
    if (rc.rank != 1)
        throw NumericalError("kernel_line_field: rank of dV is " + std::to_string(rc.rank) +
                             ", need 1 (kernel ∩ ξ is not a line)");
    Eigen::JacobiSVD<Mat3> svd(jet.jacobian, Eigen::ComputeFullV);
    Vec3 v1 = svd.matrixV().col(0);
    double vn = jet.value.norm();
    if (vn == 0.0) throw DomainError("kernel_line_field: field vanishes at p");
    Vec3 x = v1.cross(jet.value / vn);
    double xn = x.norm();
    if (xn < 1e-6)
        throw NumericalError("kernel_line_field: kernel ambiguity (row space nearly "
                             "parallel to the field direction)");
    x /= xn;
    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(x(i)) > std::abs(x(imax))) imax = i;
    if (x(imax) < 0.0) x = -x;
    return x;
}

/// Polyline trace of a flow, parameterized by time.
struct FlowCurve {
    std::vector<double> times;
    std::vector<Point3> points;  // same length as times
    double step = 0.0;
};

namespace detail {

inline Vec3 kernel_direction_continuous(const VectorFieldSpec& field, const Point3& p,
                                        const Vec3& reference, double tol) {
    Vec3 x = kernel_line_field(field, p, tol);
    return x.dot(reference) < 0.0 ? Vec3(-x) : x;
}

}  // namespace detail

/// Fixed-step RK4 integration of the kernel line field over [-t_max, t_max]
/// from p0. The lift of the line field is kept continuous along the
/// trajectory by aligning each evaluation with the previous direction; the
/// rank-1 precondition is checked at every stage evaluation.
inline FlowCurve flow_kernel_field(const VectorFieldSpec& field, const Point3& p0,
                                   double t_max, double step = 1e-3,
                                   double tol = kDefaultRankTol) {
    if (t_max <= 0.0 || step <= 0.0)
        throw Error("flow_kernel_field: t_max and step must be positive");
    int n = std::max(1, static_cast<int>(std::llround(t_max / step)));
    double h = t_max / n;

    Vec3 x0 = kernel_line_field(field, p0, tol);

    // Time reversal lives in the step sign; the lift of the line field stays
    // aligned with +X in both directions.
    auto integrate = [&](double dir) {
        std::vector<Point3> pts;
        pts.reserve(static_cast<std::size_t>(n));
        Point3 p = p0;
        Vec3 ref = x0;
        double hh = dir * h;
        for (int i = 0; i < n; ++i) {
            Vec3 k1 = detail::kernel_direction_continuous(field, p, ref, tol);
            Vec3 k2 = detail::kernel_direction_continuous(field, p + 0.5 * hh * k1, k1, tol);
            Vec3 k3 = detail::kernel_direction_continuous(field, p + 0.5 * hh * k2, k2, tol);
            Vec3 k4 = detail::kernel_direction_continuous(field, p + hh * k3, k3, tol);
            p = p + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ref = k4;
            pts.push_back(p);
        }
        return pts;
    };

    auto backward = integrate(-1.0);
    auto forward = integrate(+1.0);

    FlowCurve curve;
    curve.step = h;
    curve.times.reserve(2 * static_cast<std::size_t>(n) + 1);
    curve.points.reserve(2 * static_cast<std::size_t>(n) + 1);
    for (int i = n - 1; i >= 0; --i) {
        curve.times.push_back(-h * (i + 1));
        curve.points.push_back(backward[static_cast<std::size_t>(i)]);
    }
    curve.times.push_back(0.0);
    curve.points.push_back(p0);
    for (int i = 0; i < n; ++i) {
        curve.times.push_back(h * (i + 1));
        curve.points.push_back(forward[static_cast<std::size_t>(i)]);
    }
    return curve;
}

/// Projects the curve along v0 onto the plane through its start orthogonal
/// to v0, and measures how far the projected points stray from the straight
/// line through the first and last projected points, normalized by the
/// projected polyline length. A two-point curve is straight by definition.
inline double projected_straightness(const FlowCurve& curve, const Vec3& v0) {
    if (curve.points.size() < 2)
        throw Error("projected_straightness: need at least 2 points");
    if (curve.points.size() == 2) return 0.0;
    Vec3 n = v0.normalized();
    const Point3& start = curve.points.front();
    std::vector<Point3> proj;
    proj.reserve(curve.points.size());
    for (const Point3& p : curve.points) proj.push_back(p - (p - start).dot(n) * n);

    double length = 0.0;
    for (std::size_t i = 1; i < proj.size(); ++i) length += (proj[i] - proj[i - 1]).norm();
    if (length < 1e-9)
        throw NumericalError("projected_straightness: projection collapses to a point");

    Vec3 chord = proj.back() - proj.front();
    double max_dev = 0.0;
    if (chord.norm() < 1e-12) {
        for (const Point3& q : proj)
            max_dev = std::max(max_dev, (q - proj.front()).norm());
    } else {
        Vec3 u = chord.normalized();
        for (const Point3& q : proj) {
            Vec3 r = q - proj.front();
            max_dev = std::max(max_dev, (r - r.dot(u) * u).norm());
        }
    }
    return max_dev / length;
}

/// max_t ||V(curve(t)) - V(curve(0))||.
inline double constancy_along_flow(const VectorFieldSpec& field, const FlowCurve& curve) {
    if (curve.points.empty()) return 0.0;
    Vec3 v0 = evaluate(field, curve.points.front());
    double max_dev = 0.0;
    for (const Point3& p : curve.points)
        max_dev = std::max(max_dev, (evaluate(field, p) - v0).norm());
    return max_dev;
}

}  // namespace linefib
