#pragma once

#include <Eigen/Geometry>
#include <random>
#include <vector>

#include <linefib/field.hpp>
#include <linefib/geometry.hpp>

namespace testutil {

using linefib::Mat3;
using linefib::Point3;
using linefib::Vec3;
using linefib::VectorFieldSpec;

/// Central finite differences of the (normalized, if flagged) field; the
/// independent oracle for every dual-number Jacobian in the suite.
inline Mat3 fd_jacobian(const VectorFieldSpec& f, const Point3& p, double h = 1e-5) {
    Mat3 J;
    for (int j = 0; j < 3; ++j) {
        Point3 dp = Point3::Zero();
        dp(j) = h;
        Vec3 plus = linefib::evaluate(f, p + dp);
        Vec3 minus = linefib::evaluate(f, p - dp);
        J.col(j) = (plus - minus) / (2.0 * h);
    }
    return J;
}

inline Vec3 fd_curl(const VectorFieldSpec& f, const Point3& p, double h = 1e-5) {
    Mat3 J = fd_jacobian(f, p, h);
    return Vec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
}

inline std::vector<Point3> random_points(unsigned seed, int count, double lo = -2.0,
                                         double hi = 2.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double x = u(rng), y = u(rng), z = u(rng);
        pts.emplace_back(x, y, z);
    }
    return pts;
}

/// One fixed rotation, used wherever an invariance test needs "a rigid
/// rotation of coordinates".
inline Mat3 fixed_rotation() {
    return Eigen::AngleAxisd(0.73, Vec3(1.0, 2.0, 3.0).normalized()).toRotationMatrix();
}

}  // namespace testutil
