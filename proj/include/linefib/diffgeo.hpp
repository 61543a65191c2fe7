#pragma once

#include <Eigen/SVD>
#include <array>
#include <cmath>

#include "linefib/errors.hpp"
#include "linefib/field.hpp"
#include "linefib/geometry.hpp"

namespace linefib {

inline constexpr double kDefaultRankTol = 1e-8;

/// curl V assembled from the Jacobian: (dV3/dy - dV2/dz, dV1/dz - dV3/dx,
/// dV2/dx - dV1/dy), right-handed coordinates.
inline Vec3 curl_from_jacobian(const Mat3& J) {
    return Vec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
}

inline Vec3 curl(const VectorFieldSpec& f, const Point3& p) {
    return curl_from_jacobian(evaluate_jet(f, p).jacobian);
}

/// <V, curl V>. The plane field orthogonal to V is contact near p exactly
/// when this is nonzero; it vanishes identically for foliations.
inline double contact_defect_from_jet(const Jet& jet) {
    return jet.value.dot(curl_from_jacobian(jet.jacobian));
}

inline double contact_defect(const VectorFieldSpec& f, const Point3& p) {
    return contact_defect_from_jet(evaluate_jet(f, p));
}

/// Coefficient of dx^dy^dz in alpha ^ d(alpha) for alpha = V1 dx + V2 dy +
/// V3 dz, expanded directly from the definition:
///
///   d(alpha) = sum_{j,k} dV_k/dx_j dx_j ^ dx_k,
///   alpha ^ d(alpha) = sum_{i,j,k} V_i dV_k/dx_j dx_i ^ dx_j ^ dx_k,
///
/// so the coefficient is the Levi-Civita contraction
/// sum_{perm (i,j,k)} sign * V_i * dV_k/dx_j. For any C^1 field this equals
/// <V, curl V>: grouping the six permutations by i gives
/// V_i (dV_k/dx_j - dV_j/dx_k) with (i,j,k) cyclic, which is V . curl V
/// componentwise. The identity needs no unit-length assumption; it is the
/// alternative route used to cross-check contact_defect.
inline double alpha_wedge_dalpha_coeff_from_jet(const Jet& jet) {
    const Vec3& a = jet.value;
    const Mat3& D = jet.jacobian;  // D(k, j) = dV_k/dx_j
    static constexpr int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                       {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
    static constexpr double sign[6] = {1, 1, 1, -1, -1, -1};
    double coeff = 0.0;
    for (int s = 0; s < 6; ++s) {
        int i = perm[s][0], j = perm[s][1], k = perm[s][2];
        coeff += sign[s] * a(i) * D(k, j);
    }
    return coeff;
}

inline double alpha_wedge_dalpha_coeff(const VectorFieldSpec& f, const Point3& p) {
    return alpha_wedge_dalpha_coeff_from_jet(evaluate_jet(f, p));
}

/// Rank of dV by singular-value thresholding. The threshold is relative to
/// max(sigma_1, 1); dual-number Jacobians are exact to rounding, so the
/// default tolerance only absorbs float noise.
struct RankClass {
    int rank;
    std::array<double, 3> singular_values;  // sorted descending
    double tolerance;
};

// GCC's -Wmaybe-uninitialized cannot see through JacobiSVD's storage; the
// 3x3 solve always fills all three singular values.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
inline RankClass rank_from_jacobian(const Mat3& J, double tol = kDefaultRankTol) {
    Eigen::JacobiSVD<Mat3> svd(J);
    const auto& sv = svd.singularValues();
    double thresh = tol * std::max(sv(0), 1.0);
    RankClass rc;
    rc.singular_values = {sv(0), sv(1), sv(2)};
    rc.tolerance = tol;
    rc.rank = 0;
    for (int i = 0; i < 3; ++i)
        if (sv(i) > thresh) ++rc.rank;
    return rc;
}
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

inline RankClass rank_dV(const VectorFieldSpec& f, const Point3& p,
                         double tol = kDefaultRankTol) {
    return rank_from_jacobian(evaluate_jet(f, p).jacobian, tol);
}

/// Orthonormal frame of the plane through `base` orthogonal to V(base).
/// {e1, e2, normal} is right-handed; e1 = normalize(a x V) with a the first
/// of (0,0,1), (0,1,0) whose direction is not within ~25 degrees of V, and
/// e2 = normal x e1. Deterministic in the input.
struct PlaneFrame {
    Point3 base;
    Vec3 normal, e1, e2;
};

inline PlaneFrame xi_frame(const Point3& p, const Vec3& v) {
    double n = v.norm();
    if (n == 0.0) throw DomainError("xi_frame: zero vector has no orthogonal plane");
    Vec3 unit = v / n;
    Vec3 a(0, 0, 1);
    if (std::abs(a.dot(unit)) >= 0.9) a = Vec3(0, 1, 0);
    PlaneFrame f;
    f.base = p;
    f.normal = unit;
    f.e1 = a.cross(unit).normalized();
    f.e2 = unit.cross(f.e1);
    return f;
}

inline PlaneFrame xi_frame(const VectorFieldSpec& field, const Point3& p) {
    return xi_frame(p, evaluate(field, p));
}

}  // namespace linefib
