#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "linefib/dual.hpp"
#include "linefib/errors.hpp"
#include "linefib/expr.hpp"
#include "linefib/geometry.hpp"

namespace linefib {

/// A vector field on R^3 given by three closed-form component expressions.
/// With `normalize` set, every evaluation divides by the pointwise norm
/// first, and derivatives are taken of the normalized field (the quotient
/// rule is propagated through the dual numbers, not applied post hoc).
struct VectorFieldSpec {
    Expression v1, v2, v3;
    bool normalize = false;
};

inline VectorFieldSpec parse_field(std::string_view c1, std::string_view c2,
                                   std::string_view c3, bool normalize = false) {
    return {parse_expression(c1), parse_expression(c2), parse_expression(c3), normalize};
}

/// Value and Jacobian of the field at a point. jacobian(i, j) = dV_i/dx_j.
struct Jet {
    Vec3 value;
    Mat3 jacobian;
};

/// Evaluate the three components (normalizing if requested) over any scalar
/// type: double for plain values, Dual3 for the jet, nested duals for
/// higher-order uses.
template <typename S>
std::array<S, 3> eval_field(const VectorFieldSpec& f, const std::array<S, 3>& at) {
    using std::sqrt;
    std::array<S, 3> v{f.v1.eval<S>(at), f.v2.eval<S>(at), f.v3.eval<S>(at)};
    if (f.normalize) {
        S n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if (scalar_value(n2) <= 0.0)
            throw DomainError("cannot normalize: field vanishes at the evaluation point");
        S n = sqrt(n2);
        v = {v[0] / n, v[1] / n, v[2] / n};
    }
    return v;
}

inline Vec3 evaluate(const VectorFieldSpec& f, const Point3& p) {
    auto v = eval_field<double>(f, {p.x(), p.y(), p.z()});
    for (double c : v)
        if (!std::isfinite(c)) throw DomainError("field evaluation produced a non-finite value");
    return Vec3(v[0], v[1], v[2]);
}

inline Jet evaluate_jet(const VectorFieldSpec& f, const Point3& p) {
    std::array<Dual3, 3> at{Dual3::variable(p.x(), 0), Dual3::variable(p.y(), 1),
                            Dual3::variable(p.z(), 2)};
    auto v = eval_field<Dual3>(f, at);
    Jet jet;
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(v[i].value))
            throw DomainError("field evaluation produced a non-finite value");
        jet.value(i) = v[i].value;
        for (int j = 0; j < 3; ++j) {
            if (!std::isfinite(v[i].partials[j]))
                throw DomainError("field differentiation produced a non-finite value");
            jet.jacobian(i, j) = v[i].partials[j];
        }
    }
    return jet;
}

/// The field expressed in rotated coordinates: W(p) = R V(R^T p). Component
/// expressions are rebuilt by substituting the rotated coordinates, so the
/// result is an ordinary VectorFieldSpec.
inline VectorFieldSpec rotated(const VectorFieldSpec& f, const Mat3& R) {
    using E = Expression;
    auto lin = [&](int col) {
        // (R^T p)_col = sum_k R(k, col) p_k
        E s = E::mul(E::number(R(0, col)), E::variable(0));
        s = E::add(s, E::mul(E::number(R(1, col)), E::variable(1)));
        s = E::add(s, E::mul(E::number(R(2, col)), E::variable(2)));
        return s;
    };
    E sx = lin(0), sy = lin(1), sz = lin(2);
    std::array<E, 3> comp{f.v1.substituted(sx, sy, sz), f.v2.substituted(sx, sy, sz),
                          f.v3.substituted(sx, sy, sz)};
    auto row = [&](int i) {
        E s = E::mul(E::number(R(i, 0)), comp[0]);
        s = E::add(s, E::mul(E::number(R(i, 1)), comp[1]));
        s = E::add(s, E::mul(E::number(R(i, 2)), comp[2]));
        return s;
    };
    return {row(0), row(1), row(2), f.normalize};
}

}  // namespace linefib
