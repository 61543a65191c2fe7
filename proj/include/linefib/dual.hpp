#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace linefib {

/// Forward-mode dual scalar carrying `N` tangent slots alongside the value.
/// Arithmetic propagates first derivatives exactly (chain/product/quotient
/// rules evaluated in floating point, no truncation error).
///
/// `T` may itself be a Dual; nesting raises the derivative order, e.g.
/// `Dual<Dual<double, 1>, 1>` yields second derivatives of a one-variable
/// function.
template <typename T, std::size_t N>
struct Dual {
    T value{};
    std::array<T, N> partials{};

    Dual() = default;
    Dual(double s) : value(s) {}  // NOLINT: implicit constant lift

    template <typename U = T>
        requires(!std::is_same_v<U, double>)
    Dual(T v) : value(std::move(v)) {}  // NOLINT

    Dual(T v, std::array<T, N> d) : value(std::move(v)), partials(std::move(d)) {}

    /// Seeds slot `slot` with tangent 1; use for the variable being
    /// differentiated.
    static Dual variable(double v, std::size_t slot) {
        Dual d(v);
        d.partials[slot] = 1.0;
        return d;
    }
};

using Dual1 = Dual<double, 1>;
using Dual3 = Dual<double, 3>;   // gradient w.r.t. (x, y, z)
using Dual2x1 = Dual<Dual1, 1>;  // second order in one variable

/// Innermost double of a (possibly nested) dual.
inline double scalar_value(double x) { return x; }

template <typename T, std::size_t N>
double scalar_value(const Dual<T, N>& d) {
    return scalar_value(d.value);
}

inline bool all_zero(double x) { return x == 0.0; }

template <typename T, std::size_t N>
bool all_zero(const Dual<T, N>& d) {
    if (!all_zero(d.value)) return false;
    for (const T& p : d.partials)
        if (!all_zero(p)) return false;
    return true;
}

/// True when the argument carries no derivative information (a constant
/// from the point of view of every seeded variable).
inline bool is_constant(double) { return true; }

template <typename T, std::size_t N>
bool is_constant(const Dual<T, N>& d) {
    if (!is_constant(d.value)) return false;
    for (const T& p : d.partials)
        if (!all_zero(p)) return false;
    return true;
}

// ---- arithmetic -----------------------------------------------------------

template <typename T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a) {
    Dual<T, N> r(-a.value);
    for (std::size_t i = 0; i < N; ++i) r.partials[i] = -a.partials[i];
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r(a.value + b.value);
    for (std::size_t i = 0; i < N; ++i) r.partials[i] = a.partials[i] + b.partials[i];
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r(a.value - b.value);
    for (std::size_t i = 0; i < N; ++i) r.partials[i] = a.partials[i] - b.partials[i];
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r(a.value * b.value);
    for (std::size_t i = 0; i < N; ++i)
        r.partials[i] = a.partials[i] * b.value + a.value * b.partials[i];
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r(a.value / b.value);
    T denom = b.value * b.value;
    for (std::size_t i = 0; i < N; ++i)
        r.partials[i] = (a.partials[i] * b.value - a.value * b.partials[i]) / denom;
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, double s) {
    return a + Dual<T, N>(s);
}
template <typename T, std::size_t N>
Dual<T, N> operator+(double s, const Dual<T, N>& a) {
    return Dual<T, N>(s) + a;
}
template <typename T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, double s) {
    return a - Dual<T, N>(s);
}
template <typename T, std::size_t N>
Dual<T, N> operator-(double s, const Dual<T, N>& a) {
    return Dual<T, N>(s) - a;
}
template <typename T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, double s) {
    return a * Dual<T, N>(s);
}
template <typename T, std::size_t N>
Dual<T, N> operator*(double s, const Dual<T, N>& a) {
    return Dual<T, N>(s) * a;
}
template <typename T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, double s) {
    return a / Dual<T, N>(s);
}
template <typename T, std::size_t N>
Dual<T, N> operator/(double s, const Dual<T, N>& a) {
    return Dual<T, N>(s) / a;
}

// ---- elementary functions -------------------------------------------------

namespace detail {

// f(a) with dval = f'(a.value): plain chain rule.
template <typename T, std::size_t N>
Dual<T, N> chain(const Dual<T, N>& a, T val, T dval) {
    Dual<T, N> r(std::move(val));
    for (std::size_t i = 0; i < N; ++i) r.partials[i] = dval * a.partials[i];
    return r;
}

}  // namespace detail

template <typename T, std::size_t N>
Dual<T, N> sin(const Dual<T, N>& a) {
    using std::cos;
    using std::sin;
    return detail::chain(a, T(sin(a.value)), T(cos(a.value)));
}

template <typename T, std::size_t N>
Dual<T, N> cos(const Dual<T, N>& a) {
    using std::cos;
    using std::sin;
    return detail::chain(a, T(cos(a.value)), T(-sin(a.value)));
}

template <typename T, std::size_t N>
Dual<T, N> tan(const Dual<T, N>& a) {
    using std::tan;
    T v = tan(a.value);
    return detail::chain(a, v, T(1.0 + v * v));
}

template <typename T, std::size_t N>
Dual<T, N> atan(const Dual<T, N>& a) {
    using std::atan;
    return detail::chain(a, T(atan(a.value)), T(1.0 / (1.0 + a.value * a.value)));
}

template <typename T, std::size_t N>
Dual<T, N> exp(const Dual<T, N>& a) {
    using std::exp;
    T v = exp(a.value);
    return detail::chain(a, v, v);
}

template <typename T, std::size_t N>
Dual<T, N> log(const Dual<T, N>& a) {
    using std::log;
    return detail::chain(a, T(log(a.value)), T(1.0 / a.value));
}

template <typename T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
    using std::sqrt;
    T v = sqrt(a.value);
    return detail::chain(a, v, T(0.5 / v));
}

template <typename T, std::size_t N>
Dual<T, N> abs(const Dual<T, N>& a) {
    using std::abs;
    double sv = scalar_value(a.value);
    double sign = sv > 0.0 ? 1.0 : (sv < 0.0 ? -1.0 : 0.0);
    return detail::chain(a, T(abs(a.value)), T(sign));
}

template <typename T, std::size_t N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
    using std::atan2;
    Dual<T, N> r(T(atan2(y.value, x.value)));
    T denom = x.value * x.value + y.value * y.value;
    for (std::size_t i = 0; i < N; ++i)
        r.partials[i] = (x.value * y.partials[i] - y.value * x.partials[i]) / denom;
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> pow(const Dual<T, N>& a, const Dual<T, N>& b) {
    using std::log;
    using std::pow;
    Dual<T, N> r(T(pow(a.value, b.value)));
    if (is_constant(b)) {
        // d(a^c) = c * a^(c-1) * da; valid for negative bases with integer c.
        if (scalar_value(b.value) == 0.0) return r;
        T f = b.value * pow(a.value, b.value - 1.0);
        for (std::size_t i = 0; i < N; ++i) r.partials[i] = f * a.partials[i];
        return r;
    }
    // General exponent: a^b = exp(b log a), needs a > 0 (NaN otherwise,
    // surfaced by the caller's finiteness check).
    T la = log(a.value);
    for (std::size_t i = 0; i < N; ++i)
        r.partials[i] = r.value * (b.partials[i] * la + b.value * a.partials[i] / a.value);
    return r;
}

template <typename T, std::size_t N>
Dual<T, N> pow(const Dual<T, N>& a, double e) {
    return pow(a, Dual<T, N>(e));
}

}  // namespace linefib
