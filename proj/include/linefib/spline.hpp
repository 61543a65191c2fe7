#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "linefib/dual.hpp"
#include "linefib/errors.hpp"

namespace linefib {

/// Natural cubic spline on a strictly increasing knot grid (second
/// derivative zero at both ends). Evaluation is templated on the scalar
/// type so derivative information propagates through dual numbers; the
/// interval is selected by the scalar value of the argument, and the end
/// cubics extend beyond the grid.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, const std::vector<double>& ys) : x_(std::move(xs)) {
        std::size_t n = x_.size();
        if (n < 3 || ys.size() != n)
            throw Error("CubicSpline: need at least 3 matching knots");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw Error("CubicSpline: knots must increase");

        // Solve the tridiagonal system for interior second derivatives.
        std::vector<double> m(n, 0.0), diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = x_[i] - x_[i - 1];
            double h1 = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            double w = (x_[i] - x_[i - 1]) / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            if (i == 1) break;
        }

        a_.resize(n - 1);
        b_.resize(n - 1);
        c_.resize(n - 1);
        d_.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double h = x_[i + 1] - x_[i];
            a_[i] = ys[i];
            c_[i] = m[i] / 2.0;
            d_[i] = (m[i + 1] - m[i]) / (6.0 * h);
            b_[i] = (ys[i + 1] - ys[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        }
    }

    template <typename S>
    S operator()(const S& x) const {
        std::size_t i = interval(scalar_value(x));
        S t = x - x_[i];
        return ((S(d_[i]) * t + c_[i]) * t + b_[i]) * t + a_[i];
    }

    template <typename S>
    S derivative(const S& x) const {
        std::size_t i = interval(scalar_value(x));
        S t = x - x_[i];
        return (S(3.0 * d_[i]) * t + 2.0 * c_[i]) * t + b_[i];
    }

    double min_knot() const { return x_.front(); }
    double max_knot() const { return x_.back(); }

private:
    std::size_t interval(double v) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), v);
        if (it == x_.begin()) return 0;
        std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_;
    std::vector<double> a_, b_, c_, d_;  // piecewise a + b t + c t^2 + d t^3
};

}  // namespace linefib
