#pragma once

#include <cmath>
#include <type_traits>

#include <Eigen/Dense>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace pdcert {

/// Exact rational scalar. Every finite double converts to it without rounding.
using Rational = boost::multiprecision::mpq_rational;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative band around zero inside which floating-point predicates are
/// re-decided in exact rational arithmetic.
inline constexpr double kGeometricEpsilon = 1e-12;

template <typename Scalar>
Scalar magnitude(const Scalar& x)
{
    return x < Scalar(0) ? Scalar(-x) : x;
}

template <typename Scalar>
Scalar positive_part(const Scalar& x)
{
    return x > Scalar(0) ? x : Scalar(0);
}

template <typename Scalar>
int sign_of(const Scalar& x)
{
    return (x > Scalar(0)) - (x < Scalar(0));
}

/// Certified sign of a margin expression.
///
/// `margin` is a generic callable taking a scalar tag (double or Rational)
/// and returning the margin evaluated in that scalar type. The double result
/// is trusted when it clears `kGeometricEpsilon * scale`; otherwise the
/// expression is re-evaluated exactly over the rationals. `scale` must bound
/// the magnitudes of the terms entering the margin.
template <typename Fn>
int certified_sign(Fn&& margin, double scale)
{
    const double approx = margin(double{});
    if (std::isfinite(approx) && std::abs(approx) > kGeometricEpsilon * scale) {
        return approx > 0.0 ? 1 : -1;
    }
    return sign_of(margin(Rational{}));
}

} // namespace pdcert
