#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pdcert/geometry.hpp"

namespace pdcert {

/// Gauss–Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rules are computed once per order and cached; thread-safe.
const GaussLegendreRule& gauss_legendre(int order);

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    double magnitude = 0.0;  ///< same rule applied to |f|
    std::uint64_t nodes = 0;
};

/// Largest number of integrand evaluations a single integral may use.
inline constexpr std::uint64_t kQuadratureNodeCap = 10'000'000;

double integrate_interval(const std::function<double(double)>& f, double a, double b, int order);

/// ∫ over the ball of radius R in R^n of g(|x|), as n ω_n ∫_0^R g(r) r^{n-1} dr.
/// The radial interval is split at `breakpoints` (kinks of g); the order is
/// doubled until two successive estimates agree to `tol` relative.
QuadratureResult integrate_radial(const std::function<double(double)>& g, double radius, int n, double tol,
                                  const std::vector<double>& breakpoints = {});

/// Tensor Gauss–Legendre over a Ball (hyperspherical coordinates), Box, or
/// CrossPolytope (collapsed simplex coordinates per orthant), with order
/// doubling until successive estimates agree to `tol` relative.
/// Throws QuadratureFailure when the node cap is reached first.
QuadratureResult integrate_region(const std::function<double(const Eigen::VectorXd&)>& f, const ConvexBody& region,
                                  double tol, std::uint64_t node_cap = kQuadratureNodeCap);

/// One fixed-order tensor rule over the region (no error estimate).
QuadratureResult integrate_region_fixed(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const ConvexBody& region, int order);

} // namespace pdcert
