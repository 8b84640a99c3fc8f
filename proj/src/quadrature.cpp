#include "pdcert/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace pdcert {

namespace {

constexpr int kMaxTensorOrder = 4096;

GaussLegendreRule compute_rule(int order)
{
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return rule;
}

/// Calls visit(u, weight) for every node of the tensor rule on [0,1]^n.
template <typename Visit>
void tensor_unit_cube(int n, int order, Visit&& visit)
{
    const auto& rule = gauss_legendre(order);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd u(n);
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
            u(i) = 0.5 * (rule.nodes[j] + 1.0);
            w *= 0.5 * rule.weights[j];
        }
        visit(u, w);
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < order) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
        if (i < 0) break;
    }
}

std::uint64_t nodes_per_level(const ConvexBody& region, int order)
{
    std::uint64_t count = 1;
    for (int i = 0; i < region.dim(); ++i) count *= static_cast<std::uint64_t>(order);
    if (region.is<CrossPolytope>()) count <<= region.dim();
    return count;
}

} // namespace

const GaussLegendreRule& gauss_legendre(int order)
{
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    if (order < 1) throw Error(ErrorCode::BadParameters, "quadrature order must be positive");
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate_interval(const std::function<double(double)>& f, double a, double b, int order)
{
    const auto& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

QuadratureResult integrate_radial(const std::function<double(double)>& g, double radius, int n, double tol,
                                  const std::vector<double>& breakpoints)
{
    std::vector<double> cuts{0.0};
    for (double b : breakpoints) {
        if (b > 0.0 && b < radius) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(radius);
    const double shell = n * unit_ball_volume(n);
    auto integrand = [&](double r) { return g(r) * std::pow(r, n - 1); };

    QuadratureResult result;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int order = 8; order <= 4096; order *= 2) {
        double total = 0.0;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) total += integrate_interval(integrand, cuts[s], cuts[s + 1], order);
        total *= shell;
        result.nodes += static_cast<std::uint64_t>(order) * (cuts.size() - 1);
        if (!std::isnan(previous)) {
            const double err = std::abs(total - previous);
            if (err <= tol * std::abs(total)) {
                result.value = total;
                result.abs_error = err;
                return result;
            }
        }
        previous = total;
    }
    throw Error(ErrorCode::QuadratureFailure, "radial quadrature did not reach the requested tolerance");
}

QuadratureResult integrate_region_fixed(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const ConvexBody& region, int order)
{
    const int n = region.dim();
    QuadratureResult result;
    Eigen::VectorXd x(n);
    double sum = 0.0;
    double magnitude = 0.0;
    auto add = [&](double term) {
        sum += term;
        magnitude += std::abs(term);
    };

    if (const auto* box = std::get_if<Box>(&region.kind())) {
        const Eigen::VectorXd& w = box->half_widths;
        const double jac = (2.0 * w.array()).prod();
        tensor_unit_cube(n, order, [&](const Eigen::VectorXd& u, double weight) {
            x = (2.0 * u.array() - 1.0) * w.array();
            add(weight * jac * f(x));
        });
    } else if (const auto* ball = std::get_if<Ball>(&region.kind())) {
        const double radius = ball->radius;
        if (n == 1) {
            tensor_unit_cube(1, order, [&](const Eigen::VectorXd& u, double weight) {
                x(0) = radius * (2.0 * u(0) - 1.0);
                add(weight * f(x) * 2.0 * radius);
            });
        } else {
            // u(0) -> r, u(1..n-2) -> polar angles in [0, π], u(n-1) -> azimuth in [0, 2π].
            tensor_unit_cube(n, order, [&](const Eigen::VectorXd& u, double weight) {
                const double r = radius * u(0);
                double jac = radius * std::pow(r, n - 1);
                double sin_product = 1.0;
                for (int k = 1; k <= n - 2; ++k) {
                    const double theta = std::numbers::pi * u(k);
                    x(k - 1) = r * sin_product * std::cos(theta);
                    jac *= std::numbers::pi * std::pow(std::sin(theta), n - 1 - k);
                    sin_product *= std::sin(theta);
                }
                const double phi = 2.0 * std::numbers::pi * u(n - 1);
                x(n - 2) = r * sin_product * std::cos(phi);
                x(n - 1) = r * sin_product * std::sin(phi);
                jac *= 2.0 * std::numbers::pi;
                add(weight * jac * f(x));
            });
        }
    } else if (const auto* cross = std::get_if<CrossPolytope>(&region.kind())) {
        const double radius = cross->radius;
        Eigen::VectorXd y(n);
        for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << n); ++signs) {
            tensor_unit_cube(n, order, [&](const Eigen::VectorXd& u, double weight) {
                double remaining = radius;
                double jac = 1.0;
                for (int i = 0; i < n; ++i) {
                    y(i) = remaining * u(i);
                    jac *= remaining;
                    remaining -= y(i);
                }
                for (int i = 0; i < n; ++i) x(i) = (signs >> i & 1U) ? -y(i) : y(i);
                add(weight * jac * f(x));
            });
        }
    } else {
        throw Error(ErrorCode::UnsupportedKind, "no quadrature rule for Minkowski-sum regions");
    }
    result.value = sum;
    result.magnitude = magnitude;
    result.nodes = nodes_per_level(region, order);
    return result;
}

QuadratureResult integrate_region(const std::function<double(const Eigen::VectorXd&)>& f, const ConvexBody& region,
                                  double tol, std::uint64_t node_cap)
{
    QuadratureResult result;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int order = 8; order <= kMaxTensorOrder; order *= 2) {
        if (result.nodes + nodes_per_level(region, order) > node_cap) break;
        const QuadratureResult level = integrate_region_fixed(f, region, order);
        result.nodes += level.nodes;
        if (!std::isnan(previous)) {
            const double err = std::abs(level.value - previous);
            // Relative to ∫|f|, so integrals that cancel to zero still converge.
            if (err <= tol * std::max(std::abs(level.value), level.magnitude)) {
                result.value = level.value;
                result.magnitude = level.magnitude;
                result.abs_error = err;
                return result;
            }
        }
        previous = level.value;
    }
    throw Error(ErrorCode::QuadratureFailure,
                "tolerance not reached within " + std::to_string(node_cap) + " quadrature nodes or order " +
                    std::to_string(kMaxTensorOrder));
}

} // namespace pdcert
