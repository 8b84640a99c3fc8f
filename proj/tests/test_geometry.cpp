#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdcert/geometry.hpp"
#include "pdcert/random.hpp"

using namespace pdcert;
using doctest::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Eigen::VectorXd random_point(Engine& rng, int n, double spread)
{
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = uniform(rng, -spread, spread);
    return x;
}

/// Bodies with exact volume and membership in dimension n.
std::vector<ConvexBody> zoo(int n)
{
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = 0.5 + 0.25 * i;
    std::vector<ConvexBody> out{ConvexBody::ball(n, 1.3), ConvexBody::box(w), ConvexBody::cross_polytope(n, 0.7)};
    if (n <= 3) {
        out.push_back(minkowski_sum(ConvexBody::ball(n, 0.4), ConvexBody::box(w)));
        out.push_back(minkowski_sum(ConvexBody::ball(n, 0.4), ConvexBody::cross_polytope(n, 1.1)));
    }
    return out;
}

/// Distance from a 2D point to the diamond |x|+|y| <= r, from its four edges.
double diamond_distance(const Eigen::Vector2d& p, double r)
{
    if (std::abs(p(0)) + std::abs(p(1)) <= r) return 0.0;
    const Eigen::Vector2d corners[] = {{r, 0}, {0, r}, {-r, 0}, {0, -r}};
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d a = corners[i], b = corners[(i + 1) % 4];
        const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        best = std::min(best, (a + t * (b - a) - p).norm());
    }
    return best;
}

} // namespace

TEST_CASE("closed-form volumes of the primitives")
{
    CHECK(volume(ConvexBody::ball(2, 1.0)) == Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(volume(ConvexBody::box(vec({1, 1}))) == 4.0);
    CHECK(volume(ConvexBody::cross_polytope(2, 1.0)) == 2.0);
    CHECK(volume(ConvexBody::ball(3, 1.0)) == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
    CHECK(volume(ConvexBody::cross_polytope(3, 2.0)) == Approx(8.0 * 8.0 / 6.0).epsilon(1e-15));
    CHECK(volume(ConvexBody::cube(1, 1.0)) == 2.0);
}

TEST_CASE("Steiner volume of disk plus square agrees with Monte Carlo")
{
    const ConvexBody sum = minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::box(vec({1, 1})));
    // Square of side 2: area 4, perimeter 8, plus the unit disk.
    const double exact = 4.0 + 8.0 + std::numbers::pi;
    CHECK(volume(sum) == Approx(exact).epsilon(1e-14));
    const auto est = volume_estimate(sum, 1'000'000, 7);
    CHECK(std::abs(est.estimate - exact) <= 0.02 * exact);
    CHECK(est.upper_conf >= est.estimate);
}

TEST_CASE("Monte Carlo volume of the unit disk is within 1%")
{
    const auto est = volume_estimate(ConvexBody::ball(2, 1.0), 1'000'000, 3);
    CHECK(std::abs(est.estimate - std::numbers::pi) <= 0.01 * std::numbers::pi);
    CHECK(est.upper_conf > std::numbers::pi);
    const auto seg = volume_estimate(ConvexBody::cube(1, 1.0), 10'000, 3);
    CHECK(seg.estimate == 2.0);
}

TEST_CASE("3D Steiner volumes match Monte Carlo")
{
    const ConvexBody a = minkowski_sum(ConvexBody::ball(3, 0.5), ConvexBody::box(vec({1, 0.5, 0.25})));
    const ConvexBody b = minkowski_sum(ConvexBody::ball(3, 0.5), ConvexBody::cross_polytope(3, 1.0));
    for (const auto& body : {a, b}) {
        const auto est = volume_estimate(body, 2'000'000, 11);
        CHECK(std::abs(est.estimate - volume(body)) <= 0.01 * volume(body));
    }
}

TEST_CASE("2D disk plus diamond volume matches Monte Carlo")
{
    const ConvexBody body = minkowski_sum(ConvexBody::ball(2, 0.3), ConvexBody::cross_polytope(2, 1.0));
    const auto est = volume_estimate(body, 2'000'000, 5);
    CHECK(std::abs(est.estimate - volume(body)) <= 0.01 * volume(body));
}

TEST_CASE("bodies without a closed-form volume say so")
{
    const ConvexBody sum = minkowski_sum(ConvexBody::ball(4, 1.0), ConvexBody::cube(4, 1.0));
    CHECK_FALSE(has_exact_volume(sum));
    CHECK_THROWS_AS(volume(sum), Error);
}

TEST_CASE("membership examples")
{
    CHECK(contains(ConvexBody::ball(2, 1.0), vec({1, 0})));
    CHECK_FALSE(contains(ConvexBody::ball(2, 1.0), vec({1, 0}), Boundary::Open));
    const ConvexBody sum = minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::box(vec({1, 1})));
    CHECK(contains(sum, vec({1.5, 1.5})));
    CHECK_FALSE(contains(ConvexBody::box(vec({1, 1})), vec({1.001, 0})));
    CHECK(contains(ConvexBody::cross_polytope(2, 1.0), vec({0.5, 0.5})));
    CHECK_FALSE(contains(ConvexBody::cross_polytope(2, 1.0), vec({0.5, 0.5}), Boundary::Open));
}

TEST_CASE("boundary points decided exactly")
{
    // 0.1 + 0.2 != 0.3 in binary; the exact test must see the true rationals.
    const ConvexBody cross = ConvexBody::cross_polytope(2, 0.30000000000000004);
    CHECK(contains(cross, vec({0.1, 0.2})) == (Rational(0.1) + Rational(0.2) <= Rational(0.30000000000000004)));
    const ConvexBody ball = ConvexBody::ball(2, 5.0);
    CHECK(contains(ball, vec({3, 4})));
    CHECK_FALSE(contains(ball, vec({3, 4}), Boundary::Open));
    CHECK_FALSE(contains(ball, vec({3, std::nextafter(4.0, 5.0)})));
}

TEST_CASE("disk plus diamond membership agrees with an edge-distance oracle")
{
    const double rho = 0.35, r = 1.2;
    const ConvexBody sum = minkowski_sum(ConvexBody::ball(2, rho), ConvexBody::cross_polytope(2, r));
    Engine rng = make_engine(21);
    int disagreements = 0;
    for (int i = 0; i < 20000; ++i) {
        const Eigen::Vector2d p(uniform(rng, -2, 2), uniform(rng, -2, 2));
        const double d = diamond_distance(p, r);
        if (std::abs(d - rho) < 1e-9) continue;
        disagreements += contains(sum, p) != (d <= rho);
        CHECK(distance(ConvexBody::cross_polytope(2, r), p) == Approx(d).epsilon(1e-12));
    }
    CHECK(disagreements == 0);
}

TEST_CASE("box plus cross-polytope membership agrees with its facet inequalities")
{
    // B + C is cut out by sum_{i in S} (|x_i| - w_i) <= r over nonempty index sets S.
    Engine rng = make_engine(31);
    for (int n = 1; n <= 4; ++n) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = uniform(rng, 0.2, 1.5);
        const double r = uniform(rng, 0.3, 1.2);
        const ConvexBody sum = minkowski_sum(ConvexBody::box(w), ConvexBody::cross_polytope(n, r));
        int disagreements = 0;
        for (int k = 0; k < 5000; ++k) {
            const Eigen::VectorXd x = random_point(rng, n, 3.0);
            double worst = -std::numeric_limits<double>::infinity();
            for (unsigned mask = 1; mask < (1U << n); ++mask) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (mask >> i & 1U) s += std::abs(x(i)) - w(i);
                }
                worst = std::max(worst, s);
            }
            if (std::abs(worst - r) < 1e-9) continue;
            disagreements += contains(sum, x) != (worst <= r);
        }
        CHECK(disagreements == 0);
        // Corner of the box pushed along an axis by r, decided against the exact
        // sum. In 1D the sum collapses to an interval with a rounded half-width.
        if (n >= 2) {
            Eigen::VectorXd corner = w;
            corner(0) += r;
            CHECK(contains(sum, corner) == (Rational(w(0)) + Rational(r) >= Rational(corner(0))));
        }
    }
}

TEST_CASE("symmetry: x in A iff -x in A")
{
    Engine rng = make_engine(1);
    for (int n = 1; n <= 4; ++n) {
        for (const auto& body : zoo(n)) {
            const double spread = 1.2 * circumradius(body);
            int mismatches = 0;
            for (int i = 0; i < 10000; ++i) {
                const Eigen::VectorXd x = random_point(rng, n, spread);
                mismatches += contains(body, x) != contains(body, (-x).eval());
            }
            CHECK(mismatches == 0);
        }
    }
}

TEST_CASE("scaling multiplies volume by lambda^n")
{
    for (int n = 1; n <= 8; ++n) {
        for (const auto& body : zoo(n)) {
            for (double lambda : {0.5, 1.0, 3.0}) {
                const ConvexBody s = scale(body, lambda);
                CHECK(volume(s) == Approx(std::pow(lambda, n) * volume(body)).epsilon(1e-12));
            }
        }
    }
    CHECK(scale(ConvexBody::ball(3, 1.0), 2.0) == ConvexBody::ball(3, 2.0));
    CHECK(scale(ConvexBody::box(vec({1, 2})), 0.5) == ConvexBody::box(vec({0.5, 1})));
    CHECK(scale(ConvexBody::cross_polytope(2, 1.5), 1.0) == ConvexBody::cross_polytope(2, 1.5));
}

TEST_CASE("homothetic summands collapse and volumes add in scale")
{
    CHECK(minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::ball(2, 2.0)) == ConvexBody::ball(2, 3.0));
    CHECK(minkowski_sum(ConvexBody::box(vec({1, 1})), ConvexBody::box(vec({0.5, 0.5}))) == ConvexBody::box(vec({1.5, 1.5})));
    CHECK(minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::box(vec({1, 1}))).is_sum());
    CHECK_THROWS_AS(minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::ball(3, 1.0)), Error);
    for (int n = 1; n <= 8; ++n) {
        for (const auto& body : zoo(n)) {
            if (body.is_sum()) continue;
            const double mu = 0.75;
            CHECK(volume(minkowski_sum(body, scale(body, mu))) == Approx(std::pow(1 + mu, n) * volume(body)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Minkowski sum contains each summand")
{
    Engine rng = make_engine(2);
    for (int n = 2; n <= 3; ++n) {
        const ConvexBody a = ConvexBody::cross_polytope(n, 1.0);
        const ConvexBody sum = minkowski_sum(a, ConvexBody::ball(n, 0.2));
        for (int i = 0; i < 5000; ++i) {
            const Eigen::VectorXd x = random_point(rng, n, 1.2);
            if (contains(a, x)) CHECK(contains(sum, x));
        }
    }
}

TEST_CASE("inscribed boxes")
{
    CHECK(inscribed_box(ConvexBody::ball(4, 1.0)).as<Box>().half_widths.isApprox(Eigen::VectorXd::Constant(4, 0.5)));
    CHECK(inscribed_box(ConvexBody::box(vec({1, 2}))) == ConvexBody::box(vec({1, 2})));
    CHECK(inscribed_box(ConvexBody::cross_polytope(2, 1.0)) == ConvexBody::box(vec({0.5, 0.5})));
    CHECK_THROWS_AS(inscribed_box(minkowski_sum(ConvexBody::ball(2, 1), ConvexBody::cube(2, 1))), Error);

    for (int n = 1; n <= 8; ++n) {
        for (const auto& body : zoo(n)) {
            if (body.is_sum()) continue;
            const Eigen::VectorXd w = inscribed_box(body).as<Box>().half_widths;
            for (int mask = 0; mask < (1 << n); ++mask) {
                Eigen::VectorXd corner = w;
                for (int i = 0; i < n; ++i) {
                    if (mask >> i & 1) corner(i) = -corner(i);
                }
                CHECK(contains(body, corner));
            }
        }
    }
}

TEST_CASE("subset certification")
{
    CHECK(is_subset(ConvexBody::ball(3, 0.5), ConvexBody::ball(3, 1.0)) == std::optional<bool>(true));
    CHECK(is_subset(ConvexBody::box(vec({1, 2})), ConvexBody::box(vec({2, 2}))) == std::optional<bool>(true));
    CHECK(is_subset(ConvexBody::box(vec({1, 2})), ConvexBody::ball(2, 2.0)) == std::optional<bool>(false));
    CHECK(is_subset(ConvexBody::cube(2, 0.5), ConvexBody::ball(2, 1.0)) == std::optional<bool>(true));
}

TEST_CASE("circumradius and bounding box")
{
    CHECK(circumradius(ConvexBody::box(vec({3, 4}))) == Approx(5.0));
    CHECK(circumradius(ConvexBody::cross_polytope(3, 2.0)) == 2.0);
    const ConvexBody sum = minkowski_sum(ConvexBody::ball(2, 1.0), ConvexBody::box(vec({1, 2})));
    CHECK(bounding_half_widths(sum).isApprox(vec({2, 3})));
}
