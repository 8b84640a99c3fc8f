#include <doctest.h>

#include <cmath>

#include "pdcert/covering.hpp"
#include "pdcert/error.hpp"

using namespace pdcert;
using doctest::Approx;

TEST_CASE("one-dimensional window: |X| = 2r + 1")
{
    const auto cert = tiling_cover(ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 3.0));
    CHECK(cert.translate_count == 7);
    CHECK(cert.product_form());
    CHECK(to_bound_entry(cert).value == Approx(7.0 / 3.0).epsilon(1e-15));
    for (int r = 1; r <= 40; ++r) {
        const auto c = tiling_cover(ConvexBody::cube(1, 1.0), ConvexBody::cube(1, r));
        CHECK(c.translate_count == static_cast<std::uint64_t>(2 * r + 1));
        CHECK(c.bound_value == Approx(2.0 + 1.0 / r).epsilon(1e-14));
    }
}

TEST_CASE("square example: 25 translates")
{
    const auto cert = tiling_cover(ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 2.0));
    CHECK(cert.translate_count == 25);
    CHECK(cert.bound_value == 6.25);
    CHECK(cert.translates().size() == 25);
}

TEST_CASE("ball covers: volumetric floor and sampled coverage")
{
    for (int n = 1; n <= 3; ++n) {
        const ConvexBody u = ConvexBody::ball(n, 1.0);
        for (double r : {2.0, 4.5}) {
            const ConvexBody v = ConvexBody::ball(n, r);
            const auto cert = tiling_cover(u, v);
            // The translates of the cell cover K, so their total volume is at least |K|.
            const double k_volume = volume(ConvexBody::ball(n, r + 0.5));
            CHECK(static_cast<double>(cert.translate_count) * volume(cert.cell) >= k_volume);
            const auto audit = audit_coverage(cert, 10'000, 7);
            CHECK(audit.applicable);
            CHECK(audit.inside_k > 0);
            CHECK(audit.passed());
        }
    }
}

TEST_CASE("coverage audits on mixed kinds")
{
    const ConvexBody bodies[] = {ConvexBody::cube(2, 0.7), ConvexBody::ball(2, 1.3), ConvexBody::cross_polytope(2, 1.1),
                                 ConvexBody::box(Eigen::Vector2d(0.4, 1.2))};
    for (const auto& u : bodies) {
        for (const auto& v : bodies) {
            const auto cert = tiling_cover(u, scale(v, 3.0));
            const auto audit = audit_coverage(cert, 10'000, 11);
            CHECK(audit.passed());
        }
    }
}

TEST_CASE("the grid offset hook breaks exactness but not coverage")
{
    TilingOptions opts;
    opts.grid_offset = Eigen::VectorXd::Constant(1, 0.3);
    const auto cert = tiling_cover(ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 5.0), opts);
    CHECK(cert.translate_count == 12);
    CHECK(audit_coverage(cert, 2000, 3).passed());
}

TEST_CASE("joint scaling leaves the tiling cover unchanged")
{
    const ConvexBody u = ConvexBody::ball(2, 1.0), v = ConvexBody::cube(2, 3.0);
    const auto base = tiling_cover(u, v);
    for (double lambda : {0.5, 3.0, 0.125, 8.0}) {
        const auto scaled = tiling_cover(scale(u, lambda), scale(v, lambda));
        CHECK(scaled.translate_count == base.translate_count);
        CHECK(scaled.bound_value == Approx(base.bound_value).epsilon(1e-12));
    }
}

TEST_CASE("tiling beats Rogers on cubes and both bound the lattice count")
{
    for (int n = 1; n <= 4; ++n) {
        const ConvexBody u = ConvexBody::cube(n, 1.0);
        for (double r : {2.0, 5.0, 10.0}) {
            const ConvexBody v = ConvexBody::cube(n, r);
            const double tiling = to_bound_entry(tiling_cover(u, v)).value;
            const double rogers = rogers_bound(u, v).value;
            const double lower = lattice_lower_bound(Lattice(Eigen::MatrixXd::Identity(n, n)), u, v).value;
            CHECK(tiling < rogers);
            CHECK(lower <= tiling);
            CHECK(tiling == Approx(std::pow(2.0 + 1.0 / r, n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Rogers density factor")
{
    CHECK(rogers_theta(1) == 1.0);
    for (int n = 2; n <= 12; ++n) {
        CHECK(rogers_theta(n) == Approx(n * std::log(n) + n * std::log(std::log(n)) + 5.0 * n).epsilon(1e-14));
    }
    CHECK_THROWS_AS(rogers_theta(0), Error);
    // Closed-form sum volume for cubes: |V + U| = (2(r + 1))^n.
    const auto e = rogers_bound(ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 2.0));
    CHECK(e.value == Approx(4.0 * 36.0 / 16.0 * rogers_theta(2)).epsilon(1e-12));
    CHECK(e.certified);
}

TEST_CASE("subset bound")
{
    const auto e = subset_bound(ConvexBody::cube(2, 2.0), ConvexBody::cube(2, 1.0));
    CHECK(e.value == 4.0);
    CHECK(subset_bound(ConvexBody::ball(3, 1.0), ConvexBody::ball(3, 1.0)).value == 1.0);
    CHECK_THROWS_AS(subset_bound(ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 2.0)), Error);
}

TEST_CASE("chain bound")
{
    BoundEntry base;
    base.value = 3.0;
    base.direction = Direction::Upper;
    base.certified = true;
    CHECK(chain_bound(base, 2.0, 8.0).value == Approx(27.0).epsilon(1e-13));
    CHECK(chain_bound(base, 2.0, 2.0).value == 3.0);
    CHECK_THROWS_AS(chain_bound(base, 1.0, 4.0), Error);
    CHECK_THROWS_AS(chain_bound(base, 2.0, 1.5), Error);
    base.direction = Direction::Lower;
    CHECK_THROWS_AS(chain_bound(base, 2.0, 4.0), Error);
}

TEST_CASE("best upper bound is the minimum of the applicable entries")
{
    const ConvexBody u = ConvexBody::ball(2, 1.0);
    for (double r : {0.5, 1.0, 3.0, 20.0}) {
        const ConvexBody v = ConvexBody::ball(2, r);
        const auto all = upper_bounds(u, v);
        const auto best = best_upper(u, v);
        for (const auto& e : all) CHECK(best.value <= e.value);
        CHECK(best.certified);
    }
    CHECK(best_upper(u, u).value == 1.0);
    CHECK(homothety_ratio(u, ConvexBody::ball(2, 3.0)) == Approx(3.0));
    CHECK_FALSE(homothety_ratio(u, ConvexBody::cube(2, 3.0)).has_value());
}

TEST_CASE("certificate export")
{
    const ConvexBody u = ConvexBody::cube(2, 1.0), v = ConvexBody::cube(2, 2.0);
    const auto cert = tiling_cover(u, v);
    const auto j = certificate_json(cert, u, v);
    CHECK(j.at("X").size() == 25);
    CHECK(j.at("bound") == 6.25);
    CHECK(j.at("U") == "box:1,1");
    // About 8.1 million translates: over the export cap.
    const auto big = tiling_cover(ConvexBody::cube(3, 1.0), ConvexBody::cube(3, 100.0));
    CHECK(big.translate_count == 201ULL * 201 * 201);
    try {
        (void)certificate_json(big, ConvexBody::cube(3, 1.0), ConvexBody::cube(3, 100.0));
        FAIL("expected a resource cap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ResourceCap);
    }
}
