#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "pdcert/lattices.hpp"
#include "pdcert/random.hpp"

using namespace pdcert;
using doctest::Approx;

namespace {

/// Scans every coefficient vector with |k_i| <= reach and tests membership directly.
std::set<std::vector<std::int64_t>> brute_force(const Lattice& lattice, const ConvexBody& region, bool strict, int reach)
{
    const int n = lattice.dim();
    std::set<std::vector<std::int64_t>> out;
    Coeffs k = Coeffs::Constant(n, -reach);
    while (true) {
        if (contains(region, lattice.point(k), strict ? Boundary::Open : Boundary::Closed)) {
            out.insert(std::vector<std::int64_t>(k.data(), k.data() + n));
        }
        int i = 0;
        for (; i < n; ++i) {
            if (++k(i) <= reach) break;
            k(i) = -reach;
        }
        if (i == n) break;
    }
    return out;
}

std::set<std::vector<std::int64_t>> as_set(const std::vector<Coeffs>& ks)
{
    std::set<std::vector<std::int64_t>> out;
    for (const auto& k : ks) out.insert(std::vector<std::int64_t>(k.data(), k.data() + k.size()));
    return out;
}

const Lattice hexagonal = catalog_entry("A2", 2).lattice;

} // namespace

TEST_CASE("point counts on small examples")
{
    CHECK(count_points(Lattice(Eigen::MatrixXd::Identity(2, 2)), ConvexBody::cube(2, 3.0), true) == 25);
    CHECK(count_points(Lattice(Eigen::MatrixXd::Identity(1, 1)), ConvexBody::cube(1, 3.0), true) == 5);
    CHECK(count_points(Lattice(Eigen::MatrixXd::Identity(2, 2)), ConvexBody::cube(2, 3.0), false) == 49);
    // Hexagonal lattice: 1 + 6 + 6 + 6 points at norms 0, 1, sqrt 3, 2. The stored
    // second generator is rounded up, so four of the norm-2 points sit just
    // outside the closed disk of radius 2 and need a hair more room.
    const auto hex = enumerate_coefficients(hexagonal, ConvexBody::ball(2, 2.0), false);
    CHECK(hex.size() == 15);
    CHECK(as_set(hex) == brute_force(hexagonal, ConvexBody::ball(2, 2.0), false, 5));
    CHECK(count_points(hexagonal, ConvexBody::ball(2, 2.0 + 1e-12), false) == 19);
    CHECK(count_points(hexagonal, ConvexBody::ball(2, 4.0), true) == 55);
}

TEST_CASE("enumeration matches a brute-force coefficient scan on random lattices")
{
    Engine rng = make_engine(17);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        Eigen::MatrixXd m(n, n);
        // Entries on a 1/8 grid, so many points land exactly on box faces.
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) m(i, j) = std::round(uniform(rng, -1.0, 1.0) * 8.0) / 8.0;
            m(i, i) += 1.25;
        }
        if (std::abs(m.determinant()) < 0.3) continue;
        const Lattice lattice(m);
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = std::round(uniform(rng, 0.5, 3.0) * 4.0) / 4.0;
        const ConvexBody box = ConvexBody::box(w);
        const double radius = std::round(uniform(rng, 0.5, 3.0) * 4.0) / 4.0;
        const ConvexBody ball = ConvexBody::ball(n, radius);
        // |k| <= |M^-1| |x|, with the Frobenius norm bounding the operator norm.
        const int reach = static_cast<int>(std::ceil(std::max(w.norm(), radius) * m.inverse().norm())) + 1;
        for (const auto& region : {box, ball}) {
            for (bool strict : {false, true}) {
                CHECK(as_set(enumerate_coefficients(lattice, region, strict)) == brute_force(lattice, region, strict, reach));
            }
        }
    }
}

TEST_CASE("strict counts never exceed closed counts, and counts grow with the region")
{
    for (const auto& entry : catalog(3)) {
        const std::uint64_t closed = count_points(entry.lattice, ConvexBody::ball(3, 3.0), false);
        const std::uint64_t open = count_points(entry.lattice, ConvexBody::ball(3, 3.0), true);
        CHECK(open <= closed);
        CHECK(count_points(entry.lattice, ConvexBody::ball(3, 2.0), false) <= closed);
        CHECK(count_points(entry.lattice, ConvexBody::cube(3, 1.5), false) <= count_points(entry.lattice, ConvexBody::cube(3, 2.5), false));
    }
}

TEST_CASE("catalog minimum norms match enumeration")
{
    for (int n = 1; n <= 8; ++n) {
        for (const auto& entry : catalog(n)) {
            CAPTURE(entry.name);
            CHECK(shortest_vector_length(entry.lattice) == Approx(entry.min_norm).epsilon(1e-12));
        }
    }
    // Kissing numbers as a check of the bases.
    CHECK(count_points(catalog_entry("E8", 8).lattice, ConvexBody::ball(8, std::numbers::sqrt2), false) == 241);
    CHECK(count_points(catalog_entry("D4", 4).lattice, ConvexBody::ball(4, std::numbers::sqrt2), false) == 25);
    CHECK(catalog_entry("E8", 8).lattice.determinant() == Approx(1.0));
    CHECK(catalog_entry("D5", 5).lattice.determinant() == Approx(2.0));
}

TEST_CASE("packing checks")
{
    CHECK(check_packing(Lattice(Eigen::MatrixXd::Identity(3, 3)), ConvexBody::cube(3, 1.0)));
    CHECK_FALSE(check_packing(Lattice(Eigen::MatrixXd::Identity(1, 1) * 0.9), ConvexBody::cube(1, 1.0)));
    CHECK(check_packing(hexagonal, ConvexBody::ball(2, 1.0)));
    CHECK_FALSE(check_packing(hexagonal, ConvexBody::ball(2, 1.0000001)));
    CHECK(check_packing(Lattice(Eigen::MatrixXd::Identity(2, 2)), ConvexBody::cross_polytope(2, 1.0)));
}

TEST_CASE("packing densities")
{
    CHECK(packing_density(Lattice(Eigen::MatrixXd::Identity(4, 4)), ConvexBody::cube(4, 0.5)) == Approx(1.0));
    CHECK(packing_density(hexagonal, ConvexBody::ball(2, 0.5)) == Approx(std::numbers::pi / std::sqrt(12.0)).epsilon(1e-12));
    CHECK(packing_density(Lattice(Eigen::MatrixXd::Identity(1, 1) * 2.0), ConvexBody::cube(1, 0.5)) == Approx(0.5));
    CHECK_THROWS_AS(packing_density(Lattice(Eigen::MatrixXd::Identity(1, 1) * 0.5), ConvexBody::cube(1, 0.5)), Error);
}

TEST_CASE("lattice lower bounds on examples")
{
    const Lattice z1(Eigen::MatrixXd::Identity(1, 1));
    CHECK(lattice_lower_bound(z1, ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 5.0)).value == Approx(1.8).epsilon(1e-15));
    const Lattice z2(Eigen::MatrixXd::Identity(2, 2));
    const auto square = lattice_lower_bound(z2, ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 2.0));
    CHECK(square.value == 2.25);
    CHECK(square.audit.at("interior_count") == 9);
    const auto hex = lattice_lower_bound(hexagonal, ConvexBody::ball(2, 1.0), ConvexBody::ball(2, 4.0));
    CHECK(hex.value == Approx(55.0 / 16.0).epsilon(1e-15));
    CHECK(hex.certified);
    CHECK_THROWS_AS(lattice_lower_bound(z1.scaled(0.5), ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 5.0)), Error);
}

TEST_CASE("enlarging V lowers the lattice bound by at most lambda^n")
{
    for (int n = 1; n <= 3; ++n) {
        for (const auto& entry : catalog(n)) {
            const ConvexBody u = ConvexBody::ball(n, 1.0);
            const Lattice lattice = normalize_to_packing(entry, u);
            const double base = lattice_lower_bound(lattice, u, ConvexBody::ball(n, 3.0)).value;
            for (double lambda : {1.0, 1.25, 2.0, 3.5}) {
                const double enlarged = lattice_lower_bound(lattice, u, ConvexBody::ball(n, 3.0 * lambda)).value;
                CHECK(enlarged >= std::pow(lambda, -n) * base * (1 - 1e-14));
            }
        }
    }
}

TEST_CASE("joint scaling leaves the lattice bound unchanged")
{
    const Lattice z2(Eigen::MatrixXd::Identity(2, 2));
    const ConvexBody u = ConvexBody::cube(2, 1.0), v = ConvexBody::cube(2, 3.5);
    const double base = lattice_lower_bound(z2, u, v).value;
    for (double lambda : {0.5, 3.0, 0.125}) {
        CHECK(lattice_lower_bound(z2.scaled(lambda), scale(u, lambda), scale(v, lambda)).value ==
              Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("cube density: the lattice ratio is within 10/r of 1")
{
    for (int n = 1; n <= 4; ++n) {
        const Lattice zn(Eigen::MatrixXd::Identity(n, n));
        for (double r : {10.0, 20.0, 50.0}) {
            const ConvexBody v = ConvexBody::cube(n, r);
            const double ratio = static_cast<double>(count_points(zn, v, true)) * volume(ConvexBody::cube(n, 0.5)) / volume(v);
            CHECK(std::abs(ratio - 1.0) <= 10.0 / r);
        }
    }
}

TEST_CASE("normalizing catalog lattices to a packing")
{
    const auto z3 = catalog_entry("Zn", 3);
    CHECK(normalize_to_packing(z3, ConvexBody::cube(3, 1.0)).basis() == Eigen::MatrixXd::Identity(3, 3));
    CHECK(normalize_to_packing(z3, ConvexBody::ball(3, 1.0)).basis() == Eigen::MatrixXd::Identity(3, 3));
    CHECK(normalize_to_packing(catalog_entry("A2", 2), ConvexBody::ball(2, 1.0)).basis() == hexagonal.basis());
    // Critical scale for the hexagonal lattice against the unit square is 2/sqrt 3.
    const Lattice hs = normalize_to_packing(catalog_entry("A2", 2), ConvexBody::cube(2, 1.0));
    CHECK(hs.basis()(0, 0) == Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(check_packing(hs, ConvexBody::cube(2, 1.0)));
    CHECK_FALSE(check_packing(hs.scaled(1.0 - 1e-9), ConvexBody::cube(2, 1.0)));
    const Lattice d4 = normalize_to_packing(catalog_entry("D4", 4), ConvexBody::ball(4, 2.0));
    CHECK(shortest_vector_length(d4) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("dimension guard")
{
    const Lattice z9(Eigen::MatrixXd::Identity(9, 9));
    CHECK_THROWS_AS(enumerate_points(z9, ConvexBody::cube(9, 1.0), true), Error);
    CHECK_THROWS_AS(Lattice(Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("lattice JSON round trip")
{
    const Lattice d3 = catalog_entry("D3", 3).lattice.scaled(0.7);
    const Lattice back = lattice_from_json(lattice_to_json(d3));
    CHECK(back.basis() == d3.basis());
}
