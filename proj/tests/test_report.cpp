#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pdcert/literals.hpp"
#include "pdcert/report.hpp"

using namespace pdcert;
using doctest::Approx;

namespace {

BoundsOptions quick()
{
    BoundsOptions o;
    o.witness_trials = 20;
    return o;
}

} // namespace

TEST_CASE("sandwich examples")
{
    const auto line = bounds(ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 5.0), quick());
    CHECK(line.best_lower == Approx(1.8).epsilon(1e-15));
    CHECK(line.best_upper == Approx(2.2).epsilon(1e-15));
    CHECK(line.consistency);
    CHECK(line.witness_violations == 0);
    CHECK(line.best_witness <= line.best_upper);

    const auto square = bounds(ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 2.0), quick());
    CHECK(square.best_lower == Approx(2.75).epsilon(1e-14));
    CHECK(square.best_upper == 6.25);
    CHECK(square.lower_method == "lattice");

    const auto same = bounds(ConvexBody::ball(3, 1.0), ConvexBody::ball(3, 1.0), quick());
    CHECK(same.best_lower == 1.0);
    CHECK(same.best_upper == 1.0);
    CHECK(same.consistency);
}

TEST_CASE("lower never exceeds upper across kinds")
{
    const char* kinds[] = {"ball:1", "box:1", "cross:1", "box:0.5,2"};
    for (const char* a : kinds) {
        for (const char* b : kinds) {
            const ConvexBody u = parse_body(a, 2);
            const ConvexBody v = scale(parse_body(b, 2), 2.5);
            BoundsOptions o = quick();
            o.witness_trials = 10;
            const auto rep = bounds(u, v, o);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(rep.best_lower <= rep.best_upper);
            CHECK(rep.best_witness <= rep.best_upper + 1e-6);
            CHECK(rep.consistency);
        }
    }
}

TEST_CASE("reports survive a JSON round trip and revalidate")
{
    const auto rep = bounds(ConvexBody::ball(2, 1.0), ConvexBody::ball(2, 3.0), quick());
    const auto j = rep.to_json();
    const auto back = BoundReport::from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.to_json() == j);
    CHECK(revalidate(back).empty());
}

TEST_CASE("revalidation catches tampered entries")
{
    auto j = bounds(ConvexBody::cube(2, 1.0), ConvexBody::cube(2, 3.0), quick()).to_json();
    bool tampered = false;
    for (auto& e : j.at("entries")) {
        if (e.at("method") == "lattice" && !tampered) {
            e.at("audit").at("interior_count") = e.at("audit").at("interior_count").get<std::int64_t>() + 1;
            e.at("value") = e.at("value").get<double>() * 1.01;
            tampered = true;
        }
    }
    REQUIRE(tampered);
    const auto failures = revalidate(BoundReport::from_json(j));
    CHECK(failures.size() >= 1);
}

TEST_CASE("count bias hook shifts the lattice bound")
{
    BoundsOptions o = quick();
    o.witnesses = false;
    o.lattice.count_bias = 1;
    const auto rep = bounds(ConvexBody::cube(1, 1.0), ConvexBody::cube(1, 5.0), o);
    CHECK(rep.best_lower == Approx(2.0).epsilon(1e-15));
    CHECK_FALSE(revalidate(rep).empty());
}

TEST_CASE("reports are reproducible byte for byte")
{
    const auto a = bounds(ConvexBody::cross_polytope(2, 1.0), ConvexBody::ball(2, 2.0), quick()).to_json().dump();
    const auto b = bounds(ConvexBody::cross_polytope(2, 1.0), ConvexBody::ball(2, 2.0), quick()).to_json().dump();
    CHECK(a == b);
}

TEST_CASE("sweep rows")
{
    SweepOptions o;
    o.witnesses = true;
    const auto rows = sweep({1, 2}, {1.0, 2.0, 10.0}, o);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].n == 1);
    CHECK(rows[0].r == 1.0);
    // n = 1, r = 10 and n = 2, r = 10.
    CHECK(rows[2].upper_tiling == Approx(2.1).epsilon(1e-14));
    CHECK(rows[2].lower_lattice == Approx(1.9).epsilon(1e-14));
    CHECK(rows[5].upper_tiling == Approx(4.41).epsilon(1e-14));
    CHECK(rows[5].lower_lattice == Approx(3.61).epsilon(1e-14));
    for (const auto& row : rows) {
        CHECK(row.lower_lattice <= row.upper_tiling);
        CHECK(row.upper_tiling < row.upper_rogers);
        CHECK(row.witness_best <= row.upper_tiling);
        CHECK(row.ref_2n == std::pow(2.0, row.n));
        CHECK(row.ref_2n_delta == Approx(row.ref_2n));
    }
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    const std::string text = csv.str();
    CHECK(text.rfind("n,r,lower_lattice,upper_tiling,upper_rogers,witness_best,ref_2n,ref_2n_delta\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    std::ostringstream dat;
    write_sweep_dat(dat, rows);
    CHECK(dat.str().find("\n\n") != std::string::npos);
}
