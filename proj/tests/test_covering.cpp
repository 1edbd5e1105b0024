#include "doctest.h"
#include "helpers.hpp"
#include "czkit/covering.hpp"

using namespace czkit;
using czkit::test::interval;
using czkit::test::line;

TEST_SUITE("covering") {

TEST_CASE("besicovich singleton") {
    auto c = besicovich_cover({{0.0}}, {Cube({0.0}, 1.0)});
    CHECK(c.cubes.size() == 1);
    CHECK(c.overlap_achieved == 1);
}

TEST_CASE("besicovich three points") {
    std::vector<Point> pts{{0.0}, {1.0}, {2.0}};
    std::vector<Cube> cubes{Cube({0.0}, 3.0), Cube({1.0}, 3.0), Cube({2.0}, 3.0)};
    auto c = besicovich_cover(pts, cubes);
    CHECK(c.cubes.size() <= 2);
    CHECK(c.overlap_achieved <= 2);
    for (const auto& p : pts) {
        bool covered = false;
        for (const auto& q : c.cubes) covered = covered || q.contains(p);
        CHECK(covered);
    }
    // greedy invariant: no selected center lies in an earlier selection
    for (std::size_t i = 0; i < c.selected.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(c.cubes[j].contains(pts[c.selected[i]]));
}

TEST_CASE("max overlap counts a common point") {
    std::vector<Cube> cubes{interval(0, 2), interval(1, 3), interval(1.5, 4), interval(5, 6)};
    CHECK(max_overlap(cubes) == 3);
}

TEST_CASE("shallow measure gives only point cubes") {
    auto mu = line({0, 1, 2, 3});
    Cube R0 = interval(-0.5, 3.5);
    auto d = atom_deltas(mu, R0);
    double mx = 0;
    for (double v : d) mx = std::max(mx, v);
    auto g = build_generation(mu, R0, 1, mx * 1.01);
    CHECK(g.volume_count == 0);
}

TEST_CASE("cantor generations thin out") {
    GenParams p;
    p.depth = 8;
    auto mu = generate_measure(GenKind::cantor, p, 0);
    Cube R0({0.5}, 1.0);
    auto d = atom_deltas(mu, R0);
    double mx = 0;
    for (double v : d) mx = std::max(mx, v);
    double A = mx / 3;
    auto g1 = build_generation(mu, R0, 1, A, {}, &d);
    auto g4 = build_generation(mu, R0, 4, A, {}, &d);
    CHECK(g1.volume_count >= 1);
    CHECK(g4.volume_count == 0);
    for (const auto& w : g1.weights) {
        if (w.empty()) continue;
        double s = 0;
        for (auto& [i, v] : w) s += v;
        CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("whitney of the empty set") {
    auto w = whitney_decompose(OpenRegion{}, interval(-4, 4), 6);
    CHECK(w.cubes.empty());
}

TEST_CASE("whitney of (-1,1)") {
    OpenRegion omega({interval(-1, 1)});
    auto w = whitney_decompose(omega, interval(-4, 4), 12);
    REQUIRE_FALSE(w.cubes.empty());
    double len = 0;
    for (const auto& q : w.cubes) {
        CHECK(omega.contains_closed(scale(q, 20.0)));
        CHECK(omega.meets_complement(scale(q, 60.0)));
        len += q.side;
    }
    // the cubes tile all of (-1,1) except a boundary layer below min_level resolution
    CHECK(len <= 2.0);
    CHECK(len > 1.9);
    auto chk = check_whitney(w, omega, {{0.0}, {0.5}, {-0.9}});
    CHECK(chk.disjoint_interiors);
    CHECK(chk.inner_20);
    CHECK(chk.outer_beta);
    CHECK(chk.covers_required);
}

}
