#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/cube.hpp"

using namespace czkit;
using czkit::test::interval;
using czkit::test::line;

TEST_SUITE("cubes") {

TEST_CASE("scaling") {
    Cube q({0.3, -1.0}, 0.75);
    CHECK(scale(q, 1.0) == q);
    CHECK(scale(scale(q, 2.0), 0.5) == q);
    Cube p({1.0, 2.0}, 0.0);
    CHECK(scale(p, 7.0) == p);
}

TEST_CASE("concentric hull") {
    Cube q = interval(-0.25, 0.25), r = interval(-2, 2);
    CHECK(concentric_hull(q, r) == r);
    Cube h = concentric_hull(q, interval(0.75, 1.25));
    CHECK(h.center[0] == 0.0);
    CHECK(h.side == doctest::Approx(2.5));
    Cube in = interval(-0.1, 0.3);
    Cube hr = concentric_hull(in, interval(-1, 1));
    CHECK(hr.side >= 2.0);
    CHECK(hr.side <= 4.0);
}

TEST_CASE("delta by hand") {
    auto one = line({0.0});
    CHECK(delta(one, interval(-0.5, 0.5), interval(-1.5, 1.5)) == 0.0);
    auto mu = line({0, 1});
    Cube q = interval(-0.25, 0.25), r = interval(-2, 2);
    CHECK(delta(mu, q, r) == doctest::Approx(1.0));
    CHECK(k_coeff(mu, q, r) == doctest::Approx(2.0));
    CHECK(k_coeff(mu, r, r) == 1.0);
}

TEST_CASE("delta is additive along concentric chains") {
    auto mu = line({0, 0.1, 0.3, 0.7, 1.6, 3.1}, {1, 2, 0.5, 1, 1, 4});
    Cube p = interval(-0.2, 0.2), q = interval(-1, 1), r = interval(-4, 4);
    CHECK(delta(mu, p, r) == doctest::Approx(delta(mu, p, q) + delta(mu, q, r)).epsilon(1e-12));
}

TEST_CASE("doubling") {
    auto mu = line({0, 1});
    DoublingParams p{2.0, 4.0};
    CHECK(is_doubling(mu, interval(-0.5, 0.5), p));
    CHECK(is_doubling(mu, interval(-3, 3), {5.0, 1.0}));
    CHECK(is_doubling(mu, Cube({1.0}, 0.0), p));
}

TEST_CASE("smallest doubling ancestor") {
    auto mu = line({0, 1}, {1, 100});
    Cube q = interval(-0.25, 0.25);
    auto a = smallest_doubling_ancestor(mu, q, {2.0, 4.0});
    CHECK(a.steps == 0);
    CHECK(a.cube == q);
    // heavy neighbor: 2Q = [-0.5,0.5] is light, 4Q picks up 100
    auto b = smallest_doubling_ancestor(mu, interval(-0.125, 0.125), {4.0, 4.0});
    Cube c = b.cube;
    CHECK(mass_cube(mu, scale(c, 4.0)) <= 4.0 * mass_cube(mu, c));
    for (int k = 0; k < b.steps; ++k) {
        Cube e = scale(interval(-0.125, 0.125), std::ldexp(1.0, k));
        CHECK_FALSE(mass_cube(mu, scale(e, 4.0)) <= 4.0 * mass_cube(mu, e));
    }
}

TEST_CASE("find_cube_at_delta") {
    GenParams g;
    g.depth = 6;
    auto mu = generate_measure(GenKind::cantor, g, 0);
    Cube R0({0.5}, 1.0);
    for (std::size_t i = 0; i < mu.size(); ++i) R0 = concentric_hull(R0, Cube(Point{mu.point(i)[0]}, 0.0));
    std::size_t left = 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.point(i)[0] < mu.point(left)[0]) left = i;
    double full = delta_point(mu, left, scale(R0, 2.0));
    CHECK_FALSE(find_cube_at_delta(mu, left, R0, full * 1.5).reachable);
    auto s = find_cube_at_delta(mu, left, R0, full / 2);
    REQUIRE(s.reachable);
    CHECK(std::isfinite(s.eps1_achieved));
    CHECK(is_doubling(mu, s.cube));
    CHECK(scale(R0, 2.0).contains(s.cube));
    CHECK(s.delta_value == doctest::Approx(delta(mu, s.cube, scale(R0, 2.0))));
}

}
