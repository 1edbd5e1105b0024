#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/cube.hpp"

using namespace czkit;
using czkit::test::line;

TEST_SUITE("measure") {

TEST_CASE("ball constant of four unit atoms") {
    auto mu = line({0, 1, 2, 3});
    auto g = growth_constant(mu);
    CHECK(g.ball_constant == doctest::Approx(3.0));
    CHECK_FALSE(g.degenerate);
}

TEST_CASE("single atom is flagged degenerate") {
    auto g = growth_constant(line({0.0}));
    CHECK(g.degenerate);
    CHECK(std::isfinite(g.ball_constant));
}

TEST_CASE("growth constants are homogeneous in the weights") {
    auto mu = line({0, 1, 2, 3, 7}, {1, 2, 1, 0.5, 3});
    auto a = growth_constant(mu), b = growth_constant(mu.scaled(2.5));
    CHECK(b.ball_constant == doctest::Approx(2.5 * a.ball_constant));
    CHECK(b.cube_constant == doctest::Approx(2.5 * a.cube_constant));
}

TEST_CASE("ball constant against brute force") {
    GenParams p;
    p.depth = 4;
    auto mu = generate_measure(GenKind::cantor, p, 3);
    double best = 0.0;
    for (std::size_t c = 0; c < mu.size(); ++c)
        for (std::size_t j = 0; j < mu.size(); ++j) {
            double r = std::abs(mu.point(c)[0] - mu.point(j)[0]);
            if (r <= 0) continue;
            double m = 0;
            for (std::size_t k = 0; k < mu.size(); ++k)
                if (std::abs(mu.point(c)[0] - mu.point(k)[0]) <= r * (1 + 1e-12)) m += mu.weight(k);
            best = std::max(best, m / std::pow(r, mu.n()));
        }
    CHECK(growth_constant(mu).ball_constant == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("closed cube mass") {
    auto mu = line({0, 1});
    CHECK(mass_cube(mu, Cube({0.0}, 1.0)) == 1.0);
    CHECK(mass_cube(mu, Cube({0.0}, 2.0)) == 2.0);
    CHECK(mass_cube(mu, Cube({0.5}, 0.0)) == 0.0);
}

TEST_CASE("grid generator and determinism") {
    GenParams p;
    p.points_per_axis = 4;
    auto mu = generate_measure(GenKind::grid, p, 1);
    REQUIRE(mu.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(mu.point(i)[0] == double(i));
    for (auto kind : {GenKind::cantor, GenKind::clustered}) {
        auto a = generate_measure(kind, GenParams{}, 42), b = generate_measure(kind, GenParams{}, 42);
        CHECK(a == b);
    }
}

TEST_CASE("cantor depth 5 ball constant is finite and near the analytic scale") {
    GenParams p;
    p.depth = 5;
    p.ratio = 1.0 / 3.0;
    auto mu = generate_measure(GenKind::cantor, p, 0);
    CHECK(mu.size() == 32);
    double bc = growth_constant(mu).ball_constant;
    // infinite Cantor set: mu(B(x,r)) <= (2r)^n, equality approached at the ends
    double limit = std::pow(2.0, mu.n());
    CHECK(bc >= limit / 4.0);
    CHECK(bc <= 4.0 * limit);
}

}
