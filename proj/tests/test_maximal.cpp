#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/maximal.hpp"

using namespace czkit;
using czkit::test::line;

TEST_SUITE("maximal") {

TEST_CASE("single atom upper value") {
    auto mu = line({0.0});
    Point x{0.5};
    CHECK(grand_maximal_upper(mu, {2.0}, x).value == doctest::Approx(2.0));
    CHECK(grand_maximal_upper(mu, {0.0}, x).value == 0.0);
}

// optimum of the one-variable LP: phi(0) <= min(1/w, r^-n), objective |v| w phi(0)
TEST_CASE("single atom closed form") {
    for (int d : {1, 2})
        for (double n : {1.0, 1.5, 2.0})
            for (double w : {1.0, 0.25, 3.0})
                for (double r : {0.0, 0.5, 2.5}) {
                    if (n > d) continue;
                    Point at(d, 0.0), x(d, 0.0);
                    x[0] = r;
                    DiscreteMeasure mu(d, n, {at}, {w});
                    double cap = r > 0 ? std::min(1.0 / w, std::pow(r, -n)) : 1.0 / w;
                    CHECK(grand_maximal_upper(mu, {-1.5}, x).value == doctest::Approx(1.5 * w * cap).epsilon(1e-9));
                }
}

TEST_CASE("single atom lower family") {
    auto mu = line({0.0});
    Point x{0.5};
    CHECK(grand_maximal_lower(mu, {2.0}, x).value >= 1.0 - 1e-12);
    CHECK(grand_maximal_lower(mu, {0.0}, x).value == 0.0);
}

TEST_CASE("two atom hardy-littlewood") {
    auto mu = line({0, 1});
    std::vector<double> one{1, 1};
    Point x{0.0};
    CHECK(hl_maximal(mu, one, x, 2.0, false) == doctest::Approx(1.0));
    CHECK(hl_maximal(mu, one, x, 2.0, true) == doctest::Approx(1.0));
    CHECK(hl_maximal(mu, {0, 0}, x, 2.0, false) == 0.0);
}

TEST_CASE("sandwich and homogeneity on a cantor measure") {
    GenParams p;
    p.depth = 4;
    auto mu = generate_measure(GenKind::cantor, p, 5);
    Rng rng(9);
    auto f = random_mean_zero(mu, rng);
    auto g = f;
    for (auto& v : g) v *= -2.5;
    auto q = mu.points();
    q.push_back({0.41});
    auto lo = maximal_field(mu, f, MaximalKind::grand_lower, q);
    auto up = maximal_field(mu, f, MaximalKind::grand_upper, q);
    auto up2 = maximal_field(mu, g, MaximalKind::grand_upper, q);
    auto hl = maximal_field(mu, f, MaximalKind::hl_lower, q);
    auto hu = maximal_field(mu, f, MaximalKind::hl_upper, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(lo[i] <= up[i] * (1 + 1e-9) + 1e-12);
        CHECK(up2[i] == doctest::Approx(2.5 * up[i]).epsilon(1e-7));
        CHECK(hl[i] <= hu[i] * (1 + 1e-12));
    }
}

}
