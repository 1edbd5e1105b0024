#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/cube.hpp"
#include "czkit/czdecomp.hpp"
#include "czkit/maximal.hpp"

using namespace czkit;
using czkit::test::line;

TEST_SUITE("czdecomp") {

TEST_CASE("small maximal function leaves f untouched") {
    auto mu = line({0, 1, 2, 3});
    SampledFunction f{0.5, -0.5, 0.25, -0.25};
    auto dec = cz_decompose(mu, f, 10.0);
    CHECK(dec.whitney.cubes.empty());
    CHECK(dec.g == f);
    for (double v : dec.b) CHECK(v == 0.0);
}

TEST_CASE("spike on a four-point grid") {
    auto mu = line({0, 1, 2, 3});
    SampledFunction f{8, 0, 0, 0};
    auto dec = cz_decompose(mu, f, 1.0);
    REQUIRE_FALSE(dec.whitney.cubes.empty());
    CHECK(dec.inv.all_seven());
    CHECK(dec.inv.half_mass);

    // independent re-summation
    for (std::size_t x = 0; x < mu.size(); ++x) CHECK(dec.g[x] + dec.b[x] == doctest::Approx(f[x]).epsilon(1e-12));
    for (std::size_t i = 0; i < dec.whitney.cubes.size(); ++i) {
        double fw = 0, ia = 0;
        for (std::size_t x = 0; x < mu.size(); ++x) {
            fw += f[x] * dec.weights[i][x] * mu.weight(x);
            ia += dec.alphas[i][x] * mu.weight(x);
            if (dec.alphas[i][x] != 0.0) CHECK(dec.hosts[i].contains(mu.point(x)));
        }
        CHECK(ia == doctest::Approx(fw).epsilon(1e-12));
    }
    double sum_w = 0;
    for (std::size_t i = 0; i < dec.whitney.cubes.size(); ++i) sum_w += dec.weights[i][0];
    CHECK(sum_w == doctest::Approx(1.0));
}

TEST_CASE("mean-zero f gives mean-zero b") {
    GenParams p;
    p.depth = 5;
    auto mu = generate_measure(GenKind::cantor, p, 1);
    Rng rng(6);
    auto f = random_mean_zero(mu, rng);
    auto m = maximal_field(mu, f, MaximalKind::hl_lower, mu.points());
    double lam = 0;
    for (double v : m) lam += v / m.size();
    auto dec = cz_decompose(mu, f, lam);
    CHECK(std::abs(integral(mu, dec.b)) <= 1e-12 * (1 + l1_norm(mu, f)));
    auto again = check_cz(mu, f, dec);
    CHECK(again.reconstruction);
    CHECK(again.cc4);
    CHECK(again.cc5);
    CHECK(again.host_rule);
}

// alpha_i lives on the host R_i, which may reach outside Omega
TEST_CASE("b can leave Omega but stays in the hosts") {
    auto mu = line({0, 1, 2, 3, 4});
    SampledFunction f{0, 0, 2, 3, 4};
    auto dec = cz_decompose(mu, f, 2.0);
    CHECK_FALSE(dec.inv.supp_b);
    CHECK(dec.inv.supp_b_hosts);
    bool outside = false;
    for (std::size_t x = 0; x < mu.size(); ++x) {
        if (dec.b[x] == 0.0 || dec.omega_region.contains(mu.point(x))) continue;
        outside = true;
        bool hosted = false;
        for (const auto& R : dec.hosts) hosted = hosted || R.contains(mu.point(x));
        CHECK(hosted);
    }
    CHECK(outside);
}

TEST_CASE("truncation") {
    auto mu = line({0, 1, 2, 3});
    SampledFunction f{1, -1, 2, -2};
    int k = 1;
    while (truncate_sequence(mu, f, k).qk.side < 8.0) ++k;
    auto t = truncate_sequence(mu, f, k);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(t.fk[i] == doctest::Approx(f[i]).epsilon(1e-14));
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(integral(mu, truncate_sequence(mu, f, k).fk)) <= 1e-12);
}

}
