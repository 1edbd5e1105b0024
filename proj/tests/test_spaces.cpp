#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/cube.hpp"
#include "czkit/spaces.hpp"

using namespace czkit;
using czkit::test::interval;
using czkit::test::line;

namespace {

// exhaustive def2 oracle over the canonical family
double def2_brute(const DiscreteMeasure& mu, const SampledFunction& f, const CanonicalFamily& fam) {
    double best = 0.0;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        if (!fam.doubling[j]) continue;
        Cube R = fam.cube(mu, j);
        double mr = mean(mu, f, R);
        for (std::size_t i = 0; i < fam.size(); ++i) {
            if (!fam.doubling[i]) continue;
            Cube Q = fam.cube(mu, i);
            if (!R.contains(Q) || Q == R) continue;
            double v = std::abs(mean(mu, f, Q) - mr) / k_coeff(mu, Q, R);
            best = std::max(best, v);
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("spaces") {

TEST_CASE("means") {
    auto mu = line({0, 1});
    CHECK(mean(mu, {3, 3}, interval(-1, 2)) == 3.0);
    CHECK(mean(mu, {1, -1}, interval(-1, 2)) == 0.0);
    CHECK(mean(mu, {5, -1}, Cube({0.0}, 0.0)) == 5.0);
}

TEST_CASE("rbmo of a two-atom sign") {
    auto mu = line({0, 1});
    CHECK(rbmo_norm(mu, {1, -1}).value == doctest::Approx(1.0));
    CHECK(rbmo_norm(mu, {2, 2}).value == 0.0);
}

TEST_CASE("rbmo is invariant under constants") {
    auto mu = line({0, 0.5, 1.5, 4, 4.25}, {1, 2, 1, 3, 1});
    SampledFunction f{1, -2, 0.5, 3, -1}, g = f;
    for (auto& v : g) v += 7.0;
    CHECK(rbmo_norm(mu, g).value == doctest::Approx(rbmo_norm(mu, f).value).epsilon(1e-12));
}

TEST_CASE("branch and bound matches brute force") {
    for (auto kind : {GenKind::cantor, GenKind::clustered}) {
        GenParams p;
        p.depth = 4;
        p.per_cluster = 6;
        auto mu = generate_measure(kind, p, 21);
        auto fam = canonical_family(mu);
        Rng rng(4);
        for (int t = 0; t < 3; ++t) {
            auto f = random_mean_zero(mu, rng);
            auto est = rbmo_norm(mu, f, fam);
            CHECK(est.value == doctest::Approx(std::max(est.def1, def2_brute(mu, f, fam))).epsilon(1e-12));
        }
    }
}

TEST_CASE("atomic block validation") {
    auto mu = line({0, 1, 2, 3});
    SampledFunction f{1, -1, 2, -2};
    Cube R = interval(-0.5, 3.5);
    auto blk = single_block(mu, f, R);
    auto rep = validate_atomic_block(mu, blk);
    CHECK(rep.valid);
    CHECK(rep.norm == doctest::Approx(2.0 * mass_cube(mu, scale(R, 2.0))));

    auto skew = blk;
    skew.atoms[0].a[0] += 0.01;
    auto bad = validate_atomic_block(mu, skew);
    CHECK_FALSE(bad.valid);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations[0].kind == "cancellation");
    CHECK(bad.violations[0].magnitude == doctest::Approx(0.01 * skew.atoms[0].lambda));

    auto big = blk;
    for (auto& v : big.atoms[0].a) v *= 2.0;
    big.atoms[0].lambda *= 0.5;
    bool size = false;
    for (const auto& v : validate_atomic_block(mu, big).violations) size = size || v.kind == "size condition";
    CHECK(size);
}

TEST_CASE("h1 bound") {
    auto mu = line({0, 1, 2, 3});
    CHECK(h1_upper_bound(mu, {0, 0, 0, 0}).bound == 0.0);
    SampledFunction f{1, -1, 2, -2};
    auto h = h1_upper_bound(mu, f);
    CHECK(h.bound <= sup_norm(f) * mass_cube(mu, scale(support_hull(mu, f), 2.0)) * (1 + 1e-12));
    CHECK(h.bound >= l1_norm(mu, f) * (1 - 1e-12));
}

TEST_CASE("z complement profile agrees with z_set") {
    GenParams p;
    p.clusters = 2;
    p.per_cluster = 8;
    auto mu = generate_measure(GenKind::clustered, p, 8);
    auto fam = canonical_family(mu);
    Rng rng(2);
    auto f = random_mean_zero(mu, rng);
    Cube Q = support_hull(mu, f);
    Q = scale(Q, 1.0 + 1e-9);
    std::vector<double> lambdas{0.0, 0.1, 0.5, 1.0, 2.0, 8.0};
    auto prof = z_complement_profile(mu, f, Q, lambdas, fam);
    double mq = mass_cube(mu, Q), prev = 2.0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        auto z = z_set(mu, f, Q, lambdas[k], fam);
        double in = 0;
        for (auto i : z) in += mu.weight(i);
        CHECK(prof[k].second == doctest::Approx((mq - in) / mq).epsilon(1e-12));
        CHECK(prof[k].second <= prev);
        prev = prof[k].second;
    }
    CHECK(prof.back().second == 0.0);
}

TEST_CASE("jn profile") {
    auto mu = line({0, 1, 2, 3});
    Cube Q = interval(-0.5, 3.5);
    auto c = jn_profile(mu, {4, 4, 4, 4}, Q, {0.0, 1.0});
    for (auto& [l, v] : c) CHECK(v == 0.0);
    auto p = jn_profile(mu, {1, -1, 2, -2}, Q, {0.0, 1.5, 4.0});
    CHECK(p[0].second == 1.0);
    CHECK(p[1].second == 0.5);
    CHECK(p[2].second == 0.0);
}

}
