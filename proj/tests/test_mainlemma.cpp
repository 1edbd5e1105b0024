#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/mainlemma.hpp"

using namespace czkit;

namespace {

// geometric spine 2^-j toward the origin: deep enough for a nondegenerate chain
DiscreteMeasure spine(int L) {
    std::vector<Point> pts{{0.0}};
    std::vector<double> w{std::ldexp(1.0, -L)};
    for (int j = 0; j < L; ++j) {
        pts.push_back({std::ldexp(1.0, -j)});
        w.push_back(std::ldexp(1.0, -j - 1));
    }
    return DiscreteMeasure(1, 1.0, pts, w);
}

MainParams chain(double e) {
    MainParams p;
    p.eps1 = e;
    p.sigma = p.alpha1 = 2.5 * e;
    p.alpha2 = p.sigma + 2.5 * e;
    p.alpha3 = 10.5 * p.alpha2;
    p.A = std::max(1.1 * p.alpha3, 1.05 * (p.alpha1 + p.alpha2 + 2 * p.sigma + 2 * e));
    return p;
}

}  // namespace

TEST_SUITE("mainlemma") {

TEST_CASE("parameter chain") {
    MainParams p = chain(0.5);
    CHECK_NOTHROW(validate_params(p));
    p.alpha3 = p.A * 2;
    CHECK_THROWS(validate_params(p));
}

TEST_CASE("zero function") {
    auto mu = test::line({0, 1, 2, 3});
    SampledFunction f(4, 0.0);
    Cube R0 = auto_R0(mu);
    auto dec = decompose_main(mu, f, R0, default_params(mu, instance_constants(mu, R0)));
    for (double v : dec.h0) CHECK(v == 0.0);
    CHECK(all_pass(dec.properties));
    CHECK(all_pass(verify_claims(mu, f, dec)));
}

TEST_CASE("spine: nondegenerate companions and kernel identities") {
    auto mu = spine(250);
    SampledFunction f(mu.size());
    double mean = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        f[i] = -std::log(std::abs(mu.point(i)[0]) + 1e-300);
        mean += f[i] * mu.weight(i);
    }
    for (auto& v : f) v -= mean / mu.total_mass();
    Cube R0 = auto_R0(mu);
    MainParams p = chain(instance_constants(mu, R0).eps1);
    auto dec = decompose_main(mu, f, R0, p);
    std::size_t volume = 0;
    for (const auto& G : dec.gens) volume += G.gen.volume_count;
    CHECK(volume > 0);
    for (const auto& c : dec.properties) {
        INFO(c.name << " " << c.detail);
        CHECK(c.pass);
    }

    // psi equals the kernel exactly on the annulus Q2hat \ Q1
    std::size_t y = 1;
    auto comp = companions(mu, y, 1, R0, p);
    CHECK(nesting_failure(comp).empty());
    auto psi = psi_kernel(mu, comp, y, p.cap_for(mu.n()));
    auto cond = check_psi(mu, comp, y, p.cap_for(mu.n()));
    CHECK(cond.equality);
    CHECK(cond.support);
    CHECK(cond.bound);
    double yy = mu.point(y)[0];
    for (std::size_t x = 0; x < mu.size(); ++x) {
        auto px = mu.point(x);
        if (comp.q2hat.contains(px) && !comp.q1.contains(px))
            CHECK(psi[x] == doctest::Approx(1.0 / std::abs(px[0] - yy)).epsilon(1e-12));
        if (!comp.q3.contains(px)) CHECK(psi[x] == 0.0);
    }
}

}
