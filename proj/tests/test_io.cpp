#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "czkit/io.hpp"

using namespace czkit;
namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("measure round trip is exact") {
    GenParams p;
    p.dim = 2;
    auto mu = generate_measure(GenKind::clustered, p, 77);
    auto path = (fs::temp_directory_path() / "czkit_rt_measure.json").string();
    save_measure(mu, path);
    CHECK(load_measure(path) == mu);
    CHECK(measure_from_json(measure_to_json(mu)) == mu);
    fs::remove(path);
}

TEST_CASE("function and cube round trip") {
    SampledFunction f{0.1, -1.0 / 3.0, 1e-300, 12345.678901234567};
    auto path = (fs::temp_directory_path() / "czkit_rt_function.json").string();
    save_function(f, path);
    CHECK(load_function(path, f.size()) == f);
    CHECK_THROWS_AS(load_function(path, f.size() + 1), Error);
    fs::remove(path);
    Cube q({0.1, 1.0 / 7.0}, 0.3);
    CHECK(cube_from_json(cube_to_json(q)) == q);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(measure_from_json(json::parse(R"({"dim": 1})")), Error);
    CHECK_THROWS_AS(read_json("/nonexistent/czkit.json"), Error);
}

TEST_CASE("params round trip") {
    MainParams p;
    p.A = 12.5;
    p.alpha1 = 1;
    p.alpha2 = 2;
    p.alpha3 = 10.5;
    p.sigma = 0.75;
    auto q = params_from_json(params_to_json(p), MainParams{});
    CHECK(q.A == p.A);
    CHECK(q.alpha3 == p.alpha3);
    CHECK(q.sigma == p.sigma);
}

}
