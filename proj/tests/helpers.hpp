#pragma once

#include <vector>

#include "czkit/cube.hpp"
#include "czkit/measure.hpp"

namespace czkit::test {

inline DiscreteMeasure line(std::vector<double> xs, std::vector<double> w = {}, double n = 1.0) {
    std::vector<Point> pts;
    for (double x : xs) pts.push_back({x});
    if (w.empty()) w.assign(xs.size(), 1.0);
    return DiscreteMeasure(1, n, pts, w);
}

inline Cube interval(double a, double b) { return Cube({0.5 * (a + b)}, b - a); }

}  // namespace czkit::test
