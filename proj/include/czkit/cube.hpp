#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "czkit/measure.hpp"

namespace czkit {

struct Cube {
    Point center;
    double side = 0.0;

    Cube() = default;
    Cube(Point c, double s) : center(std::move(c)), side(s) {}

    int dim() const { return static_cast<int>(center.size()); }
    bool is_point() const { return side == 0.0; }
    double half() const { return 0.5 * side; }

    // Closed membership in l^inf; a point-cube contains only its center.
    bool contains(std::span<const double> p) const;
    // other is a subset of this (closed sets).
    bool contains(const Cube& other) const;
    bool intersects(const Cube& other) const;

    bool operator==(const Cube& o) const { return side == o.side && center == o.center; }
    bool operator<(const Cube& o) const { return side != o.side ? side < o.side : center < o.center; }
};

struct DoublingParams {
    double alpha = 2.0;
    double beta = 0.0;  // 0 means 2^{d+1}

    double beta_for(int d) const { return beta > 0.0 ? beta : std::pow(2.0, d + 1); }
};

Cube scale(const Cube& q, double rho);
Cube concentric_hull(const Cube& q, const Cube& r);

double mass_cube(const DiscreteMeasure& mu, const Cube& q);
// Indices of the atoms inside q.
std::vector<std::size_t> atoms_in(const DiscreteMeasure& mu, const Cube& q);

double delta(const DiscreteMeasure& mu, const Cube& q, const Cube& r);
// delta against a point-cube at atom x.
double delta_point(const DiscreteMeasure& mu, std::size_t x, const Cube& r);
double k_coeff(const DiscreteMeasure& mu, const Cube& q, const Cube& r);

bool is_doubling(const DiscreteMeasure& mu, const Cube& q, const DoublingParams& p = {});

struct AncestorResult {
    Cube cube;
    int steps = 0;
};
AncestorResult smallest_doubling_ancestor(const DiscreteMeasure& mu, const Cube& q, const DoublingParams& p = {});

struct DeltaSearch {
    bool reachable = false;
    Cube cube;            // Q (doubling)
    Cube start;           // Q_1 before the ancestor step
    int ancestor_steps = 0;
    double delta_value = 0.0;    // delta(Q, 2R0)
    double eps1_achieved = 0.0;  // |delta(Q,2R0) - alpha|
    double c3_achieved = 0.0;    // delta(Q_1, Q)
    bool inside_2R0 = true;
};

DeltaSearch find_cube_at_delta(const DiscreteMeasure& mu, std::size_t x, const Cube& R0, double alpha,
                               const DoublingParams& p = {});

// |delta(P,R) - delta(P,Q) - delta(Q,R)|.
double additivity_defect(const DiscreteMeasure& mu, const Cube& P, const Cube& Q, const Cube& R);
// S1+S2+S3 estimate bounding the defect for nested P in Q in R.
double additivity_bound(const DiscreteMeasure& mu, const Cube& P, const Cube& Q, const Cube& R);

// Optional memo for delta; results are identical to calling delta directly.
class DeltaMemo {
public:
    explicit DeltaMemo(const DiscreteMeasure& mu) : mu_(mu) {}
    double operator()(const Cube& q, const Cube& r);
    std::size_t size() const;

private:
    const DiscreteMeasure& mu_;
    mutable std::mutex mu_lock_;
    std::map<std::pair<Cube, Cube>, double> table_;
};

}  // namespace czkit
