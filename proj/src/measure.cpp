#include "czkit/measure.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

namespace czkit {

const char* error_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::EmptyMeasure: return "EmptyMeasure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::NotInSupport: return "NotInSupport";
    case ErrorKind::NotReachable: return "NotReachable";
    case ErrorKind::ZeroSideCube: return "ZeroSideCube";
    case ErrorKind::OmegaIsEverything: return "OmegaIsEverything";
    case ErrorKind::LPNotConverged: return "LPNotConverged";
    case ErrorKind::AdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorKind::ZeroMassCube: return "ZeroMassCube";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotMeanZero: return "NotMeanZero";
    case ErrorKind::LambdaNonpositive: return "LambdaNonpositive";
    case ErrorKind::NotEnoughScales: return "NotEnoughScales";
    case ErrorKind::NestingViolation: return "NestingViolation";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::ParamsInfeasible: return "ParamsInfeasible";
    case ErrorKind::PropertyViolated: return "PropertyViolated";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Error";
}

int thread_count() {
    const char* s = std::getenv("CZKIT_THREADS");
    if (!s) return 1;
    int v = std::atoi(s);
    return v < 1 ? 1 : v;
}

DiscreteMeasure::DiscreteMeasure(int dim, double n, std::vector<Point> points, std::vector<double> weights)
    : dim_(dim), n_(n), weights_(std::move(weights)) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dim must be >= 1");
    if (!(n > 0.0) || n > dim) throw Error(ErrorKind::InvalidArgument, "growth exponent must lie in (0, dim]");
    if (points.size() != weights_.size()) throw Error(ErrorKind::InvalidArgument, "points/weights length mismatch");
    coords_.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != dim) throw Error(ErrorKind::DimensionMismatch, "point dimension");
        for (double c : p) {
            if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite coordinate");
            coords_.push_back(c);
        }
    }
    for (double w : weights_) {
        if (!std::isfinite(w) || !(w > 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be positive and finite");
        total_ += w;
    }
    std::set<Point> seen(points.begin(), points.end());
    if (seen.size() != points.size()) throw Error(ErrorKind::InvalidArgument, "duplicate support points");
}

long DiscreteMeasure::find(std::span<const double> p) const {
    for (std::size_t i = 0; i < size(); ++i) {
        auto q = point(i);
        if (std::equal(q.begin(), q.end(), p.begin())) return static_cast<long>(i);
    }
    return -1;
}

std::vector<Point> DiscreteMeasure::points() const {
    std::vector<Point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        auto p = point(i);
        out.emplace_back(p.begin(), p.end());
    }
    return out;
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
    std::vector<double> w = weights_;
    for (double& v : w) v *= c;
    return DiscreteMeasure(dim_, n_, points(), std::move(w));
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> t) const {
    auto pts = points();
    for (auto& p : pts)
        for (int k = 0; k < dim_; ++k) p[k] += t[k];
    return DiscreteMeasure(dim_, n_, std::move(pts), weights_);
}

namespace {

// For center i: sorted (distance, weight) pairs under the given metric.
template <class Metric>
std::vector<std::pair<double, double>> sorted_shells(const DiscreteMeasure& mu, std::size_t i, Metric metric) {
    std::vector<std::pair<double, double>> d;
    d.reserve(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) d.emplace_back(metric(mu.point(i), mu.point(j)), mu.weight(j));
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace

GrowthReport growth_constant(const DiscreteMeasure& mu) {
    if (mu.empty()) throw Error(ErrorKind::EmptyMeasure, "growth_constant");
    GrowthReport rep;
    if (mu.size() == 1) {
        rep.degenerate = true;
        rep.ball_constant = mu.weight(0);
        rep.cube_constant = mu.weight(0);
        rep.ball_radius = 1.0;
        rep.cube_side = 1.0;
        return rep;
    }
    const double n = mu.n();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto balls = sorted_shells(mu, i, [](auto a, auto b) { return norm2(a, b); });
        double mass = 0.0;
        for (std::size_t k = 0; k < balls.size(); ++k) {
            mass += balls[k].second;
            double r = balls[k].first;
            // closed ball: wait until every atom at this radius is counted
            if (k + 1 < balls.size() && balls[k + 1].first == r) continue;
            if (r <= 0.0) continue;
            double v = mass / std::pow(r, n);
            if (v > rep.ball_constant) {
                rep.ball_constant = v;
                rep.ball_center = i;
                rep.ball_radius = r;
            }
        }
        auto cubes = sorted_shells(mu, i, [](auto a, auto b) { return norm_inf(a, b); });
        mass = 0.0;
        for (std::size_t k = 0; k < cubes.size(); ++k) {
            mass += cubes[k].second;
            double h = cubes[k].first;
            if (k + 1 < cubes.size() && cubes[k + 1].first == h) continue;
            if (h <= 0.0) continue;
            double v = mass / std::pow(2.0 * h, n);
            if (v > rep.cube_constant) {
                rep.cube_constant = v;
                rep.cube_center = i;
                rep.cube_side = 2.0 * h;
            }
        }
    }
    return rep;
}

double empirical_growth_exponent(const DiscreteMeasure& mu) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto cubes = sorted_shells(mu, i, [](auto a, auto b) { return norm_inf(a, b); });
        double mass = 0.0;
        for (std::size_t k = 0; k < cubes.size(); ++k) {
            mass += cubes[k].second;
            if (k + 1 < cubes.size() && cubes[k + 1].first == cubes[k].first) continue;
            if (cubes[k].first <= 0.0) continue;
            double x = std::log(2.0 * cubes[k].first), y = std::log(mass);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++cnt;
        }
    }
    if (cnt < 2) return 0.0;
    double c = static_cast<double>(cnt);
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

GenKind parse_gen_kind(const std::string& s) {
    if (s == "grid") return GenKind::grid;
    if (s == "cantor") return GenKind::cantor;
    if (s == "clustered") return GenKind::clustered;
    throw Error(ErrorKind::InvalidParams, "unknown generator kind '" + s + "'");
}

std::uint64_t Rng::next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

DiscreteMeasure make_grid(const GenParams& p) {
    if (p.points_per_axis < 1 || p.dim < 1) throw Error(ErrorKind::InvalidParams, "grid needs points_per_axis >= 1");
    double n = p.n > 0.0 ? p.n : p.dim;
    std::size_t total = 1;
    for (int k = 0; k < p.dim; ++k) total *= static_cast<std::size_t>(p.points_per_axis);
    std::vector<Point> pts;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Point q(p.dim);
        std::size_t r = idx;
        for (int k = 0; k < p.dim; ++k) {
            q[k] = static_cast<double>(r % p.points_per_axis);
            r /= p.points_per_axis;
        }
        pts.push_back(q);
    }
    return DiscreteMeasure(p.dim, n, std::move(pts), std::vector<double>(total, 1.0));
}

DiscreteMeasure make_cantor(const GenParams& p) {
    if (p.depth < 1 || p.depth > 20 || p.dim < 1) throw Error(ErrorKind::InvalidParams, "cantor depth in [1,20]");
    const double pieces = std::pow(2.0, p.dim);
    double r = p.ratio;
    if (p.n > 0.0) r = std::pow(pieces, -1.0 / p.n);
    if (!(r > 0.0) || r >= 0.5) throw Error(ErrorKind::InvalidParams, "cantor ratio must lie in (0, 1/2)");
    double n = std::log(pieces) / std::log(1.0 / r);
    if (n > p.dim) throw Error(ErrorKind::InvalidParams, "cantor exponent exceeds dim");
    std::vector<double> ends{0.0};
    double len = 1.0;
    for (int level = 0; level < p.depth; ++level) {
        std::vector<double> next;
        for (double a : ends) {
            next.push_back(a);
            next.push_back(a + (1.0 - r) * len);
        }
        ends = std::move(next);
        len *= r;
    }
    std::size_t per = ends.size();
    std::size_t total = 1;
    for (int k = 0; k < p.dim; ++k) total *= per;
    std::vector<Point> pts;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Point q(p.dim);
        std::size_t rem = idx;
        for (int k = 0; k < p.dim; ++k) {
            q[k] = ends[rem % per];
            rem /= per;
        }
        pts.push_back(q);
    }
    return DiscreteMeasure(p.dim, n, std::move(pts), std::vector<double>(total, 1.0 / static_cast<double>(total)));
}

// Clusters of geometric spines: the j-th atom of a cluster sits at distance
// 0.5*spread^j from its center with mass (0.5*spread^j)^n.
DiscreteMeasure make_clustered(const GenParams& p, std::uint64_t seed) {
    if (p.clusters < 1 || p.per_cluster < 1 || !(p.spread > 0.0) || p.spread >= 1.0)
        throw Error(ErrorKind::InvalidParams, "clustered needs clusters>=1, per_cluster>=1, spread in (0,1)");
    double n = p.n > 0.0 ? p.n : p.dim;
    if (n > p.dim) throw Error(ErrorKind::InvalidParams, "n exceeds dim");
    Rng rng(seed);
    std::vector<Point> pts;
    std::vector<double> w;
    double box = 2.0 * std::pow(static_cast<double>(p.clusters), 1.0 / p.dim);
    for (int c = 0; c < p.clusters; ++c) {
        Point center(p.dim);
        for (auto& v : center) v = rng.uniform(0.0, box);
        for (int j = 0; j < p.per_cluster; ++j) {
            Point u(p.dim);
            double s = 0.0;
            do {
                s = 0.0;
                for (auto& v : u) {
                    v = rng.uniform(-1.0, 1.0);
                    s += v * v;
                }
            } while (s < 1e-4);
            double rad = 0.5 * std::pow(p.spread, j);
            Point q(p.dim);
            for (int k = 0; k < p.dim; ++k) q[k] = center[k] + rad * u[k] / std::sqrt(s);
            pts.push_back(q);
            w.push_back(std::pow(rad, n));
        }
        pts.push_back(center);
        w.push_back(std::pow(0.5 * std::pow(p.spread, p.per_cluster), n));
    }
    return DiscreteMeasure(p.dim, n, std::move(pts), std::move(w));
}

}  // namespace

DiscreteMeasure generate_measure(GenKind kind, const GenParams& params, std::uint64_t seed) {
    switch (kind) {
    case GenKind::grid: return make_grid(params);
    case GenKind::cantor: return make_cantor(params);
    case GenKind::clustered: return make_clustered(params, seed);
    }
    throw Error(ErrorKind::InvalidParams, "generator kind");
}

std::vector<double> random_mean_zero(const DiscreteMeasure& mu, Rng& rng) {
    std::vector<double> f(mu.size());
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = rng.uniform(-1.0, 1.0);
        s += f[i] * mu.weight(i);
    }
    double m = s / mu.total_mass();
    for (double& v : f) v -= m;
    return f;
}

}  // namespace czkit
