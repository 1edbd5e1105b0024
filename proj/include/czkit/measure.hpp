#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "czkit/common.hpp"

namespace czkit {

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    DiscreteMeasure(int dim, double n, std::vector<Point> points, std::vector<double> weights);

    int dim() const { return dim_; }
    double n() const { return n_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    double total_mass() const { return total_; }

    // Index of the atom located exactly at p, or -1.
    long find(std::span<const double> p) const;

    std::vector<Point> points() const;

    // Same support, weights multiplied by c.
    DiscreteMeasure scaled(double c) const;
    DiscreteMeasure translated(std::span<const double> t) const;

    bool operator==(const DiscreteMeasure& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && coords_ == o.coords_ && weights_ == o.weights_;
    }

private:
    int dim_ = 1;
    double n_ = 1.0;
    std::vector<double> coords_;
    std::vector<double> weights_;
    double total_ = 0.0;
};

struct GrowthReport {
    double ball_constant = 0.0;
    double cube_constant = 0.0;
    std::size_t ball_center = 0;
    double ball_radius = 0.0;
    std::size_t cube_center = 0;
    double cube_side = 0.0;
    bool degenerate = false;
};

GrowthReport growth_constant(const DiscreteMeasure& mu);

// Least-squares slope of log mu(cube) against log side over all centers and
// thresholds; a rough empirical growth exponent.
double empirical_growth_exponent(const DiscreteMeasure& mu);

enum class GenKind { grid, cantor, clustered };

GenKind parse_gen_kind(const std::string& s);

struct GenParams {
    int dim = 1;
    int points_per_axis = 4;  // grid
    int depth = 5;            // cantor
    double ratio = 1.0 / 3.0; // cantor contraction
    double n = 0.0;           // target exponent; 0 means "natural"
    int clusters = 3;         // clustered
    int per_cluster = 16;     // clustered
    double spread = 0.5;      // clustered geometric ratio
};

DiscreteMeasure generate_measure(GenKind kind, const GenParams& params, std::uint64_t seed);

// Deterministic splitmix-style generator with portable uniform doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ^ 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next();
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t s_;
};

// Random mean-zero values aligned to mu.
std::vector<double> random_mean_zero(const DiscreteMeasure& mu, Rng& rng);

}  // namespace czkit
