#pragma once

#include <string>
#include <vector>

#include "czkit/cube.hpp"

namespace czkit {

using SampledFunction = std::vector<double>;

double mean(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q);

// Cubes centered at support points with sides at the l^inf thresholds
// 2|y - x|_inf and their halves. Each cube is stored as (center, side, k)
// where its atoms are the first k entries of order[center].
struct CanonicalFamily {
    std::vector<std::vector<std::size_t>> order;  // per center: atoms sorted by l^inf distance
    std::vector<std::vector<double>> dist;        // matching distances
    std::vector<std::size_t> center;
    std::vector<double> side;
    std::vector<std::size_t> count;
    std::vector<double> mass;
    std::vector<char> doubling;

    std::size_t size() const { return side.size(); }
    Cube cube(const DiscreteMeasure& mu, std::size_t i) const;
    // atoms of an arbitrary side around center c
    std::size_t count_inside(std::size_t c, double s) const;
};

CanonicalFamily canonical_family(const DiscreteMeasure& mu, const DoublingParams& p = {});

struct RbmoEstimate {
    double value = 0.0;
    double def1 = 0.0;
    double def2 = 0.0;      // 0 unless some nested pair exceeds def1
    Cube witness_q;         // def1 cube, or inner cube for def2
    Cube witness_r;         // outer cube for def2
    bool witness_is_pair = false;
    std::size_t family_size = 0;
    std::size_t doubling_count = 0;
};

RbmoEstimate rbmo_norm(const DiscreteMeasure& mu, const SampledFunction& f, const DoublingParams& p = {});
RbmoEstimate rbmo_norm(const DiscreteMeasure& mu, const SampledFunction& f, const CanonicalFamily& fam);

struct BlockAtom {
    Cube q;
    SampledFunction a;
    double lambda = 0.0;
};

struct AtomicBlock {
    Cube host;
    std::vector<BlockAtom> atoms;
    double rho = 2.0;

    SampledFunction sum(std::size_t n) const;
};

struct BlockViolation {
    std::string kind;  // "support", "nesting", "cancellation", "size condition"
    long index = -1;
    double magnitude = 0.0;
};

struct BlockReport {
    bool valid = true;
    double norm = 0.0;
    std::vector<BlockViolation> violations;
};

BlockReport validate_atomic_block(const DiscreteMeasure& mu, const AtomicBlock& block);

// Single-atom block b = f on host R (used as the fallback block).
AtomicBlock single_block(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& host);

// Smallest cube containing every atom where f is nonzero (side >= tiny positive).
Cube support_hull(const DiscreteMeasure& mu, const SampledFunction& f);

struct H1Bound {
    double bound = 0.0;
    std::vector<AtomicBlock> blocks;
    int level = 0;             // chosen k, or INT_MIN for the fallback block
    bool fallback = true;
};

H1Bound h1_upper_bound(const DiscreteMeasure& mu, const SampledFunction& f);

std::vector<std::pair<double, double>> jn_profile(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q,
                                                  const std::vector<double>& lambdas);

std::vector<std::size_t> z_set(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q, double lambda,
                               const CanonicalFamily& fam);
std::vector<std::size_t> z_set(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q, double lambda);
// mu(Q minus Z(Q,lambda)) / mu(Q) for every lambda, from one pass over the family.
std::vector<std::pair<double, double>> z_complement_profile(const DiscreteMeasure& mu, const SampledFunction& f,
                                                            const Cube& q, const std::vector<double>& lambdas,
                                                            const CanonicalFamily& fam);

double l1_norm(const DiscreteMeasure& mu, const SampledFunction& f);
double integral(const DiscreteMeasure& mu, const SampledFunction& f);
double sup_norm(const SampledFunction& f);

}  // namespace czkit
