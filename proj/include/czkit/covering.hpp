#pragma once

#include <vector>

#include "czkit/cube.hpp"

namespace czkit {

struct BesicovichCover {
    std::vector<std::size_t> selected;          // positions into the input lists
    std::vector<Cube> cubes;                    // selected cubes, same order
    std::vector<std::vector<std::size_t>> families;  // indices into `cubes`
    std::vector<std::size_t> family_of;         // per selected cube
    int overlap_achieved = 0;
    int overlap_bound = 0;                      // 2^d for the center-uncovered rule
};

BesicovichCover besicovich_cover(const std::vector<Point>& centers, const std::vector<Cube>& cubes);

// Max number of closed cubes sharing a common point (exact for boxes).
int max_overlap(const std::vector<Cube>& cubes);

enum class CubeKind { volume, point };

struct Generation {
    int m = 1;
    Cube R0;
    double A = 1.0;
    std::vector<Cube> cubes;             // volume cubes first, then point-cubes
    std::vector<CubeKind> kind;
    std::vector<std::size_t> center_atom;  // atom index of each cube's center
    std::vector<std::size_t> family;     // Besicovich family; point-cubes get family 0
    std::size_t families = 0;
    std::size_t volume_count = 0;
    std::vector<double> delta_to_2R0;    // delta(Q, 2R0) per cube
    // per atom y: (cube index, w_{i,m}(y)) over the cubes containing y
    std::vector<std::vector<std::pair<std::size_t, double>>> weights;
    std::vector<double> atom_delta;      // delta({x}, 2R0) for every atom
    double eps1_achieved = 0.0;
    int overlap_achieved = 0;
};

Generation build_generation(const DiscreteMeasure& mu, const Cube& R0, int m, double A,
                            const DoublingParams& p = {}, const std::vector<double>* atom_delta = nullptr);

// delta({x}, 2R0) for all atoms.
std::vector<double> atom_deltas(const DiscreteMeasure& mu, const Cube& R0);

// Finite union of open axis-parallel cubes.
class OpenRegion {
public:
    OpenRegion() = default;
    explicit OpenRegion(std::vector<Cube> boxes) : boxes_(std::move(boxes)) {}

    void add(const Cube& box) {
        if (box.side > 0.0) boxes_.push_back(box);
    }
    const std::vector<Cube>& boxes() const { return boxes_; }
    bool empty() const { return boxes_.empty(); }

    bool contains(std::span<const double> p) const;
    // closed cube q is a subset of the open union
    bool contains_closed(const Cube& q) const;
    bool meets(const Cube& q) const;
    bool meets_complement(const Cube& q) const { return !contains_closed(q); }
    // smallest cube containing every box
    Cube bounding_cube() const;

private:
    std::vector<Cube> boxes_;
};

struct WhitneyDecomposition {
    std::vector<Cube> cubes;
    std::vector<int> levels;
    double beta = 60.0;
    int overlap_bound = 0;  // max number of 10Q_i meeting a fixed 10Q_k
};

// Dyadic cubes of the lattice anchored at `bounding`. Cubes are refined while
// they meet omega and lie above min_level, or while they hold a required point
// of omega not yet covered.
WhitneyDecomposition whitney_decompose(const OpenRegion& omega, const Cube& bounding, int min_level,
                                       const std::vector<Point>& required = {});

struct WhitneyCheck {
    bool disjoint_interiors = true;
    bool inner_20 = true;
    bool outer_beta = true;
    bool covers_required = true;
};
WhitneyCheck check_whitney(const WhitneyDecomposition& w, const OpenRegion& omega, const std::vector<Point>& required);

}  // namespace czkit
