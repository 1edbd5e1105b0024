#include "czkit/covering.hpp"

#include <algorithm>
#include <cfloat>
#include <numeric>

#include "czkit/parallel.hpp"

namespace czkit {

int max_overlap(const std::vector<Cube>& cubes) {
    if (cubes.empty()) return 0;
    const int d = cubes[0].dim();
    std::vector<std::vector<double>> cand(d);
    for (const auto& c : cubes)
        for (int k = 0; k < d; ++k) cand[k].push_back(c.center[k] - c.half());
    for (auto& v : cand) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    double combos = 1.0;
    for (auto& v : cand) combos *= static_cast<double>(v.size());
    int best = 0;
    auto count_at = [&](const Point& p) {
        int c = 0;
        for (const auto& q : cubes)
            if (q.contains(p)) ++c;
        return c;
    };
    if (combos * static_cast<double>(cubes.size()) > 5e8) {
        // fall back to corners of pairwise intersections
        for (std::size_t i = 0; i < cubes.size(); ++i)
            for (std::size_t j = i; j < cubes.size(); ++j) {
                Point p(d);
                for (int k = 0; k < d; ++k)
                    p[k] = std::max(cubes[i].center[k] - cubes[i].half(), cubes[j].center[k] - cubes[j].half());
                best = std::max(best, count_at(p));
            }
        return best;
    }
    std::vector<std::size_t> idx(d, 0);
    Point p(d);
    for (;;) {
        for (int k = 0; k < d; ++k) p[k] = cand[k][idx[k]];
        best = std::max(best, count_at(p));
        int k = 0;
        while (k < d && ++idx[k] == cand[k].size()) idx[k++] = 0;
        if (k == d) break;
    }
    return best;
}

BesicovichCover besicovich_cover(const std::vector<Point>& centers, const std::vector<Cube>& cubes) {
    if (centers.size() != cubes.size()) throw Error(ErrorKind::InvalidArgument, "centers/cubes length mismatch");
    for (const auto& c : cubes)
        if (!(c.side > 0.0)) throw Error(ErrorKind::ZeroSideCube, "besicovich_cover needs positive sides");
    std::vector<std::size_t> order(cubes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cubes[a].side > cubes[b].side; });
    BesicovichCover out;
    for (std::size_t i : order) {
        bool covered = false;
        for (const auto& q : out.cubes)
            if (q.contains(centers[i])) {
                covered = true;
                break;
            }
        if (covered) continue;
        out.selected.push_back(i);
        out.cubes.push_back(cubes[i]);
    }
    out.family_of.assign(out.cubes.size(), 0);
    for (std::size_t i = 0; i < out.cubes.size(); ++i) {
        std::vector<bool> used;
        for (std::size_t j = 0; j < i; ++j)
            if (out.cubes[i].intersects(out.cubes[j])) {
                if (used.size() <= out.family_of[j]) used.resize(out.family_of[j] + 1, false);
                used[out.family_of[j]] = true;
            }
        std::size_t c = 0;
        while (c < used.size() && used[c]) ++c;
        out.family_of[i] = c;
        if (out.families.size() <= c) out.families.resize(c + 1);
        out.families[c].push_back(i);
    }
    out.overlap_achieved = max_overlap(out.cubes);
    out.overlap_bound = centers.empty() ? 0 : 1 << static_cast<int>(centers[0].size());
    return out;
}

std::vector<double> atom_deltas(const DiscreteMeasure& mu, const Cube& R0) {
    Cube R2 = scale(R0, 2.0);
    std::vector<double> d(mu.size());
    parallel_for(mu.size(), [&](std::size_t i) { d[i] = delta_point(mu, i, R2); });
    return d;
}

Generation build_generation(const DiscreteMeasure& mu, const Cube& R0, int m, double A, const DoublingParams& p,
                            const std::vector<double>* atom_delta) {
    if (!(A > 0.0) || m < 1) throw Error(ErrorKind::InvalidArgument, "build_generation needs A > 0, m >= 1");
    Generation g;
    g.m = m;
    g.R0 = R0;
    g.A = A;
    g.atom_delta = atom_delta ? *atom_delta : atom_deltas(mu, R0);
    const double target = m * A;
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (R0.contains(mu.point(i)) && g.atom_delta[i] > target) cand.push_back(i);
    std::vector<DeltaSearch> found(cand.size());
    parallel_for(cand.size(), [&](std::size_t k) { found[k] = find_cube_at_delta(mu, cand[k], R0, target, p); });
    std::vector<Point> centers;
    std::vector<Cube> qs;
    for (std::size_t k = 0; k < cand.size(); ++k) {
        auto pt = mu.point(cand[k]);
        centers.emplace_back(pt.begin(), pt.end());
        qs.push_back(found[k].cube);
    }
    if (!qs.empty()) {
        auto cover = besicovich_cover(centers, qs);
        for (std::size_t s = 0; s < cover.cubes.size(); ++s) {
            std::size_t k = cover.selected[s];
            g.cubes.push_back(cover.cubes[s]);
            g.kind.push_back(CubeKind::volume);
            g.center_atom.push_back(cand[k]);
            g.family.push_back(cover.family_of[s]);
            g.delta_to_2R0.push_back(found[k].delta_value);
            g.eps1_achieved = std::max(g.eps1_achieved, found[k].eps1_achieved);
        }
        g.families = cover.families.size();
        g.overlap_achieved = cover.overlap_achieved;
    }
    g.volume_count = g.cubes.size();
    g.weights.assign(mu.size(), {});
    for (std::size_t y = 0; y < mu.size(); ++y) {
        for (std::size_t i = 0; i < g.volume_count; ++i)
            if (g.cubes[i].contains(mu.point(y))) g.weights[y].emplace_back(i, 1.0);
        for (auto& [i, w] : g.weights[y]) w = 1.0 / static_cast<double>(g.weights[y].size());
    }
    for (std::size_t x = 0; x < mu.size(); ++x) {
        if (!R0.contains(mu.point(x)) || g.atom_delta[x] > target || !g.weights[x].empty()) continue;
        auto pt = mu.point(x);
        g.weights[x].emplace_back(g.cubes.size(), 1.0);
        g.cubes.emplace_back(Point(pt.begin(), pt.end()), 0.0);
        g.kind.push_back(CubeKind::point);
        g.center_atom.push_back(x);
        g.family.push_back(0);
        g.delta_to_2R0.push_back(g.atom_delta[x]);
    }
    if (g.families == 0 && g.cubes.size() > g.volume_count) g.families = 1;
    return g;
}

bool OpenRegion::contains(std::span<const double> p) const {
    for (const auto& b : boxes_) {
        bool in = true;
        for (std::size_t k = 0; k < b.center.size() && in; ++k) in = std::abs(p[k] - b.center[k]) < b.half();
        if (in) return true;
    }
    return false;
}

bool OpenRegion::meets(const Cube& q) const {
    if (q.is_point()) return contains(q.center);
    for (const auto& b : boxes_) {
        bool in = true;
        for (std::size_t k = 0; k < b.center.size() && in; ++k) in = std::abs(q.center[k] - b.center[k]) < b.half() + q.half();
        if (in) return true;
    }
    return false;
}

bool OpenRegion::contains_closed(const Cube& q) const {
    if (q.is_point()) return contains(q.center);
    const int d = q.dim();
    std::vector<const Cube*> rel;
    for (const auto& b : boxes_) {
        bool in = true;
        for (int k = 0; k < d && in; ++k) in = std::abs(q.center[k] - b.center[k]) < b.half() + q.half();
        if (in) rel.push_back(&b);
    }
    if (rel.empty()) return false;
    // Elementary pieces per axis: breakpoints (even slots) and open gaps (odd slots).
    std::vector<std::vector<double>> brk(d);
    for (int k = 0; k < d; ++k) {
        double lo = q.center[k] - q.half(), hi = q.center[k] + q.half();
        brk[k] = {lo, hi};
        for (const Cube* b : rel) {
            double a = b->center[k] - b->half(), c = b->center[k] + b->half();
            if (a > lo && a < hi) brk[k].push_back(a);
            if (c > lo && c < hi) brk[k].push_back(c);
        }
        std::sort(brk[k].begin(), brk[k].end());
        brk[k].erase(std::unique(brk[k].begin(), brk[k].end()), brk[k].end());
    }
    std::vector<std::size_t> slot(d, 0), nslots(d);
    for (int k = 0; k < d; ++k) nslots[k] = 2 * brk[k].size() - 1;
    for (;;) {
        bool covered = false;
        for (const Cube* b : rel) {
            bool in = true;
            for (int k = 0; k < d && in; ++k) {
                double lo = b->center[k] - b->half(), hi = b->center[k] + b->half();
                std::size_t s = slot[k];
                if (s % 2 == 0) {
                    double v = brk[k][s / 2];
                    in = lo < v && v < hi;
                } else {
                    in = lo <= brk[k][s / 2] && brk[k][s / 2 + 1] <= hi;
                }
            }
            if (in) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
        int k = 0;
        while (k < d && ++slot[k] == nslots[k]) slot[k++] = 0;
        if (k == d) break;
    }
    return true;
}

Cube OpenRegion::bounding_cube() const {
    if (boxes_.empty()) throw Error(ErrorKind::InvalidArgument, "empty region");
    const int d = boxes_[0].dim();
    Point lo(d, INFINITY), hi(d, -INFINITY);
    for (const auto& b : boxes_)
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], b.center[k] - b.half());
            hi[k] = std::max(hi[k], b.center[k] + b.half());
        }
    Point c(d);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        c[k] = 0.5 * (lo[k] + hi[k]);
        s = std::max(s, hi[k] - lo[k]);
    }
    return Cube(c, s);
}

namespace {

struct WhitneyBuilder {
    const OpenRegion& omega;
    int min_level;
    const std::vector<Point>& required;
    WhitneyDecomposition out;

    bool holds_required(const Cube& q) const {
        for (const auto& p : required)
            if (q.contains(p) && omega.contains(p)) return true;
        return false;
    }

    void visit(const Cube& q, int level) {
        if (!omega.meets(q)) return;
        if (omega.contains_closed(scale(q, 20.0))) {
            if (level == 0 && omega.contains_closed(scale(q, out.beta)))
                throw Error(ErrorKind::OmegaIsEverything, "omega contains the fattened bounding cube");
            out.cubes.push_back(q);
            out.levels.push_back(level);
            return;
        }
        bool refine = level < min_level || holds_required(q);
        if (!refine || level >= 200) return;
        const int d = q.dim();
        for (int mask = 0; mask < (1 << d); ++mask) {
            Point c = q.center;
            for (int k = 0; k < d; ++k) c[k] += ((mask >> k) & 1 ? 0.25 : -0.25) * q.side;
            visit(Cube(c, 0.5 * q.side), level + 1);
        }
    }
};

}  // namespace

WhitneyDecomposition whitney_decompose(const OpenRegion& omega, const Cube& bounding, int min_level,
                                       const std::vector<Point>& required) {
    WhitneyBuilder b{omega, min_level, required, {}};
    if (omega.empty()) return b.out;
    b.visit(bounding, 0);
    auto& cs = b.out.cubes;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        Cube tk = scale(cs[k], 10.0);
        int cnt = 0;
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (tk.intersects(scale(cs[i], 10.0))) ++cnt;
        b.out.overlap_bound = std::max(b.out.overlap_bound, cnt);
    }
    return b.out;
}

WhitneyCheck check_whitney(const WhitneyDecomposition& w, const OpenRegion& omega, const std::vector<Point>& required) {
    WhitneyCheck c;
    const auto& cs = w.cubes;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.size() && c.disjoint_interiors; ++j) {
            bool overlap = true;
            for (int k = 0; k < cs[i].dim() && overlap; ++k) {
                // dyadic centers carry rounding proportional to their magnitude
                double slack = 1e-12 * (cs[i].half() + cs[j].half()) +
                               8.0 * DBL_EPSILON * std::max(std::abs(cs[i].center[k]), std::abs(cs[j].center[k]));
                overlap = std::abs(cs[i].center[k] - cs[j].center[k]) < cs[i].half() + cs[j].half() - slack;
            }
            if (overlap) c.disjoint_interiors = false;
        }
        if (!omega.contains_closed(scale(cs[i], 20.0))) c.inner_20 = false;
        if (!omega.meets_complement(scale(cs[i], w.beta))) c.outer_beta = false;
    }
    for (const auto& p : required) {
        if (!omega.contains(p)) continue;
        bool hit = false;
        for (const auto& q : cs)
            if (q.contains(p)) {
                hit = true;
                break;
            }
        if (!hit) c.covers_required = false;
    }
    return c;
}

}  // namespace czkit
