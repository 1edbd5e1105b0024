#include "czkit/cube.hpp"

#include <algorithm>

namespace czkit {

namespace {

constexpr double kRelTol = 1e-12;

void check_dim(const Cube& q, int d) {
    if (q.dim() != d) throw Error(ErrorKind::DimensionMismatch, "cube dimension");
}

}  // namespace

bool Cube::contains(std::span<const double> p) const {
    if (side == 0.0) return std::equal(center.begin(), center.end(), p.begin());
    double lim = half() * (1.0 + kRelTol);
    for (std::size_t k = 0; k < center.size(); ++k)
        if (std::abs(p[k] - center[k]) > lim) return false;
    return true;
}

bool Cube::contains(const Cube& o) const {
    if (o.side == 0.0) return contains(std::span<const double>(o.center));
    if (side == 0.0) return false;
    double lim = half() * (1.0 + kRelTol);
    for (std::size_t k = 0; k < center.size(); ++k)
        if (std::abs(o.center[k] - center[k]) + o.half() > lim) return false;
    return true;
}

bool Cube::intersects(const Cube& o) const {
    if (side == 0.0 && o.side == 0.0) return center == o.center;
    double lim = (half() + o.half()) * (1.0 + kRelTol);
    for (std::size_t k = 0; k < center.size(); ++k)
        if (std::abs(o.center[k] - center[k]) > lim) return false;
    return true;
}

Cube scale(const Cube& q, double rho) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
    return Cube(q.center, q.side * rho);
}

Cube concentric_hull(const Cube& q, const Cube& r) {
    if (q.dim() != r.dim()) throw Error(ErrorKind::DimensionMismatch, "concentric_hull");
    double s = q.side;
    for (int k = 0; k < q.dim(); ++k) s = std::max(s, 2.0 * (std::abs(r.center[k] - q.center[k]) + r.half()));
    return Cube(q.center, s);
}

double mass_cube(const DiscreteMeasure& mu, const Cube& q) {
    check_dim(q, mu.dim());
    double m = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (q.contains(mu.point(i))) m += mu.weight(i);
    return m;
}

std::vector<std::size_t> atoms_in(const DiscreteMeasure& mu, const Cube& q) {
    check_dim(q, mu.dim());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (q.contains(mu.point(i))) out.push_back(i);
    return out;
}

namespace {

// sum of w_y / |y - z_Q|^n over y in hull \ Q
double one_sided(const DiscreteMeasure& mu, const Cube& q, const Cube& hull) {
    double s = 0.0;
    const double n = mu.n();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto y = mu.point(i);
        if (!hull.contains(y) || q.contains(y)) continue;
        s += mu.weight(i) / std::pow(norm2(y, q.center), n);
    }
    return s;
}

}  // namespace

double delta(const DiscreteMeasure& mu, const Cube& q, const Cube& r) {
    check_dim(q, mu.dim());
    check_dim(r, mu.dim());
    return std::max(one_sided(mu, q, concentric_hull(q, r)), one_sided(mu, r, concentric_hull(r, q)));
}

double delta_point(const DiscreteMeasure& mu, std::size_t x, const Cube& r) {
    auto p = mu.point(x);
    return delta(mu, Cube(Point(p.begin(), p.end()), 0.0), r);
}

double k_coeff(const DiscreteMeasure& mu, const Cube& q, const Cube& r) {
    if (!r.contains(q)) throw Error(ErrorKind::NotNested, "k_coeff requires Q inside R");
    return 1.0 + delta(mu, q, r);
}

bool is_doubling(const DiscreteMeasure& mu, const Cube& q, const DoublingParams& p) {
    if (q.is_point()) return true;
    return mass_cube(mu, scale(q, p.alpha)) <= p.beta_for(mu.dim()) * mass_cube(mu, q);
}

AncestorResult smallest_doubling_ancestor(const DiscreteMeasure& mu, const Cube& q, const DoublingParams& p) {
    Cube cur = q;
    for (int k = 0; k < 4096; ++k) {
        if (is_doubling(mu, cur, p)) return {cur, k};
        cur = scale(cur, 2.0);
    }
    throw Error(ErrorKind::InvalidArgument, "no doubling ancestor found");
}

DeltaSearch find_cube_at_delta(const DiscreteMeasure& mu, std::size_t x, const Cube& R0, double alpha,
                               const DoublingParams& p) {
    if (x >= mu.size()) throw Error(ErrorKind::NotInSupport, "find_cube_at_delta");
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
    DeltaSearch out;
    Cube R2 = scale(R0, 2.0);
    auto xp = mu.point(x);
    Point xc(xp.begin(), xp.end());
    if (delta(mu, Cube(xc, 0.0), R2) <= alpha) return out;
    double side = R0.side;
    Cube q1(xc, 0.0);
    for (int k = 1; k < 2100; ++k) {
        side *= 0.5;
        Cube cand(xc, side);
        if (side == 0.0 || delta(mu, cand, R2) >= alpha) {
            q1 = cand;
            break;
        }
    }
    auto anc = smallest_doubling_ancestor(mu, q1, p);
    out.reachable = true;
    out.start = q1;
    out.cube = anc.cube;
    out.ancestor_steps = anc.steps;
    out.delta_value = delta(mu, out.cube, R2);
    out.eps1_achieved = std::abs(out.delta_value - alpha);
    out.c3_achieved = delta(mu, q1, out.cube);
    out.inside_2R0 = R2.contains(out.cube);
    return out;
}

double additivity_defect(const DiscreteMeasure& mu, const Cube& P, const Cube& Q, const Cube& R) {
    return std::abs(delta(mu, P, R) - delta(mu, P, Q) - delta(mu, Q, R));
}

double additivity_bound(const DiscreteMeasure& mu, const Cube& P, const Cube& Q, const Cube& R) {
    const double n = mu.n();
    Cube PQ = concentric_hull(P, Q), PR = concentric_hull(P, R), QR = concentric_hull(Q, R);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto y = mu.point(i);
        double w = mu.weight(i);
        bool inPQ = PQ.contains(y);
        if (inPQ && !Q.contains(y)) s1 += w / std::pow(norm2(y, Q.center), n);
        bool inPR = PR.contains(y), inQR = QR.contains(y);
        if (inPR != inQR) s2 += w / std::pow(norm2(y, P.center), n) + w / std::pow(norm2(y, Q.center), n);
        if (!inPQ) s3 += w * std::abs(std::pow(norm2(y, P.center), -n) - std::pow(norm2(y, Q.center), -n));
    }
    return s1 + s2 + s3;
}

double DeltaMemo::operator()(const Cube& q, const Cube& r) {
    auto key = std::make_pair(q, r);
    {
        std::lock_guard<std::mutex> lk(mu_lock_);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
    }
    double v = delta(mu_, q, r);
    std::lock_guard<std::mutex> lk(mu_lock_);
    table_.emplace(key, v);
    return v;
}

std::size_t DeltaMemo::size() const {
    std::lock_guard<std::mutex> lk(mu_lock_);
    return table_.size();
}

}  // namespace czkit
