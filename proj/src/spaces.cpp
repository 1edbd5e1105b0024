#include "czkit/spaces.hpp"

#include <algorithm>
#include <numeric>

#include "czkit/parallel.hpp"

namespace czkit {

double l1_norm(const DiscreteMeasure& mu, const SampledFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i]) * mu.weight(i);
    return s;
}

double integral(const DiscreteMeasure& mu, const SampledFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * mu.weight(i);
    return s;
}

double sup_norm(const SampledFunction& f) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::abs(v));
    return s;
}

double mean(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q) {
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (q.contains(mu.point(i))) {
            m += mu.weight(i);
            s += f[i] * mu.weight(i);
        }
    if (!(m > 0.0)) throw Error(ErrorKind::ZeroMassCube, "mean over an empty cube");
    return s / m;
}

Cube CanonicalFamily::cube(const DiscreteMeasure& mu, std::size_t i) const {
    auto p = mu.point(center[i]);
    return Cube(Point(p.begin(), p.end()), side[i]);
}

std::size_t CanonicalFamily::count_inside(std::size_t c, double s) const {
    double lim = s == 0.0 ? 0.0 : 0.5 * s * (1.0 + 1e-12);
    const auto& d = dist[c];
    return static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), lim) - d.begin());
}

CanonicalFamily canonical_family(const DiscreteMeasure& mu, const DoublingParams& p) {
    const std::size_t N = mu.size();
    CanonicalFamily fam;
    fam.order.resize(N);
    fam.dist.resize(N);
    const double beta = p.beta_for(mu.dim());
    for (std::size_t c = 0; c < N; ++c) {
        std::vector<std::pair<double, std::size_t>> od(N);
        for (std::size_t j = 0; j < N; ++j) od[j] = {norm_inf(mu.point(j), mu.point(c)), j};
        std::sort(od.begin(), od.end());
        std::vector<double> cum(N + 1, 0.0);
        for (std::size_t j = 0; j < N; ++j) {
            fam.order[c].push_back(od[j].second);
            fam.dist[c].push_back(od[j].first);
            cum[j + 1] = cum[j] + mu.weight(od[j].second);
        }
        std::vector<double> sides;
        for (double d : fam.dist[c]) {
            sides.push_back(2.0 * d);
            sides.push_back(d);
        }
        std::sort(sides.begin(), sides.end());
        sides.erase(std::unique(sides.begin(), sides.end()), sides.end());
        for (double s : sides) {
            std::size_t k = fam.count_inside(c, s);
            double m = cum[k];
            bool dbl = s == 0.0 || cum[fam.count_inside(c, p.alpha * s)] <= beta * m;
            fam.center.push_back(c);
            fam.side.push_back(s);
            fam.count.push_back(k);
            fam.mass.push_back(m);
            fam.doubling.push_back(dbl ? 1 : 0);
        }
    }
    return fam;
}

RbmoEstimate rbmo_norm(const DiscreteMeasure& mu, const SampledFunction& f, const DoublingParams& p) {
    return rbmo_norm(mu, f, canonical_family(mu, p));
}

RbmoEstimate rbmo_norm(const DiscreteMeasure& mu, const SampledFunction& f, const CanonicalFamily& fam) {
    if (f.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "function length");
    RbmoEstimate est;
    est.family_size = fam.size();
    std::vector<std::size_t> dbl;
    std::vector<double> means(fam.size(), 0.0), osc(fam.size(), 0.0);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        if (!fam.doubling[i] || !(fam.mass[i] > 0.0)) continue;
        dbl.push_back(i);
    }
    if (dbl.empty()) throw Error(ErrorKind::EmptyFamily, "no doubling cubes");
    est.doubling_count = dbl.size();
    parallel_for(dbl.size(), [&](std::size_t t) {
        std::size_t i = dbl[t];
        const auto& ord = fam.order[fam.center[i]];
        double s = 0.0;
        for (std::size_t k = 0; k < fam.count[i]; ++k) s += f[ord[k]] * mu.weight(ord[k]);
        double m = s / fam.mass[i];
        double o = 0.0;
        for (std::size_t k = 0; k < fam.count[i]; ++k) o += std::abs(f[ord[k]] - m) * mu.weight(ord[k]);
        means[i] = m;
        osc[i] = o / fam.mass[i];
    });
    for (std::size_t i : dbl)
        if (osc[i] > est.def1) {
            est.def1 = osc[i];
            est.witness_q = fam.cube(mu, i);
        }
    // Nested pairs by branch and bound: an outer cube R can only beat `best`
    // when some doubling cube that fits inside R has a mean
    // farther than `best` from m_R. Chains per center are sorted by side.
    double best = est.def1;
    const std::size_t N = mu.size();
    std::vector<std::vector<std::size_t>> chain(N);
    for (std::size_t i : dbl) chain[fam.center[i]].push_back(i);
    std::vector<std::vector<double>> pmax(N), pmin(N);
    for (std::size_t c = 0; c < N; ++c) {
        double hi = -INFINITY, lo = INFINITY;
        for (std::size_t i : chain[c]) {
            hi = std::max(hi, means[i]);
            lo = std::min(lo, means[i]);
            pmax[c].push_back(hi);
            pmin[c].push_back(lo);
        }
    }
    // chain entries of center c that can fit in a cube of side s whose center is at distance d
    auto upto = [&](std::size_t c, double s, double d) {
        const auto& ch = chain[c];
        double lim = s * (1.0 + 2e-12) - 2.0 * d;
        return static_cast<std::size_t>(
            std::upper_bound(ch.begin(), ch.end(), lim, [&](double v, std::size_t i) { return v < fam.side[i]; }) -
            ch.begin());
    };
    // For Q inside R, delta(Q,R) is the one-sided sum over the concentric hull of
    // Q around R, i.e. a slice of Q's center ordering; prefix sums make it O(log N).
    std::vector<std::vector<double>> kern(N);
    parallel_for(N, [&](std::size_t c) {
        const auto& ord = fam.order[c];
        kern[c].assign(N + 1, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            double r = norm2(mu.point(ord[k]), mu.point(c));
            kern[c][k + 1] = kern[c][k] + (r > 0.0 ? mu.weight(ord[k]) / std::pow(r, mu.n()) : 0.0);
        }
    });
    std::vector<double> bound(fam.size(), 0.0);
    parallel_for(dbl.size(), [&](std::size_t t) {
        std::size_t j = dbl[t];
        const auto& ord = fam.order[fam.center[j]];
        double hi = -INFINITY, lo = INFINITY;
        for (std::size_t k = 0; k < fam.count[j]; ++k) {
            std::size_t c = ord[k];
            std::size_t u = upto(c, fam.side[j], fam.dist[fam.center[j]][k]);
            if (u == 0) continue;
            hi = std::max(hi, pmax[c][u - 1]);
            lo = std::min(lo, pmin[c][u - 1]);
        }
        bound[j] = std::max({0.0, hi - means[j], means[j] - lo});
    });
    std::vector<std::size_t> outer_order = dbl;
    std::stable_sort(outer_order.begin(), outer_order.end(),
                     [&](std::size_t a, std::size_t b) { return bound[a] > bound[b]; });
    for (std::size_t j : outer_order) {
        if (bound[j] <= best) break;
        const std::size_t cj = fam.center[j];
        const auto& ord = fam.order[cj];
        for (std::size_t k = 0; k < fam.count[j]; ++k) {
            std::size_t c = ord[k];
            double d = fam.dist[cj][k];
            std::size_t u = upto(c, fam.side[j], d);
            if (u == 0) continue;
            double kh = kern[c][fam.count_inside(c, 2.0 * (d + 0.5 * fam.side[j]))];
            // walking down the chain the deviation bound shrinks and delta grows
            for (std::size_t t = u; t-- > 0;) {
                std::size_t i = chain[c][t];
                double dev = std::max(pmax[c][t] - means[j], means[j] - pmin[c][t]);
                double dl = kh - kern[c][fam.count[i]];
                if (dev / (1.0 + dl) <= best) break;
                if (i == j) continue;
                double diff = std::abs(means[i] - means[j]);
                if (diff <= best) continue;
                if (d + 0.5 * fam.side[i] > 0.5 * fam.side[j] * (1.0 + 1e-12)) continue;
                double v = diff / (1.0 + dl);
                if (v > best) {
                    best = v;
                    est.def2 = v;
                    est.witness_q = fam.cube(mu, i);
                    est.witness_r = fam.cube(mu, j);
                    est.witness_is_pair = true;
                }
            }
        }
    }
    est.value = best;
    return est;
}

SampledFunction AtomicBlock::sum(std::size_t n) const {
    SampledFunction b(n, 0.0);
    for (const auto& at : atoms)
        for (std::size_t i = 0; i < n; ++i) b[i] += at.lambda * at.a[i];
    return b;
}

BlockReport validate_atomic_block(const DiscreteMeasure& mu, const AtomicBlock& block) {
    BlockReport rep;
    const std::size_t N = mu.size();
    SampledFunction b = block.sum(N);
    for (std::size_t j = 0; j < block.atoms.size(); ++j) {
        const auto& at = block.atoms[j];
        rep.norm += std::abs(at.lambda);
        double outside = 0.0, amax = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            amax = std::max(amax, std::abs(at.a[i]));
            if (at.a[i] != 0.0 && !at.q.contains(mu.point(i))) outside = std::max(outside, std::abs(at.a[i]));
        }
        if (outside > 0.0) rep.violations.push_back({"support", static_cast<long>(j), outside});
        if (!block.host.contains(at.q)) {
            rep.violations.push_back({"nesting", static_cast<long>(j), 1.0});
            continue;
        }
        double m2 = mass_cube(mu, scale(at.q, block.rho));
        if (m2 <= 0.0) {
            if (amax > 0.0) rep.violations.push_back({"size condition", static_cast<long>(j), amax});
            continue;
        }
        double cap = 1.0 / (m2 * k_coeff(mu, at.q, block.host));
        if (amax > cap * (1.0 + 1e-9)) rep.violations.push_back({"size condition", static_cast<long>(j), amax - cap});
    }
    // cancellation is judged against the size of the pieces, since b itself may nearly vanish
    double outside = 0.0, tot = 0.0, absmass = 0.0;
    for (const auto& at : block.atoms)
        for (std::size_t i = 0; i < N; ++i) absmass += std::abs(at.lambda * at.a[i]) * mu.weight(i);
    for (std::size_t i = 0; i < N; ++i) {
        tot += b[i] * mu.weight(i);
        if (b[i] != 0.0 && !block.host.contains(mu.point(i))) outside = std::max(outside, std::abs(b[i]));
    }
    if (outside > 0.0) rep.violations.push_back({"support", -1, outside});
    if (std::abs(tot) > 1e-9 * std::max(absmass, 1e-300)) rep.violations.push_back({"cancellation", -1, std::abs(tot)});
    rep.valid = rep.violations.empty();
    return rep;
}

Cube support_hull(const DiscreteMeasure& mu, const SampledFunction& f) {
    const int d = mu.dim();
    Point lo(d, INFINITY), hi(d, -INFINITY);
    bool any = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (f[i] == 0.0) continue;
        any = true;
        auto p = mu.point(i);
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    if (!any) {
        auto p = mu.point(0);
        return Cube(Point(p.begin(), p.end()), 0.0);
    }
    Point c(d);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        c[k] = 0.5 * (lo[k] + hi[k]);
        s = std::max(s, hi[k] - lo[k]);
    }
    return Cube(c, s);
}

AtomicBlock single_block(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& host) {
    AtomicBlock blk;
    blk.host = host;
    double fmax = sup_norm(f);
    if (fmax == 0.0) return blk;
    double lam = fmax * mass_cube(mu, scale(host, 2.0));
    BlockAtom at;
    at.q = host;
    at.lambda = lam;
    at.a.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) at.a[i] = f[i] / lam;
    blk.atoms.push_back(std::move(at));
    return blk;
}

std::vector<std::pair<double, double>> jn_profile(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q,
                                                  const std::vector<double>& lambdas) {
    double m = mean(mu, f, q);
    double mq = mass_cube(mu, q);
    std::vector<std::pair<double, double>> out;
    for (double lam : lambdas) {
        double s = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (q.contains(mu.point(i)) && std::abs(f[i] - m) > lam) s += mu.weight(i);
        out.emplace_back(lam, s / mq);
    }
    return out;
}

std::vector<std::size_t> z_set(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q, double lambda,
                               const CanonicalFamily& fam) {
    double mq = mean(mu, f, q);
    std::vector<char> in(mu.size(), 0);
    for (std::size_t i = 0; i < mu.size(); ++i) in[i] = q.contains(mu.point(i)) ? 1 : 0;
    std::vector<char> bad(mu.size(), 0);
    double lim = 0.25 * q.side * (1.0 + 1e-12);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        if (!fam.doubling[i] || fam.side[i] > lim || !(fam.mass[i] > 0.0)) continue;
        const auto& ord = fam.order[fam.center[i]];
        bool touches = false;
        for (std::size_t k = 0; k < fam.count[i] && !touches; ++k) touches = in[ord[k]];
        if (!touches) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < fam.count[i]; ++k) s += f[ord[k]] * mu.weight(ord[k]);
        if (std::abs(s / fam.mass[i] - mq) <= lambda) continue;
        for (std::size_t k = 0; k < fam.count[i]; ++k) bad[ord[k]] = 1;
    }
    std::vector<std::size_t> z;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (in[i] && !bad[i]) z.push_back(i);
    return z;
}

std::vector<std::size_t> z_set(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& q, double lambda) {
    return z_set(mu, f, q, lambda, canonical_family(mu));
}

std::vector<std::pair<double, double>> z_complement_profile(const DiscreteMeasure& mu, const SampledFunction& f,
                                                            const Cube& q, const std::vector<double>& lambdas,
                                                            const CanonicalFamily& fam) {
    double mq = mean(mu, f, q);
    double massq = mass_cube(mu, q);
    std::vector<char> in(mu.size(), 0);
    for (std::size_t i = 0; i < mu.size(); ++i) in[i] = q.contains(mu.point(i)) ? 1 : 0;
    // worst deviation of a small doubling cube through each atom
    std::vector<double> dev(mu.size(), -1.0);
    double lim = 0.25 * q.side * (1.0 + 1e-12);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        if (!fam.doubling[i] || fam.side[i] > lim || !(fam.mass[i] > 0.0)) continue;
        const auto& ord = fam.order[fam.center[i]];
        bool touches = false;
        for (std::size_t k = 0; k < fam.count[i] && !touches; ++k) touches = in[ord[k]];
        if (!touches) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < fam.count[i]; ++k) s += f[ord[k]] * mu.weight(ord[k]);
        double d = std::abs(s / fam.mass[i] - mq);
        for (std::size_t k = 0; k < fam.count[i]; ++k) dev[ord[k]] = std::max(dev[ord[k]], d);
    }
    std::vector<std::pair<double, double>> out;
    for (double lam : lambdas) {
        double s = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (in[i] && dev[i] > lam) s += mu.weight(i);
        out.emplace_back(lam, s / massq);
    }
    return out;
}

}  // namespace czkit
