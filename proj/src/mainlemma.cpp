#include "czkit/mainlemma.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "czkit/maximal.hpp"
#include "czkit/parallel.hpp"

namespace czkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point to_point(std::span<const double> p) { return Point(p.begin(), p.end()); }

// Closed cube q inside the union of closed boxes (exact via coordinate compression).
bool covered_by(const Cube& q, const std::vector<Cube>& boxes) {
    if (q.is_point()) {
        for (const auto& b : boxes)
            if (b.contains(std::span<const double>(q.center))) return true;
        return false;
    }
    std::vector<const Cube*> hit;
    for (const auto& b : boxes)
        if (b.intersects(q)) hit.push_back(&b);
    if (hit.empty()) return false;
    const int d = q.dim();
    std::vector<std::vector<double>> cuts(d);
    for (int k = 0; k < d; ++k) {
        double lo = q.center[k] - q.half(), hi = q.center[k] + q.half();
        cuts[k] = {lo, hi};
        for (const Cube* b : hit)
            for (double c : {b->center[k] - b->half(), b->center[k] + b->half()})
                if (c > lo && c < hi) cuts[k].push_back(c);
        std::sort(cuts[k].begin(), cuts[k].end());
        cuts[k].erase(std::unique(cuts[k].begin(), cuts[k].end()), cuts[k].end());
    }
    std::vector<std::size_t> idx(d, 0);
    Point mid(d);
    while (true) {
        for (int k = 0; k < d; ++k) mid[k] = 0.5 * (cuts[k][idx[k]] + cuts[k][idx[k] + 1]);
        bool in = false;
        for (const Cube* b : hit)
            if (b->contains(std::span<const double>(mid))) {
                in = true;
                break;
            }
        if (!in) return false;
        int k = 0;
        while (k < d && ++idx[k] + 1 >= cuts[k].size()) idx[k++] = 0;
        if (k == d) return true;
    }
}

std::vector<Cube> scaled_all(const std::vector<Cube>& cs, double rho) {
    std::vector<Cube> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(scale(c, rho));
    return out;
}

Cube cube_at(const DiscreteMeasure& mu, std::size_t y, const Cube& R0, double target, const DoublingParams& p,
             double* eps) {
    if (target <= 0.0) return scale(R0, 2.0);
    DeltaSearch r = find_cube_at_delta(mu, y, R0, target, p);
    if (!r.reachable) return Cube(to_point(mu.point(y)), 0.0);
    if (eps) *eps = std::max(*eps, r.eps1_achieved);
    return r.cube;
}

CompanionSet companions_raw(const DiscreteMeasure& mu, std::size_t y, int m, const Cube& R0, const MainParams& p) {
    CompanionSet c;
    const double mA = m * p.A, a1 = p.alpha1, a2 = p.alpha2, s = p.sigma;
    double e = 0.0;
    auto at = [&](double t) { return cube_at(mu, y, R0, t, p.doubling, &e); };
    c.parent = m == 1 ? scale(R0, 2.0) : at((m - 1) * p.A);
    c.base = at(mA);
    c.q1 = at(mA - a1);
    c.q1hat = at(mA - a1 - s);
    c.q2 = at(mA - a1 - a2);
    c.q2hat = at(mA - a1 - a2 - s);
    c.q3 = at(mA - a1 - a2 - 2 * s);
    c.q1check = at(mA - a1 + s);
    c.q1dcheck = at(mA - a1 + 2 * s);
    c.q3hathat = at(mA - a1 - a2 - 3 * s);
    c.eps1_achieved = e;
    return c;
}

double max_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

Check make(const std::string& name, bool pass, double achieved, const std::string& detail = {}) {
    return Check{name, pass, achieved, detail};
}

bool zero_on(const DiscreteMeasure& mu, const Cube& q, const std::vector<double>& h, double tol) {
    for (std::size_t x = 0; x < mu.size(); ++x)
        if (std::abs(h[x]) > tol && q.contains(mu.point(x))) return false;
    return true;
}

}  // namespace

InstanceConstants instance_constants(const DiscreteMeasure& mu, const Cube& R0, std::uint64_t seed) {
    InstanceConstants k;
    k.C0 = growth_constant(mu).cube_constant;
    const std::size_t N = mu.size();
    Rng rng(seed);
    std::vector<std::size_t> probe;
    if (N <= 64) {
        probe.resize(N);
        std::iota(probe.begin(), probe.end(), 0);
    } else {
        for (int t = 0; t < 64; ++t) probe.push_back(rng.index(N));
    }
    std::vector<double> e(probe.size(), 0.0);
    Cube R2 = scale(R0, 2.0);
    parallel_for(probe.size(), [&](std::size_t t) {
        double dx = delta_point(mu, probe[t], R2);
        if (!std::isfinite(dx) || dx <= 0.0) return;
        for (double fr : {0.25, 0.5, 0.75}) {
            DeltaSearch r = find_cube_at_delta(mu, probe[t], R0, fr * dx);
            if (r.reachable) e[t] = std::max(e[t], r.eps1_achieved);
        }
    });
    for (double v : e) k.eps1 = std::max(k.eps1, v);
    const int d = mu.dim();
    const double L = R0.side > 0.0 ? R0.side : 1.0;
    for (int t = 0; t < 200; ++t) {
        Point c = to_point(mu.point(rng.index(N)));
        double sp = L * std::pow(2.0, -rng.uniform(0.0, 8.0));
        Cube P(c, sp);
        Point cq(c);
        double off = 0.0;
        for (int j = 0; j < d; ++j) {
            double o = rng.uniform(-0.5, 0.5) * sp;
            cq[j] += o;
            off = std::max(off, std::abs(o));
        }
        Cube Q(cq, (sp + 2.0 * off) * rng.uniform(1.0, 4.0));
        Point cr(cq);
        double off2 = 0.0;
        for (int j = 0; j < d; ++j) {
            double o = rng.uniform(-0.5, 0.5) * Q.side;
            cr[j] += o;
            off2 = std::max(off2, std::abs(o));
        }
        Cube R(cr, (Q.side + 2.0 * off2) * rng.uniform(1.0, 4.0));
        k.eps0 = std::max(k.eps0, additivity_defect(mu, P, Q, R));
    }
    return k;
}

MainParams default_params(const DiscreteMeasure& mu, const InstanceConstants& k) {
    const double n = mu.n();
    MainParams p;
    p.eps1 = k.eps1;
    p.sigma = 10.0 * k.eps0 + 10.0 * k.eps1 + std::pow(12.0, n + 1.0) * k.C0;
    p.alpha1 = 20.0 * (p.sigma + k.eps1 + std::pow(12.0, n) * k.C0);
    p.alpha2 = 20.0 * p.alpha1;
    p.alpha3 = 20.0 * p.alpha2;
    p.A = 100.0 * (p.alpha1 + p.alpha2 + p.alpha3);
    return p;
}

void validate_params(const MainParams& p) {
    auto fail = [](const std::string& s) { throw Error(ErrorKind::ParamsInfeasible, s); };
    if (!(p.A > 0.0 && p.alpha1 > 0.0 && p.alpha2 > 0.0 && p.alpha3 > 0.0 && p.sigma >= 0.0))
        fail("A, alpha1..3 must be positive and sigma nonnegative");
    if (!(p.eps3 > 0.0 && p.eps3 < 1.0)) fail("eps3 must lie in (0,1)");
    if (!p.enforce_chain) return;
    const double e = p.eps1;
    if (!(p.alpha1 > 2.0 * e)) fail("alpha1 > 2 eps1");
    if (!(p.sigma > 2.0 * e)) fail("sigma > 2 eps1");
    if (!(p.alpha2 > p.sigma + 2.0 * e)) fail("alpha2 > sigma + 2 eps1");
    if (!(p.A > p.alpha1 + p.alpha2 + 2.0 * p.sigma + 2.0 * e)) fail("A > alpha1 + alpha2 + 2 sigma + 2 eps1");
    if (!(10.0 * p.alpha2 < p.alpha3 && p.alpha3 < p.A)) fail("10 alpha2 < alpha3 < A");
}

Cube auto_R0(const DiscreteMeasure& mu) {
    Cube h = support_hull(mu, std::vector<double>(mu.size(), 1.0));
    if (h.side == 0.0) h.side = 1.0;
    return smallest_doubling_ancestor(mu, h).cube;
}

CompanionSet companions(const DiscreteMeasure& mu, std::size_t y, int m, const Cube& R0, const MainParams& p) {
    if (y >= mu.size()) throw Error(ErrorKind::NotInSupport, "companions");
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "m must be positive");
    CompanionSet c = companions_raw(mu, y, m, R0, p);
    std::string bad = nesting_failure(c);
    if (!bad.empty()) throw Error(ErrorKind::NestingViolation, bad);
    return c;
}

std::string nesting_failure(const CompanionSet& c) {
    const std::pair<const Cube*, const char*> chain[] = {{&c.base, "Q"},       {&c.q1, "Q1"},  {&c.q1hat, "Q1hat"},
                                                         {&c.q2, "Q2"},         {&c.q2hat, "Q2hat"},
                                                         {&c.q3, "Q3"},         {&c.parent, "Q_{m-1}"}};
    for (std::size_t k = 0; k + 1 < std::size(chain); ++k)
        if (!chain[k + 1].first->contains(*chain[k].first))
            return std::string(chain[k].second) + " not inside " + chain[k + 1].second;
    return {};
}

std::vector<double> psi_kernel(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, double cap_const) {
    const std::size_t N = mu.size();
    std::vector<double> out(N, 0.0);
    if (c.q2hat.is_point()) return out;
    const double n = mu.n();
    const double cap = c.q1.is_point() ? kInf : cap_const / std::pow(c.q1.side, n);
    const double h2 = c.q2hat.half(), h3 = c.q3.half();
    auto yp = mu.point(y);
    for (std::size_t x = 0; x < N; ++x) {
        auto xp = mu.point(x);
        double eta = 1.0;
        for (int k = 0; k < mu.dim() && eta > 0.0; ++k) {
            double a = std::abs(xp[k] - yp[k]);
            eta *= h3 > h2 ? smoothstep((h3 - a) / (h3 - h2)) : (a <= h2 * (1.0 + 1e-12) ? 1.0 : 0.0);
        }
        if (eta == 0.0) continue;
        double r = norm2(xp, yp);
        if (r == 0.0) {
            out[x] = std::isfinite(cap) ? eta * cap : 0.0;
            continue;
        }
        out[x] = eta * std::min(cap, std::pow(r, -n));
    }
    return out;
}

std::vector<double> psi_gradient(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, std::size_t x,
                                 double cap_const) {
    const int d = mu.dim();
    std::vector<double> g(d, 0.0);
    if (c.q2hat.is_point()) return g;
    const double n = mu.n();
    const double cap = c.q1.is_point() ? kInf : cap_const / std::pow(c.q1.side, n);
    const double h2 = c.q2hat.half(), h3 = c.q3.half();
    auto yp = mu.point(y), xp = mu.point(x);
    std::vector<double> e(d), de(d);
    double eta = 1.0;
    for (int k = 0; k < d; ++k) {
        double off = xp[k] - yp[k], a = std::abs(off);
        if (h3 > h2) {
            double u = (h3 - a) / (h3 - h2);
            e[k] = smoothstep(u);
            de[k] = -(off >= 0 ? 1.0 : -1.0) * smoothstep_deriv(u) / (h3 - h2);
        } else {
            e[k] = a <= h2 * (1.0 + 1e-12) ? 1.0 : 0.0;
            de[k] = 0.0;
        }
        eta *= e[k];
    }
    double r = norm2(xp, yp);
    if (r == 0.0) return g;
    double rn = std::pow(r, -n);
    double kv = std::min(cap, rn);
    for (int k = 0; k < d; ++k) {
        double deta = de[k];
        for (int j = 0; j < d; ++j)
            if (j != k) deta *= e[j];
        double dk = rn < cap ? -n * rn / (r * r) * (xp[k] - yp[k]) : 0.0;
        g[k] = deta * kv + eta * dk;
    }
    return g;
}

PsiConditions check_psi(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, double cap_const) {
    PsiConditions out;
    std::vector<double> psi = psi_kernel(mu, c, y, cap_const);
    const double n = mu.n();
    const double cap = c.q1.is_point() ? kInf : cap_const / std::pow(c.q1.side, n);
    auto yp = mu.point(y);
    for (std::size_t x = 0; x < mu.size(); ++x) {
        auto xp = mu.point(x);
        double r = norm2(xp, yp);
        double lim = r == 0.0 ? cap : std::min(cap, std::pow(r, -n));
        if (psi[x] < 0.0 || psi[x] > lim * (1.0 + 1e-12)) {
            out.bound = false;
            out.where = "bound at atom " + std::to_string(x);
        }
        if (r > 0.0 && !c.q2hat.is_point() && c.q2hat.contains(xp) && !c.q1.contains(xp) &&
            std::abs(psi[x] - std::pow(r, -n)) > 1e-12 * std::pow(r, -n)) {
            out.equality = false;
            out.where = "equality at atom " + std::to_string(x);
        }
        if (psi[x] != 0.0 && !c.q3.contains(xp)) {
            out.support = false;
            out.where = "support at atom " + std::to_string(x);
        }
        out.l1 += psi[x] * mu.weight(x);
        if (r > 0.0 && c.q2.contains(xp) && !c.q1hat.contains(xp)) out.annulus += std::pow(r, -n) * mu.weight(x);
        if (r > 0.0) {
            auto g = psi_gradient(mu, c, y, x, cap_const);
            double gn = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
            double den = std::pow(r, -(n + 1.0));
            if (!c.q1.is_point()) den = std::min(den, std::pow(c.q1.side, -(n + 1.0)));
            out.C12 = std::max(out.C12, gn / den);
        }
    }
    return out;
}

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

MainDecomposition decompose_main(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& R0,
                                 const MainParams& p) {
    validate_params(p);
    const std::size_t N = mu.size();
    if (f.size() != N) throw Error(ErrorKind::DimensionMismatch, "function length");
    for (std::size_t x = 0; x < N; ++x)
        if (f[x] != 0.0 && !R0.contains(mu.point(x))) throw Error(ErrorKind::InvalidArgument, "supp f not inside R0");
    const double l1 = l1_norm(mu, f);
    if (std::abs(integral(mu, f)) > 1e-10 * l1) throw Error(ErrorKind::NotMeanZero, "decompose_main");

    MainDecomposition dec;
    dec.params = p;
    dec.R0 = R0;
    dec.h0.assign(N, 0.0);
    auto& L = dec.ledger;
    for (const char* k : {"C8", "C9", "C11", "C_budget", "C_pack", "reconstruction_residual", "potential_residual_b",
                          "potential_residual_g"})
        L[k] = 0.0;
    if (l1 == 0.0) return dec;

    const CanonicalFamily fam = canonical_family(mu, p.doubling);
    dec.norm = rbmo_norm(mu, f, fam).value;
    if (!(dec.norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "rbmo norm vanishes");
    dec.atom_delta = atom_deltas(mu, R0);
    double maxd = 0.0;
    for (std::size_t x = 0; x < N; ++x)
        if (R0.contains(mu.point(x))) maxd = std::max(maxd, dec.atom_delta[x]);
    dec.M = std::max(1, static_cast<int>(std::ceil(maxd / p.A)));
    const double thrA = p.A * dec.norm;
    const double cap = p.cap_for(mu.n());
    const double tol = 1e-12 * std::max(thrA, max_abs(f));

    std::vector<std::string> nest_fail;
    SampledFunction fm = f;
    for (int m = 1; m <= dec.M; ++m) {
        GenerationRecord G;
        G.gen = build_generation(mu, R0, m, p.A, p.doubling, &dec.atom_delta);
        const Generation& gen = G.gen;
        const std::size_t nc = gen.cubes.size();
        G.comps.resize(N);
        parallel_for(N, [&](std::size_t y) { G.comps[y] = companions_raw(mu, y, m, R0, p); });
        for (std::size_t y = 0; y < N; ++y) {
            std::string s = nesting_failure(G.comps[y]);
            if (!s.empty() && nest_fail.size() < 4) nest_fail.push_back("m=" + std::to_string(m) + " atom " +
                                                                        std::to_string(y) + ": " + s);
        }
        G.Phi.assign(nc, {});
        parallel_for(nc, [&](std::size_t i) {
            std::size_t c = gen.center_atom[i];
            G.Phi[i] = psi_kernel(mu, G.comps[c], c, cap);
            for (double& v : G.Phi[i]) v /= p.alpha2;
        });
        G.phi.assign(N, std::vector<double>(N, 0.0));
        parallel_for(N, [&](std::size_t y) {
            if (gen.weights[y].empty()) {
                G.phi[y] = psi_kernel(mu, G.comps[y], y, cap);
                for (double& v : G.phi[y]) v /= p.alpha2;
                return;
            }
            for (auto [i, w] : gen.weights[y])
                for (std::size_t x = 0; x < N; ++x) G.phi[y][x] += w * G.Phi[i][x];
        });
        G.f_m = fm;
        G.means.assign(nc, 0.0);
        for (std::size_t i = 0; i < nc; ++i)
            G.means[i] = gen.kind[i] == CubeKind::point ? fm[gen.center_atom[i]] : mean(mu, fm, gen.cubes[i]);

        G.omega.assign(N, 0);
        std::vector<Point> centers;
        std::vector<Cube> scubes;
        const double starget = m * p.A - p.alpha1 - p.alpha2 - p.alpha3;
        for (std::size_t x = 0; x < N; ++x) {
            if (!(dec.atom_delta[x] > m * p.A)) continue;
            for (auto [i, w] : gen.weights[x])
                if (gen.kind[i] == CubeKind::volume && std::abs(G.means[i]) >= 0.75 * thrA) G.omega[x] = 1;
            if (!G.omega[x]) continue;
            centers.push_back(to_point(mu.point(x)));
            scubes.push_back(cube_at(mu, x, R0, starget, p.doubling, nullptr));
        }
        if (!scubes.empty()) G.S = besicovich_cover(centers, scubes).cubes;
        const std::vector<Cube> S15 = scaled_all(G.S, 1.5), S2 = scaled_all(G.S, 2.0);
        G.good.assign(nc, 0);
        G.bad.assign(nc, 0);
        if (!G.S.empty())
            for (std::size_t i = 0; i < nc; ++i) {
                G.good[i] = covered_by(gen.cubes[i], S15);
                G.bad[i] = !G.good[i] && covered_by(gen.cubes[i], S2);
            }
        G.g.assign(N, 0.0);
        G.b.assign(N, 0.0);
        for (std::size_t y = 0; y < N; ++y)
            for (auto [i, w] : gen.weights[y]) {
                if (G.good[i]) G.g[y] += w * G.means[i];
                if (G.bad[i]) G.b[y] += w * G.means[i];
            }
        std::vector<double> cG(nc, 0.0), cB(nc, 0.0);
        for (std::size_t y = 0; y < N; ++y)
            for (auto [i, w] : gen.weights[y]) {
                cG[i] += w * G.g[y] * mu.weight(y);
                cB[i] += w * G.b[y] * mu.weight(y);
            }
        G.UG.assign(N, 0.0);
        G.UB.assign(N, 0.0);
        for (std::size_t i = 0; i < nc; ++i) {
            if (cG[i] == 0.0 && cB[i] == 0.0) continue;
            for (std::size_t x = 0; x < N; ++x) {
                G.UG[x] += G.Phi[i][x] * cG[i];
                G.UB[x] += G.Phi[i][x] * cB[i];
            }
        }
        for (std::size_t x = 0; x < N; ++x) fm[x] -= G.UG[x] + G.UB[x];
        dec.gens.push_back(std::move(G));
    }
    dec.h0 = fm;

    // b-side correction, finest generation first
    std::vector<double> acc(N, 0.0);
    bool v_half = true, v_integral = true;
    for (int k = dec.M; k >= 1; --k) {
        GenerationRecord& G = dec.gens[k - 1];
        const Generation& gen = G.gen;
        const std::size_t nc = gen.cubes.size();
        std::vector<std::vector<double>> wb(nc);
        for (std::size_t y = 0; y < N; ++y)
            for (auto [i, w] : gen.weights[y])
                if (G.b[y] != 0.0) {
                    if (wb[i].empty()) wb[i].assign(N, 0.0);
                    wb[i][y] = w * G.b[y];
                }
        G.v.assign(nc, {});
        for (std::size_t i = 0; i < nc; ++i) {
            if (wb[i].empty()) continue;
            double target = integral(mu, wb[i]);
            if (k == dec.M || gen.kind[i] == CubeKind::point) {
                G.v[i] = wb[i];
                continue;
            }
            const Cube& Q = gen.cubes[i];
            std::vector<std::size_t> in = atoms_in(mu, Q);
            double mq = 0.0, ia = 0.0;
            for (std::size_t x : in) {
                mq += mu.weight(x);
                ia += acc[x] * mu.weight(x);
            }
            double t = 2.0 * ia / mq;
            double mv = 0.0;
            std::vector<std::size_t> V;
            for (std::size_t x : in)
                if (acc[x] <= t * (1.0 + 1e-12)) {
                    V.push_back(x);
                    mv += mu.weight(x);
                }
            if (mv < 0.5 * mq * (1.0 - 1e-12)) v_half = false;
            G.v[i].assign(N, 0.0);
            for (std::size_t x : V) G.v[i][x] = target / mv;
            if (std::abs(integral(mu, G.v[i]) - target) > 1e-12 * std::max(1.0, l1_norm(mu, wb[i]))) v_integral = false;
        }
        for (std::size_t i = 0; i < nc; ++i)
            for (std::size_t x = 0; x < N && !G.v[i].empty(); ++x) acc[x] += std::abs(G.v[i][x]);
    }
    L["C11"] = max_abs(acc) / thrA;

    // g-side correction on the sets Z_{i,m}
    bool z_half = true, z_nonempty = true, u_integral = true;
    for (auto& G : dec.gens) {
        const Generation& gen = G.gen;
        const std::size_t nc = gen.cubes.size();
        std::vector<double> cg(nc, 0.0);
        std::vector<char> has(nc, 0);
        for (std::size_t y = 0; y < N; ++y)
            for (auto [i, w] : gen.weights[y])
                if (G.g[y] != 0.0) {
                    cg[i] += w * G.g[y] * mu.weight(y);
                    has[i] = 1;
                }
        G.u.assign(nc, {});
        G.Z.assign(nc, {});
        for (std::size_t i = 0; i < nc; ++i) {
            if (gen.kind[i] == CubeKind::point) G.Z[i] = {gen.center_atom[i]};
            else if (G.good[i] || has[i]) G.Z[i] = z_set(mu, f, gen.cubes[i], thrA / 30.0, fam);
            if (!has[i]) continue;
            G.u[i].assign(N, 0.0);
            if (gen.kind[i] == CubeKind::point) {
                std::size_t y = gen.center_atom[i];
                G.u[i][y] = G.g[y];
                continue;
            }
            double mz = 0.0;
            for (std::size_t x : G.Z[i]) mz += mu.weight(x);
            if (!(mz > 0.0)) {
                // keep w_i g uncorrected so the potential is unchanged
                z_nonempty = false;
                for (std::size_t y = 0; y < N; ++y)
                    for (auto [j, w] : gen.weights[y])
                        if (j == i) G.u[i][y] = w * G.g[y];
                continue;
            }
            if (mz < 0.5 * mass_cube(mu, gen.cubes[i]) * (1.0 - 1e-12)) z_half = false;
            for (std::size_t x : G.Z[i]) G.u[i][x] = cg[i] / mz;
            if (std::abs(integral(mu, G.u[i]) - cg[i]) > 1e-12 * std::max(1.0, std::abs(cg[i]))) u_integral = false;
        }
    }

    // assemble h_m^p and re-derive the potentials through phi^p
    double C8 = 0.0, g2 = 0.0, resB = 0.0, resG = 0.0;
    bool support_ok = true;
    std::vector<double> budget(N);
    for (std::size_t x = 0; x < N; ++x) budget[x] = std::abs(dec.h0[x]);
    SampledFunction recon = dec.h0;
    std::vector<std::vector<char>> gsupp;
    for (auto& G : dec.gens) {
        const Generation& gen = G.gen;
        const std::size_t nc = gen.cubes.size();
        const std::size_t P = std::max<std::size_t>(gen.families, 1);
        G.gp.assign(P, SampledFunction(N, 0.0));
        G.bp.assign(P, SampledFunction(N, 0.0));
        for (std::size_t i = 0; i < nc; ++i) {
            std::size_t fp = gen.family[i];
            for (std::size_t x = 0; x < N; ++x) {
                if (!G.v[i].empty()) G.bp[fp][x] += G.v[i][x];
                if (!G.u[i].empty()) G.gp[fp][x] += G.u[i][x];
            }
        }
        C8 = std::max({C8, max_abs(G.g) / thrA, max_abs(G.b) / thrA});
        std::vector<char> sup(N, 0);
        SampledFunction UGp(N, 0.0), UBp(N, 0.0);
        for (std::size_t fp = 0; fp < P; ++fp) {
            g2 = std::max(g2, max_abs(G.gp[fp]) / thrA);
            for (std::size_t y = 0; y < N; ++y) {
                double hg = G.gp[fp][y], hb = G.bp[fp][y];
                budget[y] += std::abs(hg + hb);
                if (hg != 0.0) sup[y] = 1;
                if (hg == 0.0 && hb == 0.0) continue;
                long owner = -1;
                for (auto [i, w] : gen.weights[y])
                    if (gen.family[i] == fp) owner = static_cast<long>(i);
                if (owner < 0) {
                    support_ok = false;
                    continue;
                }
                for (std::size_t x = 0; x < N; ++x) {
                    UGp[x] += G.Phi[owner][x] * hg * mu.weight(y);
                    UBp[x] += G.Phi[owner][x] * hb * mu.weight(y);
                }
            }
        }
        gsupp.push_back(sup);
        double su = std::max({max_abs(G.UG), max_abs(G.UB), tol});
        for (std::size_t x = 0; x < N; ++x) {
            resG = std::max(resG, std::abs(UGp[x] - G.UG[x]) / su);
            resB = std::max(resB, std::abs(UBp[x] - G.UB[x]) / su);
            recon[x] += UGp[x] + UBp[x];
        }
    }
    double rr = 0.0;
    for (std::size_t x = 0; x < N; ++x) rr += std::abs(f[x] - recon[x]) * mu.weight(x);
    rr /= l1;
    bool g3 = true;
    for (std::size_t a = 0; a < gsupp.size(); ++a)
        for (std::size_t b = a + 1; b < gsupp.size(); ++b)
            for (std::size_t x = 0; x < N; ++x)
                if (gsupp[a][x] && gsupp[b][x]) g3 = false;

    // (b)-(f)
    double worst_b = 0.0, worst_c = 0.0, C9 = max_abs(dec.h0) / thrA;
    bool d_ok = true, e_ok = true;
    for (std::size_t k = 0; k < dec.gens.size(); ++k) {
        const auto& G = dec.gens[k];
        const Generation& gen = G.gen;
        const int m = static_cast<int>(k) + 1;
        const SampledFunction& fnext = k + 1 < dec.gens.size() ? dec.gens[k + 1].f_m : dec.h0;
        SampledFunction U(N);
        for (std::size_t x = 0; x < N; ++x) U[x] = G.UG[x] + G.UB[x];
        for (std::size_t i = 0; i < gen.cubes.size(); ++i) {
            const Cube& Q = gen.cubes[i];
            if (gen.kind[i] == CubeKind::point) {
                C9 = std::max(C9, std::abs(fnext[gen.center_atom[i]]) / thrA);
            } else {
                double mn = std::abs(mean(mu, fnext, Q)) / thrA;
                worst_b = std::max(worst_b, mn);
                if (!zero_on(mu, Q, G.g, 0.0)) worst_c = std::max(worst_c, mn);
            }
            bool quiet = zero_on(mu, Q, U, tol) && zero_on(mu, Q, G.g, tol) && zero_on(mu, Q, G.b, tol);
            if (std::abs(G.means[i]) <= 0.4 * thrA && !quiet) d_ok = false;
            if (gen.delta_to_2R0[i] <= (m - 0.1) * p.A && !quiet) e_ok = false;
        }
    }

    // (h) packing over bad cubes of later generations
    double Cpack = 0.0;
    for (std::size_t k = 0; k < dec.gens.size(); ++k) {
        const Generation& gk = dec.gens[k].gen;
        for (std::size_t r = 0; r < gk.volume_count; ++r) {
            const Cube& R = gk.cubes[r];
            Cube R2 = scale(R, 2.0);
            double s = 0.0;
            for (std::size_t j = k + 1; j < dec.gens.size(); ++j) {
                const auto& Gj = dec.gens[j];
                for (std::size_t q = 0; q < Gj.gen.cubes.size(); ++q) {
                    if (!Gj.bad[q]) continue;
                    const Cube& Q = Gj.gen.cubes[q];
                    if (Gj.gen.kind[q] == CubeKind::point ? R2.contains(std::span<const double>(Q.center))
                                                          : Q.intersects(R))
                        s += mass_cube(mu, Q);
                }
            }
            Cpack = std::max(Cpack, s / mass_cube(mu, R));
        }
    }

    L["C8"] = C8;
    L["C9"] = C9;
    L["C_budget"] = max_abs(budget) / thrA;
    L["C_pack"] = Cpack;
    L["g2_ratio"] = g2;
    L["reconstruction_residual"] = rr;
    L["potential_residual_b"] = resB;
    L["potential_residual_g"] = resG;
    L["mb_ratio"] = worst_b;
    L["mc_ratio"] = worst_c;
    L["M"] = dec.M;
    L["A"] = p.A;
    L["rbmo_norm"] = dec.norm;

    auto& P = dec.properties;
    std::string nf;
    for (const auto& s : nest_fail) nf += (nf.empty() ? "" : "; ") + s;
    P.push_back(make("nesting", nest_fail.empty(), static_cast<double>(nest_fail.size()), nf));
    P.push_back(make("a", std::isfinite(C8), C8));
    P.push_back(make("b", worst_b <= 1.0 + 1e-12, worst_b));
    P.push_back(make("c", worst_c <= 0.35 + 1e-12, worst_c));
    P.push_back(make("d", d_ok, 0.0));
    P.push_back(make("e", e_ok, 0.0));
    P.push_back(make("f", std::isfinite(C9), C9));
    P.push_back(make("g.1", resG <= 1e-9 && resB <= 1e-9 && support_ok, std::max(resG, resB)));
    P.push_back(make("g.2", g2 <= 2.0 * C8 * (1.0 + 1e-12) + 1e-300, g2));
    P.push_back(make("g.3", g3, 0.0));
    P.push_back(make("h", std::isfinite(Cpack), Cpack));
    P.push_back(make("reconstruction", rr <= 1e-8, rr));
    P.push_back(make("v_integrals", v_integral, 0.0));
    P.push_back(make("v_half_mass", v_half, 0.0));
    P.push_back(make("u_integrals", u_integral, 0.0));
    P.push_back(make("z_nonempty", z_nonempty, 0.0));
    P.push_back(make("z_half_mass", z_half, 0.0));
    return dec;
}

std::vector<Check> verify_claims(const DiscreteMeasure& mu, const SampledFunction& f, const MainDecomposition& dec) {
    (void)f;
    std::vector<Check> out;
    const std::size_t N = mu.size();
    const double thrA = dec.params.A * dec.norm;
    const double tol = 1e-12 * std::max(thrA, 1e-300);
    if (dec.gens.empty()) {
        for (const char* c : {"cl1", "cl1.5", "claime", "cl4.5", "cl2", "cl3", "cl4", "cl5"}) out.push_back(make(c, true, 0.0));
        return out;
    }
    std::vector<SampledFunction> U;
    for (const auto& G : dec.gens) {
        SampledFunction u(N);
        for (std::size_t x = 0; x < N; ++x) u[x] = G.UG[x] + G.UB[x];
        U.push_back(std::move(u));
    }
    // cl1
    double cl1 = 0.0;
    for (std::size_t k = 0; k < dec.gens.size(); ++k) {
        const Generation& gen = dec.gens[k].gen;
        std::vector<double> local(gen.volume_count, 0.0);
        parallel_for(gen.volume_count, [&](std::size_t i) {
            std::vector<std::size_t> in = atoms_in(mu, scale(gen.cubes[i], 2.0));
            double best = 0.0;
            for (std::size_t a = 0; a < in.size(); ++a)
                for (std::size_t b = a + 1; b < in.size(); ++b) {
                    double s = 0.0;
                    for (std::size_t j = 0; j <= k; ++j) s += std::abs(U[j][in[a]] - U[j][in[b]]);
                    best = std::max(best, s);
                }
            local[i] = best;
        });
        for (double v : local) cl1 = std::max(cl1, v / thrA);
    }
    out.push_back(make("cl1", cl1 <= 0.01 + 1e-12, cl1));

    // cl1.5 and claime
    bool c15 = true, ce = true;
    std::string c15w;
    double cl45 = 0.0;
    for (std::size_t k = 0; k < dec.gens.size(); ++k) {
        const auto& G = dec.gens[k];
        const Generation& gen = G.gen;
        const int m = static_cast<int>(k) + 1;
        const std::vector<Cube> S4 = scaled_all(G.S, 4.0);
        for (std::size_t h = 0; h < gen.cubes.size(); ++h) {
            const Cube& Q = gen.cubes[h];
            bool active = !zero_on(mu, Q, G.g, tol) || !zero_on(mu, Q, G.b, tol) || !zero_on(mu, Q, U[k], tol);
            if (active) {
                const Cube& q3 = G.comps[gen.center_atom[h]].q3hathat;
                bool ok = std::any_of(S4.begin(), S4.end(), [&](const Cube& s) { return s.contains(q3); });
                if (!ok) {
                    c15 = false;
                    c15w = "m=" + std::to_string(m) + " cube " + std::to_string(h);
                }
            }
            if (gen.delta_to_2R0[h] <= (m - 0.1) * dec.params.A && (active || G.good[h] || G.bad[h])) ce = false;
            if (G.good[h] || G.bad[h]) cl45 = std::max(cl45, std::abs(G.means[h]) / thrA);
        }
    }
    out.push_back(make("cl1.5", c15, 0.0, c15w));
    out.push_back(make("claime", ce, 0.0));
    out.push_back(make("cl4.5", std::isfinite(cl45), cl45));

    // cl2, cl3 from the stored means of f_{m+1}
    for (const auto& P : dec.properties) {
        if (P.name == "c") out.push_back(make("cl2", P.pass, P.achieved));
        if (P.name == "b") out.push_back(make("cl3", P.pass, P.achieved));
    }

    // cl4
    bool c4 = true;
    std::string c4w;
    for (std::size_t k = 0; k < dec.gens.size(); ++k) {
        const auto& G = dec.gens[k];
        for (std::size_t i = 0; i < G.gen.cubes.size(); ++i) {
            if (!G.good[i]) continue;
            for (std::size_t j = k + 1; j < dec.gens.size(); ++j) {
                const auto& H = dec.gens[j];
                for (std::size_t q = 0; q < H.gen.cubes.size(); ++q) {
                    const Cube& P = H.gen.cubes[q];
                    bool meets = std::any_of(G.Z[i].begin(), G.Z[i].end(),
                                             [&](std::size_t z) { return P.contains(mu.point(z)); });
                    if (!meets) continue;
                    if (H.good[q] || H.bad[q] || !zero_on(mu, P, H.g, tol) || !zero_on(mu, P, H.b, tol)) {
                        c4 = false;
                        c4w = "good cube " + std::to_string(i) + " of m=" + std::to_string(k + 1);
                    }
                }
            }
        }
    }
    out.push_back(make("cl4", c4, 0.0, c4w));
    double cp = dec.ledger.count("C_pack") ? dec.ledger.at("C_pack") : 0.0;
    out.push_back(make("cl5", std::isfinite(cp), cp));
    return out;
}

std::vector<Check> verify_kernels(const DiscreteMeasure& mu, const MainDecomposition& dec,
                                  std::map<std::string, double>* ledger) {
    std::vector<Check> out;
    const std::size_t N = mu.size();
    const MainParams& p = dec.params;
    const double n = mu.n();
    const double cap = p.cap_for(n);
    bool bound = true, equality = true, support = true, conv_hi = true, conv_lo = true, dual = true;
    bool pa = true, pc_hi = true, pc_lo = true;
    double C12 = 0.0, eps2 = 0.0, eps2b = 0.0, Cb = 0.0, Cd = 0.0, bridge = kInf;
    double mass_min = kInf, mass_max = 0.0;
    std::size_t nondeg = 0, admissible = 0;
    std::string where;
    for (const auto& G : dec.gens) {
        const Generation& gen = G.gen;
        std::vector<PsiConditions> pc(N);
        parallel_for(N, [&](std::size_t y) { pc[y] = check_psi(mu, G.comps[y], y, cap); });
        for (std::size_t y = 0; y < N; ++y) {
            bound = bound && pc[y].bound;
            equality = equality && pc[y].equality;
            support = support && pc[y].support;
            if (!pc[y].where.empty()) where = pc[y].where;
            C12 = std::max(C12, pc[y].C12);
            if (!G.comps[y].q1.is_point()) {
                ++nondeg;
                eps2 = std::max(eps2, std::abs(pc[y].l1 - p.alpha2));
                eps2b = std::max(eps2b, std::abs(pc[y].l1 - pc[y].annulus));
            }
        }
        std::vector<char> in_volume(N, 0);
        for (std::size_t x = 0; x < N; ++x)
            for (auto [i, w] : gen.weights[x])
                if (gen.kind[i] == CubeKind::volume) in_volume[x] = 1;
        for (std::size_t x = 0; x < N; ++x) {
            double s = 0.0, t = 0.0;
            for (std::size_t y = 0; y < N; ++y) {
                s += G.phi[y][x] * mu.weight(y);
                t += G.phi[x][y] * mu.weight(y);
            }
            if (s > 1.0 + p.eps3) conv_hi = false;
            if (in_volume[x]) {
                if (s < 1.0 - p.eps3) conv_lo = false;
                if (std::abs(t - 1.0) > p.eps3) dual = false;
                mass_min = std::min(mass_min, s);
            }
            mass_max = std::max(mass_max, s);
        }
        // phi.a vanishing and phi.d gradient, over generation cubes
        std::vector<std::vector<std::vector<double>>> grad(gen.cubes.size());
        for (std::size_t i = 0; i < gen.cubes.size(); ++i) {
            std::size_t x0 = gen.center_atom[i];
            const auto& cx0 = G.comps[x0];
            for (std::size_t x : atoms_in(mu, gen.cubes[i]))
                for (std::size_t y = 0; y < N; ++y) {
                    if (!cx0.q3hathat.contains(mu.point(y)) && G.phi[y][x] != 0.0) pa = false;
                    double r = norm2(mu.point(x), mu.point(y));
                    if (r == 0.0) continue;
                    std::vector<double> gphi(mu.dim(), 0.0);
                    auto add = [&](std::size_t cube, std::size_t centre, double w) {
                        auto gv = psi_gradient(mu, G.comps[centre], centre, x, cap);
                        for (int k = 0; k < mu.dim(); ++k) gphi[k] += w * gv[k] / p.alpha2;
                        (void)cube;
                    };
                    if (gen.weights[y].empty()) add(0, y, 1.0);
                    for (auto [j, w] : gen.weights[y]) add(j, gen.center_atom[j], w);
                    double gn = std::sqrt(std::inner_product(gphi.begin(), gphi.end(), gphi.begin(), 0.0));
                    if (gn == 0.0) continue;
                    double den = std::pow(r, -(n + 1.0));
                    if (!cx0.q1check.is_point()) den = std::min(den, std::pow(cx0.q1check.side, -(n + 1.0)));
                    Cd = std::max(Cd, gn * p.alpha2 / den);
                }
        }
        // phi.b and phi.c bounds, over all support pairs
        for (std::size_t x = 0; x < N; ++x) {
            const auto& cx = G.comps[x];
            for (std::size_t y = 0; y < N; ++y) {
                double ph = G.phi[y][x];
                auto yp = mu.point(y);
                double r = norm2(mu.point(x), yp);
                bool in_check = cx.q1check.contains(yp);
                if (in_check && !cx.q1check.is_point() && ph > 0.0)
                    Cb = std::max(Cb, ph * p.alpha2 * std::pow(cx.q1check.side, n));
                if (r == 0.0) continue;
                double rn = std::pow(r, -n) / p.alpha2;
                ++admissible;
                if (!in_check && ph > rn * (1.0 + p.eps3 / 2.0) * (1.0 + 1e-12)) pc_hi = false;
                if (cx.q2.contains(yp) && !cx.q1hat.contains(yp) && ph < rn * (1.0 - p.eps3 / 2.0) * (1.0 - 1e-12))
                    pc_lo = false;
            }
        }
        // admissibility bridge on a bounded sample of anchors
        std::size_t step = std::max<std::size_t>(1, N / 16);
        for (std::size_t y = 0; y < N; y += step) {
            if (max_abs(G.phi[y]) == 0.0) continue;
            bridge = std::min(bridge, lp_feasible_scale(mu, G.phi[y], mu.point(y)));
        }
    }
    out.push_back(make("psi.bound", bound, 0.0, bound ? "" : where));
    out.push_back(make("psi.equality", equality, 0.0));
    out.push_back(make("psi.support", support, 0.0));
    out.push_back(make("psi.C12", std::isfinite(C12), C12));
    out.push_back(make("psi.eps2", std::isfinite(eps2), eps2, std::to_string(nondeg) + " nondegenerate kernels"));
    out.push_back(make("convo.upper", conv_hi, mass_max));
    out.push_back(make("convo.lower", conv_lo, std::isfinite(mass_min) ? mass_min : 1.0));
    out.push_back(make("convo.dual", dual, 0.0));
    out.push_back(make("phi.a", pa, 0.0));
    out.push_back(make("phi.b", std::isfinite(Cb), Cb));
    out.push_back(make("phi.c.upper", pc_hi, 0.0));
    out.push_back(make("phi.c.lower", pc_lo, 0.0));
    out.push_back(make("phi.d", std::isfinite(Cd), Cd));
    out.push_back(make("bridge", bridge > 0.0, std::isfinite(bridge) ? bridge : 0.0));
    if (ledger) {
        auto& L = *ledger;
        L["C12"] = C12;
        L["eps2"] = eps2;
        L["eps2_annulus"] = eps2b;
        L["eps3"] = p.eps3;
        L["phi_b_const"] = Cb;
        L["phi_d_const"] = Cd;
        L["bridge_const"] = std::isfinite(bridge) ? bridge : 0.0;
        L["kernel_pairs"] = static_cast<double>(admissible);
    }
    return out;
}

MainDecomposition run_main_lemma(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& R0,
                                 const MainParams& p, int retries, std::vector<Check>* claims) {
    MainParams q = p;
    MainDecomposition dec;
    std::vector<Check> cl;
    for (int attempt = 1;; ++attempt) {
        dec = decompose_main(mu, f, R0, q);
        cl = verify_claims(mu, f, dec);
        dec.attempts = attempt;
        if ((all_pass(dec.properties) && all_pass(cl)) || attempt > retries) break;
        q.A *= 2.0;
    }
    if (claims) *claims = cl;
    return dec;
}

}  // namespace czkit
