#include "czkit/czdecomp.hpp"

#include <algorithm>
#include <climits>
#include <numeric>

#include "czkit/maximal.hpp"
#include "czkit/parallel.hpp"

namespace czkit {

namespace {

std::vector<double> maximal_at_support(const DiscreteMeasure& mu, const SampledFunction& f) {
    std::vector<double> mf(mu.size());
    parallel_for(mu.size(), [&](std::size_t i) { mf[i] = hl_maximal(mu, f, mu.point(i), 2.0, false); });
    return mf;
}

// Open region realizing {M_(2) f > lambda}: per center, the interior of 1.5 times
// the largest witnessing canonical cube (a gap-sized box for point witnesses).
OpenRegion omega_region(const DiscreteMeasure& mu, const SampledFunction& f, double lambda) {
    const std::size_t N = mu.size();
    OpenRegion reg;
    std::vector<std::pair<double, std::size_t>> od(N);
    std::vector<double> dist(N), cum_f(N + 1), cum_w(N + 1);
    for (std::size_t c = 0; c < N; ++c) {
        auto zc = mu.point(c);
        for (std::size_t j = 0; j < N; ++j) od[j] = {norm_inf(mu.point(j), zc), j};
        std::sort(od.begin(), od.end());
        for (std::size_t j = 0; j < N; ++j) {
            dist[j] = od[j].first;
            cum_f[j + 1] = cum_f[j] + std::abs(f[od[j].second]) * mu.weight(od[j].second);
            cum_w[j + 1] = cum_w[j] + mu.weight(od[j].second);
        }
        auto inside = [&](double s) {
            double lim = s == 0.0 ? 0.0 : 0.5 * s * (1.0 + 1e-12);
            return static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), lim) - dist.begin());
        };
        double best = -1.0;
        for (std::size_t j = 0; j < N; ++j) {
            double s = 2.0 * dist[j];
            double den = cum_w[inside(2.0 * s)];
            if (den > 0.0 && cum_f[inside(s)] / den > lambda) best = std::max(best, s);
        }
        if (best < 0.0) continue;
        Point zp(zc.begin(), zc.end());
        if (best > 0.0) {
            reg.add(Cube(zp, 1.5 * best));
        } else {
            double gap = N > 1 ? dist[1] : 1.0;
            reg.add(Cube(zp, gap));
        }
    }
    return reg;
}

double raw_bump(std::span<const double> x, const Cube& q, std::vector<double>* grad) {
    const int d = q.dim();
    const double l = q.side;
    std::vector<double> s(d), ds(d);
    double prod = 1.0;
    for (int k = 0; k < d; ++k) {
        double off = x[k] - q.center[k];
        double u = (0.75 * l - std::abs(off)) / (0.25 * l);
        s[k] = smoothstep(u);
        ds[k] = -(off >= 0 ? 1.0 : -1.0) * smoothstep_deriv(u) / (0.25 * l);
        prod *= s[k];
    }
    if (grad) {
        grad->assign(d, 0.0);
        for (int k = 0; k < d; ++k) {
            double p = ds[k];
            for (int j = 0; j < d; ++j)
                if (j != k) p *= s[j];
            (*grad)[k] = p;
        }
    }
    return prod;
}

bool host_ok(const DiscreteMeasure& mu, const Cube& R, const OpenRegion& reg) {
    double n = mu.n();
    bool dbl = mass_cube(mu, scale(R, 6.0)) <= std::pow(6.0, n + 1.0) * mass_cube(mu, R);
    return dbl && reg.meets_complement(R);
}

CZDecomposition cz_impl(const DiscreteMeasure& mu, const SampledFunction& f, double lambda, const std::vector<double>* mf) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::LambdaNonpositive, "lambda must be positive");
    if (f.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "function length");
    const std::size_t N = mu.size();
    CZDecomposition dec;
    dec.lambda = lambda;
    dec.maximal = mf ? *mf : maximal_at_support(mu, f);
    dec.omega.assign(N, 0);
    bool any = false;
    for (std::size_t i = 0; i < N; ++i)
        if (dec.maximal[i] > lambda) dec.omega[i] = 1, any = true;
    dec.g = f;
    dec.b.assign(N, 0.0);
    dec.C_g = std::pow(2.0, mu.dim() + 1);
    if (!any) {
        dec.inv = check_cz(mu, f, dec);
        return dec;
    }
    dec.omega_region = omega_region(mu, f, lambda);
    std::vector<Point> required;
    for (std::size_t i = 0; i < N; ++i)
        if (dec.omega_region.contains(mu.point(i))) required.emplace_back(mu.point(i).begin(), mu.point(i).end());
    Cube bounding = scale(dec.omega_region.bounding_cube(), 2.0);
    dec.whitney = whitney_decompose(dec.omega_region, bounding, 0, required);
    const auto& Q = dec.whitney.cubes;
    const std::size_t M = Q.size();

    // partition of unity at the atoms
    dec.weights.assign(M, std::vector<double>(N, 0.0));
    std::vector<std::vector<std::vector<double>>> grads(M, std::vector<std::vector<double>>(N));
    for (std::size_t x = 0; x < N; ++x) {
        if (!dec.omega_region.contains(mu.point(x))) continue;
        double S = 0.0;
        std::vector<double> gS(mu.dim(), 0.0);
        for (std::size_t i = 0; i < M; ++i) {
            dec.weights[i][x] = raw_bump(mu.point(x), Q[i], &grads[i][x]);
            S += dec.weights[i][x];
            for (int k = 0; k < mu.dim(); ++k) gS[k] += grads[i][x][k];
        }
        if (S <= 0.0) continue;
        for (std::size_t i = 0; i < M; ++i) {
            double wi = dec.weights[i][x];
            double gn = 0.0;
            for (int k = 0; k < mu.dim(); ++k) {
                double gk = (grads[i][x][k] * S - wi * gS[k]) / (S * S);
                gn += gk * gk;
            }
            dec.weight_grad_const = std::max(dec.weight_grad_const, std::sqrt(gn) * Q[i].side);
            dec.weights[i][x] = wi / S;
        }
    }

    dec.hosts.resize(M);
    dec.host_power.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        int k = 1;
        for (; k < 80; ++k)
            if (host_ok(mu, scale(Q[i], std::pow(6.0, k)), dec.omega_region)) break;
        dec.hosts[i] = scale(Q[i], std::pow(6.0, k));
        dec.host_power[i] = k;
    }
    dec.order.resize(M);
    std::iota(dec.order.begin(), dec.order.end(), 0);
    std::stable_sort(dec.order.begin(), dec.order.end(),
                     [&](std::size_t a, std::size_t b) { return dec.hosts[a].side < dec.hosts[b].side; });

    std::vector<double> fw(M, 0.0), fw_abs(M, 0.0), host_mass(M);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t x = 0; x < N; ++x) {
            fw[i] += f[x] * dec.weights[i][x] * mu.weight(x);
            fw_abs[i] += std::abs(f[x] * dec.weights[i][x]) * mu.weight(x);
        }
        host_mass[i] = mass_cube(mu, dec.hosts[i]);
    }
    for (std::size_t t = 0; t < M; ++t) {
        std::size_t k = dec.order[t];
        if (!(host_mass[k] > 0.0)) continue;
        double s = 0.0;
        for (std::size_t u = 0; u < t; ++u) {
            std::size_t j = dec.order[u];
            if (dec.hosts[j].intersects(dec.hosts[k])) s += fw_abs[j];
        }
        dec.C14 = std::max(dec.C14, s / (lambda * host_mass[k]));
    }
    const double thresh = 2.0 * dec.C14 * lambda;
    std::vector<double> acc(N, 0.0);
    dec.alphas.assign(M, std::vector<double>(N, 0.0));
    dec.coeff.assign(M, 0.0);
    dec.a_mass.assign(M, 0.0);
    for (std::size_t t = 0; t < M; ++t) {
        std::size_t k = dec.order[t];
        std::vector<std::size_t> A;
        double am = 0.0;
        for (std::size_t x = 0; x < N; ++x)
            if (dec.hosts[k].contains(mu.point(x)) && acc[x] <= thresh * (1.0 + 1e-12)) {
                A.push_back(x);
                am += mu.weight(x);
            }
        dec.a_mass[k] = am;
        if (am < 0.5 * host_mass[k] * (1.0 - 1e-12)) dec.inv.half_mass = false;
        double c = am > 0.0 ? fw[k] / am : 0.0;
        dec.coeff[k] = c;
        for (std::size_t x : A) {
            dec.alphas[k][x] = c;
            acc[x] += std::abs(c);
        }
        dec.C15 = std::max(dec.C15, std::abs(c) / lambda);
    }
    dec.B = 2.0 * dec.C14 + dec.C15;
    dec.C_g = std::max(std::pow(2.0, mu.dim() + 1), dec.B);
    for (std::size_t x = 0; x < N; ++x) {
        double sw = 0.0, sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            sw += dec.weights[i][x];
            sa += dec.alphas[i][x];
            sb += f[x] * dec.weights[i][x] - dec.alphas[i][x];
        }
        dec.g[x] = f[x] * (1.0 - sw) + sa;
        dec.b[x] = sb;
    }
    bool half = dec.inv.half_mass;
    dec.inv = check_cz(mu, f, dec);
    dec.inv.half_mass = half;
    return dec;
}

}  // namespace

CZDecomposition cz_decompose(const DiscreteMeasure& mu, const SampledFunction& f, double lambda) {
    return cz_impl(mu, f, lambda, nullptr);
}

CZInvariants check_cz(const DiscreteMeasure& mu, const SampledFunction& f, const CZDecomposition& dec) {
    CZInvariants inv;
    const std::size_t N = mu.size();
    const double scale_f = std::max(sup_norm(f), 1e-300);
    const double tol = 1e-10 * scale_f;
    const double lam = dec.lambda;
    std::vector<double> asum(N, 0.0);
    for (const auto& a : dec.alphas)
        for (std::size_t x = 0; x < N; ++x) asum[x] += std::abs(a[x]);
    for (std::size_t x = 0; x < N; ++x) {
        if (std::abs(f[x] - dec.g[x] - dec.b[x]) > tol) inv.reconstruction = false;
        if (std::abs(dec.g[x]) > dec.C_g * lam * (1.0 + 1e-12) + tol) inv.g_bound = false;
        bool in_omega = dec.omega_region.contains(mu.point(x));
        if (std::abs(dec.b[x]) > tol && !in_omega) {
            inv.supp_b = false;
            bool in_host = std::any_of(dec.hosts.begin(), dec.hosts.end(),
                                       [&](const Cube& r) { return r.contains(mu.point(x)); });
            if (!in_host) inv.supp_b_hosts = false;
        }
        if (asum[x] > dec.B * lam * (1.0 + 1e-12) + tol) inv.cc5 = false;
        if (!dec.omega[x] && std::abs(f[x]) > std::pow(2.0, mu.dim() + 1) * lam * (1.0 + 1e-12)) inv.f_off_omega = false;
    }
    for (std::size_t i = 0; i < dec.alphas.size(); ++i) {
        double ia = 0.0, ifw = 0.0, l1 = 0.0, amax = 0.0;
        for (std::size_t x = 0; x < N; ++x) {
            ia += dec.alphas[i][x] * mu.weight(x);
            ifw += f[x] * dec.weights[i][x] * mu.weight(x);
            l1 += std::abs(dec.alphas[i][x]) * mu.weight(x);
            amax = std::max(amax, std::abs(dec.alphas[i][x]));
            if (dec.alphas[i][x] != 0.0 && !dec.hosts[i].contains(mu.point(x))) inv.cc4 = false;
        }
        if (std::abs(ia - ifw) > 1e-10 * std::max(1.0, l1)) inv.cc4 = false;
        if (amax * mass_cube(mu, dec.hosts[i]) > 2.0 * l1 * (1.0 + 1e-12) + 1e-300) inv.cc45 = false;
        const Cube& q = dec.whitney.cubes[i];
        int k = dec.host_power[i];
        if (!(dec.hosts[i] == scale(q, std::pow(6.0, k))) || !host_ok(mu, dec.hosts[i], dec.omega_region))
            inv.host_rule = false;
        for (int j = 1; j < k; ++j)
            if (host_ok(mu, scale(q, std::pow(6.0, j)), dec.omega_region)) inv.host_rule = false;
    }
    return inv;
}

Truncation truncate_sequence(const DiscreteMeasure& mu, const SampledFunction& f, int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
    const int d = mu.dim();
    double mn = INFINITY;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        double v = 0.0;
        for (int j = 0; j < d; ++j) v = std::max(v, std::abs(p[j]));
        mn = std::min(mn, v);
    }
    int start = mn > 0.0 ? static_cast<int>(std::ceil(std::log(mn) / std::log(4.0))) : -40;
    const double beta = std::pow(4.0, mu.n() + 1.0);
    int found = 0;
    for (int Nk = start; Nk < start + 400; ++Nk) {
        Cube q(Point(d, 0.0), 2.0 * std::pow(4.0, Nk));
        double m = mass_cube(mu, q);
        if (!(m > 0.0) || mass_cube(mu, scale(q, 4.0)) > beta * m) continue;
        if (++found < k) continue;
        Truncation t;
        t.qk = q;
        t.power = Nk;
        const double r = std::pow(4.0, Nk);
        std::vector<double> w(mu.size());
        double iwf = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            auto p = mu.point(i);
            double prod = 1.0;
            for (int j = 0; j < d; ++j) prod *= smoothstep(2.0 - std::abs(p[j]) / r);
            w[i] = prod;
            iwf += prod * f[i] * mu.weight(i);
        }
        t.fk.resize(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i)
            t.fk[i] = w[i] * f[i] - (q.contains(mu.point(i)) ? iwf / m : 0.0);
        return t;
    }
    throw Error(ErrorKind::NotEnoughScales, "fewer than k doubling scales");
}

H1Bound h1_upper_bound(const DiscreteMeasure& mu, const SampledFunction& f) {
    if (f.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "function length");
    H1Bound out;
    double l1 = l1_norm(mu, f);
    if (l1 == 0.0) return out;
    if (std::abs(integral(mu, f)) > 1e-10 * l1) throw Error(ErrorKind::NotMeanZero, "h1_upper_bound");
    const std::size_t N = mu.size();
    AtomicBlock fb = single_block(mu, f, support_hull(mu, f));
    out.bound = fb.atoms.empty() ? 0.0 : fb.atoms[0].lambda;
    out.blocks = {fb};
    out.level = INT_MIN;

    std::vector<double> mf = maximal_at_support(mu, f);
    std::vector<double> sorted(mf);
    std::sort(sorted.begin(), sorted.end());
    double med = sorted[N / 2], top = sorted.back();
    if (!(top > 0.0)) return out;
    int kmin = static_cast<int>(std::floor(std::log2(std::max(med, top * 1e-6)))) - 3;
    int kmax = static_cast<int>(std::ceil(std::log2(top)));
    for (int k = kmin; k < kmax; ++k) {
        double lam = std::ldexp(1.0, k);
        CZDecomposition dec = cz_impl(mu, f, lam, &mf);
        std::vector<AtomicBlock> blocks;
        double total = 0.0;
        for (std::size_t i = 0; i < dec.whitney.cubes.size(); ++i) {
            AtomicBlock blk;
            blk.host = dec.hosts[i];
            SampledFunction fwi(N), ai(N);
            for (std::size_t x = 0; x < N; ++x) {
                fwi[x] = f[x] * dec.weights[i][x];
                ai[x] = -dec.alphas[i][x];
            }
            Cube q1 = scale(dec.whitney.cubes[i], 1.5);
            double m1 = sup_norm(fwi);
            if (m1 > 0.0) {
                double lam1 = m1 * mass_cube(mu, scale(q1, 2.0)) * k_coeff(mu, q1, blk.host);
                BlockAtom at{q1, fwi, lam1};
                for (double& v : at.a) v /= lam1;
                blk.atoms.push_back(std::move(at));
            }
            double m2 = sup_norm(ai);
            if (m2 > 0.0) {
                double lam2 = m2 * mass_cube(mu, scale(blk.host, 2.0));
                BlockAtom at{blk.host, ai, lam2};
                for (double& v : at.a) v /= lam2;
                blk.atoms.push_back(std::move(at));
            }
            if (blk.atoms.empty()) continue;
            for (const auto& at : blk.atoms) total += at.lambda;
            blocks.push_back(std::move(blk));
        }
        AtomicBlock gb = single_block(mu, dec.g, support_hull(mu, dec.g));
        if (!gb.atoms.empty()) {
            total += gb.atoms[0].lambda;
            blocks.push_back(std::move(gb));
        }
        if (total < out.bound) {
            out.bound = total;
            out.blocks = std::move(blocks);
            out.level = k;
            out.fallback = false;
        }
    }
    for (const auto& blk : out.blocks) {
        auto rep = validate_atomic_block(mu, blk);
        if (!rep.valid)
            throw Error(ErrorKind::PropertyViolated, "emitted block fails validation: " + rep.violations[0].kind);
    }
    return out;
}

}  // namespace czkit
