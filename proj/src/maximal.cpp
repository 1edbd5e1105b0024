#include "czkit/maximal.hpp"

#include <algorithm>
#include <limits>

#include "czkit/parallel.hpp"
#include "czkit/simplex.hpp"

namespace czkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_distance(std::span<const double> p, std::span<const double> a, std::span<const double> b) {
    double ab2 = 0.0, t = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        double e = b[k] - a[k];
        ab2 += e * e;
        t += (p[k] - a[k]) * e;
    }
    t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        double v = p[k] - (a[k] + t * (b[k] - a[k]));
        s += v * v;
    }
    return std::sqrt(s);
}

// Pointwise caps and the pair-constraint matrix for anchor x.
struct Caps {
    std::vector<double> cap;                 // |y_i - x|^{-n}, inf at x
    std::vector<std::vector<double>> L;      // pair caps, inf when dropped
};

Caps build_caps(const DiscreteMeasure& mu, std::span<const double> x) {
    const std::size_t N = mu.size();
    const double n = mu.n();
    Caps c;
    c.cap.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        double r = norm2(mu.point(i), x);
        c.cap[i] = r > 0.0 ? std::pow(r, -n) : kInf;
    }
    c.L.assign(N, std::vector<double>(N, kInf));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double dist = segment_distance(x, mu.point(i), mu.point(j));
            if (dist <= 0.0) continue;
            double v = norm2(mu.point(i), mu.point(j)) / std::pow(dist, n + 1.0);
            c.L[i][j] = c.L[j][i] = v;
        }
    return c;
}

}  // namespace

MaximalResult grand_maximal_upper(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x) {
    const std::size_t N = mu.size();
    if (f.size() != N) throw Error(ErrorKind::DimensionMismatch, "function length");
    MaximalResult res;
    res.witness.assign(N, 0.0);
    bool zero = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
    if (zero) return res;
    Caps caps = build_caps(mu, x);
    std::vector<double> ub(N);
    for (std::size_t i = 0; i < N; ++i) ub[i] = std::min(caps.cap[i], 1.0 / mu.weight(i));
    // shortest-path closure of the pair caps
    auto D = caps.L;
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t i = 0; i < N; ++i) {
            if (D[i][k] == kInf) continue;
            for (std::size_t j = 0; j < N; ++j)
                if (D[i][k] + D[k][j] < D[i][j]) D[i][j] = D[i][k] + D[k][j];
        }
    // variables psi_i = w_i phi_i
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    A.emplace_back(N, 1.0);
    b.push_back(1.0);
    for (std::size_t i = 0; i < N; ++i) {
        double cap = mu.weight(i) * caps.cap[i];
        if (cap >= 1.0) continue;
        std::vector<double> row(N, 0.0);
        row[i] = 1.0;
        A.push_back(std::move(row));
        b.push_back(cap);
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            double L = caps.L[i][j];
            if (L == kInf || L >= ub[i]) continue;
            bool implied = false;
            for (std::size_t k = 0; k < N && !implied; ++k) {
                if (k == i || k == j) continue;
                if (D[i][k] + D[k][j] <= L) implied = true;
            }
            if (implied) continue;
            double wi = mu.weight(i), wj = mu.weight(j), s = std::min(wi, wj);
            std::vector<double> row(N, 0.0);
            row[i] = s / wi;
            row[j] = -s / wj;
            A.push_back(std::move(row));
            b.push_back(s * L);
        }
    res.constraints = static_cast<int>(A.size());
    std::vector<double> c(f), cn(N);
    for (std::size_t i = 0; i < N; ++i) cn[i] = -c[i];
    auto plus = simplex_max(A, b, c);
    auto minus = simplex_max(A, b, cn);
    const auto& best = plus.value >= minus.value ? plus : minus;
    res.value = std::max(0.0, best.value);
    for (std::size_t i = 0; i < N; ++i) res.witness[i] = best.x[i] / mu.weight(i);
    return res;
}

double lower_profile(double t, double r, double n) {
    const double a = 0.9 * r, b = 1.1 * r;
    double h;
    if (t <= a) {
        h = std::pow(r, -n);
    } else if (t >= b) {
        h = std::pow(t, -n);
    } else {
        double u = (t - a) / (b - a), w = b - a;
        double p0 = std::pow(r, -n), p1 = std::pow(b, -n), m1 = -n * std::pow(b, -n - 1.0);
        double h00 = 2 * u * u * u - 3 * u * u + 1, h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
        h = h00 * p0 + h01 * p1 + h11 * w * m1;
    }
    return h / (n + 1.0);
}

double lower_profile_deriv(double t, double r, double n) {
    const double a = 0.9 * r, b = 1.1 * r;
    double dh;
    if (t <= a) {
        dh = 0.0;
    } else if (t >= b) {
        dh = -n * std::pow(t, -n - 1.0);
    } else {
        double u = (t - a) / (b - a), w = b - a;
        double p0 = std::pow(r, -n), p1 = std::pow(b, -n), m1 = -n * std::pow(b, -n - 1.0);
        double d00 = 6 * u * u - 6 * u, d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
        dh = (d00 * p0 + d01 * p1) / w + d11 * m1;
    }
    return dh / (n + 1.0);
}

std::vector<double> default_radii(const DiscreteMeasure& mu, std::span<const double> x) {
    std::vector<double> d;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double r = norm2(mu.point(i), x);
        if (r > 0.0) d.push_back(r);
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    std::vector<double> out;
    for (double r : d)
        for (double s : {0.5, 1.0 / 1.1, 1.0, 1.0 / 0.9, 2.0}) out.push_back(r * s);
    if (out.empty()) out.push_back(1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MaximalResult grand_maximal_lower(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x,
                                  const std::vector<double>& radii_in) {
    const std::size_t N = mu.size();
    if (f.size() != N) throw Error(ErrorKind::DimensionMismatch, "function length");
    std::vector<double> radii = radii_in.empty() ? default_radii(mu, x) : radii_in;
    const double n = mu.n();
    std::vector<double> t(N);
    for (std::size_t i = 0; i < N; ++i) t[i] = norm2(mu.point(i), x);
    MaximalResult res;
    std::vector<double> kap(N);
    for (double r : radii) {
        if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
        double l1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            kap[i] = lower_profile(t[i], r, n);
            l1 += mu.weight(i) * kap[i];
        }
        double s = l1 > 0.0 ? std::min(1.0, 1.0 / l1) : 1.0;
        double val = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double phi = s * kap[i];
            mass += mu.weight(i) * phi;
            if (t[i] > 0.0) {
                double grad = s * std::abs(lower_profile_deriv(t[i], r, n));
                if (phi > std::pow(t[i], -n) * (1.0 + 1e-12) || grad > std::pow(t[i], -n - 1.0) * (1.0 + 1e-12))
                    throw Error(ErrorKind::AdmissibilityViolation, "lower family at r=" + std::to_string(r));
            }
            val += mu.weight(i) * f[i] * phi;
        }
        if (mass > 1.0 + 1e-12) throw Error(ErrorKind::AdmissibilityViolation, "lower family mass");
        if (std::abs(val) > res.value) {
            res.value = std::abs(val);
            res.witness_r = r;
        }
    }
    return res;
}

double hl_maximal(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x, double rho,
                  bool centered_variant) {
    if (!(rho > 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must exceed 1");
    const std::size_t N = mu.size();
    if (f.size() != N) throw Error(ErrorKind::DimensionMismatch, "function length");
    double best = 0.0;
    std::vector<std::pair<double, std::size_t>> order(N);
    std::vector<double> cum_f(N + 1), cum_w(N + 1), dist(N);
    for (std::size_t c = 0; c < N; ++c) {
        auto zc = mu.point(c);
        for (std::size_t j = 0; j < N; ++j) order[j] = {norm_inf(mu.point(j), zc), j};
        std::sort(order.begin(), order.end());
        for (std::size_t j = 0; j < N; ++j) {
            dist[j] = order[j].first;
            cum_f[j + 1] = cum_f[j] + std::abs(f[order[j].second]) * mu.weight(order[j].second);
            cum_w[j + 1] = cum_w[j] + mu.weight(order[j].second);
        }
        // count of atoms inside the closed cube of side s (same tolerance as Cube::contains)
        auto inside = [&](double s) -> std::size_t {
            double lim = s == 0.0 ? 0.0 : 0.5 * s * (1.0 + 1e-12);
            return static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), lim) - dist.begin());
        };
        double dx = norm_inf(x, zc);
        double smin = centered_variant ? 2.0 * rho * dx : 2.0 * dx;
        auto eval = [&](double s) {
            double num = cum_f[inside(s)];
            double den = centered_variant ? cum_w[inside(s)] : cum_w[inside(rho * s)];
            if (den > 0.0) best = std::max(best, num / den);
        };
        eval(smin);
        for (std::size_t j = 0; j < N; ++j) {
            double s = 2.0 * dist[j];
            if (s >= smin) eval(s);
        }
    }
    return best;
}

std::vector<double> maximal_field(const DiscreteMeasure& mu, const std::vector<double>& f, MaximalKind kind,
                                  const std::vector<Point>& queries, double rho) {
    std::vector<double> out(queries.size());
    parallel_for(queries.size(), [&](std::size_t q) {
        const auto& x = queries[q];
        switch (kind) {
        case MaximalKind::grand_upper: out[q] = grand_maximal_upper(mu, f, x).value; break;
        case MaximalKind::grand_lower: out[q] = grand_maximal_lower(mu, f, x).value; break;
        case MaximalKind::hl_lower: out[q] = hl_maximal(mu, f, x, rho, false); break;
        case MaximalKind::hl_upper: out[q] = hl_maximal(mu, f, x, rho, true); break;
        }
    });
    return out;
}

double lp_feasible_scale(const DiscreteMeasure& mu, const std::vector<double>& phi, std::span<const double> x) {
    Caps caps = build_caps(mu, x);
    double C = kInf, mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (phi[i] < 0.0) return 0.0;
        mass += mu.weight(i) * phi[i];
        if (phi[i] > 0.0 && caps.cap[i] < kInf) C = std::min(C, caps.cap[i] / phi[i]);
    }
    if (mass > 0.0) C = std::min(C, 1.0 / mass);
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            double diff = std::abs(phi[i] - phi[j]);
            if (diff > 0.0 && caps.L[i][j] < kInf) C = std::min(C, caps.L[i][j] / diff);
        }
    return C;
}

}  // namespace czkit
