#include "czkit/simplex.hpp"

#include <cmath>
#include <limits>

#include "czkit/common.hpp"

namespace czkit {

LPResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double tol, int max_pivots) {
    const std::size_t m = A.size(), n = c.size();
    const std::size_t w = n + 1;
    // Tucker tableau: rows 0..m-1 constraints, row m objective (-c).
    std::vector<double> T((m + 1) * w, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return T[i * w + j]; };
    for (std::size_t i = 0; i < m; ++i) {
        if (A[i].size() != n) throw Error(ErrorKind::InvalidArgument, "LP row width");
        if (b[i] < 0.0) throw Error(ErrorKind::InvalidArgument, "LP needs b >= 0");
        for (std::size_t j = 0; j < n; ++j) at(i, j) = A[i][j];
        at(i, n) = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) at(m, j) = -c[j];
    // labels: 0..n-1 structural, n..n+m-1 slack
    std::vector<std::size_t> col_label(n), row_label(m);
    for (std::size_t j = 0; j < n; ++j) col_label[j] = j;
    for (std::size_t i = 0; i < m; ++i) row_label[i] = n + i;

    LPResult res;
    bool bland = false;
    for (;;) {
        std::size_t s = n;
        double best = -tol;
        for (std::size_t j = 0; j < n; ++j) {
            double v = at(m, j);
            if (v >= -tol) continue;
            if (bland) {
                if (s == n || col_label[j] < col_label[s]) s = j;
            } else if (v < best) {
                best = v;
                s = j;
            }
        }
        if (s == n) break;
        std::size_t r = m;
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            double a = at(i, s);
            if (a <= 1e-12) continue;
            double q = at(i, n) / a;
            if (q < ratio - 1e-15 || (q <= ratio + 1e-15 && r < m && row_label[i] < row_label[r])) {
                ratio = q;
                r = i;
            }
        }
        if (r == m) throw Error(ErrorKind::LPNotConverged, "unbounded LP");
        if (ratio <= 1e-15) bland = true;
        if (++res.pivots > max_pivots) throw Error(ErrorKind::LPNotConverged, "pivot limit reached");
        const double p = at(r, s);
        double* prow = &T[r * w];
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == r) continue;
            double f = at(i, s);
            if (f == 0.0) continue;
            double* row = &T[i * w];
            double g = f / p;
            for (std::size_t j = 0; j < w; ++j) row[j] -= g * prow[j];
            row[s] = -g;
        }
        for (std::size_t j = 0; j < w; ++j) prow[j] /= p;
        prow[s] = 1.0 / p;
        std::swap(col_label[s], row_label[r]);
        for (std::size_t i = 0; i < m; ++i)
            if (at(i, n) < 0.0 && at(i, n) > -1e-11) at(i, n) = 0.0;
    }
    res.value = at(m, n);
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (row_label[i] < n) res.x[row_label[i]] = at(i, n);
    return res;
}

}  // namespace czkit
