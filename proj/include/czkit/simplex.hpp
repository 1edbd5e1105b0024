#pragma once

#include <vector>

namespace czkit {

struct LPResult {
    double value = 0.0;
    std::vector<double> x;
    int pivots = 0;
};

// maximize c.x  subject to  A x <= b, x >= 0, with b >= 0 (origin feasible).
// Dense tableau; Dantzig pricing that falls back to Bland's rule after a
// degenerate pivot, so it cannot cycle.
LPResult simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double tol = 1e-9, int max_pivots = 200000);

}  // namespace czkit
