#pragma once

#include <string>
#include <vector>

#include "czkit/cube.hpp"

namespace czkit {

struct MaximalResult {
    double value = 0.0;
    std::vector<double> witness;  // phi at support points (upper) or empty
    double witness_r = 0.0;       // lower family parameter
    int constraints = 0;          // LP rows after pruning
};

MaximalResult grand_maximal_upper(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x);

// Default radii: distinct positive distances to x, each scaled by a few factors.
std::vector<double> default_radii(const DiscreteMeasure& mu, std::span<const double> x);

MaximalResult grand_maximal_lower(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x,
                                  const std::vector<double>& radii = {});

// Radial profile of the lower family, kappa and d kappa/dt.
double lower_profile(double t, double r, double n);
double lower_profile_deriv(double t, double r, double n);

// centered_variant=false: M_(rho) (x in Q, divide by mu(rho Q));
// centered_variant=true:  M^(rho) (x in Q/rho, divide by mu(Q)).
double hl_maximal(const DiscreteMeasure& mu, const std::vector<double>& f, std::span<const double> x, double rho,
                  bool centered_variant);

enum class MaximalKind { grand_upper, grand_lower, hl_lower, hl_upper };

std::vector<double> maximal_field(const DiscreteMeasure& mu, const std::vector<double>& f, MaximalKind kind,
                                  const std::vector<Point>& queries, double rho = 2.0);

// Feasibility of a vector phi for the upper LP at anchor x; returns the largest
// C in (0, inf) with C*phi feasible (inf when phi is zero).
double lp_feasible_scale(const DiscreteMeasure& mu, const std::vector<double>& phi, std::span<const double> x);

}  // namespace czkit
