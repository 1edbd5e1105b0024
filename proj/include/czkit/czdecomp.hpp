#pragma once

#include <vector>

#include "czkit/covering.hpp"
#include "czkit/spaces.hpp"

namespace czkit {

struct CZInvariants {
    bool reconstruction = true;   // f = g + b
    bool g_bound = true;          // |g| <= C_g lambda
    bool supp_b = true;           // supp b inside Omega
    bool supp_b_hosts = true;     // supp b inside Omega union the hosts R_i
    bool cc4 = true;              // int alpha_i = int f w_i
    bool cc45 = true;             // |alpha_i|_inf mu(R_i) <= 2 |alpha_i|_1
    bool cc5 = true;              // sum |alpha_i| <= B lambda
    bool host_rule = true;        // R_i smallest admissible 6^k Q_i
    bool half_mass = true;        // mu(A_k) >= mu(R_k)/2 at every step
    bool f_off_omega = true;      // |f| <= 2^{d+1} lambda off Omega

    bool all_seven() const { return reconstruction && g_bound && supp_b && cc4 && cc45 && cc5 && host_rule; }
};

struct CZDecomposition {
    double lambda = 0.0;
    std::vector<double> maximal;          // M_(2) f at support points
    std::vector<char> omega;              // support points with M_(2) f > lambda
    OpenRegion omega_region;
    WhitneyDecomposition whitney;
    std::vector<std::vector<double>> weights;  // per Whitney cube, values at atoms
    std::vector<Cube> hosts;
    std::vector<int> host_power;
    std::vector<std::size_t> order;       // processing order
    std::vector<std::vector<double>> alphas;
    std::vector<double> coeff;            // c_k
    std::vector<double> a_mass;           // mu(A_k)
    SampledFunction g, b;
    double C14 = 0.0, C15 = 0.0, B = 0.0, C_g = 0.0;
    double weight_grad_const = 0.0;       // max |grad w_i| l(Q_i) at atoms
    CZInvariants inv;
};

CZDecomposition cz_decompose(const DiscreteMeasure& mu, const SampledFunction& f, double lambda);

// Re-evaluates every invariant from the stored fields.
CZInvariants check_cz(const DiscreteMeasure& mu, const SampledFunction& f, const CZDecomposition& dec);

struct Truncation {
    SampledFunction fk;
    Cube qk;
    int power = 0;  // N_k
};

Truncation truncate_sequence(const DiscreteMeasure& mu, const SampledFunction& f, int k);

}  // namespace czkit
