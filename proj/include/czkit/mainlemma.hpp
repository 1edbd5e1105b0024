#pragma once

#include <map>
#include <string>
#include <vector>

#include "czkit/covering.hpp"
#include "czkit/spaces.hpp"

namespace czkit {

struct InstanceConstants {
    double eps0 = 0.0;  // max additivity defect over sampled nested triples
    double eps1 = 0.0;  // max |delta(Q,2R0) - target| over probed searches
    double C0 = 0.0;    // cube growth constant
};

InstanceConstants instance_constants(const DiscreteMeasure& mu, const Cube& R0, std::uint64_t seed = 1);

struct MainParams {
    double A = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double sigma = 0.0;
    double eps1 = 0.0;
    double eps3 = 0.25;
    double cap_const = 0.0;     // 0 means max(4, 2^n)
    bool enforce_chain = true;  // false only for reduced exploratory regimes
    DoublingParams doubling;

    double cap_for(double n) const { return cap_const > 0.0 ? cap_const : std::max(4.0, std::pow(2.0, n)); }
};

MainParams default_params(const DiscreteMeasure& mu, const InstanceConstants& k);
// Throws ParamsInfeasible when the descent chain or 10 alpha2 < alpha3 < A fails.
void validate_params(const MainParams& p);

// Smallest doubling cube containing every atom.
Cube auto_R0(const DiscreteMeasure& mu);

struct CompanionSet {
    Cube parent;  // Q_{y,m-1} (2R0 for m = 1)
    Cube base;    // Q_{y,m}
    Cube q1, q1hat, q2, q2hat, q3;
    Cube q1check, q1dcheck, q3hathat;
    double eps1_achieved = 0.0;
};

// Members missing at their target become the point-cube {y}.
CompanionSet companions(const DiscreteMeasure& mu, std::size_t y, int m, const Cube& R0, const MainParams& p);
// Q subset Q1 subset ... subset Q3 subset parent; returns the first failing link or empty.
std::string nesting_failure(const CompanionSet& c);

// psi_{y,m} at every support point.
std::vector<double> psi_kernel(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, double cap_const);
// Gradient of psi_{y,m} at support point x.
std::vector<double> psi_gradient(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, std::size_t x,
                                 double cap_const);

struct PsiConditions {
    bool bound = true;      // 0 <= psi <= min(cap, |y-x|^-n)
    bool equality = true;   // psi = |x-y|^-n on q2hat minus q1
    bool support = true;    // supp psi inside q3
    double C12 = 0.0;       // achieved gradient constant
    double l1 = 0.0;        // ||psi||_{L1}
    double annulus = 0.0;   // int over q2 minus q1hat of |y-x|^-n
    std::string where;
};
PsiConditions check_psi(const DiscreteMeasure& mu, const CompanionSet& c, std::size_t y, double cap_const);

struct Check {
    std::string name;
    bool pass = true;
    double achieved = 0.0;
    std::string detail;
};

struct GenerationRecord {
    Generation gen;
    std::vector<CompanionSet> comps;          // per atom
    std::vector<std::vector<double>> Phi;     // per cube i: alpha2^-1 psi_{y_i,m}
    std::vector<std::vector<double>> phi;     // phi[y][x] = phi_{y,m}(x)
    std::vector<double> means;                // m_Q f_m per cube
    std::vector<char> omega;                  // per atom
    std::vector<Cube> S;
    std::vector<char> good, bad;              // per cube
    SampledFunction f_m, g, b, UG, UB;
    std::vector<std::vector<double>> v;       // corrected w_i b per cube (empty when zero)
    std::vector<std::vector<double>> u;       // corrected w_i g per cube
    std::vector<std::vector<std::size_t>> Z;  // Z_{i,m} per cube
    std::vector<SampledFunction> gp, bp;      // per Besicovich family
};

struct MainDecomposition {
    MainParams params;
    Cube R0;
    double norm = 0.0;  // rbmo_norm(f)
    int M = 0;
    std::vector<double> atom_delta;
    std::vector<GenerationRecord> gens;
    SampledFunction h0;
    std::map<std::string, double> ledger;
    std::vector<Check> properties;  // (a)..(h) and the correction identities
    int attempts = 1;
};

MainDecomposition decompose_main(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& R0,
                                 const MainParams& p);

// Checks named cl1, cl1.5, claime, cl4.5, cl2, cl3, cl4, cl5.
std::vector<Check> verify_claims(const DiscreteMeasure& mu, const SampledFunction& f, const MainDecomposition& dec);

// Kernel suite: psi conditions, L1 normalization, two-sided mass bounds, phi (a)-(d), admissibility bridge.
std::vector<Check> verify_kernels(const DiscreteMeasure& mu, const MainDecomposition& dec,
                                  std::map<std::string, double>* ledger = nullptr);

// decompose_main + verify_claims; doubles A on failure (at most `retries` times).
MainDecomposition run_main_lemma(const DiscreteMeasure& mu, const SampledFunction& f, const Cube& R0,
                                 const MainParams& p, int retries, std::vector<Check>* claims);

bool all_pass(const std::vector<Check>& checks);

}  // namespace czkit
