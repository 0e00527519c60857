#pragma once

#include "bmps/density.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bmps {

struct LocalCouplings {
    Vector values; // C_i, one per site

    double c_max() const;
    static LocalCouplings uniform(std::size_t sites, double value = 1.0);
};

struct MetricViolation {
    std::string axiom;
    std::vector<std::size_t> indices; // offending pair or triple
    double magnitude = 0.0;
};

struct MetricReport {
    std::vector<std::size_t> points;
    std::vector<MetricViolation> violations;
    double max_triangle_slack = 0.0; // worst d(x,y) - d(x,z) - d(z,y)
};

struct FrobeniusBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// Ultra-local energy-difference metric:
//   dE = sum_i sum_{k<=m} C_i (eps_k^a - eps_k^b) |<Phi_k^gamma|i>|^2
// with eps the diagonal entries of each density matrix rotated into the
// gamma orbital basis. When ultralocal is false the full pre-limit
// double sum over (k, k') is evaluated instead.
double energy_difference_truncated(const DensityMatrix& rho_a,
                                   const DensityMatrix& rho_b,
                                   const NaturalOrbitalSet& basis,
                                   std::size_t m, const LocalCouplings& c,
                                   bool ultralocal = true);

// lhs = |dE|/c_max, rhs = sum_{k,l<=m} |rho~_a - rho~_b| in the gamma basis.
FrobeniusBound frobenius_bound_check(const DensityMatrix& rho_a,
                                     const DensityMatrix& rho_b,
                                     const NaturalOrbitalSet& basis,
                                     std::size_t m, const LocalCouplings& c);

// Exhaustively checks identity, nonnegativity, symmetry and the triangle
// inequality of `distance` over all pairs/triples of `points`.
MetricReport metric_axiom_suite(
    const std::vector<std::size_t>& points,
    const std::function<double(std::size_t, std::size_t)>& distance,
    double tolerance = 1e-10);

} // namespace bmps
