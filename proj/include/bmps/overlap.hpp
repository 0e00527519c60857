#pragma once

#include "bmps/mps.hpp"

#include <vector>

namespace bmps {

// Singular-value-weighted left-basis overlaps between two bundles at a bond:
// Gamma_kl = s_k^(A) <u_k^(A)|u_l^(B)> s_l^(B).
struct OverlapMatrix {
    Matrix entries; // m_A x m_B
    std::size_t bond = 0;
    std::vector<std::size_t> bundle_a;
    std::vector<std::size_t> bundle_b;
    std::size_t g_a = 1;
    std::size_t g_b = 1; // records the 1/sqrt(g) scalings baked into s
};

struct TruncatabilityReport {
    double cutoff = 0.0;
    std::size_t kept_rows = 0;
    std::size_t kept_cols = 0;
    std::vector<std::vector<bool>> mask; // false on discarded rows/cols
    std::size_t high_weight_count = 0;   // entries with log10|G| > threshold
    double threshold_log10 = -8.0;
};

// rho^(L)_kl = <u_k^(A)|u_l^(B)>: contraction of the left Schmidt bases
// over all left physical configurations.
Matrix left_overlap(const BondData& bond_a, const BondData& bond_b);

// Same over the right bases (xi leg folded in); used for self-consistency
// checks only.
Matrix right_overlap(const BondData& bond_a, const BondData& bond_b);

OverlapMatrix weighted_overlap(const BundledMPS& bundle_a,
                               const BundledMPS& bundle_b, std::size_t bond);

// A row (column) is discardable iff every |entry| in it is below `cutoff`.
TruncatabilityReport truncatability_report(const OverlapMatrix& gamma,
                                           double cutoff,
                                           double threshold_log10 = -8.0);

// Entry-wise max(log10|Gamma|, floor); zeros map to the floor.
Matrix log_abs_matrix(const OverlapMatrix& gamma, double floor_log10 = -16.0);

} // namespace bmps
