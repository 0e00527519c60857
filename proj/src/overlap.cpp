#include "bmps/overlap.hpp"

#include <cmath>

namespace bmps {

namespace {

void check_compatible(const BondData& a, const BondData& b, bool left) {
    if (a.bond != b.bond)
        throw LinalgError("overlap: bond indices differ");
    const arma::uword rows_a = left ? a.left_basis.n_rows : a.right_basis.n_rows;
    const arma::uword rows_b = left ? b.left_basis.n_rows : b.right_basis.n_rows;
    if (left && rows_a != rows_b)
        throw LinalgError("overlap: left configuration counts differ");
    if (!left && rows_a != rows_b)
        throw LinalgError("overlap: right configuration counts differ "
                          "(bundle sizes must match for a right overlap)");
}

} // namespace

Matrix left_overlap(const BondData& bond_a, const BondData& bond_b) {
    check_compatible(bond_a, bond_b, true);
    return bond_a.left_basis.t() * bond_b.left_basis;
}

Matrix right_overlap(const BondData& bond_a, const BondData& bond_b) {
    check_compatible(bond_a, bond_b, false);
    return bond_a.right_basis.t() * bond_b.right_basis;
}

OverlapMatrix weighted_overlap(const BundledMPS& bundle_a,
                               const BundledMPS& bundle_b, std::size_t bond) {
    if (bundle_a.sites() != bundle_b.sites())
        throw LinalgError("weighted_overlap: system sizes differ");
    const BondData da = bond_decomposition(bundle_a, bond);
    const BondData db = bond_decomposition(bundle_b, bond);
    const Matrix rho_l = left_overlap(da, db);

    OverlapMatrix out;
    out.bond = bond;
    out.bundle_a = bundle_a.state_indices;
    out.bundle_b = bundle_b.state_indices;
    out.g_a = bundle_a.g;
    out.g_b = bundle_b.g;
    out.entries = arma::diagmat(da.singular_values) * rho_l *
                  arma::diagmat(db.singular_values);
    return out;
}

TruncatabilityReport truncatability_report(const OverlapMatrix& gamma,
                                           double cutoff,
                                           double threshold_log10) {
    if (cutoff <= 0.0)
        throw LinalgError("truncatability_report: cutoff must be positive");
    const Matrix& g = gamma.entries;
    TruncatabilityReport out;
    out.cutoff = cutoff;
    out.threshold_log10 = threshold_log10;

    std::vector<bool> row_kept(g.n_rows, false), col_kept(g.n_cols, false);
    for (arma::uword r = 0; r < g.n_rows; ++r)
        for (arma::uword c = 0; c < g.n_cols; ++c)
            if (std::abs(g(r, c)) >= cutoff) {
                row_kept[r] = true;
                col_kept[c] = true;
            }
    for (bool k : row_kept) out.kept_rows += k ? 1 : 0;
    for (bool k : col_kept) out.kept_cols += k ? 1 : 0;

    out.mask.assign(g.n_rows, std::vector<bool>(g.n_cols, false));
    const double threshold = std::pow(10.0, threshold_log10);
    for (arma::uword r = 0; r < g.n_rows; ++r)
        for (arma::uword c = 0; c < g.n_cols; ++c) {
            out.mask[r][c] = row_kept[r] && col_kept[c];
            if (std::abs(g(r, c)) > threshold) ++out.high_weight_count;
        }
    return out;
}

Matrix log_abs_matrix(const OverlapMatrix& gamma, double floor_log10) {
    Matrix out(gamma.entries.n_rows, gamma.entries.n_cols);
    for (arma::uword r = 0; r < out.n_rows; ++r)
        for (arma::uword c = 0; c < out.n_cols; ++c) {
            const double mag = std::abs(gamma.entries(r, c));
            out(r, c) = mag > 0.0
                            ? std::max(std::log10(mag), floor_log10)
                            : floor_log10;
        }
    return out;
}

} // namespace bmps
