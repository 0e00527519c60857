#include "bmps/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bmps {

void require_finite(const Matrix& a, const char* what) {
    if (!a.is_finite())
        throw LinalgError(std::string(what) + ": non-finite entries");
}

Vector fix_column_signs(Matrix& vectors) {
    Vector signs(vectors.n_cols, arma::fill::ones);
    for (arma::uword c = 0; c < vectors.n_cols; ++c) {
        arma::uword imax = 0;
        double best = -1.0;
        for (arma::uword r = 0; r < vectors.n_rows; ++r) {
            const double mag = std::abs(vectors(r, c));
            if (mag > best) { best = mag; imax = r; }
        }
        if (vectors(imax, c) < 0.0) {
            vectors.col(c) *= -1.0;
            signs(c) = -1.0;
        }
    }
    return signs;
}

namespace {

// Lexicographic comparison of sign-fixed columns; used only to fix the
// ordering inside a degenerate eigenvalue cluster.
bool column_less(const Matrix& v, arma::uword a, arma::uword b) {
    for (arma::uword r = 0; r < v.n_rows; ++r) {
        const double d = v(r, a) - v(r, b);
        if (std::abs(d) > 1e-12) return d < 0.0;
    }
    return false;
}

} // namespace

EigDecomposition sym_eig(const Matrix& a) {
    if (a.n_rows != a.n_cols)
        throw LinalgError("sym_eig: matrix is not square");
    require_finite(a, "sym_eig");
    const double scale = std::max(1.0, arma::norm(a, "fro"));
    if (arma::abs(a - a.t()).max() > 1e-12 * scale)
        throw LinalgError("sym_eig: matrix is not symmetric");

    EigDecomposition out;
    if (!arma::eig_sym(out.eigenvalues, out.eigenvectors, a, "dc"))
        throw LinalgError("sym_eig: eigendecomposition failed to converge");
    fix_column_signs(out.eigenvectors);

    // Deterministic ordering inside degenerate clusters.
    const double tol = 1e-12 * scale;
    arma::uword i = 0;
    while (i < out.eigenvalues.n_elem) {
        arma::uword j = i + 1;
        while (j < out.eigenvalues.n_elem &&
               out.eigenvalues(j) - out.eigenvalues(i) <= tol)
            ++j;
        if (j - i > 1) {
            std::vector<arma::uword> idx(j - i);
            std::iota(idx.begin(), idx.end(), i);
            std::sort(idx.begin(), idx.end(),
                      [&](arma::uword x, arma::uword y) {
                          return column_less(out.eigenvectors, x, y);
                      });
            Matrix block(out.eigenvectors.n_rows, j - i);
            Vector vals(j - i);
            for (arma::uword k = 0; k < idx.size(); ++k) {
                block.col(k) = out.eigenvectors.col(idx[k]);
                vals(k) = out.eigenvalues(idx[k]);
            }
            out.eigenvectors.cols(i, j - 1) = block;
            out.eigenvalues.subvec(i, j - 1) = vals;
        }
        i = j;
    }
    return out;
}

SvdDecomposition svd(const Matrix& a) {
    require_finite(a, "svd");
    SvdDecomposition out;
    // "std" selects the Golub-Kahan (dgesvd) path.
    if (!arma::svd_econ(out.left_vectors, out.singular_values,
                        out.right_vectors, a, "both", "std"))
        throw LinalgError("svd: decomposition failed to converge");
    const Vector signs = fix_column_signs(out.left_vectors);
    for (arma::uword c = 0; c < out.right_vectors.n_cols; ++c)
        out.right_vectors.col(c) *= signs(c);
    return out;
}

TruncatedSvd truncated_svd(const Matrix& a, double cutoff,
                           std::optional<std::size_t> max_rank) {
    if (cutoff < 0.0)
        throw LinalgError("truncated_svd: negative cutoff");
    TruncatedSvd out;
    out.svd = svd(a);
    const Vector& s = out.svd.singular_values;
    arma::uword keep = s.n_elem;
    if (cutoff > 0.0 && s.n_elem > 0) {
        const double thresh = cutoff * s(0);
        keep = 0;
        while (keep < s.n_elem && s(keep) > thresh) ++keep;
    }
    if (max_rank && *max_rank < keep) keep = static_cast<arma::uword>(*max_rank);
    if (keep == 0)
        throw LinalgError("truncated_svd: all singular values discarded");
    for (arma::uword k = keep; k < s.n_elem; ++k)
        out.discarded_weight += s(k) * s(k);
    if (keep < s.n_elem) {
        out.svd.left_vectors = out.svd.left_vectors.cols(0, keep - 1);
        out.svd.right_vectors = out.svd.right_vectors.cols(0, keep - 1);
        out.svd.singular_values = s.subvec(0, keep - 1);
    }
    return out;
}

} // namespace bmps
