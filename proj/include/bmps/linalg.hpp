#pragma once

#include <armadillo>
#include <cstddef>
#include <optional>
#include <stdexcept>

namespace bmps {

// Dense real matrix carrier used throughout. Armadillo is column-major;
// all public operations validate finiteness on entry.
using Matrix = arma::mat;
using Vector = arma::vec;

struct EigDecomposition {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // orthonormal columns, sign-fixed
};

struct SvdDecomposition {
    Matrix left_vectors;    // U, orthonormal columns, sign-fixed
    Vector singular_values; // descending, nonnegative
    Matrix right_vectors;   // V, signs slaved to U
};

struct TruncatedSvd {
    SvdDecomposition svd;
    double discarded_weight = 0.0; // sum of discarded s_k^2
};

class LinalgError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Flips each column of `vectors` so its largest-magnitude entry is positive.
// Ties broken by the lowest row index. Returns the applied signs.
Vector fix_column_signs(Matrix& vectors);

// Full symmetric eigendecomposition, eigenvalues ascending. Within a
// degenerate cluster the sign-fixed vectors are ordered lexicographically.
// Throws LinalgError on non-square, asymmetric or non-finite input.
EigDecomposition sym_eig(const Matrix& a);

// Thin SVD with descending singular values; uses Golub-Kahan
// bidiagonalization (never the Gram matrix) so small singular values
// stay accurate over the full dynamic range.
SvdDecomposition svd(const Matrix& a);

// Keeps singular values s_k with s_k > cutoff * s_1 (cutoff == 0 keeps
// everything, zeros included), capped at max_rank. Throws LinalgError when
// nothing survives.
TruncatedSvd truncated_svd(const Matrix& a, double cutoff,
                           std::optional<std::size_t> max_rank = std::nullopt);

void require_finite(const Matrix& a, const char* what);

} // namespace bmps
