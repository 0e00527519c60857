#include "bmps/density.hpp"

#include <bit>
#include <cmath>

namespace bmps {

namespace {

std::size_t sites_of(const Vector& state) {
    const auto dim = static_cast<std::size_t>(state.n_elem);
    if (dim < 2 || !std::has_single_bit(dim))
        throw LinalgError("one_body_rdm: state length must be a power of two");
    return static_cast<std::size_t>(std::countr_zero(dim));
}

// sigma_i of basis index b; site 1 is the most significant bit, 0 = up.
inline std::size_t bit_of(std::size_t b, std::size_t site, std::size_t n) {
    return (b >> (n - site)) & 1u;
}

inline std::size_t flip(std::size_t b, std::size_t site, std::size_t n) {
    return b ^ (std::size_t{1} << (n - site));
}

Matrix rdm_operator_form(const Vector& psi, std::size_t n) {
    Matrix rho(n, n, arma::fill::zeros);
    const std::size_t dim = psi.n_elem;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            double acc = 0.0;
            for (std::size_t b = 0; b < dim; ++b) {
                if (bit_of(b, j, n) != 0) continue; // S-_j needs site j up
                if (i == j) {
                    acc += psi(b) * psi(b);
                    continue;
                }
                const std::size_t mid = flip(b, j, n);
                if (bit_of(mid, i, n) != 1) continue; // S+_i needs site i down
                acc += psi(flip(mid, i, n)) * psi(b);
            }
            rho(i - 1, j - 1) = acc;
        }
    }
    return rho;
}

// Sums amplitude products over all spectator site configurations; the
// lattice form of the appendix expression.
Matrix rdm_contraction_form(const Vector& psi, std::size_t n) {
    Matrix rho(n, n, arma::fill::zeros);
    for (std::size_t i = 1; i <= n; ++i) {
        // Diagonal: probability that site i is up.
        double acc = 0.0;
        for (std::size_t s = 0; s < (std::size_t{1} << (n - 1)); ++s) {
            // Insert sigma_i = 0 (up) into spectator config s.
            std::size_t hi = s >> (n - i);
            std::size_t lo = s & ((std::size_t{1} << (n - i)) - 1);
            std::size_t b = (hi << (n - i + 1)) | lo;
            acc += psi(b) * psi(b);
        }
        rho(i - 1, i - 1) = acc;
        for (std::size_t j = 1; j <= n; ++j) {
            if (j == i) continue;
            double off = 0.0;
            for (std::size_t s = 0; s < (std::size_t{1} << (n - 2)); ++s) {
                // Spread spectator bits around positions i and j.
                const std::size_t p1 = std::min(i, j);
                const std::size_t p2 = std::max(i, j);
                std::size_t b = 0;
                std::size_t src = n - 2;
                for (std::size_t site = 1; site <= n; ++site) {
                    if (site == p1 || site == p2) continue;
                    --src;
                    b |= ((s >> src) & 1u) << (n - site);
                }
                const std::size_t bra = b | (std::size_t{1} << (n - j)); // i up, j down
                const std::size_t ket = b | (std::size_t{1} << (n - i)); // i down, j up
                off += psi(bra) * psi(ket);
            }
            rho(i - 1, j - 1) = off;
        }
    }
    return rho;
}

} // namespace

DensityMatrix one_body_rdm(const Vector& state, RdmMethod method,
                           const std::string& label) {
    const std::size_t n = sites_of(state);
    if (std::abs(arma::norm(state) - 1.0) > 1e-10)
        throw LinalgError("one_body_rdm: state is not normalized");
    DensityMatrix out;
    out.matrix = method == RdmMethod::OperatorForm
                     ? rdm_operator_form(state, n)
                     : rdm_contraction_form(state, n);
    out.trace = arma::trace(out.matrix);
    out.basis_label = label;
    return out;
}

NaturalOrbitalSet natural_orbitals(const DensityMatrix& rho) {
    EigDecomposition eig = sym_eig(rho.matrix);
    NaturalOrbitalSet out;
    const arma::uword n = eig.eigenvalues.n_elem;
    out.occupations.set_size(n);
    out.orbitals.set_size(n, n);
    for (arma::uword k = 0; k < n; ++k) { // descending
        out.occupations(k) = eig.eigenvalues(n - 1 - k);
        out.orbitals.col(k) = eig.eigenvectors.col(n - 1 - k);
    }
    out.source_label = rho.basis_label;
    return out;
}

double truncated_trace(const DensityMatrix& rho_target,
                       const NaturalOrbitalSet& basis, std::size_t m) {
    if (m == 0 || m > basis.orbitals.n_cols)
        throw LinalgError("truncated_trace: m out of range");
    if (rho_target.matrix.n_rows != basis.orbitals.n_rows)
        throw LinalgError("truncated_trace: dimension mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const Vector phi = basis.orbitals.col(k);
        acc += arma::dot(phi, rho_target.matrix * phi);
    }
    return acc;
}

TruncationError truncation_error(const DensityMatrix& rho,
                                 const NaturalOrbitalSet& basis,
                                 std::size_t m) {
    TruncationError out;
    out.value = rho.trace - truncated_trace(rho, basis, m);
    out.basis_label = basis.source_label;
    out.m = m;
    return out;
}

double relative_truncation(const TruncationError& delta_a,
                           const TruncationError& delta_b) {
    if (delta_a.basis_label != delta_b.basis_label || delta_a.m != delta_b.m)
        throw LinalgError("relative_truncation: truncation errors were not "
                          "evaluated in the same (gamma, m) basis");
    return std::abs(delta_a.value - delta_b.value);
}

Matrix connecting_unitary(const NaturalOrbitalSet& phi_a, double trace_a,
                          const NaturalOrbitalSet& phi_b, double trace_b) {
    if (phi_a.orbitals.n_rows != phi_b.orbitals.n_rows ||
        phi_a.orbitals.n_cols != phi_b.orbitals.n_cols)
        throw LinalgError("connecting_unitary: dimension mismatch");
    if (std::abs(trace_a - trace_b) > 1e-8)
        throw LinalgError("connecting_unitary: density-matrix traces differ; "
                          "the natural orbitals are only unitarily related "
                          "when the traces match");
    return phi_a.orbitals.t() * phi_b.orbitals;
}

SimilarityVerdict similarity_classifier(const Matrix& u, std::size_t m,
                                        double tol) {
    const arma::uword dim = u.n_rows;
    if (u.n_cols != dim)
        throw LinalgError("similarity_classifier: U must be square");
    if (m >= dim)
        throw LinalgError("similarity_classifier: m must be below dimension");
    const Matrix gram = u.t() * u;
    if (arma::abs(gram - arma::eye(dim, dim)).max() > 1e-8)
        throw LinalgError("similarity_classifier: U is not orthogonal");
    const Matrix upper = u.submat(0, m, m - 1, dim - 1);
    const Matrix lower = u.submat(m, 0, dim - 1, m - 1);
    SimilarityVerdict out;
    out.off_block_mass = arma::accu(upper % upper) + arma::accu(lower % lower);
    out.m = m;
    out.tolerance = tol;
    out.verdict = out.off_block_mass < tol ? Verdict::Similar
                                           : Verdict::Dissimilar;
    return out;
}

std::size_t default_orbital_count(const DensityMatrix& rho,
                                  const NaturalOrbitalSet& own_basis,
                                  double target) {
    const std::size_t dim = own_basis.orbitals.n_cols;
    for (std::size_t m = 1; m <= dim; ++m) {
        if (truncation_error(rho, own_basis, m).value < target) return m;
    }
    return dim;
}

} // namespace bmps
