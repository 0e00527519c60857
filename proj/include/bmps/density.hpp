#pragma once

#include "bmps/linalg.hpp"

#include <string>

namespace bmps {

struct DensityMatrix {
    Matrix matrix;          // real symmetric PSD
    double trace = 0.0;
    std::string basis_label;
};

// Eigenbasis of a density matrix: occupations descending, orbitals
// sign-fixed orthonormal columns.
struct NaturalOrbitalSet {
    Vector occupations;
    Matrix orbitals;
    std::string source_label; // identifies the state gamma that produced it
};

enum class RdmMethod { OperatorForm, ContractionForm };

enum class Verdict { Similar, Dissimilar };

struct SimilarityVerdict {
    Verdict verdict = Verdict::Dissimilar;
    double off_block_mass = 0.0;
    std::size_t m = 0;
    double tolerance = 0.0;
};

// A truncation error delta tied to the (gamma, m) basis it was evaluated in,
// so relative_truncation can enforce that both operands share a basis.
struct TruncationError {
    double value = 0.0;
    std::string basis_label;
    std::size_t m = 0;
};

// One-body reduced density matrix rho_ij = <psi| S+_i S-_j |psi> of a
// 2^N spin-1/2 state (site 1 = most significant bit, bit 0 = up).
// OperatorForm walks the 2^N basis applying the operators; ContractionForm
// sums amplitude products over the spectator site configurations. The two
// routes are independent and must agree.
DensityMatrix one_body_rdm(const Vector& state, RdmMethod method,
                           const std::string& label = "site basis");

NaturalOrbitalSet natural_orbitals(const DensityMatrix& rho);

// Tr_m^(gamma)(rho) = sum_{k<=m} <Phi_k|rho|Phi_k>.
double truncated_trace(const DensityMatrix& rho_target,
                       const NaturalOrbitalSet& basis, std::size_t m);

TruncationError truncation_error(const DensityMatrix& rho,
                                 const NaturalOrbitalSet& basis, std::size_t m);

// r = |delta_alpha - delta_beta|; both operands must carry the same
// (gamma, m) handle.
double relative_truncation(const TruncationError& delta_a,
                           const TruncationError& delta_b);

// U = Phi_alpha^T Phi_beta; requires equal source traces (the Lemma's
// condition for the natural orbitals to be unitarily related).
Matrix connecting_unitary(const NaturalOrbitalSet& phi_a, double trace_a,
                          const NaturalOrbitalSet& phi_b, double trace_b);

SimilarityVerdict similarity_classifier(const Matrix& u, std::size_t m,
                                        double tol = 0.1);

// Smallest m with own-basis truncation error below `target`; the default
// working truncation rank for experiments.
std::size_t default_orbital_count(const DensityMatrix& rho,
                                  const NaturalOrbitalSet& own_basis,
                                  double target = 1e-3);

} // namespace bmps
