#pragma once

#include "bmps/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bmps {

enum class ModelKind { TFIM, XXZ };

struct ModelSpec {
    ModelKind kind = ModelKind::TFIM;
    std::size_t sites = 0;          // N, 1..14
    double transverse_field = 0.0;  // h_x (TFIM)
    double anisotropy = 1.0;        // Delta (XXZ)

    std::string tag() const; // stable identifier used for cache filenames
};

struct Hamiltonian {
    ModelSpec spec;
    Matrix matrix; // 2^N x 2^N, real symmetric
};

// Full spectrum with 1-based ascending state indexing (state 1 = ground
// state, state 2^N = highest).
struct Spectrum {
    ModelSpec model;
    Vector energies;  // ascending, length 2^N
    Matrix states;    // orthonormal eigenvector columns
};

enum class PauliOp { X, Y, Z, Plus, Minus, Identity };

// Kronecker product of single-site operators with identity on unspecified
// sites; site 1 is the leftmost factor. Sigma^y factors are tracked as
// i*sigma^y internally; an odd total count has no real representation and
// throws.
Matrix pauli_string(const std::vector<std::pair<std::size_t, PauliOp>>& factors,
                    std::size_t sites);

// H = sum_i sigma^z_i sigma^z_{i+1} + h_x sum_i sigma^x_i, open boundaries.
Hamiltonian build_tfim(std::size_t sites, double h_x);

// H = sum_i S_i . S_{i+1} with the S^x S^x + S^y S^y part assembled from
// (S+ S- + S- S+)/2 so all entries stay real. Delta scales S^z S^z.
Hamiltonian build_xxz(std::size_t sites, double delta = 1.0);

Spectrum full_spectrum(const Hamiltonian& h);

inline std::size_t hilbert_dim(std::size_t sites) {
    return std::size_t{1} << sites;
}

} // namespace bmps
