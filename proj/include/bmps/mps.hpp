#pragma once

#include "bmps/linalg.hpp"

#include <string>
#include <vector>

namespace bmps {

// Rank-4 site tensor with flat layout [left][phys][right][bundle],
// bundle index fastest. bundle_dim == 1 everywhere except the center.
struct SiteTensor {
    std::size_t left_dim = 1;
    std::size_t phys_dim = 2;
    std::size_t right_dim = 1;
    std::size_t bundle_dim = 1;
    std::vector<double> entries;

    double& at(std::size_t l, std::size_t s, std::size_t r, std::size_t x) {
        return entries[((l * phys_dim + s) * right_dim + r) * bundle_dim + x];
    }
    double at(std::size_t l, std::size_t s, std::size_t r, std::size_t x) const {
        return entries[((l * phys_dim + s) * right_dim + r) * bundle_dim + x];
    }
    std::size_t size() const {
        return left_dim * phys_dim * right_dim * bundle_dim;
    }
};

// MPS whose orthogonality center carries the excitation index xi of
// dimension g; g == 1 degenerates to a plain MPS. Sites and the center are
// 1-based. The stored coefficient matrix is scaled by 1/sqrt(g) so bond
// singular values always square-sum to 1; reconstruct() rescales back.
struct BundledMPS {
    std::vector<SiteTensor> tensors;
    std::size_t center = 0; // 1-based site holding the xi leg
    std::size_t g = 1;
    std::vector<std::size_t> state_indices; // metadata, may be empty
    double accumulated_discarded_weight = 0.0;

    std::size_t sites() const { return tensors.size(); }
    std::size_t bond_dim(std::size_t bond) const; // bond i joins sites i, i+1
};

// Singular triple at a bond: left basis over the 2^i left configurations,
// right basis over the right configurations with the xi leg folded in.
struct BondData {
    std::size_t bond = 0;
    Matrix left_basis;      // 2^bond x rank
    Vector singular_values; // descending, zeros (s < 1e-14 s1) dropped
    Matrix right_basis;     // (2^(N-bond) * g) x rank
};

// Sequential left-to-right reshape+SVD; center ends on the last site.
BundledMPS mps_from_vector(const Vector& amplitudes, double cutoff);

// Columns of `amplitudes` are the bundled states. The xi index travels
// with the right index group through every SVD until the center site
// (default: ceil(N/2)) is reached, then stays on the center tensor.
BundledMPS bundled_mps_from_vectors(const Matrix& amplitudes, double cutoff,
                                    std::size_t center = 0);

// Exact per-bond bond-dimension bound: min over the two half products with
// d -> g*d at the center site.
std::vector<std::size_t> max_bond_dimension(std::size_t sites, std::size_t d,
                                            std::size_t g, std::size_t center);

// Moves the orthogonality center (and its xi leg) to `target` via exact
// SVDs, restoring the normalization invariants on every site passed.
void gauge_center(BundledMPS& mps, std::size_t target);

// Contracts the chain back into a 2^N x g coefficient matrix.
Matrix reconstruct(const BundledMPS& mps);

// Gauges a copy to the bond and exposes (U, D, V) there.
BondData bond_decomposition(const BundledMPS& mps, std::size_t bond);

// Max deviation of the left-normalization identity left of the center and
// the right-normalization identity right of it.
double normalization_residual(const BundledMPS& mps);

// Flat little-endian container, magic "BMPS1".
void save_bundled_mps(const BundledMPS& mps, const std::string& path);
BundledMPS load_bundled_mps(const std::string& path);

} // namespace bmps
