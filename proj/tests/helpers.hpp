#pragma once

#include "bmps/linalg.hpp"

#include <cstdlib>
#include <random>
#include <string>

namespace bmps::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (arma::uword c = 0; c < m.n_cols; ++c)
        for (arma::uword r = 0; r < m.n_rows; ++r) m(r, c) = dist(gen);
    return m;
}

inline Vector random_unit(std::size_t dim, std::uint64_t seed) {
    Matrix m = random_matrix(dim, 1, seed);
    Vector v = m.col(0);
    return v / arma::norm(v);
}

inline Matrix random_psd(std::size_t dim, std::uint64_t seed) {
    const Matrix a = random_matrix(dim, dim, seed);
    return a * a.t();
}

// Shared spectrum cache so the expensive diagonalizations run once per
// build tree. Overridable via BMPS_TEST_CACHE.
inline std::string cache_dir() {
    if (const char* env = std::getenv("BMPS_TEST_CACHE")) return env;
    return "cache";
}

} // namespace bmps::testing
