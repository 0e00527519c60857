#include "bmps/mps.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace bmps;
using bmps::testing::random_unit;

namespace {

Vector basis_state(std::size_t sites, std::size_t index) {
    Vector v(std::size_t{1} << sites, arma::fill::zeros);
    v(index) = 1.0;
    return v;
}

} // namespace

TEST_CASE("mps_from_vector: product state has trivial bonds") {
    const BundledMPS mps = mps_from_vector(basis_state(3, 0), 1e-12);
    for (std::size_t bond = 1; bond < 3; ++bond)
        CHECK(mps.bond_dim(bond) == 1);
    const Matrix back = reconstruct(mps);
    CHECK(std::abs(back(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("mps_from_vector: maximally entangled pair") {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Vector bell = {inv_sqrt2, 0.0, 0.0, inv_sqrt2};
    const BundledMPS mps = mps_from_vector(bell, 0.0);
    CHECK(mps.bond_dim(1) == 2);
    const BondData bd = bond_decomposition(mps, 1);
    REQUIRE(bd.singular_values.n_elem == 2);
    CHECK(bd.singular_values(0) == doctest::Approx(inv_sqrt2));
    CHECK(bd.singular_values(1) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("mps_from_vector: random 10-site state at zero cutoff") {
    const Vector psi = random_unit(1024, 77);
    const BundledMPS mps = mps_from_vector(psi, 0.0);
    CHECK(mps.bond_dim(5) == 32); // min(2^5, 2^5)
    const auto bound = max_bond_dimension(10, 2, 1, mps.center);
    for (std::size_t bond = 1; bond < 10; ++bond)
        CHECK(mps.bond_dim(bond) == bound[bond - 1]);
    const Matrix back = reconstruct(mps);
    CHECK(arma::abs(back.col(0) - psi).max() <= 1e-10);
}

TEST_CASE("bundled_mps_from_vectors: g = 1 matches the single-state path "
          "bit for bit") {
    const Vector psi = random_unit(64, 78);
    const BundledMPS single = mps_from_vector(psi, 0.0);
    const BundledMPS bundle =
        bundled_mps_from_vectors(Matrix(psi), 0.0, single.center);
    REQUIRE(bundle.sites() == single.sites());
    CHECK(bundle.center == single.center);
    for (std::size_t i = 0; i < 6; ++i) {
        REQUIRE(bundle.tensors[i].entries.size() ==
                single.tensors[i].entries.size());
        CHECK(bundle.tensors[i].entries == single.tensors[i].entries);
    }
}

TEST_CASE("bundled_mps_from_vectors: two orthogonal product states") {
    Matrix pair(4, 2, arma::fill::zeros);
    pair(0, 0) = 1.0; // |uu>
    pair(3, 1) = 1.0; // |dd>
    const BundledMPS mps = bundled_mps_from_vectors(pair, 0.0);
    CHECK(mps.g == 2);
    CHECK(mps.bond_dim(1) == 2);
    const BondData bd = bond_decomposition(mps, 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    REQUIRE(bd.singular_values.n_elem == 2);
    CHECK(bd.singular_values(0) == doctest::Approx(inv_sqrt2));
    CHECK(bd.singular_values(1) == doctest::Approx(inv_sqrt2));
    const Matrix back = reconstruct(mps);
    CHECK(arma::abs(back - pair).max() <= 1e-12);
}

TEST_CASE("max_bond_dimension: counting formula") {
    SUBCASE("plain 12-site chain") {
        const auto b = max_bond_dimension(12, 2, 1, 6);
        CHECK(b[5] == 64); // middle bond, min(2^6, 2^6)
    }
    SUBCASE("bundle leg inflates the center column") {
        const auto b = max_bond_dimension(4, 2, 3, 4);
        REQUIRE(b.size() == 3);
        CHECK(b[0] == 2);
        CHECK(b[1] == 4);
        CHECK(b[2] == 6); // min(8, 2*3)
    }
    SUBCASE("two sites, g = 2") {
        const auto b = max_bond_dimension(2, 2, 2, 2);
        REQUIRE(b.size() == 1);
        CHECK(b[0] == 2); // min(2, 4)
    }
}

TEST_CASE("gauge_center: moving to the current center is the identity") {
    const Vector psi = random_unit(256, 79);
    BundledMPS mps = mps_from_vector(psi, 0.0);
    const BundledMPS before = mps;
    gauge_center(mps, mps.center);
    for (std::size_t i = 0; i < mps.sites(); ++i)
        CHECK(mps.tensors[i].entries == before.tensors[i].entries);
}

TEST_CASE("gauge_center: round trip on an entangled pair") {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Vector bell = {inv_sqrt2, 0.0, 0.0, inv_sqrt2};
    BundledMPS mps = mps_from_vector(bell, 0.0);
    gauge_center(mps, 1);
    gauge_center(mps, 2);
    const Matrix back = reconstruct(mps);
    CHECK(arma::abs(back.col(0) - bell).max() <= 1e-12);
}

TEST_CASE("gauge_center: full sweep preserves a random bundle") {
    Matrix amps(256, 3);
    for (int k = 0; k < 3; ++k) amps.col(k) = random_unit(256, 80 + k);
    BundledMPS mps = bundled_mps_from_vectors(amps, 0.0);
    for (std::size_t target = 1; target <= 8; ++target) {
        gauge_center(mps, target);
        CHECK(normalization_residual(mps) <= 1e-10);
    }
    gauge_center(mps, 4);
    const Matrix back = reconstruct(mps);
    CHECK(arma::abs(back - amps).max() <= 1e-9);
}

TEST_CASE("bond_decomposition: singular values square-sum to one") {
    Matrix amps(64, 4);
    for (int k = 0; k < 4; ++k) amps.col(k) = random_unit(64, 90 + k);
    const BundledMPS mps = bundled_mps_from_vectors(amps, 0.0);
    for (std::size_t bond = 1; bond < 6; ++bond) {
        const BondData bd = bond_decomposition(mps, bond);
        CHECK(arma::accu(arma::square(bd.singular_values)) ==
              doctest::Approx(1.0).epsilon(1e-10));
        CHECK(bd.left_basis.n_rows == (std::size_t{1} << bond));
        CHECK(bd.right_basis.n_rows == (std::size_t{1} << (6 - bond)) * 4);
    }
}

TEST_CASE("serialization: round trip and corruption detection") {
    namespace fs = std::filesystem;
    Matrix amps(32, 2);
    amps.col(0) = random_unit(32, 95);
    amps.col(1) = random_unit(32, 96);
    BundledMPS mps = bundled_mps_from_vectors(amps, 0.0);
    mps.state_indices = {1, 2};

    const fs::path dir = fs::temp_directory_path() / "bmps_test_io";
    fs::create_directories(dir);
    const std::string path = (dir / "bundle.bmps1").string();
    save_bundled_mps(mps, path);
    const BundledMPS loaded = load_bundled_mps(path);
    CHECK(loaded.center == mps.center);
    CHECK(loaded.g == mps.g);
    CHECK(loaded.state_indices == mps.state_indices);
    REQUIRE(loaded.sites() == mps.sites());
    for (std::size_t i = 0; i < mps.sites(); ++i)
        CHECK(loaded.tensors[i].entries == mps.tensors[i].entries);

    // Flip one payload byte near the end of the file (inside the tensor
    // doubles, before the trailing checksum); the checksum must catch it.
    const auto size = static_cast<std::streamoff>(fs::file_size(path));
    const std::streamoff target = size - 20;
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    char byte = 0;
    f.seekg(target);
    f.get(byte);
    byte = static_cast<char>(byte ^ 0x40);
    f.seekp(target);
    f.put(byte);
    f.close();
    CHECK_THROWS_AS(load_bundled_mps(path), LinalgError);
    fs::remove_all(dir);
}
