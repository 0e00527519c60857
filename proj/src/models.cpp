#include "bmps/models.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace bmps {

std::string ModelSpec::tag() const {
    char buf[96];
    if (kind == ModelKind::TFIM)
        std::snprintf(buf, sizeof buf, "tfim_N%zu_hx%.10g", sites, transverse_field);
    else
        std::snprintf(buf, sizeof buf, "xxz_N%zu_D%.10g", sites, anisotropy);
    return buf;
}

namespace {

Matrix site_op(PauliOp op) {
    switch (op) {
        case PauliOp::X:        return Matrix{{0, 1}, {1, 0}};
        case PauliOp::Y:        return Matrix{{0, 1}, {-1, 0}}; // i*sigma^y
        case PauliOp::Z:        return Matrix{{1, 0}, {0, -1}};
        case PauliOp::Plus:     return Matrix{{0, 1}, {0, 0}};
        case PauliOp::Minus:    return Matrix{{0, 0}, {1, 0}};
        case PauliOp::Identity: return arma::eye(2, 2);
    }
    throw LinalgError("pauli_string: unknown operator");
}

void check_sites(std::size_t sites) {
    if (sites < 2 || sites > 14)
        throw LinalgError("model builder: sites must be in 2..14");
}

} // namespace

Matrix pauli_string(const std::vector<std::pair<std::size_t, PauliOp>>& factors,
                    std::size_t sites) {
    if (sites < 1 || sites > 14)
        throw LinalgError("pauli_string: sites must be in 1..14");
    std::set<std::size_t> seen;
    std::size_t y_count = 0;
    std::vector<Matrix> per_site(sites, arma::eye(2, 2));
    for (const auto& [site, op] : factors) {
        if (site < 1 || site > sites)
            throw LinalgError("pauli_string: site index out of range");
        if (!seen.insert(site).second)
            throw LinalgError("pauli_string: duplicate site index");
        if (op == PauliOp::Y) ++y_count;
        per_site[site - 1] = site_op(op);
    }
    if (y_count % 2 != 0)
        throw LinalgError("pauli_string: odd number of sigma^y factors has no "
                          "real-valued representation");
    Matrix result(1, 1, arma::fill::ones);
    for (std::size_t i = 0; i < sites; ++i)
        result = arma::kron(result, per_site[i]); // site 1 = leftmost factor
    // (i sigma^y)^2 = -I per pair, so (-i)^y_count = (-1)^(y_count/2).
    if ((y_count / 2) % 2 == 1) result *= -1.0;
    return result;
}

Hamiltonian build_tfim(std::size_t sites, double h_x) {
    check_sites(sites);
    const std::size_t dim = hilbert_dim(sites);
    Hamiltonian h;
    h.spec = {ModelKind::TFIM, sites, h_x, 0.0};
    h.matrix = arma::zeros(dim, dim);
    for (std::size_t i = 1; i < sites; ++i)
        h.matrix += pauli_string({{i, PauliOp::Z}, {i + 1, PauliOp::Z}}, sites);
    for (std::size_t i = 1; i <= sites; ++i)
        h.matrix += h_x * pauli_string({{i, PauliOp::X}}, sites);
    return h;
}

Hamiltonian build_xxz(std::size_t sites, double delta) {
    check_sites(sites);
    const std::size_t dim = hilbert_dim(sites);
    Hamiltonian h;
    h.spec = {ModelKind::XXZ, sites, 0.0, delta};
    h.matrix = arma::zeros(dim, dim);
    for (std::size_t i = 1; i < sites; ++i) {
        // S+- here are the full sigma+-; S^x S^x + S^y S^y = (S+S- + S-S+)/2
        // with S+- = sigma+-/1 picks up a 1/2 per spin-1/2 operator.
        h.matrix += 0.5 * pauli_string({{i, PauliOp::Plus}, {i + 1, PauliOp::Minus}}, sites);
        h.matrix += 0.5 * pauli_string({{i, PauliOp::Minus}, {i + 1, PauliOp::Plus}}, sites);
        h.matrix += 0.25 * delta *
                    pauli_string({{i, PauliOp::Z}, {i + 1, PauliOp::Z}}, sites);
    }
    return h;
}

Spectrum full_spectrum(const Hamiltonian& h) {
    EigDecomposition eig = sym_eig(h.matrix);
    Spectrum s;
    s.model = h.spec;
    s.energies = std::move(eig.eigenvalues);
    s.states = std::move(eig.eigenvectors);
    return s;
}

} // namespace bmps
