#include "bmps/mps.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace bmps {

std::size_t BundledMPS::bond_dim(std::size_t bond) const {
    if (bond < 1 || bond >= tensors.size())
        throw LinalgError("bond_dim: bond out of range");
    return tensors[bond - 1].right_dim;
}

namespace {

constexpr std::size_t kPhysDim = 2;
constexpr char kMagic[6] = "BMPS1";

std::size_t sites_of(std::size_t dim) {
    if (dim < 2 || !std::has_single_bit(dim))
        throw LinalgError("mps: amplitude length must be a power of two");
    return static_cast<std::size_t>(std::countr_zero(dim));
}

// Exact-gauge SVD keeping every singular value, zeros included, so bond
// dimensions follow the economy-rank counting exactly.
SvdDecomposition gauge_svd(const Matrix& x) {
    return svd(x);
}

void check_center(const BundledMPS& mps) {
    if (mps.center < 1 || mps.center > mps.sites())
        throw LinalgError("mps: invalid center");
}

// Moves the center one site to the left, right-normalizing the vacated site.
void move_center_left(BundledMPS& mps) {
    const std::size_t j = mps.center; // 1-based, j >= 2
    SiteTensor& t = mps.tensors[j - 1];
    const std::size_t al = t.left_dim, d = t.phys_dim, ar = t.right_dim,
                      g = t.bundle_dim;

    Matrix x(al * g, d * ar);
    for (std::size_t l = 0; l < al; ++l)
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t r = 0; r < ar; ++r)
                for (std::size_t xi = 0; xi < g; ++xi)
                    x(l * g + xi, s * ar + r) = t.at(l, s, r, xi);

    const SvdDecomposition dec = gauge_svd(x);
    const std::size_t k = dec.singular_values.n_elem;

    SiteTensor b;
    b.left_dim = k; b.phys_dim = d; b.right_dim = ar; b.bundle_dim = 1;
    b.entries.assign(b.size(), 0.0);
    for (std::size_t kk = 0; kk < k; ++kk)
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t r = 0; r < ar; ++r)
                b.at(kk, s, r, 0) = dec.right_vectors(s * ar + r, kk);
    mps.tensors[j - 1] = std::move(b);

    Matrix w = dec.left_vectors * arma::diagmat(dec.singular_values);

    SiteTensor& a = mps.tensors[j - 2];
    SiteTensor next;
    next.left_dim = a.left_dim; next.phys_dim = a.phys_dim;
    next.right_dim = k; next.bundle_dim = g;
    next.entries.assign(next.size(), 0.0);
    for (std::size_t l = 0; l < a.left_dim; ++l)
        for (std::size_t s = 0; s < a.phys_dim; ++s)
            for (std::size_t kk = 0; kk < k; ++kk)
                for (std::size_t xi = 0; xi < g; ++xi) {
                    double acc = 0.0;
                    for (std::size_t m = 0; m < a.right_dim; ++m)
                        acc += a.at(l, s, m, 0) * w(m * g + xi, kk);
                    next.at(l, s, kk, xi) = acc;
                }
    mps.tensors[j - 2] = std::move(next);
    mps.center = j - 1;
}

// Moves the center one site to the right, left-normalizing the vacated site.
void move_center_right(BundledMPS& mps) {
    const std::size_t j = mps.center; // 1-based, j <= N-1
    SiteTensor& t = mps.tensors[j - 1];
    const std::size_t al = t.left_dim, d = t.phys_dim, ar = t.right_dim,
                      g = t.bundle_dim;

    Matrix x(al * d, ar * g);
    for (std::size_t l = 0; l < al; ++l)
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t r = 0; r < ar; ++r)
                for (std::size_t xi = 0; xi < g; ++xi)
                    x(l * d + s, r * g + xi) = t.at(l, s, r, xi);

    const SvdDecomposition dec = gauge_svd(x);
    const std::size_t k = dec.singular_values.n_elem;

    SiteTensor a;
    a.left_dim = al; a.phys_dim = d; a.right_dim = k; a.bundle_dim = 1;
    a.entries.assign(a.size(), 0.0);
    for (std::size_t l = 0; l < al; ++l)
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t kk = 0; kk < k; ++kk)
                a.at(l, s, kk, 0) = dec.left_vectors(l * d + s, kk);
    mps.tensors[j - 1] = std::move(a);

    Matrix w = arma::diagmat(dec.singular_values) * dec.right_vectors.t();

    SiteTensor& bnext = mps.tensors[j];
    SiteTensor next;
    next.left_dim = k; next.phys_dim = bnext.phys_dim;
    next.right_dim = bnext.right_dim; next.bundle_dim = g;
    next.entries.assign(next.size(), 0.0);
    for (std::size_t kk = 0; kk < k; ++kk)
        for (std::size_t s = 0; s < next.phys_dim; ++s)
            for (std::size_t r = 0; r < next.right_dim; ++r)
                for (std::size_t xi = 0; xi < g; ++xi) {
                    double acc = 0.0;
                    for (std::size_t m = 0; m < bnext.left_dim; ++m)
                        acc += w(kk, m * g + xi) * bnext.at(m, s, r, 0);
                    next.at(kk, s, r, xi) = acc;
                }
    mps.tensors[j] = std::move(next);
    mps.center = j + 1;
}

// Contracts the sites [1, upto] into a (2^upto x right_dim) matrix; only
// valid while those sites carry no xi leg.
Matrix contract_left_block(const BundledMPS& mps, std::size_t upto) {
    Matrix l(1, 1, arma::fill::ones);
    for (std::size_t i = 0; i < upto; ++i) {
        const SiteTensor& t = mps.tensors[i];
        if (t.bundle_dim != 1)
            throw LinalgError("contract_left_block: crossed the center");
        Matrix next(l.n_rows * t.phys_dim, t.right_dim, arma::fill::zeros);
        for (arma::uword cfg = 0; cfg < l.n_rows; ++cfg)
            for (std::size_t s = 0; s < t.phys_dim; ++s)
                for (std::size_t r = 0; r < t.right_dim; ++r) {
                    double acc = 0.0;
                    for (std::size_t a = 0; a < t.left_dim; ++a)
                        acc += l(cfg, a) * t.at(a, s, r, 0);
                    next(cfg * t.phys_dim + s, r) = acc;
                }
        l = std::move(next);
    }
    return l;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes,
                    std::uint64_t seed = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

BundledMPS bundled_mps_from_vectors(const Matrix& amplitudes, double cutoff,
                                    std::size_t center) {
    if (amplitudes.n_cols == 0)
        throw LinalgError("bundled_mps_from_vectors: empty bundle");
    require_finite(amplitudes, "bundled_mps_from_vectors");
    const std::size_t n = sites_of(amplitudes.n_rows);
    const std::size_t g = amplitudes.n_cols;
    for (std::size_t c = 0; c < g; ++c)
        if (std::abs(arma::norm(amplitudes.col(c)) - 1.0) > 1e-10)
            throw LinalgError("bundled_mps_from_vectors: column " +
                              std::to_string(c + 1) + " is not normalized");
    if (center == 0) center = (n + 1) / 2;
    if (center < 1 || center > n)
        throw LinalgError("bundled_mps_from_vectors: center out of range");

    BundledMPS mps;
    mps.g = g;
    mps.center = n;
    mps.tensors.resize(n);

    const double scale = 1.0 / std::sqrt(static_cast<double>(g));

    // Row group (a_{i-1}, sigma_i), column group (sigma_{i+1..N}, xi) with
    // xi fastest; sweep left to right.
    std::size_t rest = std::size_t{1} << (n - 1);
    Matrix m(kPhysDim, rest * g);
    for (arma::uword b = 0; b < amplitudes.n_rows; ++b) {
        const std::size_t s1 = b >> (n - 1);
        const std::size_t rem = b & (rest - 1);
        for (std::size_t xi = 0; xi < g; ++xi)
            m(s1, rem * g + xi) = amplitudes(b, xi) * scale;
    }

    std::size_t a_prev = 1;
    for (std::size_t i = 1; i < n; ++i) {
        TruncatedSvd dec = truncated_svd(m, cutoff);
        mps.accumulated_discarded_weight += dec.discarded_weight;
        const std::size_t rank = dec.svd.singular_values.n_elem;

        SiteTensor a;
        a.left_dim = a_prev; a.phys_dim = kPhysDim;
        a.right_dim = rank; a.bundle_dim = 1;
        a.entries.assign(a.size(), 0.0);
        for (std::size_t l = 0; l < a_prev; ++l)
            for (std::size_t s = 0; s < kPhysDim; ++s)
                for (std::size_t r = 0; r < rank; ++r)
                    a.at(l, s, r, 0) = dec.svd.left_vectors(l * kPhysDim + s, r);
        mps.tensors[i - 1] = std::move(a);

        const Matrix w = arma::diagmat(dec.svd.singular_values) *
                         dec.svd.right_vectors.t();
        const std::size_t next_rest = rest / kPhysDim;
        Matrix next(rank * kPhysDim, next_rest * g);
        for (std::size_t r = 0; r < rank; ++r)
            for (std::size_t s = 0; s < kPhysDim; ++s)
                for (std::size_t q = 0; q < next_rest; ++q)
                    for (std::size_t xi = 0; xi < g; ++xi)
                        next(r * kPhysDim + s, q * g + xi) =
                            w(r, (s * next_rest + q) * g + xi);
        m = std::move(next);
        rest = next_rest;
        a_prev = rank;
    }

    SiteTensor last;
    last.left_dim = a_prev; last.phys_dim = kPhysDim;
    last.right_dim = 1; last.bundle_dim = g;
    last.entries.assign(last.size(), 0.0);
    for (std::size_t l = 0; l < a_prev; ++l)
        for (std::size_t s = 0; s < kPhysDim; ++s)
            for (std::size_t xi = 0; xi < g; ++xi)
                last.at(l, s, 0, xi) = m(l * kPhysDim + s, xi);
    mps.tensors[n - 1] = std::move(last);

    if (center != n) gauge_center(mps, center);
    return mps;
}

BundledMPS mps_from_vector(const Vector& amplitudes, double cutoff) {
    Matrix c(amplitudes.n_elem, 1);
    c.col(0) = amplitudes;
    return bundled_mps_from_vectors(c, cutoff, sites_of(amplitudes.n_elem));
}

std::vector<std::size_t> max_bond_dimension(std::size_t sites, std::size_t d,
                                            std::size_t g,
                                            std::size_t center) {
    if (center < 1 || center > sites)
        throw LinalgError("max_bond_dimension: center out of range");
    std::vector<std::size_t> bonds(sites - 1);
    for (std::size_t i = 1; i < sites; ++i) {
        std::size_t left = 1, right = 1;
        for (std::size_t x = 1; x <= i; ++x)
            left *= (x == center) ? g * d : d;
        for (std::size_t x = i + 1; x <= sites; ++x)
            right *= (x == center) ? g * d : d;
        bonds[i - 1] = std::min(left, right);
    }
    return bonds;
}

void gauge_center(BundledMPS& mps, std::size_t target) {
    check_center(mps);
    if (target < 1 || target > mps.sites())
        throw LinalgError("gauge_center: target out of range");
    while (mps.center > target) move_center_left(mps);
    while (mps.center < target) move_center_right(mps);
}

Matrix reconstruct(const BundledMPS& mps) {
    check_center(mps);
    Matrix l(1, 1, arma::fill::ones);
    std::size_t gin = 1;
    for (const SiteTensor& t : mps.tensors) {
        const std::size_t gt = t.bundle_dim;
        const std::size_t gout = gin * gt;
        Matrix next(l.n_rows * t.phys_dim, t.right_dim * gout,
                    arma::fill::zeros);
        for (arma::uword cfg = 0; cfg < l.n_rows; ++cfg)
            for (std::size_t s = 0; s < t.phys_dim; ++s)
                for (std::size_t r = 0; r < t.right_dim; ++r)
                    for (std::size_t xin = 0; xin < gin; ++xin)
                        for (std::size_t xt = 0; xt < gt; ++xt) {
                            double acc = 0.0;
                            for (std::size_t a = 0; a < t.left_dim; ++a)
                                acc += l(cfg, a * gin + xin) * t.at(a, s, r, xt);
                            next(cfg * t.phys_dim + s,
                                 (r * gin + xin) * gt + xt) = acc;
                        }
        l = std::move(next);
        gin = gout;
    }
    l *= std::sqrt(static_cast<double>(mps.g));
    return l; // 2^N x g
}

BondData bond_decomposition(const BundledMPS& mps, std::size_t bond) {
    if (bond < 1 || bond >= mps.sites())
        throw LinalgError("bond_decomposition: bond out of range");
    BundledMPS work = mps;
    gauge_center(work, bond + 1);

    const Matrix lblock = contract_left_block(work, bond);
    const SiteTensor& t = work.tensors[bond];
    const std::size_t al = t.left_dim, d = t.phys_dim, ar = t.right_dim,
                      g = t.bundle_dim;

    Matrix x(al, d * ar * g);
    for (std::size_t a = 0; a < al; ++a)
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t r = 0; r < ar; ++r)
                for (std::size_t xi = 0; xi < g; ++xi)
                    x(a, (s * ar + r) * g + xi) = t.at(a, s, r, xi);

    const SvdDecomposition dec = svd(x);
    const Vector& s = dec.singular_values;
    std::size_t keep = 0;
    const double floor = s.n_elem > 0 ? 1e-14 * s(0) : 0.0;
    while (keep < s.n_elem && s(keep) > floor) ++keep;
    if (keep == 0)
        throw LinalgError("bond_decomposition: no nonzero singular values");

    BondData out;
    out.bond = bond;
    out.singular_values = s.subvec(0, keep - 1);
    out.left_basis = lblock * dec.left_vectors.cols(0, keep - 1);

    // Expand the right singular vectors through the right-normalized
    // tensors; layout ((config)*a + a_idx)*g + xi, config slow.
    Matrix r(d * ar * g, keep);
    for (std::size_t k = 0; k < keep; ++k)
        r.col(k) = dec.right_vectors.col(k);
    std::size_t cfg_dim = d, a_dim = ar;
    for (std::size_t site = bond + 2; site <= work.sites(); ++site) {
        const SiteTensor& b = work.tensors[site - 1];
        Matrix next(cfg_dim * b.phys_dim * b.right_dim * g, keep,
                    arma::fill::zeros);
        for (std::size_t k = 0; k < keep; ++k)
            for (std::size_t cfg = 0; cfg < cfg_dim; ++cfg)
                for (std::size_t sg = 0; sg < b.phys_dim; ++sg)
                    for (std::size_t rr = 0; rr < b.right_dim; ++rr)
                        for (std::size_t xi = 0; xi < g; ++xi) {
                            double acc = 0.0;
                            for (std::size_t a = 0; a < b.left_dim; ++a)
                                acc += r((cfg * a_dim + a) * g + xi, k) *
                                       b.at(a, sg, rr, 0);
                            next(((cfg * b.phys_dim + sg) * b.right_dim + rr) *
                                     g + xi, k) = acc;
                        }
        r = std::move(next);
        cfg_dim *= b.phys_dim;
        a_dim = b.right_dim;
    }
    out.right_basis = std::move(r); // a_dim == 1 at the end
    return out;
}

double normalization_residual(const BundledMPS& mps) {
    check_center(mps);
    double worst = 0.0;
    for (std::size_t i = 1; i <= mps.sites(); ++i) {
        if (i == mps.center) continue;
        const SiteTensor& t = mps.tensors[i - 1];
        if (i < mps.center) {
            Matrix gram(t.right_dim, t.right_dim, arma::fill::zeros);
            for (std::size_t r = 0; r < t.right_dim; ++r)
                for (std::size_t q = 0; q < t.right_dim; ++q)
                    for (std::size_t l = 0; l < t.left_dim; ++l)
                        for (std::size_t s = 0; s < t.phys_dim; ++s)
                            gram(r, q) += t.at(l, s, r, 0) * t.at(l, s, q, 0);
            worst = std::max(
                worst,
                arma::abs(gram - arma::eye(t.right_dim, t.right_dim)).max());
        } else {
            Matrix gram(t.left_dim, t.left_dim, arma::fill::zeros);
            for (std::size_t l = 0; l < t.left_dim; ++l)
                for (std::size_t k = 0; k < t.left_dim; ++k)
                    for (std::size_t s = 0; s < t.phys_dim; ++s)
                        for (std::size_t r = 0; r < t.right_dim; ++r)
                            gram(l, k) += t.at(l, s, r, 0) * t.at(k, s, r, 0);
            worst = std::max(
                worst,
                arma::abs(gram - arma::eye(t.left_dim, t.left_dim)).max());
        }
    }
    return worst;
}

void save_bundled_mps(const BundledMPS& mps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LinalgError("save_bundled_mps: cannot open " + path);
    auto put_u32 = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    };
    out.write(kMagic, 5);
    put_u32(1); // format version
    put_u32(static_cast<std::uint32_t>(mps.sites()));
    put_u32(static_cast<std::uint32_t>(mps.g));
    put_u32(static_cast<std::uint32_t>(mps.center));
    put_u32(static_cast<std::uint32_t>(mps.state_indices.size()));
    for (std::size_t idx : mps.state_indices)
        put_u32(static_cast<std::uint32_t>(idx));
    std::uint64_t checksum = 1469598103934665603ull;
    for (const SiteTensor& t : mps.tensors) {
        put_u32(static_cast<std::uint32_t>(t.left_dim));
        put_u32(static_cast<std::uint32_t>(t.phys_dim));
        put_u32(static_cast<std::uint32_t>(t.right_dim));
        put_u32(static_cast<std::uint32_t>(t.bundle_dim));
        out.write(reinterpret_cast<const char*>(t.entries.data()),
                  static_cast<std::streamsize>(t.entries.size() * sizeof(double)));
        checksum = fnv1a(t.entries.data(), t.entries.size() * sizeof(double),
                         checksum);
    }
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
    if (!out) throw LinalgError("save_bundled_mps: write failed for " + path);
}

BundledMPS load_bundled_mps(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LinalgError("load_bundled_mps: cannot open " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw LinalgError("load_bundled_mps: bad magic in " + path);
    auto get_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    };
    if (get_u32() != 1)
        throw LinalgError("load_bundled_mps: unsupported format version");
    const std::size_t n = get_u32();
    BundledMPS mps;
    mps.g = get_u32();
    mps.center = get_u32();
    const std::size_t index_count = get_u32();
    if (!in || index_count > (1u << 20))
        throw LinalgError("load_bundled_mps: corrupt header in " + path);
    mps.state_indices.resize(index_count);
    for (std::size_t& idx : mps.state_indices) idx = get_u32();
    mps.tensors.resize(n);
    std::uint64_t checksum = 1469598103934665603ull;
    for (SiteTensor& t : mps.tensors) {
        t.left_dim = get_u32();
        t.phys_dim = get_u32();
        t.right_dim = get_u32();
        t.bundle_dim = get_u32();
        if (!in || t.size() == 0 || t.size() > (1u << 28))
            throw LinalgError("load_bundled_mps: corrupt header in " + path);
        t.entries.resize(t.size());
        in.read(reinterpret_cast<char*>(t.entries.data()),
                static_cast<std::streamsize>(t.entries.size() * sizeof(double)));
        checksum = fnv1a(t.entries.data(), t.entries.size() * sizeof(double),
                         checksum);
    }
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (!in || stored != checksum)
        throw LinalgError("load_bundled_mps: checksum mismatch in " + path);
    return mps;
}

} // namespace bmps
