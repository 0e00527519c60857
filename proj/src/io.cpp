#include "bmps/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bmps {

namespace {

constexpr char kSpecMagic[6] = "SPEC1";

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

void atomic_write(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw LinalgError("io: cannot open " + tmp);
        out.write(payload.data(),
                  static_cast<std::streamsize>(payload.size()));
        if (!out) throw LinalgError("io: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

void write_csv(const Matrix& m, const std::string& path) {
    std::string buf;
    buf.reserve(m.n_elem * 26);
    char cell[40];
    for (arma::uword r = 0; r < m.n_rows; ++r) {
        for (arma::uword c = 0; c < m.n_cols; ++c) {
            std::snprintf(cell, sizeof cell, "%.17g", m(r, c));
            if (c) buf += ',';
            buf += cell;
        }
        buf += "\r\n";
    }
    atomic_write(path, buf);
}

void write_pgm(const Matrix& m, const std::string& path, double lo,
               double hi) {
    if (!(hi > lo)) throw LinalgError("write_pgm: need hi > lo");
    std::ostringstream out;
    out << "P2\n" << m.n_cols << " " << m.n_rows << "\n255\n";
    for (arma::uword r = 0; r < m.n_rows; ++r) {
        for (arma::uword c = 0; c < m.n_cols; ++c) {
            double v = (m(r, c) - lo) / (hi - lo);
            v = std::min(1.0, std::max(0.0, v));
            const int pixel = static_cast<int>(std::lround(v * 255.0));
            if (c) out << ' ';
            out << pixel;
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

Matrix read_pgm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LinalgError("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2") throw LinalgError("read_pgm: not a P2 file: " + path);
    std::size_t cols = 0, rows = 0;
    int maxval = 0;
    in >> cols >> rows >> maxval;
    if (!in || maxval != 255)
        throw LinalgError("read_pgm: unsupported header in " + path);
    Matrix m(rows, cols);
    for (arma::uword r = 0; r < rows; ++r)
        for (arma::uword c = 0; c < cols; ++c) {
            int v = 0;
            in >> v;
            if (!in) throw LinalgError("read_pgm: truncated " + path);
            m(r, c) = v;
        }
    return m;
}

void save_spectrum(const Spectrum& s, const std::string& path) {
    std::string buf;
    auto append = [&](const void* p, std::size_t n) {
        buf.append(static_cast<const char*>(p), n);
    };
    auto put_u32 = [&](std::uint32_t v) { append(&v, sizeof v); };
    auto put_f64 = [&](double v) { append(&v, sizeof v); };

    buf.append(kSpecMagic, 5);
    put_u32(1); // format version
    put_u32(s.model.kind == ModelKind::TFIM ? 0u : 1u);
    put_u32(static_cast<std::uint32_t>(s.model.sites));
    put_f64(s.model.transverse_field);
    put_f64(s.model.anisotropy);
    put_u32(static_cast<std::uint32_t>(s.energies.n_elem));

    const std::size_t header_end = buf.size();
    append(s.energies.memptr(), s.energies.n_elem * sizeof(double));
    append(s.states.memptr(), s.states.n_elem * sizeof(double));
    const std::uint64_t checksum =
        fnv1a(buf.data() + header_end, buf.size() - header_end);
    append(&checksum, sizeof checksum);
    atomic_write(path, buf);
}

Spectrum load_spectrum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LinalgError("load_spectrum: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (pos + n > buf.size())
            throw LinalgError("load_spectrum: truncated cache file " + path);
    };
    auto get_u32 = [&]() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, buf.data() + pos, 4);
        pos += 4;
        return v;
    };
    auto get_f64 = [&]() {
        need(8);
        double v;
        std::memcpy(&v, buf.data() + pos, 8);
        pos += 8;
        return v;
    };

    need(5);
    if (std::memcmp(buf.data(), kSpecMagic, 5) != 0)
        throw LinalgError("load_spectrum: bad magic in " + path);
    pos = 5;
    if (get_u32() != 1)
        throw LinalgError("load_spectrum: unsupported format version");

    Spectrum s;
    s.model.kind = get_u32() == 0 ? ModelKind::TFIM : ModelKind::XXZ;
    s.model.sites = get_u32();
    s.model.transverse_field = get_f64();
    s.model.anisotropy = get_f64();
    const std::size_t dim = get_u32();
    if (dim != hilbert_dim(s.model.sites))
        throw LinalgError("load_spectrum: dimension mismatch in " + path);

    const std::size_t payload = dim * sizeof(double) * (dim + 1);
    need(payload + 8);
    s.energies.set_size(dim);
    std::memcpy(s.energies.memptr(), buf.data() + pos, dim * sizeof(double));
    s.states.set_size(dim, dim);
    std::memcpy(s.states.memptr(), buf.data() + pos + dim * sizeof(double),
                dim * dim * sizeof(double));
    const std::uint64_t computed = fnv1a(buf.data() + pos, payload);
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + pos + payload, 8);
    if (stored != computed)
        throw LinalgError("load_spectrum: checksum mismatch (corrupted cache "
                          "file " + path + ")");
    if (!s.energies.is_finite() || !s.states.is_finite())
        throw LinalgError("load_spectrum: non-finite payload in " + path);
    return s;
}

std::string spectrum_cache_path(const ModelSpec& spec,
                                const std::string& cache_dir) {
    return (std::filesystem::path(cache_dir) / (spec.tag() + ".spec1"))
        .string();
}

Spectrum solve_model(const ModelSpec& spec, const std::string& cache_dir) {
    if (spec.sites > 14)
        throw LinalgError("solve_model: dense diagonalization is capped at "
                          "14 sites (2^14 x 2^14)");
    if (!cache_dir.empty()) {
        const std::string path = spectrum_cache_path(spec, cache_dir);
        if (std::filesystem::exists(path)) return load_spectrum(path);
    }
    const Hamiltonian h = spec.kind == ModelKind::TFIM
                              ? build_tfim(spec.sites, spec.transverse_field)
                              : build_xxz(spec.sites, spec.anisotropy);
    Spectrum s = full_spectrum(h);
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        save_spectrum(s, spectrum_cache_path(spec, cache_dir));
    }
    return s;
}

} // namespace bmps
