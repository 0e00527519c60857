#pragma once

#include "bmps/models.hpp"

#include <string>

namespace bmps {

// All writers are atomic (write to a temp file, then rename) and emit
// byte-identical output for identical input.

// Row-major CSV, 17 significant digits.
void write_csv(const Matrix& m, const std::string& path);

// P2 ASCII grayscale; values map linearly with `lo` -> 0 and `hi` -> 255.
// Brighter pixels are higher values.
void write_pgm(const Matrix& m, const std::string& path, double lo, double hi);

// Reads back a P2 file as the raw 0..255 quantization.
Matrix read_pgm(const std::string& path);

// Binary spectrum cache, magic "SPEC1", little-endian, checksummed.
void save_spectrum(const Spectrum& s, const std::string& path);
Spectrum load_spectrum(const std::string& path);

// Cache-aware solve: loads `dir/<tag>.spec1` when present, otherwise
// diagonalizes and stores. An empty dir disables caching.
Spectrum solve_model(const ModelSpec& spec, const std::string& cache_dir);

std::string spectrum_cache_path(const ModelSpec& spec,
                                const std::string& cache_dir);

} // namespace bmps
