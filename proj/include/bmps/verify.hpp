#pragma once

#include <string>
#include <vector>

namespace bmps {

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

struct VerifyOptions {
    bool quick = false;           // restrict to N <= 8, skip N = 12 orderings
    std::string cache_dir;        // spectrum cache for the heavy checks
};

// Runs every invariant suite; one SuiteResult per module.
std::vector<SuiteResult> run_verification(const VerifyOptions& options);

// Helper shared with tests: deterministic random unit vector.
void random_unit_vector(std::size_t dim, std::uint64_t seed, double* out);

} // namespace bmps
