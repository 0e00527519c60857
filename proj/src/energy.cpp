#include "bmps/energy.hpp"

#include <cmath>

namespace bmps {

double LocalCouplings::c_max() const {
    if (values.n_elem == 0)
        throw LinalgError("LocalCouplings: empty coupling vector");
    return arma::abs(values).max();
}

LocalCouplings LocalCouplings::uniform(std::size_t sites, double value) {
    LocalCouplings c;
    c.values = Vector(sites, arma::fill::value(value));
    return c;
}

namespace {

void check_inputs(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                  const NaturalOrbitalSet& basis, std::size_t m,
                  const LocalCouplings& c) {
    const arma::uword n = basis.orbitals.n_rows;
    if (rho_a.matrix.n_rows != n || rho_b.matrix.n_rows != n ||
        c.values.n_elem != n)
        throw LinalgError("energy metric: dimension mismatch");
    if (m == 0 || m > basis.orbitals.n_cols)
        throw LinalgError("energy metric: m out of range");
}

} // namespace

double energy_difference_truncated(const DensityMatrix& rho_a,
                                   const DensityMatrix& rho_b,
                                   const NaturalOrbitalSet& basis,
                                   std::size_t m, const LocalCouplings& c,
                                   bool ultralocal) {
    check_inputs(rho_a, rho_b, basis, m, c);
    const Matrix& phi = basis.orbitals;
    const Matrix diff = phi.t() * (rho_a.matrix - rho_b.matrix) * phi;
    double de = 0.0;
    if (ultralocal) {
        // Diagonal occupations only; cross terms vanish in the ultra-local
        // limit.
        for (std::size_t k = 0; k < m; ++k) {
            double weight = 0.0;
            for (arma::uword i = 0; i < phi.n_rows; ++i)
                weight += c.values(i) * phi(i, k) * phi(i, k);
            de += diff(k, k) * weight;
        }
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = 0; l < m; ++l) {
                double weight = 0.0;
                for (arma::uword i = 0; i < phi.n_rows; ++i)
                    weight += c.values(i) * phi(i, k) * phi(i, l);
                de += diff(k, l) * weight;
            }
        }
    }
    return de;
}

FrobeniusBound frobenius_bound_check(const DensityMatrix& rho_a,
                                     const DensityMatrix& rho_b,
                                     const NaturalOrbitalSet& basis,
                                     std::size_t m, const LocalCouplings& c) {
    check_inputs(rho_a, rho_b, basis, m, c);
    const double cmax = c.c_max();
    if (cmax == 0.0)
        throw LinalgError("frobenius_bound_check: c_max is zero");
    const Matrix& phi = basis.orbitals;
    const Matrix diff = phi.t() * (rho_a.matrix - rho_b.matrix) * phi;
    FrobeniusBound out;
    out.lhs = std::abs(energy_difference_truncated(rho_a, rho_b, basis, m, c)) /
              cmax;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l)
            out.rhs += std::abs(diff(k, l));
    out.holds = out.lhs <= out.rhs + 1e-10;
    return out;
}

MetricReport metric_axiom_suite(
    const std::vector<std::size_t>& points,
    const std::function<double(std::size_t, std::size_t)>& distance,
    double tolerance) {
    if (points.size() < 3)
        throw LinalgError("metric_axiom_suite: need at least 3 points");
    MetricReport report;
    report.points = points;

    auto d = [&](std::size_t x, std::size_t y) {
        const double v = distance(x, y);
        if (std::isnan(v))
            throw LinalgError("metric_axiom_suite: distance returned NaN for "
                              "pair (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
        return v;
    };

    for (std::size_t x : points) {
        if (std::abs(d(x, x)) > tolerance)
            report.violations.push_back({"identity", {x}, std::abs(d(x, x))});
    }
    for (std::size_t x : points) {
        for (std::size_t y : points) {
            if (x == y) continue;
            const double dxy = d(x, y);
            if (dxy < -tolerance)
                report.violations.push_back({"nonnegativity", {x, y}, dxy});
            if (std::abs(dxy - d(y, x)) > tolerance)
                report.violations.push_back(
                    {"symmetry", {x, y}, std::abs(dxy - d(y, x))});
        }
    }
    for (std::size_t x : points) {
        for (std::size_t y : points) {
            for (std::size_t z : points) {
                if (x == y || y == z || x == z) continue;
                const double slack = d(x, y) - d(x, z) - d(z, y);
                report.max_triangle_slack =
                    std::max(report.max_triangle_slack, slack);
                if (slack > tolerance)
                    report.violations.push_back({"triangle", {x, y, z}, slack});
            }
        }
    }
    return report;
}

} // namespace bmps
