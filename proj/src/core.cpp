#include "mtm/core.hpp"

#include <cmath>

namespace mtm {

ConeCoords cone_coords(double t, double x) {
    if (!(t > std::abs(x)))
        throw std::domain_error("cone_coords: point outside the open light cone (t <= |x|)");
    ConeCoords c;
    c.tau = std::sqrt(t * t - x * x);
    c.w0 = std::sqrt((t + x) / (t - x));
    c.z0 = 1.0 / c.w0;
    return c;
}

cplx joukowsky(cplx zeta) {
    if (zeta == cplx(0.0, 0.0)) throw std::domain_error("joukowsky: zeta = 0");
    return 0.5 * (zeta + 1.0 / zeta);
}

cplx phase_exponent(cplx w, double t, double x) {
    if (w == cplx(0.0, 0.0)) throw std::domain_error("phase_exponent: w = 0");
    return -0.5 * I * (w - 1.0 / w) * x + 0.5 * I * (w + 1.0 / w) * t;
}

cplx phase_exponent_z(cplx z, double t, double x) {
    if (z == cplx(0.0, 0.0)) throw std::domain_error("phase_exponent_z: z = 0");
    return 0.5 * I * (z - 1.0 / z) * x + 0.5 * I * (z + 1.0 / z) * t;
}

cplx branch_pow(cplx base, cplx p) {
    // principal branch: log on arg in (-pi, pi]
    return std::exp(p * std::log(base));
}

cplx neg_shifted_pow(cplx zeta, cplx p) {
    return branch_pow(-(zeta + 1.0), p);
}

SampledComplexFunction::SampledComplexFunction(double x0, double h, std::vector<cplx> values)
    : x0_(x0), h_(h), values_(std::move(values)) {
    if (h_ <= 0.0) throw std::invalid_argument("SampledComplexFunction: spacing must be positive");
    if (values_.size() < 4)
        throw std::invalid_argument("SampledComplexFunction: need at least 4 samples");
}

SampledComplexFunction::SampledComplexFunction(const std::vector<double>& grid,
                                               std::vector<cplx> values) {
    if (grid.size() != values.size())
        throw std::invalid_argument("SampledComplexFunction: grid/value length mismatch");
    if (grid.size() < 4)
        throw std::invalid_argument("SampledComplexFunction: need at least 4 samples");
    const double h = grid[1] - grid[0];
    if (h <= 0.0) throw std::invalid_argument("SampledComplexFunction: grid not increasing");
    const double span = std::abs(grid.back() - grid.front());
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double hi = grid[i + 1] - grid[i];
        if (std::abs(hi - h) > 1e-12 * (span + 1.0))
            throw std::invalid_argument("SampledComplexFunction: spacing not uniform");
    }
    x0_ = grid[0];
    h_ = h;
    values_ = std::move(values);
}

cplx SampledComplexFunction::operator()(double x) const {
    if (values_.empty()) return {0.0, 0.0};
    if (x < x_min() || x > x_max()) return {0.0, 0.0};
    const std::size_t n = values_.size();
    // cell index, then a centered 4-point stencil clamped to the grid
    double s = (x - x0_) / h_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(s));
    std::ptrdiff_t j0 = i - 1;
    if (j0 < 0) j0 = 0;
    if (j0 > static_cast<std::ptrdiff_t>(n) - 4) j0 = static_cast<std::ptrdiff_t>(n) - 4;
    const double u = s - static_cast<double>(j0);  // local coordinate in [0,3]
    // Lagrange basis on nodes {0,1,2,3}
    const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return l0 * values_[j0] + l1 * values_[j0 + 1] + l2 * values_[j0 + 2] + l3 * values_[j0 + 3];
}

void FieldState::validate() const {
    if (u.size() != v.size()) throw std::invalid_argument("FieldState: u/v length mismatch");
    if (u.size() < 2) throw std::invalid_argument("FieldState: need at least 2 samples");
    if (!(dx > 0.0)) throw std::invalid_argument("FieldState: dx must be positive");
}

}  // namespace mtm
