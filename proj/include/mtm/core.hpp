#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mtm {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx I{0.0, 1.0};

// Light-cone coordinates of a point strictly inside the forward cone.
struct ConeCoords {
    double tau;  // proper time sqrt(t^2 - x^2), > 0
    double w0;   // sqrt((t+x)/(t-x)), > 0
    double z0;   // 1/w0
};

// Throws std::domain_error when t <= |x|.
ConeCoords cone_coords(double t, double x);

// Z(zeta) = (zeta + 1/zeta)/2. Throws std::domain_error at zeta = 0.
cplx joukowsky(cplx zeta);

// w-plane oscillatory phase: -(i/2)(w - 1/w) x + (i/2)(w + 1/w) t.
// Inside the cone it equals i*tau*Z(w/w0).
cplx phase_exponent(cplx w, double t, double x);

// z-plane oscillatory phase: +(i/2)(z - 1/z) x + (i/2)(z + 1/z) t,
// equal to i*tau*Z(z/z0) inside the cone.
cplx phase_exponent_z(cplx z, double t, double x);

// (-(zeta+1))^p with the branch fixed by -pi < arg(-(zeta+1)) < pi.
// All complex powers in the project route through this helper (or through
// std::log's principal branch, which it wraps).
cplx branch_pow(cplx base, cplx p);
cplx neg_shifted_pow(cplx zeta, cplx p);

// Uniform-grid samples of a complex function of a real variable.
// Cubic (4-point Lagrange) interpolation inside the grid, identically zero
// outside: the carried functions decay at infinity so truncation is
// consistent.
class SampledComplexFunction {
  public:
    SampledComplexFunction() = default;
    SampledComplexFunction(double x0, double h, std::vector<cplx> values);
    // Validates uniform spacing to relative 1e-12.
    SampledComplexFunction(const std::vector<double>& grid, std::vector<cplx> values);

    std::size_t size() const { return values_.size(); }
    double x0() const { return x0_; }
    double h() const { return h_; }
    double grid(std::size_t i) const { return x0_ + static_cast<double>(i) * h_; }
    double x_min() const { return x0_; }
    double x_max() const { return grid(values_.size() - 1); }
    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }

    cplx operator()(double x) const;

  private:
    double x0_ = 0.0, h_ = 1.0;
    std::vector<cplx> values_;
};

// Sampled (u, v) fields at a fixed time on a uniform grid.
struct FieldState {
    double t = 0.0;
    double x_start = 0.0;
    double dx = 0.0;
    std::vector<cplx> u, v;

    std::size_t size() const { return u.size(); }
    double x(std::size_t i) const { return x_start + static_cast<double>(i) * dx; }

    void validate() const;  // throws std::invalid_argument on contract violation
};

}  // namespace mtm
