#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mtm/core.hpp"
#include "mtm/scattering.hpp"

namespace mtm {

using Mat2 = Eigen::Matrix2cd;

// Jump data 1 + R sampled on a uniform grid of the oriented real line.
// The factorization problem is: find M analytic off the line, M -> 1 at
// infinity, with boundary values satisfying M_+ = M_-(1 + R).
struct JumpProblem {
    double x0 = 0.0;  // leftmost node
    double h = 0.0;   // spacing
    std::vector<Mat2> R;

    std::size_t size() const { return R.size(); }
    double node(std::size_t i) const { return x0 + static_cast<double>(i) * h; }

    // Requires >= 4 nodes, h > 0, and det(1 + R) == 1 to 1e-10 at every node
    // (the solvability hypothesis of the small-norm theory).
    void validate() const;

    // sup over nodes of the entrywise max modulus
    double sup_norm() const;
};

// Grid Hilbert transform H[f](s) = (1/pi) PV Int f(s')/(s' - s) ds' by FFT
// (symbol i*sgn(xi)); spectrally accurate for smooth data decaying at the
// grid ends. Grid-spacing independent.
std::vector<cplx> hilbert_transform(const std::vector<cplx>& f);

// C[f](zeta) = (1/2pi i) Int f(s)/(s - zeta) ds over the sampled line.
// Away from the line a plain quadrature; for |Im zeta| < 5h a local quadratic
// subtraction keeps the rule accurate. Throws for real zeta (use
// cauchy_boundary).
cplx cauchy_transform(const SampledComplexFunction& f, cplx zeta);

// Plemelj boundary values on the line: C_pm[f] = +-f/2 - (i/2) H[f];
// side = +1 or -1. The difference C_+ - C_- = f is exact by construction.
SampledComplexFunction cauchy_boundary(const SampledComplexFunction& f, int side);

// Solution of the small-norm factorization problem.
struct SmallNormSolution {
    JumpProblem J;
    std::vector<Mat2> mu;  // boundary unknown: M_- = 1 + mu on the nodes
    Mat2 moment;           // lim zeta*(M(zeta) - 1)
    int iterations = 0;
    bool used_dense = false;
    double residual = 0.0;  // sup-norm defect of mu = C^-[(mu+1)R]

    Mat2 M_at(cplx zeta) const;       // off-line evaluation via the Cauchy transform
    std::vector<Mat2> M_plus() const;   // recomputed boundary values 1 + C^+[(mu+1)R]
    std::vector<Mat2> M_minus() const;  // recomputed boundary values 1 + C^-[(mu+1)R]
    // value at the origin node (the jump is required to vanish there, so M is
    // continuous at 0 and the principal value integral is regular)
    Mat2 M_at_zero() const;
};

// Solves mu = C^-[(mu+1)R] by fixed-point iteration (tolerance 1e-12); if the
// iteration fails to contract, falls back to a dense collocation solve (only
// feasible for <= 1024 nodes; beyond that the failure is reported). Throws
// std::runtime_error when the small-norm hypothesis is violated and no
// fallback applies.
SmallNormSolution solve_small_norm(const JumpProblem& J);

struct ReconstructParams {
    double s_max = 16.0;        // contour half-width in the spectral variable
    std::size_t n_nodes = 4096;  // uniform nodes on [-s_max, s_max]
};

// Inverse transform for soliton-free data: for each x assembles the w-plane
// jump from r (recovering u) and the z-plane jump from r_hat (recovering v),
// solves both by solve_small_norm and applies the reconstruction formulas.
// Pure soliton data (negligible reflection) is delegated to the closed-form
// multi-soliton solver; mixed data is rejected (the pole-augmented solver is
// out of scope).
FieldState reconstruct_fields(const ScatteringData& S, double t, double x_min, double x_max,
                              double dx, const ReconstructParams& prm = {});

}  // namespace mtm
