#pragma once

#include <utility>
#include <vector>

#include "mtm/core.hpp"
#include "mtm/scattering.hpp"

namespace mtm {

// Reflectionless data: eigenvalue/norming-constant pairs.
struct SolitonData {
    std::vector<cplx> lambda;  // open second quadrant, pairwise distinct
    std::vector<cplx> C;       // nonzero

    std::size_t size() const { return lambda.size(); }
    void validate() const;
};

// Closed-form one-soliton. With delta = |lambda1|, gamma = 2 arg(lambda1)
// (in (pi, 2pi) for second-quadrant lambda1):
//   E = (delta^2 + delta^-2)/2 sin(gamma), beta = ... cos(gamma),
//   nu = (delta^-2 - delta^2)/(delta^-2 + delta^2),
//   x0 = (1/2E) log(delta^6 sin^2(gamma) / |C1|^2),
//   phi0 = arg C1 - 3 gamma/2 + pi,
//   u =  delta^-1 sin(gamma) sech[E(x - nu t - x0) - i gamma/2] e^{-i beta(t - nu x) + i phi0}
//   v = -delta    sin(gamma) sech[E(x - nu t - x0) + i gamma/2] e^{-i beta(t - nu x) + i phi0}
// Derivation in docs/derivations.md; locked by the n_soliton(N=1) identity
// and a finite-difference residual test of the evolution equations.
std::pair<cplx, cplx> one_soliton(cplx lambda1, cplx C1, double t, double x);

// N-soliton via the residue linear systems of the two reconstruction
// problems (one 2N x 2N complex solve per side per grid point). N <= 16.
FieldState n_soliton(const SolitonData& D, double t, double x_start, double dx, std::size_t n);

// Pointwise evaluation used by the grid version and by tests.
std::pair<cplx, cplx> n_soliton_point(const SolitonData& D, double t, double x);

// Restriction of scattering data to a space-time cone with velocities
// v1 <= v2: keeps eigenvalues with |lambda_k|^2 in the band
// [min(L1,L2), max(L1,L2)], L_j = sqrt((1-v_j)/(1+v_j)), and multiplies the
// reflection coefficients and kept norming constants by the Blaschke
// product over eigenvalues ahead of the cone (|lambda_j|^2 < min(L1,L2),
// i.e. solitons faster than the cone's fast edge).
ScatteringData cone_restrict(const ScatteringData& S, double v1, double v2);

// Modified norming constants for a same-modulus soliton group riding on
// radiation: multiplies each C_j by the exponential of a principal-value-free
// integral of log(1 + z|r_hat(z)|^2) over [-L0, L0]; the w-side integral
// over |w| > 1/L0 is evaluated as an internal cross-check (agreement 1e-6).
std::vector<cplx> resolution_constants(const ScatteringData& S, double L0);

}  // namespace mtm
