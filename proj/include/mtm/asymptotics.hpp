#pragma once

#include <utility>

#include "mtm/core.hpp"
#include "mtm/scattering.hpp"

namespace mtm {

// Reduced reflection pair (rho, rho_breve) on a zeta grid, the input of the
// phase-stationary model problem. Their product rho*rho_breve is real on the
// real axis for data coming from an actual field.
struct RhoPair {
    SampledComplexFunction rho;
    SampledComplexFunction rho_breve;

    // nu(zeta) = (1/2pi) log(1 + rho(zeta) rho_breve(zeta)); throws if the
    // argument of the log is not positive.
    double nu(double zeta) const;
};

// Build the pair from scattering data at scaling parameter s0:
//   side 'z':  rho(zeta) = -s0 zeta r_hat(s0 zeta),  rho_breve = -conj(r_hat)
//   side 'w':  rho(zeta) = s0 zeta r(s0 zeta)/(d-d+), rho_breve = conj(r) d-d+
// where d-d+ is the product of boundary values of the scalar factor
// exp{(1/2pi i)Int log(1+s|r|^2)/(s-w) ds}. The grid covers [-Z, Z] with
// Z = min(zeta_max, support/|s0|).
RhoPair rho_pair(const ScatteringData& S, double s0, char side, double zeta_max = 3.0,
                 std::size_t n = 1025);

// Connection coefficients of the scalar factorization problem.
struct AsymptoticCoefficients {
    double nu0_minus = 0.0, nu0_plus = 0.0;  // nu(-1), nu(+1)
    cplx delta0_minus{1.0, 0.0};             // unimodular
    cplx delta0_plus{1.0, 0.0};              // unimodular
    cplx delta_at_zero{1.0, 0.0};
};

// delta(zeta) = exp{(1/i) Int_{-1}^{1} nu(s)/(s - zeta) ds}, zeta off [-1,1];
// singularity-subtracted quadrature keeps the evaluation accurate arbitrarily
// close to the cut. Throws for zeta in {-1, +1}.
cplx delta_fn(const RhoPair& P, cplx zeta);

// Boundary values (delta_plus, delta_minus) at s in (-1, 1); their ratio is
// 1 + rho(s) rho_breve(s).
std::pair<cplx, cplx> delta_boundary(const RhoPair& P, double s);

// (delta0_minus, delta0_plus) plus nu(+-1) and delta(0) in one bundle.
AsymptoticCoefficients delta0_pm(const RhoPair& P);

// kappa_hat(z) = (1/2pi) log(1 + z |r_hat(z)|^2); kappa_w is the same formula
// applied to the w-side coefficient. Throws on a nonpositive log argument.
double kappa_hat(const SampledComplexFunction& r_hat, double z);
double kappa_w(const SampledComplexFunction& r, double w);

// Asymptotic amplitude pair (f_minus, f_plus) for a ray of the given speed:
// |f_pm|^2 = +-kappa_hat(+-z0), z0 = sqrt((1-speed)/(1+speed)); the argument
// combines arg r_hat, arg Gamma, and four singularity-subtracted integrals
// of kappa_hat. Primary route; evaluates r_hat only.
std::pair<cplx, cplx> f_pm(const SampledComplexFunction& r_hat, double speed);

// Independent route through the w-side coefficient r, including the scalar
// d-d+ phase; must agree with f_pm (cross-check of the two reductions).
std::pair<cplx, cplx> f_pm_w(const SampledComplexFunction& r, double speed);

// Leading-order fields inside the light cone:
//   u_as = (t-x)^{-1/2} [ e^{i tau + i|f-|^2 ln tau} f- + e^{-i tau + i|f+|^2 ln tau} f+ ]
//   v_as = (t+x)^{-1/2} [ e^{i tau + i|f-|^2 ln tau} f- - e^{-i tau + i|f+|^2 ln tau} f+ ]
// with tau = sqrt(t^2 - x^2) > 1.
std::pair<cplx, cplx> predict_fields(const SampledComplexFunction& r_hat, double t, double x);

// Stationary-phase limit of the model problem's zeta*M_12 moment:
//   q_as = tau^{-1/2} e^{-i tau + i nu0- ln tau} sqrt(2pi) e^{pi nu0-/2} e^{-i pi/4}
//            / (rho(-1) delta0-^2 Gamma(i nu0-))   + mirrored (+) summand;
// a summand whose rho(-+1) vanishes is zero.
cplx q_as(const RhoPair& P, const AsymptoticCoefficients& A, double tau);

}  // namespace mtm
