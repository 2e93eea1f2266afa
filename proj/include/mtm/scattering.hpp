#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtm/core.hpp"

namespace mtm {

// Discrete part of the scattering data: eigenvalues lambda_j in the open
// second quadrant and norming constants C_j != 0. Derived quantities:
//   w_j = lambda_j^{-2} (upper half plane),  z_j = lambda_j^2 (lower half),
//   c_j = -2 C_j / lambda_j^4,               c_hat_j = 2 C_j / lambda_j^2.
// The c/c_hat pair is fixed by requiring the two reconstruction problems to
// produce an actual solution of the system; see docs/derivations.md.
struct DiscreteSpectrum {
    std::vector<cplx> lambda;
    std::vector<cplx> C;

    std::size_t size() const { return lambda.size(); }
    cplx w(std::size_t j) const { return 1.0 / (lambda[j] * lambda[j]); }
    cplx z(std::size_t j) const { return lambda[j] * lambda[j]; }
    cplx c(std::size_t j) const {
        const cplx l2 = lambda[j] * lambda[j];
        return -2.0 * C[j] / (l2 * l2);
    }
    cplx c_hat(std::size_t j) const { return 2.0 * C[j] / (lambda[j] * lambda[j]); }

    void validate() const;  // second quadrant, distinct, nonzero C
};

struct ScatteringData {
    SampledComplexFunction r;      // reflection coefficient of w
    SampledComplexFunction r_hat;  // independent z-side reflection coefficient
    DiscreteSpectrum spectrum;
};

// Transition coefficients (a, b) at spectral parameter w (resp. z), obtained
// by integrating the transformed spectral problem for the dressed first Jost
// column across the grid. For real parameters an interaction-picture
// formulation removes the oscillation; for complex parameters the decaying
// dressed column is integrated directly.
std::pair<cplx, cplx> transition_w(const FieldState& fields, cplx w);
std::pair<cplx, cplx> transition_z(const FieldState& fields, cplx z);

// r(w) = b(w)/a(w) sampled on a uniform grid; throws on resonance
// (|a| < 1e-6 somewhere on the real axis).
SampledComplexFunction reflection_w(const FieldState& fields, double w_min, double w_max,
                                    std::size_t n);
SampledComplexFunction reflection_z(const FieldState& fields, double z_min, double z_max,
                                    std::size_t n);

// a(w) alone (first Jost read-off); shared by eigenvalue search.
cplx transition_a_w(const FieldState& fields, cplx w);

struct EigenvalueSearchBox {
    double re_min = -12.0, re_max = 12.0;
    double im_min = 0.0, im_max = 12.0;
};

// Zeros of a(w) in the upper-half-plane box by the argument principle +
// recursive quadrisection + Newton polish; returns the second-quadrant roots
// lambda_j of w_j^{-1/2}.
std::vector<cplx> find_eigenvalues(const FieldState& fields,
                                   const EigenvalueSearchBox& box = {});

struct NormingConstants {
    std::vector<cplx> c;            // w-side transformed norming constants
    std::vector<cplx> C;            // C_j = -lambda_j^4 c_j / 2
    std::vector<cplx> c_hat;        // 2 C_j / lambda_j^2
    std::vector<cplx> a_prime;      // a'(w_j), Cauchy-circle differentiation
    std::vector<double> residuals;  // proportionality residual per eigenvalue
};

NormingConstants norming_constants(const FieldState& fields, const std::vector<cplx>& lambda);

struct ScatterParams {
    double w_min = -12.0, w_max = 12.0;
    std::size_t n_grid = 2048;
    EigenvalueSearchBox box;
    bool find_spectrum = true;
};

ScatteringData scattering_data(const FieldState& fields, const ScatterParams& params = {});

// Trivial time flow of the scattering data.
ScatteringData evolve_scattering(const ScatteringData& S, double t);

// JSON (de)serialization of ScatteringData.
std::string to_json(const ScatteringData& S);
ScatteringData scattering_from_json(const std::string& json_text);
void save_scattering(const ScatteringData& S, const std::string& path);
ScatteringData load_scattering(const std::string& path);

}  // namespace mtm
