#pragma once

#include <string>

#include "mtm/core.hpp"

namespace mtm {

struct EvolveReport {
    double charge_initial = 0.0;
    double charge_final = 0.0;
    double relative_drift = 0.0;
    bool boundary_warning = false;  // boundary cells exceeded 1e-10 amplitude
    long steps = 0;
};

// One Strang step C(dt/2) M(dt/2) T(dt) M(dt/2) C(dt/2) at unit CFL.
// dt must equal +/- state.dx (negative dt runs the exact inverse step).
FieldState split_step(const FieldState& state, double dt);

// Repeated split_step until state.t == t_final; (t_final - t)/dx must be an
// integer to 1e-12.
FieldState evolve(const FieldState& state, double t_final, EvolveReport* report = nullptr);

// Trapezoid quadrature of |u|^2 + |v|^2.
double charge(const FieldState& state);

void write_field_csv(const FieldState& state, const std::string& path);
FieldState read_field_csv(const std::string& path);

// Convenience: allocate a zero state covering [x_min, x_max] at spacing dx.
FieldState make_state(double x_min, double x_max, double dx, double t = 0.0);

}  // namespace mtm
