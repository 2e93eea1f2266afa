#include "mtm/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mtm {

namespace {

// sin/cos for the small per-step phase angles. Below the threshold a short
// Taylor series is cheaper than libm and exact to well below machine epsilon
// (remainder ~ theta^9/9! < 1e-21 at theta = 0.02).
inline void fast_sincos(double th, double& s, double& c) {
    const double t2 = th * th;
    if (t2 < 4e-4) {
        s = th * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0)));
        c = 1.0 - t2 / 2.0 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
    } else {
        s = std::sin(th);
        c = std::cos(th);
    }
}

// cubic-phase substep: u <- u e^{i s |v|^2}, v <- v e^{i s |u|^2}
inline void substep_C(std::vector<cplx>& u, std::vector<cplx>& v, double s) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double nu = std::norm(u[i]);
        const double nv = std::norm(v[i]);
        double su, cu, sv, cv;
        fast_sincos(s * nv, sv, cv);
        fast_sincos(s * nu, su, cu);
        u[i] *= cplx(cv, sv);
        v[i] *= cplx(cu, su);
    }
}

// mass-rotation substep: (u,v) <- (u cos s + i v sin s, v cos s + i u sin s)
inline void substep_M(std::vector<cplx>& u, std::vector<cplx>& v, double s) {
    const double c = std::cos(s), si = std::sin(s);
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx uu = u[i], vv = v[i];
        u[i] = uu * c + cplx(0.0, si) * vv;
        v[i] = vv * c + cplx(0.0, si) * uu;
    }
}

// transport substep at unit CFL: u shifts one cell right, v one cell left,
// zero inflow. sign < 0 reverses the shifts (inverse step).
inline void substep_T(std::vector<cplx>& u, std::vector<cplx>& v, int sign) {
    const std::size_t n = u.size();
    if (sign > 0) {
        for (std::size_t i = n - 1; i > 0; --i) u[i] = u[i - 1];
        u[0] = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) v[i] = v[i + 1];
        v[n - 1] = 0.0;
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) u[i] = u[i + 1];
        u[n - 1] = 0.0;
        for (std::size_t i = n - 1; i > 0; --i) v[i] = v[i - 1];
        v[0] = 0.0;
    }
}

inline void step_in_place(std::vector<cplx>& u, std::vector<cplx>& v, double dt) {
    const double h = 0.5 * dt;
    substep_C(u, v, h);
    substep_M(u, v, h);
    substep_T(u, v, dt > 0 ? 1 : -1);
    substep_M(u, v, h);
    substep_C(u, v, h);
}

inline bool boundary_hot(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    const std::size_t n = u.size();
    return std::abs(u[0]) > 1e-10 || std::abs(u[n - 1]) > 1e-10 || std::abs(v[0]) > 1e-10 ||
           std::abs(v[n - 1]) > 1e-10;
}

}  // namespace

FieldState split_step(const FieldState& state, double dt) {
    state.validate();
    if (std::abs(std::abs(dt) - state.dx) > 1e-14 * state.dx)
        throw std::invalid_argument("split_step: |dt| must equal dx (unit CFL contract)");
    FieldState out = state;
    step_in_place(out.u, out.v, dt);
    out.t = state.t + dt;
    return out;
}

FieldState evolve(const FieldState& state, double t_final, EvolveReport* report) {
    state.validate();
    if (t_final < state.t) throw std::invalid_argument("evolve: t_final precedes state.t");
    const double span = t_final - state.t;
    const double steps_real = span / state.dx;
    const long nsteps = std::lround(steps_real);
    if (std::abs(steps_real - static_cast<double>(nsteps)) > 1e-12 * (1.0 + steps_real))
        throw std::invalid_argument("evolve: (t_final - t) not divisible by dx");

    FieldState out = state;
    const double q0 = charge(state);
    bool warned = false;
    for (long k = 0; k < nsteps; ++k) {
        step_in_place(out.u, out.v, state.dx);
        if (!warned && boundary_hot(out.u, out.v)) {
            warned = true;
            std::fprintf(stderr,
                         "evolve: warning: boundary amplitude exceeds 1e-10 at step %ld "
                         "(possible wrap-around contamination)\n",
                         k);
        }
    }
    out.t = state.t + static_cast<double>(nsteps) * state.dx;
    if (report) {
        report->charge_initial = q0;
        report->charge_final = charge(out);
        report->relative_drift =
            q0 > 0.0 ? std::abs(report->charge_final - q0) / q0 : std::abs(report->charge_final);
        report->boundary_warning = warned;
        report->steps = nsteps;
    }
    return out;
}

double charge(const FieldState& state) {
    const std::size_t n = state.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::norm(state.u[i]) + std::norm(state.v[i]);
        sum += (i == 0 || i + 1 == n) ? 0.5 * d : d;
    }
    return sum * state.dx;
}

void write_field_csv(const FieldState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    char buf[256];
    std::snprintf(buf, sizeof buf, "# t=%.17g\n", state.t);
    out << buf << "x,re_u,im_u,re_v,im_v\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", state.x(i),
                      state.u[i].real(), state.u[i].imag(), state.v[i].real(), state.v[i].imag());
        out << buf;
    }
}

FieldState read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_field_csv: cannot open " + path);
    FieldState st;
    std::string line;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("t=");
            if (pos != std::string::npos) st.t = std::stod(line.substr(pos + 2));
            continue;
        }
        if (line[0] == 'x') continue;  // column header
        std::istringstream ss(line);
        double x, ru, iu, rv, iv;
        char comma;
        ss >> x >> comma >> ru >> comma >> iu >> comma >> rv >> comma >> iv;
        xs.push_back(x);
        st.u.emplace_back(ru, iu);
        st.v.emplace_back(rv, iv);
    }
    if (xs.size() < 2) throw std::runtime_error("read_field_csv: too few rows in " + path);
    st.x_start = xs.front();
    st.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    st.validate();
    return st;
}

FieldState make_state(double x_min, double x_max, double dx, double t) {
    FieldState st;
    st.t = t;
    st.x_start = x_min;
    st.dx = dx;
    const auto n = static_cast<std::size_t>(std::lround((x_max - x_min) / dx)) + 1;
    st.u.assign(n, cplx(0.0, 0.0));
    st.v.assign(n, cplx(0.0, 0.0));
    return st;
}

}  // namespace mtm
