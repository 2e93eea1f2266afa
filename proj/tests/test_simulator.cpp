#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "mtm/simulator.hpp"

using namespace mtm;

namespace {

FieldState gaussian_state(double amp, double x_min, double x_max, double dx) {
    FieldState st = make_state(x_min, x_max, dx);
    for (std::size_t i = 0; i < st.size(); ++i) {
        double x = st.x(i);
        st.u[i] = st.v[i] = amp * std::exp(-x * x);
    }
    return st;
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
    FieldState st = make_state(-4.0, 4.0, 1.0 / 64);
    FieldState out = split_step(st, st.dx);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.u[i] == cplx(0.0, 0.0));
        CHECK(out.v[i] == cplx(0.0, 0.0));
    }
    // t_final == t: zero steps, identical state
    FieldState same = evolve(st, st.t);
    CHECK(same.t == st.t);
}

TEST_CASE("dt != dx is a contract violation") {
    FieldState st = make_state(-1.0, 1.0, 1.0 / 64);
    CHECK_THROWS_AS(split_step(st, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(evolve(st, st.t + 0.7 * st.dx), std::invalid_argument);
}

TEST_CASE("one step matches a high-order pointwise ODE oracle") {
    // spatially constant data: transport is invisible away from the boundary,
    // and the dynamics reduce to u' = i(v + u|v|^2), v' = i(u + |u|^2 v).
    const double dx = 1.0 / 256;
    FieldState st = make_state(-1.0, 1.0, dx);
    for (std::size_t i = 0; i < st.size(); ++i) {
        st.u[i] = cplx(0.1, 0.0);
        st.v[i] = cplx(0.0, 0.0);
    }
    FieldState out = split_step(st, dx);

    // RK4 oracle at 1/100 of the step
    cplx u(0.1, 0.0), v(0.0, 0.0);
    auto f = [](cplx u, cplx v, cplx& du, cplx& dv) {
        du = cplx(0, 1) * (v + u * std::norm(v));
        dv = cplx(0, 1) * (u + std::norm(u) * v);
    };
    const int m = 100;
    const double h = dx / m;
    for (int k = 0; k < m; ++k) {
        cplx k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(u, v, k1u, k1v);
        f(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
        f(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
        f(u + h * k3u, v + h * k3v, k4u, k4v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    std::size_t mid = st.size() / 2;
    CHECK(std::abs(out.u[mid] - u) <= 5.0 * dx * dx * dx);
    CHECK(std::abs(out.v[mid] - v) <= 5.0 * dx * dx * dx);
}

TEST_CASE("charge quadrature against an analytic bump") {
    // u = a exp(-x^2), v = 0: integral of |u|^2 is a^2 sqrt(pi/2)
    const double a = 0.3;
    FieldState st = make_state(-10.0, 10.0, 1.0 / 128);
    for (std::size_t i = 0; i < st.size(); ++i) {
        double x = st.x(i);
        st.u[i] = a * std::exp(-x * x);
    }
    CHECK(std::abs(charge(st) - a * a * std::sqrt(pi / 2.0)) <= 1e-8);
    CHECK(charge(make_state(-1.0, 1.0, 0.125)) == 0.0);
}

TEST_CASE("charge is conserved along evolve") {
    const double dx = 1.0 / 128;
    FieldState st = gaussian_state(0.2, -24.0, 24.0, dx);
    EvolveReport rep;
    FieldState out = evolve(st, st.t + 2000 * dx, &rep);
    CHECK(rep.steps == 2000);
    CHECK(rep.relative_drift <= 1e-10);
    CHECK(!rep.boundary_warning);
    (void)out;
}

TEST_CASE("time reversal returns the state") {
    const double dx = 1.0 / 128;
    FieldState st = gaussian_state(0.3, -12.0, 12.0, dx);
    FieldState fwd = st;
    for (int k = 0; k < 200; ++k) fwd = split_step(fwd, dx);
    for (int k = 0; k < 200; ++k) fwd = split_step(fwd, -dx);
    double err = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i)
        err = std::max({err, std::abs(fwd.u[i] - st.u[i]), std::abs(fwd.v[i] - st.v[i])});
    CHECK(err <= 1e-12);
    CHECK(fwd.t == doctest::Approx(st.t).epsilon(1e-12));
}

TEST_CASE("self-convergence at second order") {
    const double t_final = 2.0;
    double errs[2];
    double prev_err = 0.0;
    FieldState fine = gaussian_state(0.1, -14.0, 14.0, 1.0 / 256);
    fine = evolve(fine, t_final);
    for (int lvl = 0; lvl < 2; ++lvl) {
        double dx = (lvl == 0) ? 1.0 / 64 : 1.0 / 128;
        FieldState st = gaussian_state(0.1, -14.0, 14.0, dx);
        st = evolve(st, t_final);
        // shared nodes: every (dx/dx_fine)-th fine node
        std::size_t stride = static_cast<std::size_t>(std::lround(dx * 256));
        double err = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i)
            err = std::max(err, std::abs(st.u[i] - fine.u[i * stride]));
        errs[lvl] = err;
        prev_err = err;
    }
    (void)prev_err;
    double order = std::log2(errs[0] / errs[1]);
    CHECK(order >= 1.9);
}

TEST_CASE("CSV round trip") {
    FieldState st = gaussian_state(0.17, -3.0, 3.0, 0.0625);
    st.t = 1.25;
    const char* path = "test_sim_roundtrip.csv";
    write_field_csv(st, path);
    FieldState back = read_field_csv(path);
    std::remove(path);
    CHECK(back.t == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(back.size() == st.size());
    double err = 0.0;
    for (std::size_t i = 0; i < st.size(); ++i)
        err = std::max({err, std::abs(back.u[i] - st.u[i]), std::abs(back.v[i] - st.v[i])});
    CHECK(err <= 1e-15);
}
