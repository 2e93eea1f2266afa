#include "mtm/solitons.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mtm/quadrature.hpp"

namespace mtm {

namespace {

// gamma = 2 arg(lambda) folded into [0, 2pi); second-quadrant lambda lands in
// (pi, 2pi), so sin(gamma) < 0 and the envelope rate E is negative (all
// formulas below are signed and hold either way).
double gamma_of(cplx lambda) {
    double g = 2.0 * std::arg(lambda);
    if (g < 0.0) g += 2.0 * pi;
    if (g >= 2.0 * pi) g -= 2.0 * pi;
    return g;
}

cplx sech(cplx s) { return 1.0 / std::cosh(s); }

// residue exponents are clamped before exponentiation so the linear systems
// stay representable at large |t|; the clamp changes the solution by less
// than e^{-70}, i.e. below machine epsilon
cplx clamped_exp(cplx e) {
    double re = e.real();
    if (re > 35.0) re = 35.0;
    if (re < -35.0) re = -35.0;
    return std::exp(cplx(re, e.imag()));
}

// Component-1 residue linear system for one reconstruction problem.
// Poles p_j (one half plane) carry lower-left residue coefficient g_j, the
// conjugate poles carry upper-right coefficient h_j. Unknowns are the
// nonzero columns of the pole residues; returns the reconstructed field
// value M(0)_11 * conj(lim s M_12).
cplx residue_field(const std::vector<cplx>& p, const std::vector<cplx>& g,
                   const std::vector<cplx>& h) {
    const std::size_t N = p.size();
    if (N == 0) return {0.0, 0.0};
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
    Mat A = Mat::Zero(2 * N, 2 * N);
    Vec rhs = Vec::Zero(2 * N);
    for (std::size_t j = 0; j < N; ++j) {
        A(j, j) = 1.0;
        for (std::size_t k = 0; k < N; ++k) A(j, N + k) -= g[j] / (p[j] - std::conj(p[k]));
        A(N + j, N + j) = 1.0;
        for (std::size_t k = 0; k < N; ++k) A(N + j, k) -= h[j] / (std::conj(p[j]) - p[k]);
        rhs(N + j) = h[j];
    }
    // row equilibration (pure row scaling, solution unchanged)
    for (std::size_t i = 0; i < 2 * N; ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k < 2 * N; ++k) m = std::max(m, std::abs(A(i, k)));
        if (m > 0.0) {
            A.row(i) /= m;
            rhs(i) /= m;
        }
    }
    Vec x = A.partialPivLu().solve(rhs);
    cplx M0 = 1.0;
    cplx l12 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        M0 -= x(k) / p[k];
        l12 += x(N + k);
    }
    return M0 * std::conj(l12);
}

}  // namespace

void SolitonData::validate() const {
    if (lambda.size() != C.size()) throw std::invalid_argument("SolitonData: length mismatch");
    if (lambda.size() > 16) throw std::invalid_argument("SolitonData: at most 16 solitons supported");
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (!(lambda[j].real() < 0.0 && lambda[j].imag() > 0.0))
            throw std::invalid_argument("SolitonData: eigenvalue outside the open second quadrant");
        if (C[j] == cplx(0.0, 0.0))
            throw std::invalid_argument("SolitonData: zero norming constant");
        for (std::size_t k = j + 1; k < lambda.size(); ++k)
            if (std::abs(lambda[j] - lambda[k]) < 1e-12)
                throw std::invalid_argument("SolitonData: eigenvalues not pairwise distinct");
    }
}

std::pair<cplx, cplx> one_soliton(cplx lambda1, cplx C1, double t, double x) {
    if (!(lambda1.real() < 0.0 && lambda1.imag() > 0.0))
        throw std::invalid_argument("one_soliton: lambda1 outside the open second quadrant");
    if (C1 == cplx(0.0, 0.0)) throw std::invalid_argument("one_soliton: C1 = 0");
    const double delta = std::abs(lambda1);
    const double gamma = gamma_of(lambda1);
    const double d2 = delta * delta, dm2 = 1.0 / d2;
    const double E = 0.5 * (d2 + dm2) * std::sin(gamma);
    const double beta = 0.5 * (d2 + dm2) * std::cos(gamma);
    const double nu = (dm2 - d2) / (dm2 + d2);
    const double sg = std::sin(gamma);
    const double x0 = (0.5 / E) * std::log(std::pow(delta, 6.0) * sg * sg / std::norm(C1));
    const double phi0 = std::arg(C1) - 1.5 * gamma + pi;
    const double s = E * (x - nu * t - x0);
    const cplx ph = std::exp(cplx(0.0, -beta * (t - nu * x) + phi0));
    const cplx u = (sg / delta) * sech(cplx(s, -0.5 * gamma)) * ph;
    const cplx v = -(sg * delta) * sech(cplx(s, 0.5 * gamma)) * ph;
    return {u, v};
}

std::pair<cplx, cplx> n_soliton_point(const SolitonData& D, double t, double x) {
    const std::size_t N = D.size();
    std::vector<cplx> pw(N), pz(N), gw(N), hw(N), gz(N), hz(N);
    for (std::size_t j = 0; j < N; ++j) {
        const cplx l2 = D.lambda[j] * D.lambda[j];
        const cplx wj = 1.0 / l2, zj = l2;
        const cplx cj = -2.0 * D.C[j] / (l2 * l2);
        const cplx chj = 2.0 * D.C[j] / l2;
        pw[j] = wj;
        pz[j] = zj;
        const cplx ew = clamped_exp(-phase_exponent(wj, t, x));
        const cplx ez = clamped_exp(-phase_exponent_z(zj, t, x));
        gw[j] = wj * cj * ew;
        hw[j] = -std::conj(cj) * std::conj(ew);
        gz[j] = zj * chj * ez;
        hz[j] = -std::conj(chj) * std::conj(ez);
    }
    return {residue_field(pw, gw, hw), residue_field(pz, gz, hz)};
}

FieldState n_soliton(const SolitonData& D, double t, double x_start, double dx, std::size_t n) {
    D.validate();
    FieldState st;
    st.t = t;
    st.x_start = x_start;
    st.dx = dx;
    st.u.resize(n);
    st.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [u, v] = n_soliton_point(D, t, x_start + static_cast<double>(i) * dx);
        st.u[i] = u;
        st.v[i] = v;
    }
    return st;
}

ScatteringData cone_restrict(const ScatteringData& S, double v1, double v2) {
    if (!(-1.0 < v1 && v1 <= v2 && v2 < 1.0))
        throw std::invalid_argument("cone_restrict: need -1 < v1 <= v2 < 1");
    const double La = std::sqrt((1.0 - v1) / (1.0 + v1));
    const double Lb = std::sqrt((1.0 - v2) / (1.0 + v2));
    const double Lmin = std::min(La, Lb), Lmax = std::max(La, Lb);
    const double tol = 1e-12;

    const auto& sp = S.spectrum;
    std::vector<std::size_t> kept, ahead;
    for (std::size_t j = 0; j < sp.size(); ++j) {
        const double m = std::norm(sp.lambda[j]);
        if (m < Lmin - tol)
            ahead.push_back(j);  // faster than the cone's fast edge
        else if (m <= Lmax + tol)
            kept.push_back(j);
    }

    auto blaschke = [&](cplx s) {  // product in the lambda^2 = z = 1/w variable
        cplx prod = 1.0;
        for (std::size_t j : ahead) {
            const cplx zj = sp.z(j);
            const cplx f = (s - zj) / (s - std::conj(zj));
            prod *= std::conj(zj) / zj * f * f;
        }
        return prod;
    };

    ScatteringData out;
    out.r = S.r;
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        const double w = out.r.grid(i);
        if (w != 0.0) out.r.values()[i] *= blaschke(1.0 / w);
    }
    out.r_hat = S.r_hat;
    for (std::size_t i = 0; i < out.r_hat.size(); ++i)
        out.r_hat.values()[i] *= blaschke(out.r_hat.grid(i));
    for (std::size_t k : kept) {
        out.spectrum.lambda.push_back(sp.lambda[k]);
        out.spectrum.C.push_back(sp.C[k] * blaschke(sp.z(k)));
    }
    return out;
}

std::vector<cplx> resolution_constants(const ScatteringData& S, double L0) {
    const auto& sp = S.spectrum;
    for (std::size_t j = 0; j < sp.size(); ++j)
        if (std::abs(std::norm(sp.lambda[j]) - L0) > 1e-8)
            throw std::invalid_argument("resolution_constants: |lambda_j|^2 != L0");

    std::vector<cplx> out(sp.size());
    for (std::size_t j = 0; j < sp.size(); ++j) {
        const cplx zj = sp.z(j);
        const cplx wj = sp.w(j);
        auto fz = [&](double z) -> cplx {
            if (std::abs(z) < 1e-14) return {0.0, 0.0};
            const double lg = std::log(1.0 + z * std::norm(S.r_hat(z)));
            return lg * (1.0 / (z - zj) - 0.5 / z);
        };
        const cplx Iz = integrate(fz, -L0, L0, 40);
        const cplx expo_z = Iz / (pi * I);

        auto fw = [&](double w) -> cplx {
            if (std::abs(w) < 1e-14) return {0.0, 0.0};
            const double lg = std::log(1.0 + w * std::norm(S.r(w)));
            return lg * (1.0 / (w - wj) - 0.5 / w);
        };
        // improper tails truncated at the r-grid support (superpolynomial decay)
        const double wlo = S.r.x_min(), whi = S.r.x_max();
        cplx Iw{0.0, 0.0};
        if (wlo < -1.0 / L0) Iw += integrate(fw, wlo, -1.0 / L0, 40);
        if (whi > 1.0 / L0) Iw += integrate(fw, 1.0 / L0, whi, 40);
        const cplx expo_w = -Iw / (pi * I);

        if (std::abs(expo_w - expo_z) > 1e-6)
            throw std::runtime_error("resolution_constants: w-side and z-side integrals disagree");
        out[j] = sp.C[j] * std::exp(expo_z);
    }
    return out;
}

}  // namespace mtm
