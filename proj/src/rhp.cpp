#include "mtm/rhp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mtm/solitons.hpp"

namespace mtm {

namespace {

// FFT pair on a scratch buffer; FFTW plans are cheap to recreate with
// FFTW_ESTIMATE and the sizes repeat, so no global plan cache is needed
void fft_inplace(std::vector<cplx>& a, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(a.size()), p, p, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// trapezoid over the uniform grid; the carried functions decay at the ends,
// which makes this spectrally accurate (all Euler-Maclaurin boundary terms
// vanish up to the truncation tail)
cplx trapezoid(const std::vector<cplx>& v, double h) {
    cplx s(0.0, 0.0);
    for (const cplx& x : v) s += x;
    if (!v.empty()) s -= 0.5 * (v.front() + v.back());
    return s * h;
}

}  // namespace

void JumpProblem::validate() const {
    if (R.size() < 4) throw std::invalid_argument("JumpProblem: need at least 4 nodes");
    if (!(h > 0.0)) throw std::invalid_argument("JumpProblem: node spacing must be positive");
    for (const Mat2& m : R) {
        const cplx det = (Mat2::Identity() + m).determinant();
        if (std::abs(det - 1.0) > 1e-10)
            throw std::invalid_argument("JumpProblem: det(1+R) deviates from 1");
    }
}

double JumpProblem::sup_norm() const {
    double s = 0.0;
    for (const Mat2& m : R) s = std::max(s, m.cwiseAbs().maxCoeff());
    return s;
}

std::vector<cplx> hilbert_transform(const std::vector<cplx>& f) {
    const std::size_t n = f.size();
    if (n < 4) throw std::invalid_argument("hilbert_transform: need at least 4 samples");
    std::vector<cplx> a = f;
    fft_inplace(a, FFTW_FORWARD);
    // multiply by i*sgn(xi); zero and Nyquist modes carry no odd kernel
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n)
            a[k] *= I;
        else if (2 * k > n)
            a[k] *= -I;
        else
            a[k] = 0.0;
    }
    a[0] = 0.0;
    fft_inplace(a, FFTW_BACKWARD);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (cplx& x : a) x *= inv_n;
    return a;
}

namespace {

// Forward FFT of the periodization-correction kernel for n nodes, stored on a
// zero-padded grid of 2n lags (for linear convolution). The symbol rule above
// transforms the *periodized* data; for boundary values of the line transform
// the contribution of the periodic images must come off again, which is a
// convolution with the smooth odd kernel g(y) = cot(pi y/P)/P - 1/(pi y),
// P = n h. The spacing enters only through the dimensionless lag, so the
// cached table depends on n alone.
const std::vector<cplx>& image_kernel_fft(std::size_t n) {
    static std::map<std::size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const std::size_t m = 2 * n;
    const double dn = static_cast<double>(n);
    std::vector<cplx> B(m, cplx(0.0, 0.0));
    for (std::ptrdiff_t l = -static_cast<std::ptrdiff_t>(n) + 1;
         l < static_cast<std::ptrdiff_t>(n); ++l) {
        if (l == 0) continue;
        const double dl = static_cast<double>(l);
        // h * g(l h) with the spacing divided out; stored at lag -l because
        // the sum below is a cross-correlation
        const double val = std::cos(pi * dl / dn) / std::sin(pi * dl / dn) / dn - 1.0 / (pi * dl);
        const std::size_t idx = static_cast<std::size_t>(
            ((-l) + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
        B[idx] = val;
    }
    fft_inplace(B, FFTW_FORWARD);
    return cache.emplace(n, std::move(B)).first->second;
}

// Hilbert transform of data decaying at the grid ends, accurate for the line
// (not the circle): spectral symbol rule minus the periodic-image correction.
std::vector<cplx> hilbert_line(const std::vector<cplx>& f) {
    std::vector<cplx> a = hilbert_transform(f);
    const std::size_t n = f.size();
    const std::size_t m = 2 * n;
    const std::vector<cplx>& Bhat = image_kernel_fft(n);
    std::vector<cplx> A(m, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) A[i] = f[i];
    fft_inplace(A, FFTW_FORWARD);
    for (std::size_t k = 0; k < m; ++k) A[k] *= Bhat[k];
    fft_inplace(A, FFTW_BACKWARD);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) a[i] -= A[i] * inv_m;
    return a;
}

}  // namespace

cplx cauchy_transform(const SampledComplexFunction& f, cplx zeta) {
    if (zeta.imag() == 0.0)
        throw std::domain_error("cauchy_transform: real zeta; use cauchy_boundary");
    const std::size_t n = f.size();
    const double h = f.h();
    const std::vector<cplx>& v = f.values();
    const cplx norm = 1.0 / (2.0 * pi * I);
    if (std::abs(zeta.imag()) >= 5.0 * h) {
        std::vector<cplx> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = v[i] / (f.grid(i) - zeta);
        return norm * trapezoid(g, h);
    }
    // near the line: subtract the local quadratic of f at the closest node so
    // the remaining integrand is smooth on the grid scale
    const double a = f.x_min(), b = f.x_max();
    const double sc_raw = std::clamp(zeta.real(), a + 2.0 * h, b - 2.0 * h);
    const std::size_t ic = static_cast<std::size_t>(std::llround((sc_raw - a) / h));
    const double sc = f.grid(ic);
    const cplx f0 = v[ic];
    const cplx f1 = (v[ic + 1] - v[ic - 1]) / (2.0 * h);
    const cplx f2 = (v[ic + 1] - 2.0 * v[ic] + v[ic - 1]) / (h * h);
    std::vector<cplx> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = f.grid(i);
        const double d = s - sc;
        const cplx p = f0 + f1 * d + 0.5 * f2 * d * d;
        g[i] = (v[i] - p) / (s - zeta);
    }
    // closed-form moments of 1, (s-sc), (s-sc)^2 against the Cauchy kernel
    const cplx L0 = std::log((b - zeta) / (a - zeta));
    const cplx M1 = (b - a) + (zeta - sc) * L0;
    const cplx M2 = 0.5 * ((b - zeta) * (b - zeta) - (a - zeta) * (a - zeta)) +
                    2.0 * (zeta - sc) * (b - a) + (zeta - sc) * (zeta - sc) * L0;
    // the subtracted quadratic does not decay at the grid ends, so the
    // trapezoid rule needs its Euler-Maclaurin end correction there; with the
    // data itself negligible at the ends, g ~ -p/(s - zeta) analytically
    auto g_prime_end = [&](double s) -> cplx {
        const cplx pp = f1 + f2 * (s - sc);
        const cplx p = f0 + f1 * (s - sc) + 0.5 * f2 * (s - sc) * (s - sc);
        const cplx d = s - zeta;
        return -pp / d + p / (d * d);
    };
    const cplx em = -(h * h / 12.0) * (g_prime_end(b) - g_prime_end(a));
    return norm * (trapezoid(g, h) + em + f0 * L0 + f1 * M1 + 0.5 * f2 * M2);
}

SampledComplexFunction cauchy_boundary(const SampledComplexFunction& f, int side) {
    if (side != 1 && side != -1) throw std::invalid_argument("cauchy_boundary: side must be +-1");
    std::vector<cplx> H = hilbert_line(f.values());
    const double half = 0.5 * static_cast<double>(side);
    std::vector<cplx> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = half * f.values()[i] - 0.5 * I * H[i];
    return SampledComplexFunction(f.x0(), f.h(), std::move(out));
}

namespace {

// C^- applied entrywise to a matrix-valued node function
std::vector<Mat2> cauchy_minus_mat(const std::vector<Mat2>& g) {
    const std::size_t n = g.size();
    std::vector<Mat2> out(n, Mat2::Zero());
    std::vector<cplx> scratch(n);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < n; ++i) scratch[i] = g[i](r, c);
            std::vector<cplx> H = hilbert_line(scratch);
            for (std::size_t i = 0; i < n; ++i) out[i](r, c) = -0.5 * scratch[i] - 0.5 * I * H[i];
        }
    }
    return out;
}

std::vector<Mat2> mu_times_jump(const std::vector<Mat2>& mu, const std::vector<Mat2>& R) {
    std::vector<Mat2> g(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) g[i] = (Mat2::Identity() + mu[i]) * R[i];
    return g;
}

double sup_diff(const std::vector<Mat2>& a, const std::vector<Mat2>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return d;
}

// dense collocation solve of mu = C^-[mu R] + C^-[R], row by row. The
// discretized C^- is materialized by applying the FFT rule to unit vectors;
// feasible only for moderate node counts, which is why it is a guarded
// fallback rather than the primary path.
std::vector<Mat2> dense_solve(const JumpProblem& J) {
    const std::size_t n = J.size();
    if (n > 1024)
        throw std::runtime_error(
            "solve_small_norm: iteration does not contract and the problem is too large for the "
            "dense fallback; small-norm hypothesis violated");
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
    // columns of the discrete C^- operator
    Mat Cm(n, n);
    std::vector<cplx> e(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::vector<cplx> H = hilbert_line(e);
        for (std::size_t i = 0; i < n; ++i)
            Cm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (i == j ? cplx(-0.5, 0.0) : cplx(0.0, 0.0)) - 0.5 * I * H[i];
        e[j] = 0.0;
    }
    // unknown row (mu_r1, mu_r2): mu(s) = C^-[ sum_k mu_k R_kc ](s) + C^-[R_rc](s)
    const auto m = static_cast<Eigen::Index>(n);
    std::vector<Mat2> mu(n, Mat2::Zero());
    for (int r = 0; r < 2; ++r) {
        Mat A = Mat::Identity(2 * m, 2 * m);
        Vec rhs(2 * m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Mat2& Ri = J.R[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < m; ++j) {
                const Mat2& Rj = J.R[static_cast<std::size_t>(j)];
                for (int c = 0; c < 2; ++c) {
                    for (int k = 0; k < 2; ++k) {
                        A(i + c * m, j + k * m) -= Cm(i, j) * Rj(k, c);
                    }
                }
            }
            (void)Ri;
        }
        // rhs: C^-[R_r-row]
        for (int c = 0; c < 2; ++c) {
            std::vector<cplx> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = J.R[i](r, c);
            std::vector<cplx> H = hilbert_line(col);
            for (Eigen::Index i = 0; i < m; ++i)
                rhs(i + c * m) = -0.5 * col[static_cast<std::size_t>(i)] -
                                 0.5 * I * H[static_cast<std::size_t>(i)];
        }
        Vec sol = A.partialPivLu().solve(rhs);
        for (std::size_t i = 0; i < n; ++i) {
            mu[i](r, 0) = sol(static_cast<Eigen::Index>(i));
            mu[i](r, 1) = sol(static_cast<Eigen::Index>(i) + m);
        }
    }
    return mu;
}

}  // namespace

SmallNormSolution solve_small_norm(const JumpProblem& J) {
    J.validate();
    SmallNormSolution sol;
    sol.J = J;
    const std::size_t n = J.size();
    std::vector<Mat2> mu(n, Mat2::Zero());
    bool converged = false;
    if (J.sup_norm() < 0.5) {
        double prev = 1e300;
        int grow_streak = 0;
        for (int it = 0; it < 200; ++it) {
            std::vector<Mat2> next = cauchy_minus_mat(mu_times_jump(mu, J.R));
            const double d = sup_diff(next, mu);
            mu.swap(next);
            sol.iterations = it + 1;
            if (d <= 1e-12) {
                converged = true;
                break;
            }
            grow_streak = (d > prev) ? grow_streak + 1 : 0;
            if (grow_streak >= 3) break;  // not contracting
            prev = d;
        }
    }
    if (!converged) {
        mu = dense_solve(J);
        sol.used_dense = true;
    }
    sol.mu = std::move(mu);
    // defect of the singular integral equation
    std::vector<Mat2> check = cauchy_minus_mat(mu_times_jump(sol.mu, J.R));
    sol.residual = sup_diff(check, sol.mu);
    // moment: lim zeta (M - 1) = -(1/2pi i) Int (mu+1) R ds
    std::vector<Mat2> g = mu_times_jump(sol.mu, J.R);
    Mat2 acc = Mat2::Zero();
    for (const Mat2& m : g) acc += m;
    acc -= 0.5 * (g.front() + g.back());
    sol.moment = -(J.h / (2.0 * pi * I)) * acc;
    return sol;
}

Mat2 SmallNormSolution::M_at(cplx zeta) const {
    const std::size_t n = J.size();
    std::vector<Mat2> g = mu_times_jump(mu, J.R);
    Mat2 out = Mat2::Identity();
    std::vector<cplx> scratch(n);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < n; ++i) scratch[i] = g[i](r, c);
            SampledComplexFunction f(J.x0, J.h, scratch);
            out(r, c) += cauchy_transform(f, zeta);
        }
    }
    return out;
}

std::vector<Mat2> SmallNormSolution::M_plus() const {
    std::vector<Mat2> g = mu_times_jump(mu, J.R);
    std::vector<Mat2> out = cauchy_minus_mat(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += Mat2::Identity() + g[i];
    return out;
}

std::vector<Mat2> SmallNormSolution::M_minus() const {
    std::vector<Mat2> out = cauchy_minus_mat(mu_times_jump(mu, J.R));
    for (Mat2& m : out) m += Mat2::Identity();
    return out;
}

Mat2 SmallNormSolution::M_at_zero() const {
    // principal value of Int (mu+1)R(s)/s ds; the jump vanishes at the origin
    // so the integrand is regular there (the origin node is skipped, its
    // limit value being a single trapezoid weight of a bounded quantity)
    std::vector<Mat2> g = mu_times_jump(mu, J.R);
    Mat2 acc = Mat2::Zero();
    const std::size_t n = J.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = J.node(i);
        if (std::abs(s) < 0.5 * J.h) continue;
        const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += (wgt / s) * g[i];
    }
    return Mat2::Identity() + (J.h / (2.0 * pi * I)) * acc;
}

namespace {

JumpProblem assemble_w_jump(const SampledComplexFunction& r, double t, double x,
                            const ReconstructParams& prm) {
    JumpProblem J;
    const std::size_t n = prm.n_nodes;
    J.h = 2.0 * prm.s_max / static_cast<double>(n - 1);
    J.x0 = -prm.s_max;
    J.R.assign(n, Mat2::Zero());
    for (std::size_t i = 0; i < n; ++i) {
        const double w = J.node(i);
        if (std::abs(w) < 0.5 * J.h) continue;  // jump vanishes at the origin
        const cplx rw = r(w);
        if (std::abs(rw) < 1e-300) continue;
        const cplx ph = std::exp(phase_exponent(w, t, x));
        J.R[i](0, 0) = w * std::norm(rw);
        J.R[i](0, 1) = std::conj(rw) * ph;
        J.R[i](1, 0) = w * rw / ph;
    }
    return J;
}

JumpProblem assemble_z_jump(const SampledComplexFunction& r_hat, double t, double x,
                            const ReconstructParams& prm) {
    JumpProblem J;
    const std::size_t n = prm.n_nodes;
    J.h = 2.0 * prm.s_max / static_cast<double>(n - 1);
    J.x0 = -prm.s_max;
    J.R.assign(n, Mat2::Zero());
    for (std::size_t i = 0; i < n; ++i) {
        const double z = J.node(i);
        if (std::abs(z) < 0.5 * J.h) continue;
        const cplx rz = r_hat(z);
        if (std::abs(rz) < 1e-300) continue;
        const cplx ph = std::exp(phase_exponent_z(z, t, x));
        J.R[i](0, 1) = -std::conj(rz) * ph;
        J.R[i](1, 0) = -z * rz / ph;
        J.R[i](1, 1) = z * std::norm(rz);
    }
    return J;
}

double sup_abs(const SampledComplexFunction& f) {
    double m = 0.0;
    for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

FieldState reconstruct_fields(const ScatteringData& S, double t, double x_min, double x_max,
                              double dx, const ReconstructParams& prm) {
    if (!(dx > 0.0) || !(x_max > x_min))
        throw std::invalid_argument("reconstruct_fields: bad output grid");
    const double refl_sup = std::max(S.r.size() ? sup_abs(S.r) : 0.0,
                                     S.r_hat.size() ? sup_abs(S.r_hat) : 0.0);
    if (!S.spectrum.lambda.empty()) {
        if (refl_sup > 1e-6)
            throw std::invalid_argument(
                "reconstruct_fields: data carries both poles and radiation; only the soliton-free "
                "path and the pure-soliton dispatch are supported");
        SolitonData D;
        D.lambda = S.spectrum.lambda;
        D.C = S.spectrum.C;
        // the pole ansatz carries the time dependence in its exponents, the
        // same way the radiation jump does, so the data passes through as-is
        const auto n = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
        FieldState f = n_soliton(D, t, x_min, dx, n);
        return f;
    }
    const auto n_out = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
    FieldState out;
    out.t = t;
    out.x_start = x_min;
    out.dx = dx;
    out.u.assign(n_out, cplx(0.0, 0.0));
    out.v.assign(n_out, cplx(0.0, 0.0));
    if (refl_sup == 0.0) return out;
    for (std::size_t i = 0; i < n_out; ++i) {
        const double x = out.x(i);
        SmallNormSolution Mw = solve_small_norm(assemble_w_jump(S.r, t, x, prm));
        // conj(u) e^{-i phi/2} is the 12-moment and [M(0)]_11 = e^{-i phi/2}
        // with real phi, so u = conj(moment_12) * [M(0)]_11
        out.u[i] = std::conj(Mw.moment(0, 1)) * Mw.M_at_zero()(0, 0);
        SmallNormSolution Mz = solve_small_norm(assemble_z_jump(S.r_hat, t, x, prm));
        out.v[i] = std::conj(Mz.moment(0, 1)) * Mz.M_at_zero()(0, 0);
    }
    return out;
}

}  // namespace mtm
