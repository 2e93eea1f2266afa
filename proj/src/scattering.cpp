#include "mtm/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include <json.hpp>

namespace mtm {

void DiscreteSpectrum::validate() const {
    if (lambda.size() != C.size())
        throw std::invalid_argument("DiscreteSpectrum: length mismatch");
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (!(lambda[j].real() < 0.0 && lambda[j].imag() > 0.0))
            throw std::invalid_argument("DiscreteSpectrum: eigenvalue outside the second quadrant");
        if (C[j] == cplx(0.0, 0.0))
            throw std::invalid_argument("DiscreteSpectrum: zero norming constant");
        for (std::size_t k = j + 1; k < lambda.size(); ++k)
            if (std::abs(lambda[j] - lambda[k]) < 1e-12)
                throw std::invalid_argument("DiscreteSpectrum: eigenvalues not distinct");
    }
}

namespace {

// Precomputed field interpolants (including 4th-order derivatives) and the
// support window outside which the potential terms vanish to 1e-13.
struct Prepared {
    double x0 = 0.0, dx = 0.0;
    std::size_t n = 0;
    std::vector<cplx> u, v, ux, vx;
    std::size_t i0 = 0, i1 = 0;  // support cell range: cells [i0, i1)
    bool empty = true;

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }

    // 4-point Lagrange interpolation of samples `q` at global coordinate xx
    cplx interp(const std::vector<cplx>& q, double xx) const {
        double s = (xx - x0) / dx;
        auto i = static_cast<std::ptrdiff_t>(std::floor(s));
        std::ptrdiff_t j0 = i - 1;
        if (j0 < 0) j0 = 0;
        if (j0 > static_cast<std::ptrdiff_t>(n) - 4) j0 = static_cast<std::ptrdiff_t>(n) - 4;
        const double t = s - static_cast<double>(j0);
        const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        return l0 * q[j0] + l1 * q[j0 + 1] + l2 * q[j0 + 2] + l3 * q[j0 + 3];
    }
};

Prepared prepare(const FieldState& f) {
    f.validate();
    Prepared p;
    p.x0 = f.x_start;
    p.dx = f.dx;
    p.n = f.size();
    p.u = f.u;
    p.v = f.v;
    p.ux.assign(p.n, cplx(0, 0));
    p.vx.assign(p.n, cplx(0, 0));
    const double inv12 = 1.0 / (12.0 * p.dx);
    for (std::size_t i = 2; i + 2 < p.n; ++i) {
        p.ux[i] = (8.0 * (f.u[i + 1] - f.u[i - 1]) - (f.u[i + 2] - f.u[i - 2])) * inv12;
        p.vx[i] = (8.0 * (f.v[i + 1] - f.v[i - 1]) - (f.v[i + 2] - f.v[i - 2])) * inv12;
    }
    std::size_t lo = p.n, hi = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
        if (std::abs(f.u[i]) + std::abs(f.v[i]) > 1e-13) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (lo > hi) return p;  // identically ~zero
    p.empty = false;
    p.i0 = lo >= 3 ? lo - 3 : 0;
    p.i1 = std::min(hi + 3, p.n - 1);
    return p;
}

// Potential block of the dressed first-column problem. The free phase
// (rate mu = 2 i theta on the w-side, -2 i theta_hat on the z-side) is
// factored out exactly per cell; only these entries are integrated.
struct PotentialEval {
    const Prepared* p;
    cplx param;  // w or z
    bool w_side;

    void eval(double xx, cplx& a11, cplx& a12, cplx& a21) const {
        const cplx u = p->interp(p->u, xx);
        const cplx v = p->interp(p->v, xx);
        const double nu = std::norm(u), nv = std::norm(v);
        const cplx half_i(0.0, 0.5);
        if (w_side) {
            const cplx w = param;
            const cplx ux = p->interp(p->ux, xx);
            a11 = cplx(0.0, -0.25) * (nu + nv) + half_i * u * std::conj(v) / w;
            a12 = half_i * (std::conj(u) - std::conj(v) / w);
            a21 = ux - half_i * (v + u * nv) + half_i * (u + u * u * std::conj(v)) / w;
        } else {
            const cplx z = param;
            const cplx vx = p->interp(p->vx, xx);
            a11 = cplx(0.0, 0.25) * (nu + nv) - half_i * v * std::conj(u) / z;
            a12 = half_i * (std::conj(u) / z - std::conj(v));
            a21 = vx + half_i * (u + nu * v) - half_i * (v + v * v * std::conj(u)) / z;
        }
    }
};

struct CellDeriv {
    const PotentialEval* pe;
    double anchor;  // phase anchor
    cplx mu;

    void operator()(double xx, const cplx z1, const cplx z2, cplx& d1, cplx& d2) const {
        cplx a11, a12, a21;
        pe->eval(xx, a11, a12, a21);
        const cplx ph = std::exp(mu * (xx - anchor));
        d1 = a11 * z1 + a12 * ph * z2;
        d2 = a21 * z1 / ph - a11 * z2;
    }
};

// One RK4 pass across a cell [xa, xb] (xb < xa allowed for backward runs).
void rk4_cell(const CellDeriv& D, double xa, double xb, int nsub, cplx& z1, cplx& z2) {
    const double h = (xb - xa) / nsub;
    double xx = xa;
    for (int k = 0; k < nsub; ++k) {
        cplx k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        D(xx, z1, z2, k1a, k1b);
        D(xx + 0.5 * h, z1 + 0.5 * h * k1a, z2 + 0.5 * h * k1b, k2a, k2b);
        D(xx + 0.5 * h, z1 + 0.5 * h * k2a, z2 + 0.5 * h * k2b, k3a, k3b);
        D(xx + h, z1 + h * k3a, z2 + h * k3b, k4a, k4b);
        z1 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        z2 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        xx += h;
    }
}

int substeps_for(cplx mu, double dx) {
    const int ns = static_cast<int>(std::ceil(std::abs(mu) * dx / 0.05));
    return std::clamp(ns, 1, 64);
}

struct JostRun {
    cplx phi1_end, phi2_end;  // dressed first column at the support end
    double x_end;
    // optionally recorded dressed columns at each node of [i0, i1]
    std::vector<cplx> rec1, rec2;
};

// Forward integration of the dressed first Jost column across the support.
// record=true keeps the column at every node in [i0, i1].
JostRun integrate_forward(const Prepared& p, cplx param, bool w_side, bool record = false) {
    const cplx theta = w_side ? 0.25 * (param - 1.0 / param) : 0.25 * (param - 1.0 / param);
    const cplx mu = w_side ? 2.0 * I * theta : -2.0 * I * theta;
    PotentialEval pe{&p, param, w_side};
    const int ns = substeps_for(mu, p.dx);
    JostRun out;
    cplx z1(1.0, 0.0), z2(0.0, 0.0);
    if (record) {
        out.rec1.reserve(p.i1 - p.i0 + 1);
        out.rec2.reserve(p.i1 - p.i0 + 1);
        out.rec1.push_back(z1);
        out.rec2.push_back(z2);
    }
    for (std::size_t i = p.i0; i < p.i1; ++i) {
        const double xa = p.x(i), xb = p.x(i + 1);
        CellDeriv D{&pe, xa, mu};
        rk4_cell(D, xa, xb, ns, z1, z2);
        z2 *= std::exp(mu * (xb - xa));  // exact free phase across the cell
        if (record) {
            out.rec1.push_back(z1);
            out.rec2.push_back(z2);
        }
    }
    out.phi1_end = z1;
    out.phi2_end = z2;
    out.x_end = p.x(p.i1);
    return out;
}

// Backward integration of the dressed second Jost column (normalized at the
// right end) down to the left end of the support, recording every node.
JostRun integrate_backward(const Prepared& p, cplx param, bool w_side) {
    const cplx theta = 0.25 * (param - 1.0 / param);
    const cplx mu = w_side ? 2.0 * I * theta : -2.0 * I * theta;
    PotentialEval pe{&p, param, w_side};
    const int ns = substeps_for(mu, p.dx);
    JostRun out;
    const std::size_t m = p.i1 - p.i0 + 1;
    out.rec1.assign(m, cplx(0, 0));
    out.rec2.assign(m, cplx(0, 0));
    cplx z1(0.0, 0.0), z2(1.0, 0.0);
    out.rec1[m - 1] = z1;
    out.rec2[m - 1] = z2;
    for (std::size_t i = p.i1; i > p.i0; --i) {
        const double xb = p.x(i), xa = p.x(i - 1);
        CellDeriv D{&pe, xb, mu};  // anchor at the right edge of the cell
        rk4_cell(D, xb, xa, ns, z1, z2);
        // component 1 of this column carries the factor exp(-mu (x - anchor))
        z1 *= std::exp(mu * (xb - xa));
        out.rec1[i - 1 - p.i0] = z1;
        out.rec2[i - 1 - p.i0] = z2;
    }
    out.phi1_end = z1;
    out.phi2_end = z2;
    out.x_end = p.x(p.i0);
    return out;
}

std::pair<cplx, cplx> read_off(const JostRun& run, cplx param, bool w_side) {
    const cplx theta = 0.25 * (param - 1.0 / param);
    const cplx a = run.phi1_end;
    cplx b(0.0, 0.0);
    if (std::abs(param.imag()) < 1e-14) {
        const cplx mu = w_side ? 2.0 * I * theta : -2.0 * I * theta;
        b = run.phi2_end * std::exp(-mu * run.x_end) / param;
    }
    return {a, b};
}

std::pair<cplx, cplx> transition_impl(const Prepared& p, cplx param, bool w_side) {
    if (param == cplx(0.0, 0.0)) throw std::domain_error("transition: spectral parameter is 0");
    if (p.empty) return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
    return read_off(integrate_forward(p, param, w_side), param, w_side);
}

SampledComplexFunction reflection_impl(const Prepared& p, double lo, double hi, std::size_t n,
                                       bool w_side) {
    std::vector<cplx> vals(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double min_a = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = lo + static_cast<double>(i) * h;
        if (std::abs(s) < 1e-9) {
            vals[i] = cplx(0.0, 0.0);  // r is bounded near 0 after the s*r(s) weight
            continue;
        }
        auto [a, b] = transition_impl(p, cplx(s, 0.0), w_side);
        min_a = std::min(min_a, std::abs(a));
        vals[i] = b / a;
    }
    if (min_a < 1e-6)
        throw std::runtime_error("reflection: resonance (|a| < 1e-6 on the real axis)");
    return SampledComplexFunction(lo, h, std::move(vals));
}

cplx a_value(const Prepared& p, cplx w) {
    if (p.empty) return cplx(1.0, 0.0);
    return integrate_forward(p, w, true).phi1_end;
}

// Winding of a(w) along the segment from wa to wb, adaptive in the phase.
double edge_winding(const Prepared& p, cplx wa, cplx wb, cplx fa, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 * pi || depth > 24) return d;
    const cplx wm = 0.5 * (wa + wb);
    const cplx fm = a_value(p, wm);
    return edge_winding(p, wa, wm, fa, fm, depth + 1) +
           edge_winding(p, wm, wb, fm, fb, depth + 1);
}

int box_winding(const Prepared& p, double re0, double re1, double im0, double im1) {
    // corner samples plus a few intermediate points per edge to seed adaptivity
    const int seed = 8;
    std::vector<cplx> pts;
    auto add_edge = [&](cplx a, cplx b) {
        for (int k = 0; k < seed; ++k)
            pts.push_back(a + (b - a) * (static_cast<double>(k) / seed));
    };
    const cplx c1(re0, im0), c2(re1, im0), c3(re1, im1), c4(re0, im1);
    add_edge(c1, c2);
    add_edge(c2, c3);
    add_edge(c3, c4);
    add_edge(c4, c1);
    pts.push_back(c1);
    double total = 0.0;
    cplx fprev = a_value(p, pts[0]);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const cplx f = a_value(p, pts[k]);
        total += edge_winding(p, pts[k - 1], pts[k], fprev, f, 0);
        fprev = f;
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

cplx newton_polish(const Prepared& p, cplx w0) {
    cplx w = w0;
    for (int it = 0; it < 40; ++it) {
        const cplx f = a_value(p, w);
        if (std::abs(f) <= 1e-11) break;
        const double h = 1e-6;
        const cplx fp = (a_value(p, w + h) - a_value(p, w - h)) / (2.0 * h);
        if (std::abs(fp) < 1e-12) break;
        cplx step = f / fp;
        // stay inside the upper half plane
        if ((w - step).imag() <= 0.0)
            step *= 0.5 * w.imag() / std::max(std::abs(step.imag()), 1e-300);
        w -= step;
    }
    return w;
}

void quadrisect(const Prepared& p, double re0, double re1, double im0, double im1,
                std::vector<cplx>& zeros) {
    const int wind = box_winding(p, re0, re1, im0, im1);
    if (wind == 0) return;
    if (std::max(re1 - re0, im1 - im0) < 1e-3) {
        const cplx w = newton_polish(p, cplx(0.5 * (re0 + re1), 0.5 * (im0 + im1)));
        if (std::abs(a_value(p, w)) > 1e-10)
            throw std::runtime_error("find_eigenvalues: Newton polish failed to converge");
        zeros.push_back(w);
        return;
    }
    // split slightly off-center to dodge zeros on the cut lines
    const double rm = re0 + 0.5003 * (re1 - re0);
    const double im = im0 + 0.5003 * (im1 - im0);
    std::size_t before = zeros.size();
    quadrisect(p, re0, rm, im0, im, zeros);
    quadrisect(p, rm, re1, im0, im, zeros);
    quadrisect(p, re0, rm, im, im1, zeros);
    quadrisect(p, rm, re1, im, im1, zeros);
    if (static_cast<int>(zeros.size() - before) != wind)
        throw std::runtime_error("find_eigenvalues: zero count mismatch between contour levels");
}

cplx cauchy_derivative(const Prepared& p, cplx w0) {
    // 16-point trapezoid of a(w)/(w-w0)^2 on a circle (spectrally accurate)
    const double rho = std::max(1e-3, 1e-3 * std::abs(w0));
    cplx sum(0.0, 0.0);
    for (int k = 0; k < 16; ++k) {
        const double phi = 2.0 * pi * k / 16.0;
        const cplx e = std::polar(1.0, phi);
        sum += a_value(p, w0 + rho * e) / e;
    }
    return sum / (16.0 * rho);
}

cplx lambda_from_w(cplx w) {
    // second-quadrant root of lambda^2 = 1/w for w in the upper half plane
    return -std::sqrt(1.0 / w);
}

}  // namespace

std::pair<cplx, cplx> transition_w(const FieldState& fields, cplx w) {
    Prepared p = prepare(fields);
    return transition_impl(p, w, true);
}

std::pair<cplx, cplx> transition_z(const FieldState& fields, cplx z) {
    Prepared p = prepare(fields);
    return transition_impl(p, z, false);
}

cplx transition_a_w(const FieldState& fields, cplx w) {
    Prepared p = prepare(fields);
    return a_value(p, w);
}

SampledComplexFunction reflection_w(const FieldState& fields, double w_min, double w_max,
                                    std::size_t n) {
    Prepared p = prepare(fields);
    return reflection_impl(p, w_min, w_max, n, true);
}

SampledComplexFunction reflection_z(const FieldState& fields, double z_min, double z_max,
                                    std::size_t n) {
    Prepared p = prepare(fields);
    return reflection_impl(p, z_min, z_max, n, false);
}

std::vector<cplx> find_eigenvalues(const FieldState& fields, const EigenvalueSearchBox& box) {
    Prepared p = prepare(fields);
    std::vector<cplx> zeros;
    if (p.empty) return zeros;
    const double im0 = std::max(box.im_min, 1e-3);  // stay off the continuous spectrum
    quadrisect(p, box.re_min, box.re_max, im0, box.im_max, zeros);
    std::vector<cplx> lambdas(zeros.size());
    for (std::size_t j = 0; j < zeros.size(); ++j) lambdas[j] = lambda_from_w(zeros[j]);
    std::sort(lambdas.begin(), lambdas.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return lambdas;
}

NormingConstants norming_constants(const FieldState& fields, const std::vector<cplx>& lambda) {
    Prepared p = prepare(fields);
    if (p.empty && !lambda.empty())
        throw std::invalid_argument("norming_constants: zero fields admit no eigenvalues");
    NormingConstants out;
    for (cplx lam : lambda) {
        const cplx wj = 1.0 / (lam * lam);
        if (std::abs(a_value(p, wj)) > 1e-8)
            throw std::invalid_argument("norming_constants: |a(w_j)| > 1e-8, not an eigenvalue");
        JostRun fwd = integrate_forward(p, wj, true, true);
        JostRun bwd = integrate_backward(p, wj, true);
        const cplx theta = 0.25 * (wj - 1.0 / wj);

        // proportionality window: central part of the support
        const std::size_t m = fwd.rec1.size();
        const double x_lo = p.x(p.i0), x_hi = p.x(p.i1);
        const double xc = 0.5 * (x_lo + x_hi);
        const double half = std::min(4.0, 0.25 * (x_hi - x_lo));
        cplx num(0.0, 0.0);
        double den = 0.0, lnorm = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double xx = p.x(p.i0 + k);
            if (std::abs(xx - xc) > half) continue;
            // left column Psi_1^- and right column Psi_2^+ at this node
            const cplx el = std::exp(-I * theta * xx);
            const cplx er = std::exp(I * theta * xx);
            const cplx l1 = fwd.rec1[k] * el, l2 = fwd.rec2[k] * el;
            const cplx r1 = bwd.rec1[k] * er, r2 = bwd.rec2[k] * er;
            num += std::conj(r1) * l1 + std::conj(r2) * l2;
            den += std::norm(r1) + std::norm(r2);
            lnorm += std::norm(l1) + std::norm(l2);
        }
        const cplx Gamma = num / den;
        double resid = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double xx = p.x(p.i0 + k);
            if (std::abs(xx - xc) > half) continue;
            const cplx el = std::exp(-I * theta * xx);
            const cplx er = std::exp(I * theta * xx);
            resid += std::norm(fwd.rec1[k] * el - Gamma * bwd.rec1[k] * er) +
                     std::norm(fwd.rec2[k] * el - Gamma * bwd.rec2[k] * er);
        }
        resid = std::sqrt(resid / lnorm);
        if (resid > 1e-4)
            throw std::runtime_error("norming_constants: proportionality residual > 1e-4");

        const cplx ap = cauchy_derivative(p, wj);
        const cplx cj = Gamma / (wj * ap);
        const cplx l2c = lam * lam;
        out.c.push_back(cj);
        out.C.push_back(-0.5 * l2c * l2c * cj);
        out.c_hat.push_back(-l2c * cj);
        out.a_prime.push_back(ap);
        out.residuals.push_back(resid);
    }
    return out;
}

ScatteringData scattering_data(const FieldState& fields, const ScatterParams& params) {
    Prepared p = prepare(fields);
    ScatteringData S;
    S.r = reflection_impl(p, params.w_min, params.w_max, params.n_grid, true);
    S.r_hat = reflection_impl(p, params.w_min, params.w_max, params.n_grid, false);
    if (params.find_spectrum) {
        std::vector<cplx> lam = find_eigenvalues(fields, params.box);
        if (!lam.empty()) {
            NormingConstants nc = norming_constants(fields, lam);
            S.spectrum.lambda = lam;
            S.spectrum.C = nc.C;
        }
    }
    return S;
}

ScatteringData evolve_scattering(const ScatteringData& S, double t) {
    ScatteringData out = S;
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        const double w = out.r.grid(i);
        if (w != 0.0) out.r.values()[i] *= std::exp(-0.5 * I * t * (w + 1.0 / w));
    }
    for (std::size_t i = 0; i < out.r_hat.size(); ++i) {
        const double z = out.r_hat.grid(i);
        if (z != 0.0) out.r_hat.values()[i] *= std::exp(-0.5 * I * t * (z + 1.0 / z));
    }
    for (std::size_t j = 0; j < out.spectrum.size(); ++j) {
        const cplx l2 = out.spectrum.lambda[j] * out.spectrum.lambda[j];
        out.spectrum.C[j] *= std::exp(-0.5 * I * t * (l2 + 1.0 / l2));
    }
    return out;
}

std::string to_json(const ScatteringData& S) {
    nlohmann::json j;
    auto dump = [](const SampledComplexFunction& f) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < f.size(); ++i)
            arr.push_back({f.grid(i), f.values()[i].real(), f.values()[i].imag()});
        return arr;
    };
    j["r"] = dump(S.r);
    j["r_hat"] = dump(S.r_hat);
    j["spectrum"] = nlohmann::json::array();
    for (std::size_t k = 0; k < S.spectrum.size(); ++k) {
        j["spectrum"].push_back(
            {{"lambda", {S.spectrum.lambda[k].real(), S.spectrum.lambda[k].imag()}},
             {"C", {S.spectrum.C[k].real(), S.spectrum.C[k].imag()}}});
    }
    return j.dump(2);
}

ScatteringData scattering_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    auto parse_fn = [](const nlohmann::json& arr) {
        std::vector<double> grid;
        std::vector<cplx> vals;
        for (const auto& row : arr) {
            grid.push_back(row[0].get<double>());
            vals.emplace_back(row[1].get<double>(), row[2].get<double>());
        }
        return SampledComplexFunction(grid, std::move(vals));
    };
    ScatteringData S;
    S.r = parse_fn(j.at("r"));
    S.r_hat = parse_fn(j.at("r_hat"));
    for (const auto& e : j.at("spectrum")) {
        S.spectrum.lambda.emplace_back(e.at("lambda")[0].get<double>(),
                                       e.at("lambda")[1].get<double>());
        S.spectrum.C.emplace_back(e.at("C")[0].get<double>(), e.at("C")[1].get<double>());
    }
    return S;
}

void save_scattering(const ScatteringData& S, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_scattering: cannot open " + path);
    out << to_json(S);
}

ScatteringData load_scattering(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_scattering: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scattering_from_json(text);
}

}  // namespace mtm
