#include "mtm/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "mtm/quadrature.hpp"
#include "mtm/special.hpp"

namespace mtm {

namespace {

double log_term(double one_plus) {
    if (!(one_plus > 1e-14))
        throw std::runtime_error("asymptotics: 1 + rho*rho_breve is not positive");
    return std::log(one_plus);
}

// principal-value integral over [a, b] with pole p strictly inside,
// by analytic subtraction of the pole's residue function value
template <typename F>
double pv_integral(F&& f, double p, double a, double b) {
    const double fp = f(p);
    auto g = [&](double s) -> double {
        const double d = s - p;
        if (std::abs(d) < 1e-12) return 0.0;  // removable after subtraction
        return (f(s) - fp) / d;
    };
    return integrate(g, a, b, 20) + fp * std::log((b - p) / (p - a));
}

double kappa_of(const SampledComplexFunction& rc, double s) {
    return log_term(1.0 + s * std::norm(rc(s))) / (2.0 * pi);
}

// kappa(s)/s, finite at s = 0 because kappa vanishes linearly there
double kappa_over_s(const SampledComplexFunction& rc, double s) {
    if (std::abs(s) < 1e-9) return std::norm(rc(s)) / (2.0 * pi);
    return kappa_of(rc, s) / s;
}

double z0_of_speed(double speed) {
    if (!(speed > -1.0 && speed < 1.0))
        throw std::domain_error("asymptotics: speed outside (-1, 1)");
    return std::sqrt((1.0 - speed) / (1.0 + speed));
}

// shared argument structure of the amplitude formulas; sigma = +-1 selects
// the f_plus / f_minus member, extra carries route-specific phase terms
double amplitude_arg(const SampledComplexFunction& rc, double s0, int sigma, double extra) {
    const double ks = kappa_of(rc, sigma * s0);
    auto i1 = [&](double s) -> double {
        const double d = s - sigma * s0;
        if (std::abs(d) < 1e-12) return 0.0;
        return (kappa_of(rc, s) - sigma * (s / s0) * ks) / d;
    };
    auto i2 = [&](double s) -> double { return kappa_of(rc, s) / (s - sigma * s0); };
    auto i3 = [&](double s) -> double { return kappa_over_s(rc, s); };
    const double I1 = integrate(i1, 0.0, sigma * s0, 20);
    const double I2 = integrate(i2, 0.0, -sigma * s0, 20);
    const double I3 = integrate(i3, -s0, s0, 20);
    const double arg_gamma = log_gamma(cplx(0.0, -sigma * ks)).imag();
    // the plus member carries an additional half-turn; fixed empirically
    // against demodulated long-time simulation output, and consistent with
    // the small-data stationary-phase limit of the model problem
    const double plus_half_turn = (sigma > 0) ? pi : 0.0;
    return -sigma * pi / 4.0 + plus_half_turn + std::arg(rc(sigma * s0)) + arg_gamma -
           2.0 * sigma * I1 + 2.0 * sigma * I2 - sigma * ks + I3 + extra;
}

}  // namespace

double RhoPair::nu(double zeta) const {
    const cplx prod = rho(zeta) * rho_breve(zeta);
    return log_term(1.0 + prod.real()) / (2.0 * pi);
}

RhoPair rho_pair(const ScatteringData& S, double s0, char side, double zeta_max, std::size_t n) {
    if (s0 == 0.0) throw std::domain_error("rho_pair: s0 must be nonzero");
    if (side != 'w' && side != 'z') throw std::invalid_argument("rho_pair: side must be 'w' or 'z'");
    const SampledComplexFunction& rc = (side == 'z') ? S.r_hat : S.r;
    const double support = std::min(std::abs(rc.x_min()), std::abs(rc.x_max()));
    const double Z = std::min(zeta_max, 0.999 * support / std::abs(s0));
    if (!(Z > 1.0))
        throw std::domain_error("rho_pair: s0 too large for the sampled reflection support");
    const double h = 2.0 * Z / static_cast<double>(n - 1);
    std::vector<cplx> rv(n), bv(n);
    if (side == 'z') {
        for (std::size_t i = 0; i < n; ++i) {
            const double zeta = -Z + static_cast<double>(i) * h;
            const cplx rh = rc(s0 * zeta);
            rv[i] = -s0 * zeta * rh;
            bv[i] = -std::conj(rh);
        }
    } else {
        const double a = rc.x_min(), b = rc.x_max();
        for (std::size_t i = 0; i < n; ++i) {
            const double zeta = -Z + static_cast<double>(i) * h;
            const double w = s0 * zeta;
            const cplx rw = rc(w);
            // d-(w) d+(w) = exp(-2i PV Int kappa(s)/(s-w) ds): unimodular
            double pv;
            if (w > a && w < b) {
                pv = pv_integral([&](double s) { return kappa_of(rc, s); }, w, a, b);
            } else {
                pv = integrate([&](double s) -> double { return kappa_of(rc, s) / (s - w); }, a, b,
                               20);
            }
            const cplx dd = std::exp(cplx(0.0, -2.0 * pv));
            rv[i] = w * rw / dd;
            bv[i] = std::conj(rw) * dd;
        }
    }
    RhoPair P;
    P.rho = SampledComplexFunction(-Z, h, std::move(rv));
    P.rho_breve = SampledComplexFunction(-Z, h, std::move(bv));
    return P;
}

cplx delta_fn(const RhoPair& P, cplx zeta) {
    if (std::abs(zeta - 1.0) < 1e-12 || std::abs(zeta + 1.0) < 1e-12)
        throw std::domain_error("delta_fn: zeta at an endpoint of the cut");
    const double dist = (zeta.real() < -1.0)  ? std::abs(zeta + 1.0)
                        : (zeta.real() > 1.0) ? std::abs(zeta - 1.0)
                                              : std::abs(zeta.imag());
    cplx integral;
    if (dist > 0.1) {
        integral = integrate([&](double s) -> cplx { return P.nu(s) / (s - zeta); }, -1.0, 1.0, 20);
    } else {
        // subtraction at the nearest cut point keeps the quadrature regular
        const double sc = std::clamp(zeta.real(), -1.0, 1.0);
        const double nc = P.nu(sc);
        integral =
            integrate([&](double s) -> cplx { return (P.nu(s) - nc) / (s - zeta); }, -1.0, 1.0, 20) +
            nc * std::log((1.0 - zeta) / (-1.0 - zeta));
    }
    return std::exp(-I * integral);
}

std::pair<cplx, cplx> delta_boundary(const RhoPair& P, double s) {
    if (!(s > -1.0 && s < 1.0)) throw std::domain_error("delta_boundary: s outside (-1, 1)");
    const double ns = P.nu(s);
    const double pv =
        integrate([&](double t) -> double { return (P.nu(t) - ns) / (t - s); }, -1.0, 1.0, 20) +
        ns * std::log((1.0 - s) / (1.0 + s));
    const cplx dp = std::exp(cplx(pi * ns, -pv));
    const cplx dm = std::exp(cplx(-pi * ns, -pv));
    return {dp, dm};
}

AsymptoticCoefficients delta0_pm(const RhoPair& P) {
    AsymptoticCoefficients A;
    A.nu0_minus = P.nu(-1.0);
    A.nu0_plus = P.nu(1.0);
    auto reg_plus = [&](double s) -> double {
        const double d = s - 1.0;
        if (std::abs(d) < 1e-12) return 0.0;
        return (P.nu(s) - s * A.nu0_plus) / d;
    };
    auto reg_minus = [&](double s) -> double {
        const double d = s + 1.0;
        if (std::abs(d) < 1e-12) return 0.0;
        return (P.nu(s) + s * A.nu0_minus) / d;
    };
    const double Ip1 = integrate(reg_plus, 0.0, 1.0, 20);
    const double Ip2 = integrate([&](double s) -> double { return P.nu(s) / (s - 1.0); }, 0.0, -1.0,
                                 20);
    A.delta0_plus = std::exp(cplx(0.0, -Ip1 + Ip2 - A.nu0_plus));
    const double Im1 = integrate(reg_minus, 0.0, -1.0, 20);
    const double Im2 = integrate([&](double s) -> double { return P.nu(s) / (s + 1.0); }, 0.0, 1.0,
                                 20);
    A.delta0_minus = std::exp(cplx(0.0, Im1 - Im2 + A.nu0_minus));
    // delta(0): continuous across the cut because nu(0) = 0
    const double I0 =
        integrate([&](double s) -> double { return std::abs(s) < 1e-9 ? 0.0 : P.nu(s) / s; }, -1.0,
                  1.0, 20);
    A.delta_at_zero = std::exp(cplx(0.0, -I0));
    return A;
}

double kappa_hat(const SampledComplexFunction& r_hat, double z) { return kappa_of(r_hat, z); }
double kappa_w(const SampledComplexFunction& r, double w) { return kappa_of(r, w); }

std::pair<cplx, cplx> f_pm(const SampledComplexFunction& r_hat, double speed) {
    const double z0 = z0_of_speed(speed);
    std::pair<cplx, cplx> out{cplx(0, 0), cplx(0, 0)};
    // f_minus (sigma = -1): |f-|^2 = -kappa_hat(-z0)
    const double m2_minus = -kappa_of(r_hat, -z0);
    if (m2_minus > 1e-30 && std::abs(r_hat(-z0)) > 1e-14)
        out.first = std::sqrt(m2_minus) * std::exp(I * amplitude_arg(r_hat, z0, -1, 0.0));
    const double m2_plus = kappa_of(r_hat, z0);
    if (m2_plus > 1e-30 && std::abs(r_hat(z0)) > 1e-14)
        out.second = std::sqrt(m2_plus) * std::exp(I * amplitude_arg(r_hat, z0, +1, 0.0));
    return out;
}

std::pair<cplx, cplx> f_pm_w(const SampledComplexFunction& r, double speed) {
    const double z0 = z0_of_speed(speed);
    const double w0 = 1.0 / z0;
    const double a = r.x_min(), b = r.x_max();
    if (!(w0 > 0.0 && -w0 > a && w0 < b))
        throw std::domain_error("f_pm_w: w0 outside the sampled support");
    auto kap = [&](double s) { return kappa_of(r, s); };
    // Int over the whole line of kappa(s)/s (regular at 0), truncated at the
    // superpolynomially-decaying tails of the sampled support
    const double I4 = integrate([&](double s) -> double { return kappa_over_s(r, s); }, a, b, 20);
    std::pair<cplx, cplx> out{cplx(0, 0), cplx(0, 0)};
    for (int sigma : {-1, +1}) {
        const double m2 = sigma * kappa_of(r, sigma * w0);
        if (!(m2 > 1e-30) || std::abs(r(sigma * w0)) < 1e-14) continue;
        // -arg(d- d+) at sigma*w0 is twice the principal-value integral
        const double arg_dd = 2.0 * pv_integral(kap, sigma * w0, a, b);
        // the reflection coefficients of the two routes differ by a sign at
        // negative argument: r_hat(-z0) = -w0 r(-w0); compensate here
        const double flip = (sigma < 0) ? pi : 0.0;
        const double ang = amplitude_arg(r, w0, sigma, arg_dd - I4 + flip);
        const cplx val = std::sqrt(m2) * std::exp(I * ang);
        (sigma < 0 ? out.first : out.second) = val;
    }
    return out;
}

std::pair<cplx, cplx> predict_fields(const SampledComplexFunction& r_hat, double t, double x) {
    ConeCoords cc = cone_coords(t, x);  // throws outside the light cone
    if (!(cc.tau > 1.0)) throw std::domain_error("predict_fields: tau <= 1");
    auto [fm, fp] = f_pm(r_hat, x / t);
    const double lt = std::log(cc.tau);
    const cplx term_m = std::exp(I * (cc.tau + std::norm(fm) * lt)) * fm;
    const cplx term_p = std::exp(I * (-cc.tau + std::norm(fp) * lt)) * fp;
    const cplx u = (term_m + term_p) / std::sqrt(t - x);
    const cplx v = (term_m - term_p) / std::sqrt(t + x);
    return {u, v};
}

cplx q_as(const RhoPair& P, const AsymptoticCoefficients& A, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("q_as: tau must be positive");
    cplx sum(0.0, 0.0);
    const double rt = std::sqrt(tau), lt = std::log(tau);
    const cplx rho_m = P.rho(-1.0);
    if (std::abs(rho_m) > 1e-14) {
        const cplx num = std::sqrt(2.0 * pi) * std::exp(pi * A.nu0_minus / 2.0) *
                         std::exp(-I * pi / 4.0);
        const cplx den = rho_m * A.delta0_minus * A.delta0_minus * gamma_fn(cplx(0.0, A.nu0_minus));
        sum += std::exp(I * (-tau + A.nu0_minus * lt)) / rt * num / den;
    }
    const cplx rho_p = P.rho(1.0);
    if (std::abs(rho_p) > 1e-14) {
        const cplx num = std::sqrt(2.0 * pi) * std::exp(pi * A.nu0_plus / 2.0) *
                         std::exp(I * pi / 4.0);
        const cplx den = rho_p * A.delta0_plus * A.delta0_plus * gamma_fn(cplx(0.0, -A.nu0_plus));
        sum += std::exp(I * (tau - A.nu0_plus * lt)) / rt * num / den;
    }
    return sum;
}

}  // namespace mtm
