#pragma once

#include <array>
#include <cstddef>

#include "mtm/core.hpp"

namespace mtm {

// 16-point Gauss-Legendre rule on [-1,1].
inline constexpr std::array<double, 8> gl16_x = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> gl16_w = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// Composite Gauss-Legendre quadrature: `panels` equal panels of 16 nodes.
template <typename F>
auto integrate(F&& f, double a, double b, int panels = 20) {
    using R = decltype(f(0.5 * (a + b)));
    R total{};
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * hp;
        const double r = 0.5 * hp;
        for (std::size_t k = 0; k < 8; ++k) {
            total += gl16_w[k] * r * (f(c - r * gl16_x[k]) + f(c + r * gl16_x[k]));
        }
    }
    return total;
}

}  // namespace mtm
