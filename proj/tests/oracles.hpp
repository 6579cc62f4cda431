#pragma once

// Test-side numerical oracles. Deliberately independent of the closed forms
// in the library: they only use the price function P(s).

#include <cmath>
#include <functional>

namespace ets::testing::oracle {

/// Composite 16-point Gauss-Legendre quadrature over `panels` equal panels.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64)
{
    static constexpr double x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                    0.9445750230732326, 0.9894009349916499};
    static constexpr double w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                    0.0622535239386479, 0.0271524594117541};
    const double h = (b - a) / panels;
    double total = 0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double sum = 0;
        for (int i = 0; i < 8; ++i)
            sum += w[i] * (f(mid - 0.5 * h * x[i]) + f(mid + 0.5 * h * x[i]));
        total += 0.5 * h * sum;
    }
    return total;
}

/// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double x)
{
    const double h = 1e-3 * std::fmax(1.0, std::fabs(x));
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// Spot price P(s) = C0 / (F s) * (s / s0)^(1/F), written out here rather
/// than borrowed from the library.
inline double price(double f, double s0, double c0, double s) { return c0 / (f * s) * std::pow(s / s0, 1.0 / f); }

/// Bisection inverse of a monotone increasing function on [lo, hi].
inline double invert(const std::function<double(double)>& g, double target, double lo, double hi)
{
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ets::testing::oracle
