#pragma once

// Adaptive Gauss-Legendre quadrature. A 15-point rule is applied per cell and
// the cell is split while the two-half refinement disagrees with the parent
// estimate; the disagreement is the per-cell error proxy (Richardson style).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bdpp {

// 15-point Gauss-Legendre nodes/weights on [-1,1] (symmetric half stored in full).
inline constexpr double kGL15Node[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline constexpr double kGL15Weight[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

template <class F>
double gl15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += kGL15Weight[i] * f(c + h * kGL15Node[i]);
    return s * h;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // accumulated error proxy
    long evaluations = 0;
};

namespace detail {

template <class F>
void adapt_rec(F& f, double a, double b, double whole, double tol, int depth,
               QuadResult& out) {
    const double m = 0.5 * (a + b);
    const double left = gl15(f, a, m);
    const double right = gl15(f, m, b);
    out.evaluations += 30;
    const double delta = (left + right) - whole;
    // Roundoff floor: once the refinement disagreement is at the level of
    // the panel values' own rounding, splitting further cannot help and the
    // recursion would otherwise expand exponentially.
    const double floor_tol = 1e-15 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(tol, floor_tol)) {
        out.value += left + right;
        out.error += std::abs(delta);
        return;
    }
    adapt_rec(f, a, m, left, 0.5 * tol, depth - 1, out);
    adapt_rec(f, m, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Integrate f over [a,b] to absolute tolerance abs_tol.
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                     int max_depth = 48) {
    QuadResult out;
    if (a == b) return out;
    const double whole = gl15(f, a, b);
    out.evaluations = 15;
    detail::adapt_rec(f, a, b, whole, abs_tol, max_depth, out);
    return out;
}

// Integrate f over [a, +inf) via the rational map x = a + t/(1-t).
template <class F>
QuadResult integrate_to_inf(F&& f, double a, double abs_tol = 1e-12) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        return f(a + t / om) / (om * om);
    };
    return integrate(g, 0.0, 1.0, abs_tol);
}

// Tensorized 2D integral over [a1,b1]x[a2,b2]: the inner integral is adaptive
// per outer node, the outer pass is adaptive on the inner results.
template <class F>
QuadResult integrate2d(F&& f, double a1, double b1, double a2, double b2,
                       double abs_tol = 1e-10) {
    QuadResult total;
    auto outer = [&](double x) {
        auto inner = [&](double y) { return f(x, y); };
        QuadResult r = integrate(inner, a2, b2, abs_tol / (b1 - a1 + 1.0));
        total.evaluations += r.evaluations;
        total.error = std::max(total.error, r.error);
        return r.value;
    };
    QuadResult r = integrate(outer, a1, b1, abs_tol);
    total.value = r.value;
    total.error += r.error;
    return total;
}

// Trapezoid rule over one period of a smooth periodic function on [0, 2*pi).
// Spectrally accurate; n nodes.
template <class F>
double periodic_trapezoid(F&& f, int n) {
    const double two_pi = 6.283185307179586476925;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(two_pi * i / n);
    return s / n;
}

}  // namespace bdpp
