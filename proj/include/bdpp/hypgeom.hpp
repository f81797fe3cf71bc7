#pragma once

// Hyperbolic (Bergman-metric) geometry of the unit ball in C^d: Mobius
// involutions, the invariant distance and measure, ball volumes, annuli,
// and boundary kernels.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bdpp/quadrature.hpp"

namespace bdpp {

using cplx = std::complex<double>;

struct Point {
    std::vector<cplx> c;

    Point() = default;
    explicit Point(std::vector<cplx> coords) : c(std::move(coords)) {}
    // d=1 convenience.
    explicit Point(cplx z) : c{z} {}

    int dim() const { return static_cast<int>(c.size()); }
};

struct BoundaryPoint {
    std::vector<cplx> c;
    explicit BoundaryPoint(std::vector<cplx> coords) : c(std::move(coords)) {
        double n2 = 0.0;
        for (const cplx& z : c) n2 += std::norm(z);
        if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
            throw std::domain_error("BoundaryPoint: |zeta| must be 1");
    }
    explicit BoundaryPoint(cplx z) : BoundaryPoint(std::vector<cplx>{z}) {}
    int dim() const { return static_cast<int>(c.size()); }
};

struct BallRegion {
    Point center;
    double hyperbolic_radius = 0.0;
};

inline double norm_sq(const Point& z) {
    double s = 0.0;
    for (const cplx& zi : z.c) s += std::norm(zi);
    return s;
}

// Hermitian pairing z . conj(w).
inline cplx hdot(const Point& z, const Point& w) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < z.c.size(); ++i) s += z.c[i] * std::conj(w.c[i]);
    return s;
}

inline cplx hdot(const Point& z, const BoundaryPoint& w) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < z.c.size(); ++i) s += z.c[i] * std::conj(w.c[i]);
    return s;
}

inline void require_inside(const Point& z, const char* who) {
    if (norm_sq(z) >= 1.0)
        throw std::domain_error(std::string(who) + ": point outside the open unit ball");
}

inline void require_same_dim(const Point& a, const Point& b, const char* who) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

// Mobius involution phi_w interchanging w and the origin. The |w|=0 branch is
// phi_o = -id; the general formula divides by |w|^2.
inline Point mobius_involution(const Point& w, const Point& z) {
    require_same_dim(w, z, "mobius_involution");
    require_inside(w, "mobius_involution");
    require_inside(z, "mobius_involution");
    const double w2 = norm_sq(w);
    const int d = w.dim();
    Point out;
    out.c.resize(d);
    if (w2 < 1e-30) {
        for (int i = 0; i < d; ++i) out.c[i] = -z.c[i];
        return out;
    }
    const cplx zw = hdot(z, w);          // z . conj(w)
    const cplx proj = zw / w2;           // coefficient of the projection onto w
    const double sq = std::sqrt(1.0 - w2);
    const cplx denom = 1.0 - zw;
    for (int i = 0; i < d; ++i) {
        const cplx pw = proj * w.c[i];
        out.c[i] = (w.c[i] - pw - sq * (z.c[i] - pw)) / denom;
    }
    return out;
}

inline double bergman_distance(const Point& x, const Point& z) {
    require_same_dim(x, z, "bergman_distance");
    require_inside(x, "bergman_distance");
    require_inside(z, "bergman_distance");
    const double r = std::sqrt(norm_sq(mobius_involution(z, x)));
    return 2.0 * std::atanh(r);
}

// |(1 - phi_z(x).conj(phi_z(y))) - (1-|z|^2)(1-x.conj(y)) / ((1-x.conj(z))(1-z.conj(y)))|
inline double mobius_kernel_identity_residual(const Point& x, const Point& y,
                                              const Point& z) {
    require_same_dim(x, y, "mobius_kernel_identity_residual");
    require_same_dim(x, z, "mobius_kernel_identity_residual");
    const Point px = mobius_involution(z, x);
    const Point py = mobius_involution(z, y);
    const cplx lhs = 1.0 - hdot(px, py);
    const cplx rhs = (1.0 - norm_sq(z)) * (1.0 - hdot(x, y)) /
                     ((1.0 - hdot(x, z)) * (1.0 - hdot(z, y)));
    return std::abs(lhs - rhs);
}

// Density of the invariant measure with respect to normalized Lebesgue dv_d.
inline double invariant_density(const Point& z) {
    require_inside(z, "invariant_density");
    return std::pow(1.0 - norm_sq(z), -(z.dim() + 1));
}

// mu(B(o,r)). The polar-coordinate integrand is written in the overflow-safe
// form (d/4^d) e^{dx} (1-e^{-x})^{2d-1} (1+e^{-x}).
inline double ball_volume(double r, int d) {
    if (r < 0.0) throw std::domain_error("ball_volume: negative radius");
    if (r == 0.0) return 0.0;
    if (d == 1) return 0.5 * (std::cosh(r) - 1.0);
    const double pref = d * std::pow(0.25, d);
    auto rho = [d](double x) {
        const double e = std::exp(-x);
        return std::exp(d * x) * std::pow(1.0 - e, 2 * d - 1) * (1.0 + e);
    };
    // Relative tolerance: the integrand grows like e^{dr}.
    const double scale = std::max(1.0, gl15(rho, 0.0, r));
    return pref * integrate(rho, 0.0, r, 1e-12 * scale).value;
}

inline int annulus_index(const Point& x, const Point& z) {
    return static_cast<int>(std::floor(bergman_distance(x, z)));
}

// g_P(s) restricted to the hyperbolic ball of radius window (infinite window
// by default). Radial density of e^{-s d_B(.,o)} d mu:
//   (d/4^d) e^{-(s-d)x} (1-e^{-x})^{2d-1} (1+e^{-x}) dx.
inline double poincare_mass_windowed(double s, int d, double window) {
    if (s <= d) throw std::domain_error("poincare_mass: requires s > d");
    const double pref = d * std::pow(0.25, d);
    auto f = [s, d](double x) {
        const double e = std::exp(-x);
        return std::exp(-(s - d) * x) * std::pow(1.0 - e, 2 * d - 1) * (1.0 + e);
    };
    return pref * integrate(f, 0.0, window, 1e-13).value;
}

// Full Poincare mass. d=1 uses the closed form; d>=2 uses the substitution
// t = (s-d) x, which keeps the quadrature well-conditioned as s decreases to d.
inline double poincare_mass(double s, int d) {
    if (s <= d) throw std::domain_error("poincare_mass: requires s > d");
    if (d == 1) return 0.25 / (s - 1.0) - 0.25 / (s + 1.0);
    const double gap = s - d;
    const double pref = d * std::pow(0.25, d) / gap;
    auto f = [gap, d](double t) {
        const double e = std::exp(-t / gap);
        return std::exp(-t) * std::pow(1.0 - e, 2 * d - 1) * (1.0 + e);
    };
    return pref * integrate(f, 0.0, 60.0, 1e-14).value;
}

// Quadrature route without the d=1 closed-form shortcut (oracle use).
inline double poincare_mass_by_quadrature(double s, int d) {
    if (s <= d) throw std::domain_error("poincare_mass: requires s > d");
    const double gap = s - d;
    const double pref = d * std::pow(0.25, d) / gap;
    auto f = [gap, d](double t) {
        const double e = std::exp(-t / gap);
        return std::exp(-t) * std::pow(1.0 - e, 2 * d - 1) * (1.0 + e);
    };
    return pref * integrate(f, 0.0, 60.0, 1e-14).value;
}

// Poisson kernel (d=1) / Poisson-Szego kernel (d>=2).
inline double poisson_kernel(const Point& z, const BoundaryPoint& zeta) {
    if (z.dim() != zeta.dim())
        throw std::invalid_argument("poisson_kernel: dimension mismatch");
    require_inside(z, "poisson_kernel");
    const int d = z.dim();
    const double num = std::pow(1.0 - norm_sq(z), d);
    const double den = std::pow(std::norm(1.0 - hdot(z, zeta)), d);
    return num / den;
}

}  // namespace bdpp
