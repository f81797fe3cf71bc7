#pragma once

// Patterson-Sullivan interpolation engine: Poincare series, annular
// principal-value sums, both normalizations, compactly supported radial
// weights, RKHS-valued statistics, tempered-growth functionals, and the
// Gram-Schmidt reconstruction baseline.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bdpp/hypgeom.hpp"
#include "bdpp/kernels.hpp"
#include "bdpp/sampler.hpp"

namespace bdpp {

// ---------------------------------------------------------------------------
// Test functions.

enum class FKind {
    constant,
    monomial,
    poisson,
    poisson_szego,
    lacunary,
    pluriharmonic,
    kernel_section,
    hardy_atomic,
};

struct PluriTerm {
    std::vector<int> n;  // multi-index of the holomorphic monomial
    cplx coeff;
};

struct TestFunction {
    FKind kind = FKind::constant;
    int d = 1;
    std::vector<int> n;            // monomial multi-index
    std::vector<cplx> zeta;        // poisson / poisson_szego boundary direction
    std::vector<PluriTerm> terms;  // pluriharmonic: f = Re sum coeff z^n
    KernelCoeffs kernel;           // kernel_section
    Point center;                  // kernel_section center
    std::vector<BoundaryPoint> atoms;  // hardy_atomic measure support
    std::vector<double> atom_mass;
    std::vector<cplx> h;  // hardy_atomic density against mu

    bool is_scalar() const {
        return kind != FKind::kernel_section && kind != FKind::hardy_atomic;
    }

    std::string label() const {
        switch (kind) {
            case FKind::constant: return "constant";
            case FKind::monomial: {
                std::string s = "monomial:";
                for (std::size_t i = 0; i < n.size(); ++i)
                    s += (i ? "|" : "") + std::to_string(n[i]);
                return s;
            }
            case FKind::poisson: return "poisson";
            case FKind::poisson_szego: return "poisson_szego";
            case FKind::lacunary: return "lacunary";
            case FKind::pluriharmonic: return "pluriharmonic";
            case FKind::kernel_section: return "kernel_section:" + kernel.weight_id;
            case FKind::hardy_atomic: return "hardy_atomic";
        }
        return "?";
    }
};

inline TestFunction tf_constant(int d = 1) {
    TestFunction f;
    f.kind = FKind::constant;
    f.d = d;
    return f;
}

inline TestFunction tf_monomial(std::vector<int> n) {
    TestFunction f;
    f.kind = FKind::monomial;
    f.d = static_cast<int>(n.size());
    f.n = std::move(n);
    return f;
}

inline TestFunction tf_poisson(const BoundaryPoint& zeta) {
    TestFunction f;
    f.kind = zeta.dim() == 1 ? FKind::poisson : FKind::poisson_szego;
    f.d = zeta.dim();
    f.zeta = zeta.c;
    return f;
}

// Fixed non-tempered witness: f(z) = sum_{k>=1} 2^{k/2} k z^{2^k}, d=1.
inline TestFunction tf_lacunary() {
    TestFunction f;
    f.kind = FKind::lacunary;
    f.d = 1;
    return f;
}

inline TestFunction tf_pluriharmonic(std::vector<PluriTerm> terms, int d) {
    TestFunction f;
    f.kind = FKind::pluriharmonic;
    f.d = d;
    f.terms = std::move(terms);
    return f;
}

inline TestFunction tf_kernel_section(KernelCoeffs kc, Point w) {
    TestFunction f;
    f.kind = FKind::kernel_section;
    f.d = kc.d;
    f.kernel = std::move(kc);
    f.center = std::move(w);
    return f;
}

inline TestFunction tf_hardy_atomic(std::vector<BoundaryPoint> atoms,
                                    std::vector<double> mass,
                                    std::vector<cplx> h) {
    if (atoms.empty() || atoms.size() != mass.size() || atoms.size() != h.size())
        throw std::invalid_argument("tf_hardy_atomic: atoms/mass/h size mismatch");
    TestFunction f;
    f.kind = FKind::hardy_atomic;
    f.d = atoms.front().dim();
    f.atoms = std::move(atoms);
    f.atom_mass = std::move(mass);
    f.h = std::move(h);
    return f;
}

inline cplx scalar_value(const TestFunction& f, const Point& x) {
    switch (f.kind) {
        case FKind::constant: return 1.0;
        case FKind::monomial: {
            cplx v = 1.0;
            for (std::size_t i = 0; i < f.n.size(); ++i)
                for (int k = 0; k < f.n[i]; ++k) v *= x.c[i];
            return v;
        }
        case FKind::poisson:
        case FKind::poisson_szego: {
            std::vector<cplx> zc = f.zeta;
            return poisson_kernel(x, BoundaryPoint(std::move(zc)));
        }
        case FKind::lacunary: {
            const cplx z = x.c[0];
            cplx sum = 0.0;
            cplx zp = z;  // z^{2^k}, starting at k=0
            for (int k = 1; k <= 60; ++k) {
                zp *= zp;
                const cplx term = std::pow(2.0, 0.5 * k) * static_cast<double>(k) * zp;
                sum += term;
                if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum)) && k > 4) break;
            }
            return sum;
        }
        case FKind::pluriharmonic: {
            cplx h = 0.0;
            for (const PluriTerm& t : f.terms) {
                cplx m = t.coeff;
                for (std::size_t i = 0; i < t.n.size(); ++i)
                    for (int k = 0; k < t.n[i]; ++k) m *= x.c[i];
                h += m;
            }
            return h.real();  // Re of a holomorphic polynomial
        }
        default:
            throw std::invalid_argument("scalar_value: not a scalar kind");
    }
}

// hardy_atomic evaluated as the H^2(mu) coordinate vector (P(x, zeta_j))_j.
inline std::vector<cplx> hardy_vector_value(const TestFunction& f, const Point& x) {
    if (f.kind != FKind::hardy_atomic)
        throw std::invalid_argument("hardy_vector_value: wrong kind");
    std::vector<cplx> v(f.atoms.size());
    for (std::size_t j = 0; j < f.atoms.size(); ++j)
        v[j] = poisson_kernel(x, f.atoms[j]);
    return v;
}

// Scalar projection of hardy_atomic: f = P[h mu].
inline cplx hardy_scalar_value(const TestFunction& f, const Point& x) {
    const std::vector<cplx> v = hardy_vector_value(f, x);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) sum += f.h[j] * f.atom_mass[j] * v[j];
    return sum;
}

// ---------------------------------------------------------------------------
// RKHS coefficient records: sum_i c_i K_W(., x_i).

struct RkhsRecord {
    std::vector<Point> pts;
    std::vector<cplx> coef;
};

inline double rkhs_norm_sq(const KernelCoeffs& kc, const RkhsRecord& r) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < r.pts.size(); ++i)
        for (std::size_t j = 0; j < r.pts.size(); ++j)
            s += r.coef[i] * std::conj(r.coef[j]) *
                 weighted_kernel_eval(kc, r.pts[j], r.pts[i]).value;
    return std::max(0.0, s.real());
}

// ---------------------------------------------------------------------------
// Patterson-Sullivan estimates.

struct PSEstimate {
    double s = 0.0;
    Point z;
    std::string f_kind;
    double g = 0.0;  // Poincare series over the window
    cplx g_f = 0.0;  // scalar statistic
    std::vector<cplx> g_vec;  // hardy_atomic components
    RkhsRecord g_rkhs;        // kernel_section record (unnormalized)
    cplx ratio = 0.0;         // g_f / g
    cplx normalized = 0.0;    // g_f / g_P(s)
    std::vector<cplx> annular;  // g^{(k)} blocks, k = 0..K_used
    int K_used = 0;
    double tail_bound = 0.0;
    double err_abs = std::numeric_limits<double>::quiet_NaN();
};

inline double poincare_series(const Configuration& X, double s, const Point& z) {
    if (s <= X.d) throw std::domain_error("poincare_series: requires s > d");
    require_inside(z, "poincare_series");
    double g = 0.0;
    for (const Point& x : X.points) g += std::exp(-s * bergman_distance(x, z));
    return g;
}

namespace detail {

inline bool lex_less(const Point& a, const Point& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].real() != b.c[i].real()) return a.c[i].real() < b.c[i].real();
        if (a.c[i].imag() != b.c[i].imag()) return a.c[i].imag() < b.c[i].imag();
    }
    return false;
}

}  // namespace detail

// Annular principal-value accumulation. K_max < 0 selects the smallest K
// whose remaining in-window mass is below 1e-3 of the accumulated |g_f|;
// the dropped mass is reported in tail_bound, never silently discarded.
inline PSEstimate ps_weighted_sum(const Configuration& X, double s, const Point& z,
                                  const TestFunction& f, int K_max = -1) {
    if (s <= X.d) throw std::domain_error("ps_weighted_sum: requires s > d");
    require_inside(z, "ps_weighted_sum");
    PSEstimate est;
    est.s = s;
    est.z = z;
    est.f_kind = f.label();

    // Group points by annulus, lexicographic within each annulus.
    std::map<int, std::vector<const Point*>> annuli;
    for (const Point& x : X.points) annuli[annulus_index(x, z)].push_back(&x);
    for (auto& kv : annuli)
        std::sort(kv.second.begin(), kv.second.end(),
                  [](const Point* a, const Point* b) { return detail::lex_less(*a, *b); });

    const std::size_t n_comp =
        f.kind == FKind::hardy_atomic ? f.atoms.size() : 0;
    est.g_vec.assign(n_comp, 0.0);

    // Per-annulus weight mass, for the auto-K rule and the dropped-tail report.
    std::map<int, double> annulus_mass;
    for (const auto& kv : annuli) {
        double m = 0.0;
        for (const Point* x : kv.second) m += std::exp(-s * bergman_distance(*x, z));
        annulus_mass[kv.first] = m;
    }

    double dropped = 0.0;
    double acc_scale = 0.0;
    for (const auto& kv : annuli) {
        const int k = kv.first;
        double remaining = 0.0;
        for (const auto& mv : annulus_mass)
            if (mv.first > k) remaining += mv.second;
        const bool stop_auto = K_max < 0 && k > 0 && remaining >= 0.0 &&
                               annulus_mass[k] + remaining < 1e-3 * acc_scale;
        if ((K_max >= 0 && k > K_max) || stop_auto) {
            dropped += annulus_mass[k];
            for (const auto& mv : annulus_mass)
                if (mv.first > k) dropped += mv.second;
            break;
        }
        while (static_cast<int>(est.annular.size()) <= k) est.annular.push_back(0.0);
        for (const Point* x : kv.second) {
            const double w = std::exp(-s * bergman_distance(*x, z));
            est.g += w;
            if (f.is_scalar()) {
                const cplx v = w * scalar_value(f, *x);
                est.g_f += v;
                est.annular[k] += v;
            } else if (f.kind == FKind::hardy_atomic) {
                const std::vector<cplx> v = hardy_vector_value(f, *x);
                for (std::size_t j = 0; j < n_comp; ++j) est.g_vec[j] += w * v[j];
                est.annular[k] += w;
            } else {  // kernel_section: record the weighted kernel sections
                est.g_rkhs.pts.push_back(*x);
                est.g_rkhs.coef.push_back(w);
                est.annular[k] += w;
            }
            acc_scale = std::max(acc_scale, f.is_scalar() ? std::abs(est.g_f) : est.g);
        }
        est.K_used = k;
    }

    // Unobserved mass outside the window: in expectation it is the Poincare
    // mass beyond the largest ball around z inside the window.
    const double reach = X.window_radius - bergman_distance(z, Point(std::vector<cplx>(X.d, 0.0)));
    const double outside =
        reach > 0.0 ? poincare_mass(s, X.d) - poincare_mass_windowed(s, X.d, reach)
                    : poincare_mass(s, X.d);
    est.tail_bound = dropped + outside;
    return est;
}

// The interpolation estimate R_X = g_f / g, with the absolute error against
// the known true value of the built-in kind (RKHS/vector norms for the
// function-valued kinds).
inline PSEstimate ps_ratio(const Configuration& X, double s, const Point& z,
                           const TestFunction& f, int K_max = -1) {
    PSEstimate est = ps_weighted_sum(X, s, z, f, K_max);
    if (!(est.g > 0.0))
        throw std::runtime_error("ps_ratio: degenerate configuration (empty window)");
    const double gP = poincare_mass(s, X.d);
    if (f.is_scalar()) {
        est.ratio = est.g_f / est.g;
        est.normalized = est.g_f / gP;
        est.err_abs = std::abs(est.ratio - scalar_value(f, z));
    } else if (f.kind == FKind::hardy_atomic) {
        // L^2(mu) error of the coordinate vector against (P(z, zeta_j))_j;
        // this equals the supremum over the H^2(mu) unit ball of h.
        double e2 = 0.0;
        cplx sc = 0.0;
        for (std::size_t j = 0; j < f.atoms.size(); ++j) {
            const cplx rj = est.g_vec[j] / est.g;
            const cplx truth = poisson_kernel(z, f.atoms[j]);
            e2 += f.atom_mass[j] * std::norm(rj - truth);
            sc += f.h[j] * f.atom_mass[j] * rj;
        }
        est.ratio = sc;  // scalar projection against the supplied h
        est.normalized = sc * est.g / gP;
        est.err_abs = std::sqrt(e2);
    } else {
        // kernel_section: || g_F / g - K_W(., z) || in the RKHS.
        RkhsRecord diff = est.g_rkhs;
        for (cplx& c : diff.coef) c /= est.g;
        diff.pts.push_back(z);
        diff.coef.push_back(-1.0);
        // Recenter the target: the section at the true center w is F(z)=K(.,w)?
        // No: R_X estimates F(z) = K_W(., z) evaluated pointwise in the RKHS,
        // i.e. the target element is the section at z itself.
        est.err_abs = std::sqrt(rkhs_norm_sq(f.kernel, diff));
        est.ratio = est.err_abs;
        est.normalized = est.ratio * est.g / gP;
    }
    return est;
}

// Compactly supported radial weights: g^R_X(z; f) = sum R(|phi_z(x)|) f(x).
inline std::pair<cplx, cplx> ps_generalized(const Configuration& X,
                                            const RadialProfile& R, const Point& z,
                                            const TestFunction& f) {
    if (!(R.support_bound < 1.0))
        throw std::domain_error("ps_generalized: profile must be compactly supported");
    const double reach_needed = 2.0 * std::atanh(R.support_bound);
    const double dz = bergman_distance(z, Point(std::vector<cplx>(X.d, 0.0)));
    if (dz + reach_needed > X.window_radius + 1e-12)
        throw std::invalid_argument("ps_generalized: profile support exceeds the window");
    cplx gf = 0.0, g = 0.0;
    for (const Point& x : X.points) {
        const double u = std::sqrt(norm_sq(mobius_involution(z, x)));
        if (u > R.support_bound) continue;
        const double w = R.evaluate(u);
        g += w;
        gf += w * scalar_value(f, x);
    }
    return {gf, g};
}

inline RadialProfile indicator_profile(double hyperbolic_radius) {
    RadialProfile p;
    const double bound = std::tanh(hyperbolic_radius / 2.0);
    p.evaluate = [bound](double u) { return u < bound ? 1.0 : 0.0; };
    p.support_bound = bound;
    p.label = "indicator";
    return p;
}

// ---------------------------------------------------------------------------
// Tempered-growth functional alpha^2 int |f|^2 (1-|x|^2)^{alpha+d-1} dv_d.
// The angular integral is reduced analytically per kind; what remains is a
// beta integral (or a rapidly convergent sum of them).

namespace detail {

inline double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Sphere mean of |f|^2 on |x| = r.
inline double sphere_mean_sq(const TestFunction& f, double r) {
    switch (f.kind) {
        case FKind::constant: return 1.0;
        case FKind::monomial: {
            int k = 0;
            for (int ni : f.n) k += ni;
            return sphere_factor(f.n) * std::pow(r, 2 * k);
        }
        case FKind::poisson: {
            const double t = r * r;
            return (1.0 + t) / (1.0 - t);
        }
        case FKind::lacunary: {
            double sum = 0.0;
            for (int k = 1; k <= 60; ++k) {
                const double term =
                    std::pow(2.0, k) * k * k * std::pow(r, 2.0 * std::pow(2.0, k));
                sum += term;
                if (term < 1e-18 * (1.0 + sum) && k > 4) break;
            }
            return sum;
        }
        case FKind::pluriharmonic: {
            // |Re h|^2 = (h^2 + 2|h|^2 + conj(h)^2)/4; nonconstant holomorphic
            // monomials average to zero, distinct monomials are orthogonal.
            double mean = 0.0;
            cplx c0 = 0.0;
            for (const PluriTerm& t : f.terms) {
                int k = 0;
                for (int ni : t.n) k += ni;
                if (k == 0) {
                    c0 += t.coeff;
                    continue;
                }
                mean += 0.5 * std::norm(t.coeff) * sphere_factor(t.n) *
                        std::pow(r, 2 * k);
            }
            return mean + c0.real() * c0.real();
        }
        case FKind::hardy_atomic: {
            // Cross circle means of Poisson kernels: the mean of
            // P(x,zeta_j) P(x,zeta_l) over |x| = r is the Poisson kernel at
            // radius r^2 in the angle gap (d=1).
            if (f.d != 1)
                throw std::invalid_argument("sphere_mean_sq: hardy_atomic needs d=1");
            double sum = 0.0;
            const double t = r * r;
            for (std::size_t j = 0; j < f.atoms.size(); ++j)
                for (std::size_t l = 0; l < f.atoms.size(); ++l) {
                    const cplx w = f.atoms[j].c[0] * std::conj(f.atoms[l].c[0]);
                    const double cosg = w.real();
                    const double pk =
                        (1.0 - t * t) / (1.0 - 2.0 * t * cosg + t * t);
                    sum += (f.h[j] * f.atom_mass[j] * std::conj(f.h[l]) *
                            f.atom_mass[l]).real() * pk;
                }
            return sum;
        }
        default:
            throw std::invalid_argument("sphere_mean_sq: unsupported kind");
    }
}

}  // namespace detail

inline double tempered_functional(const TestFunction& f, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("tempered_functional: alpha <= 0");
    const int d = f.d;
    const double a2 = alpha * alpha;
    switch (f.kind) {
        case FKind::constant:
            // d int_0^1 t^{d-1} (1-t)^{alpha+d-1} dt
            return a2 * d * detail::beta_fn(d, alpha + d);
        case FKind::monomial: {
            int k = 0;
            for (int ni : f.n) k += ni;
            return a2 * sphere_factor(f.n) * d * detail::beta_fn(d + k, alpha + d);
        }
        case FKind::poisson:
            // int (1+t)(1-t)^{alpha-1} dt = (alpha+2)/(alpha(alpha+1))
            return a2 * (alpha + 2.0) / (alpha * (alpha + 1.0));
        case FKind::lacunary: {
            // Terms are 2^k k^2 B(2^k+1, alpha+1); worked in logs because 2^k
            // overflows long before the sum converges for small alpha.
            const double lg = std::lgamma(alpha + 1.0);
            const double ln2 = std::log(2.0);
            double sum = 0.0;
            for (int k = 1; k < 2000000; ++k) {
                double log_beta;
                if (k <= 20) {
                    // beyond this the two lgamma values reach ~1e7 and their
                    // difference (~k) starts losing absolute accuracy
                    const double x = std::pow(2.0, k);
                    log_beta = std::lgamma(x + 1.0) + lg - std::lgamma(x + alpha + 2.0);
                } else {
                    // Gamma(x+1)/Gamma(x+alpha+2) =
                    //   x^{-(alpha+1)} (1 - (alpha+1)(alpha+2)/(2x) + O(1/x^2))
                    const double corr =
                        k < 500 ? (alpha + 1.0) * (alpha + 2.0) / (2.0 * std::exp2(k))
                                : 0.0;
                    log_beta = lg - (alpha + 1.0) * k * ln2 + std::log1p(-corr);
                }
                const double term =
                    std::exp(k * ln2 + 2.0 * std::log(static_cast<double>(k)) + log_beta);
                sum += term;
                if (term < 1e-16 * sum && k > 8) break;
            }
            return a2 * sum;
        }
        case FKind::pluriharmonic:
        case FKind::hardy_atomic: {
            auto g = [&](double t) {
                return std::pow(t, d - 1.0) * detail::sphere_mean_sq(f, std::sqrt(t)) *
                       std::pow(1.0 - t, alpha + d - 1.0);
            };
            return a2 * d * integrate(g, 0.0, 1.0, 1e-12).value;
        }
        default:
            throw std::invalid_argument("tempered_functional: unsupported kind");
    }
}

// e^{-2kd} int_{A_k(o)} |f|^2 dmu for k = 0..k_max.
inline std::vector<double> mean_growth_profile(const TestFunction& f, int k_max) {
    const int d = f.d;
    std::vector<double> out;
    out.reserve(k_max + 1);
    const double pref = d * std::pow(0.25, d);
    for (int k = 0; k <= k_max; ++k) {
        auto g = [&](double x) {
            const double e = std::exp(-x);
            const double r = std::tanh(x / 2.0);
            return std::exp(d * x) * std::pow(1.0 - e, 2 * d - 1) * (1.0 + e) *
                   detail::sphere_mean_sq(f, r);
        };
        const double scale = std::max(1.0, gl15(g, static_cast<double>(k), k + 1.0));
        // The sphere mean can amplify the rounding of r by its largest power
        // exponent (lacunary terms reach 2^k ~ e^x), so the achievable
        // relative accuracy is ~1e-10 here, not machine epsilon.
        const double block =
            pref * integrate(g, static_cast<double>(k), k + 1.0, 1e-9 * scale).value;
        out.push_back(std::exp(-2.0 * k * d) * block);
    }
    return out;
}

// Moments of the normalized Patterson-Sullivan boundary measure (d=1):
// nu_X = (1/g) sum e^{-s d_B(x,z)} delta_{x/|x|}.
inline std::vector<cplx> harmonic_measure_moments(const Configuration& X, double s,
                                                  const Point& z, int m_max) {
    if (X.d != 1) throw std::invalid_argument("harmonic_measure_moments: d=1 only");
    if (s <= 1.0) throw std::domain_error("harmonic_measure_moments: requires s > 1");
    double g = 0.0;
    std::vector<cplx> mom(m_max + 1, 0.0);
    for (const Point& x : X.points) {
        const double w = std::exp(-s * bergman_distance(x, z));
        g += w;
        const double ax = std::abs(x.c[0]);
        const cplx dir = ax > 1e-12 ? x.c[0] / ax : cplx(1.0, 0.0);
        cplx pw = 1.0;
        for (int m = 0; m <= m_max; ++m) {
            mom[m] += w * pw;
            pw *= dir;
        }
    }
    if (!(g > 0.0))
        throw std::runtime_error("harmonic_measure_moments: degenerate configuration");
    for (cplx& m : mom) m /= g;
    return mom;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt reconstruction from kernel sections at given points, in the
// given order; the result genuinely depends on that order when n_terms < |X|.

inline cplx gram_schmidt_baseline(const std::vector<Point>& pts,
                                  const std::vector<cplx>& f_values,
                                  const KernelCoeffs& kc, const Point& z,
                                  int n_terms) {
    const int m = static_cast<int>(pts.size());
    if (m == 0 || f_values.size() != pts.size())
        throw std::invalid_argument("gram_schmidt_baseline: bad inputs");
    n_terms = std::min(n_terms, m);
    std::vector<std::vector<cplx>> gram(m, std::vector<cplx>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gram[i][j] = weighted_kernel_eval(kc, pts[i], pts[j]).value;

    // Orthonormal elements as coefficient vectors over the sections
    // K(., x_j); <u, v> = sum_{ij} u_i conj(v_j) K(x_j, x_i) = v^H G^T u with
    // G_{ij} = K(x_i, x_j).
    auto inner = [&](const std::vector<cplx>& u, const std::vector<cplx>& v) {
        cplx s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += u[i] * std::conj(v[j]) * gram[j][i];
        return s;
    };
    std::vector<std::vector<cplx>> ortho;
    cplx recon = 0.0;
    for (int t = 0; t < n_terms; ++t) {
        std::vector<cplx> v(m, 0.0);
        v[t] = 1.0;
        for (const auto& e : ortho) {
            const cplx ip = inner(v, e);
            for (int i = 0; i < m; ++i) v[i] -= ip * e[i];
        }
        const double n2 = inner(v, v).real();
        if (!(n2 > 1e-12 * std::abs(gram[t][t]))) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "gram_schmidt_baseline: ill-conditioned Gram matrix "
                          "(pivot ratio %.3e at step %d)",
                          n2 / std::abs(gram[t][t]), t);
            throw std::runtime_error(msg);
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (cplx& vi : v) vi *= inv;
        // <f, e> = sum_i conj(e_i) f(x_i); e(z) = sum_i e_i K(z, x_i).
        cplx coef = 0.0, at_z = 0.0;
        for (int i = 0; i < m; ++i) {
            coef += std::conj(v[i]) * f_values[i];
            at_z += v[i] * weighted_kernel_eval(kc, z, pts[i]).value;
        }
        recon += coef * at_z;
        ortho.push_back(std::move(v));
    }
    return recon;
}

// ---------------------------------------------------------------------------
// CSV export.

inline std::string ps_csv_header() {
    return "seed,s,z_re,z_im,f_kind,g,g_f_re,g_f_im,ratio_re,ratio_im,err_abs,tail_bound";
}

inline std::string ps_csv_row(std::uint64_t seed, const PSEstimate& e) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%llu,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  static_cast<unsigned long long>(seed), e.s, e.z.c[0].real(),
                  e.z.c[0].imag(), e.f_kind.c_str(), e.g, e.g_f.real(), e.g_f.imag(),
                  e.ratio.real(), e.ratio.imag(), e.err_abs, e.tail_bound);
    return buf;
}

}  // namespace bdpp
