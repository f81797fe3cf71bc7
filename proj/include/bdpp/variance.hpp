#pragma once

// Deterministic variance oracles for linear statistics of the unit-disk
// determinantal process with kernel K(x,y) = (1 - x conj(y))^{-2} against
// normalized area, plus Monte Carlo counterparts with jackknife errors.
//
// Every double integral over the disk squared is reduced analytically to a
// 2D radial integral before quadrature: the angular content collapses to a
// power series in u = r1 r2 whose resummations appear below as closed-form
// kernels ((1+u^2)/(1-u^2)^3 for scalar statistics, the D-sharp series for
// weighted-kernel statistics, the degree-6 polynomial I_z for kernel-valued
// statistics).

#include <bdpp/hypgeom.hpp>
#include <bdpp/kernels.hpp>
#include <bdpp/psinterp.hpp>
#include <bdpp/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdpp {

struct VarianceReport {
    std::string statistic;
    std::string method;  // "mc" | "quadrature" | "closed_form"
    double value = 0.0;
    double err = 0.0;    // quadrature error proxy, or jackknife SE for mc
    long n_samples = 0;  // mc only
    std::string meta;
};

inline std::string variance_csv_header() { return "statistic,method,value,err,meta"; }

inline std::string variance_csv_row(const VarianceReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", r.value, r.err);
    std::string meta = r.meta;
    if (r.n_samples > 0)
        meta = "n=" + std::to_string(r.n_samples) + (meta.empty() ? "" : ";") + meta;
    return r.statistic + "," + r.method + buf + meta;
}

namespace detail {

// int_0^1 ((1-r)/(1+r))^q r^{2m+1} dr, stable for every real m >= 0 (the
// factor (2m+2)^{-(q+1)} is pulled out so the remaining integral is O(1)).
// Returns the log of the moment; real m supports the continuous tail below.
inline double log_exp_moment_scaled(double q, double m, double* scaled = nullptr) {
    const double denom = 4.0 * m + 4.0;
    auto f = [q, denom](double b) {
        // tanh(b/denom) expressed via tau(x) = tanh(x)/x to avoid underflow
        const double x = b / denom;
        const double tau = x < 1e-8 ? 1.0 : std::tanh(x) / x;
        return std::pow(0.5 * b * tau, q) * std::exp(-b);
    };
    const double a = integrate(f, 0.0, 60.0, 1e-13).value;
    if (scaled) *scaled = a;
    return -(q + 1.0) * std::log(2.0 * m + 2.0) + std::log(a);
}

inline double exp_moment(double q, double m) {
    return std::exp(log_exp_moment_scaled(q, m));
}

// log of g(m,s) = V(m,s) - U(m,s); the Cauchy-Schwarz gap keeps the
// log1p argument in (-1, 0).
inline double log_claimA_gap(double m, double s) {
    double a = 0.0, b = 0.0;
    log_exp_moment_scaled(s, m, &a);
    const double logV = log_exp_moment_scaled(2.0 * s, m, &b) - std::log(2.0 * m + 2.0);
    return logV + std::log1p(-(a * a) / b);
}

// I_z angular polynomial in u2 = (r1 r2)^2 at z2 = |z|^2.
inline double iz_polynomial(double u2, double z2) {
    return 1.0 + (3.0 + 8.0 * z2) * u2 + (3.0 * z2 * z2 + 8.0 * z2) * u2 * u2 +
           z2 * z2 * u2 * u2 * u2;
}

// 1/2 int int_{[0,1)^2} |p(r1)-p(r2)|^2 k(r1 r2) 4 r1 r2 dr1 dr2 for a radial
// statistic p supported on [0,S]. S < 1 splits the square at S, so a jump of
// p at its support edge (indicator profiles) never crosses a quadrature cell:
// inside [0,S]^2 the difference form is smooth, and on the cross blocks only
// p(r1)^2 survives. S = 1 keeps one block; both full-range axes are reached
// through r = 1 - e^{-u}, which soaks up boundary-concentrated mass (the
// near-critical regime in particular).
template <class P, class K>
QuadResult pair_variance_integral(P&& p, double S, K&& k, double abs_tol) {
    if (S >= 1.0) {
        auto g = [&](double u1, double u2) {
            const double j1 = std::exp(-u1), j2 = std::exp(-u2);
            const double r1 = 1.0 - j1, r2 = 1.0 - j2;
            const double dp = p(r1) - p(r2);
            return 0.5 * dp * dp * k(r1 * r2) * 4.0 * r1 * r2 * j1 * j2;
        };
        // u capped where 1 - (r1 r2)^2 still has headroom above one ulp;
        // the excluded sliver carries O(e^{-34}) of any convergent integrand.
        return integrate2d(g, 0.0, 34.0, 0.0, 34.0, abs_tol);
    }
    // The same exponential map is used on every axis: a support edge close to
    // the boundary (indicator of a large ball) concentrates the kernel mass at
    // the corner, and on the log scale that corner is a smooth ridge.
    const double u_lo = -std::log1p(-S);
    auto inner = [&](double u1, double u2) {
        const double j1 = std::exp(-u1), j2 = std::exp(-u2);
        const double r1 = 1.0 - j1, r2 = 1.0 - j2;
        const double dp = p(r1) - p(r2);
        return 0.5 * dp * dp * k(r1 * r2) * 4.0 * r1 * r2 * j1 * j2;
    };
    QuadResult diag = integrate2d(inner, 0.0, u_lo, 0.0, u_lo, abs_tol);
    // both cross blocks, where p(r2) = 0
    auto cross = [&](double u1, double u2) {
        const double j1 = std::exp(-u1), j2 = std::exp(-u2);
        const double r1 = 1.0 - j1, r2 = 1.0 - j2;
        const double v = p(r1);
        return v * v * k(r1 * r2) * 4.0 * r1 * r2 * j1 * j2;
    };
    QuadResult off = integrate2d(cross, 0.0, u_lo, u_lo, 34.0, abs_tol);
    diag.value += off.value;
    diag.error += off.error;
    diag.evaluations += off.evaluations;
    return diag;
}

// Two-pass tolerance: coarse estimate first, then refine relative to scale.
template <class P, class K>
QuadResult pair_variance_rel(P&& p, double S, K&& k) {
    QuadResult coarse = pair_variance_integral(p, S, k, 1e-6);
    const double tol = std::max(1e-13, 1e-9 * std::abs(coarse.value));
    QuadResult fine = pair_variance_integral(p, S, k, tol);
    fine.evaluations += coarse.evaluations;
    return fine;
}

inline void require_disk_point(const Point& z, const char* who) {
    if (z.dim() != 1) throw std::invalid_argument(std::string(who) + ": d = 1 only");
    require_inside(z, who);
}

// Lazily built table of degree coefficients a(nu) on a log grid, quadratic
// interpolation in w = log(nu). The coefficient varies like a low-degree
// polynomial in w, so a 0.5-step grid is far below the target 1e-3 accuracy.
class DegreeCoeffTable {
  public:
    DegreeCoeffTable(const WeightSpec& w, double w_lo, double w_hi)
        : w_lo_(w_lo), step_(0.5) {
        const int n = static_cast<int>((w_hi - w_lo) / step_) + 3;
        vals_.reserve(n);
        for (int i = 0; i < n; ++i)
            vals_.push_back(degree_coefficient(w, std::exp(w_lo_ + i * step_)));
    }

    double operator()(double nu) const {
        const double w = std::log(std::max(nu, std::exp(w_lo_)));
        double t = (w - w_lo_) / step_;
        int i = static_cast<int>(t);
        i = std::clamp(i, 1, static_cast<int>(vals_.size()) - 2);
        const double x = t - i;  // in [-1, 1] around node i
        // three-point Lagrange through nodes i-1, i, i+1
        return 0.5 * x * (x - 1.0) * vals_[i - 1] + (1.0 - x * x) * vals_[i] +
               0.5 * x * (x + 1.0) * vals_[i + 1];
    }

  private:
    double w_lo_, step_;
    std::vector<double> vals_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar radial statistics: Var(sum P(r)) at z, Moebius-transported to the
// origin (the pair measure |K|^2 dA dA is transport invariant, so the value
// is the z = 0 computation of the transported profile). The angular average
// of |K(x,y)|^2 is (1+t)/(1-t)^3 with t = (r1 r2)^2.

inline VarianceReport var_scalar_quadrature(const RadialProfile& P, const Point& z,
                                            bool statistic_is_radial = true) {
    if (!statistic_is_radial)
        throw std::invalid_argument("var_scalar_quadrature: statistic must be radial about z");
    detail::require_disk_point(z, "var_scalar_quadrature");
    if (!P.evaluate) throw std::invalid_argument("var_scalar_quadrature: empty profile");
    auto k = [](double u) {
        const double t = u * u;
        const double om = 1.0 - t;
        return (1.0 + t) / (om * om * om);
    };
    auto p = [&](double r) { return P.evaluate(r); };
    const QuadResult q = detail::pair_variance_rel(p, P.support_bound, k);
    VarianceReport rep;
    rep.statistic = "scalar:" + P.label;
    rep.method = "quadrature";
    rep.value = std::max(0.0, q.value);
    rep.err = q.error;
    rep.meta = "z=" + std::to_string(std::sqrt(norm_sq(z)));
    return rep;
}

inline VarianceReport var_scalar_quadrature(double s, const Point& z) {
    if (!(s > 0.5))
        throw std::domain_error("var_scalar_quadrature: need s > 1/2 for convergence");
    RadialProfile P;
    P.evaluate = [s](double r) { return std::pow((1.0 - r) / (1.0 + r), s); };
    P.support_bound = 1.0;
    P.label = "exp_dist_s=" + std::to_string(s);
    return var_scalar_quadrature(P, z);
}

// ---------------------------------------------------------------------------
// Weighted-kernel (RKHS-valued) statistic M_X(s) = sum e^{-s d(x,o)} K_W(., x)
// under the unweighted process. Reduction:
//   Var = 1/2 int int |p(r1)-p(r2)|^2 Dsharp(r1 r2) 4 r1 r2 dr1 dr2
//       = 4 sum_m (m+1) S_m (V(m,s) - U(m,s)),   S_m = sum_{n<=m} a_n (m-n+1),
// where the second line expands Dsharp's Cauchy products degree by degree.
// The series form has no radius-of-convergence ceiling, so it carries the
// near-critical s -> 1 regime where the quadrature route cannot certify the
// coefficient tail. Exact prefix through M0, then continuous-degree tail by
// an integral in w = log m (sum-to-integral error O(1/m)).

inline VarianceReport var_kernel_weighted(const KernelCoeffs& kc, double s,
                                          int prefix_degree = 4096) {
    if (kc.d != 1) throw std::invalid_argument("var_kernel_weighted: d = 1 only");
    if (!(s > 1.0)) throw std::domain_error("var_kernel_weighted: need s > 1");
    const int M0 = std::min(prefix_degree, kc.max_degree());
    double sum = 0.0, T = 0.0, S = 0.0;  // T = prefix sum of a_n, S = S_m
    for (int m = 0; m <= M0; ++m) {
        T += kc.coeffs[m];
        S += T;  // S_m = S_{m-1} + T_m
        sum += 4.0 * (m + 1.0) * S * std::exp(detail::log_claimA_gap(m, s));
    }
    // Continuous tail: 4 int (m+1) m^2 Shat(m) g(m) dm, m = e^w.
    const double w0 = std::log(M0 + 0.5);
    const double w_hi = std::min(689.0, w0 + 40.0 / (2.0 * s - 2.0));
    detail::DegreeCoeffTable table(kc.weight, -8.0, w_hi + 1.0);
    auto shat = [&](double m) {
        auto f = [&](double tau) {
            return table(std::max(tau, 1e-300) * m) * (1.0 - tau + 1.0 / m);
        };
        double v = integrate(f, 0.0, 1.0, 1e-8).value;
        // half-weight endpoint correction of the sum-to-integral step
        v += 0.5 * (table(1e-8) * (m + 1.0) + table(m)) / (m * m);
        return v;
    };
    auto tail_f = [&](double w) {
        const double m = std::exp(w);
        const double lt = std::log(4.0) + std::log1p(m) + 2.0 * w +
                          std::log(shat(m)) + detail::log_claimA_gap(m, s);
        return std::exp(lt + w);  // dm = m dw
    };
    const QuadResult tail = integrate(tail_f, w0, w_hi, std::max(1e-12, 1e-7 * sum));
    VarianceReport rep;
    rep.statistic = "kernel_weighted:" + kc.weight_id + ":s=" + std::to_string(s);
    rep.method = "quadrature";
    rep.value = sum + tail.value;
    rep.err = tail.error + 1e-6 * rep.value;  // series/EM resolution floor
    rep.meta = "series";
    return rep;
}

// Compactly supported radial statistic against the same weighted kernel,
// integrated directly against the D-sharp angular-average series.
inline VarianceReport var_kernel_weighted(const KernelCoeffs& kc,
                                          const RadialProfile& P) {
    if (kc.d != 1) throw std::invalid_argument("var_kernel_weighted: d = 1 only");
    if (!P.evaluate) throw std::invalid_argument("var_kernel_weighted: empty profile");
    double tail_max = 0.0;
    auto k = [&](double u) {
        const SeriesValue sv = angular_average_Dsharp(kc, u);  // may throw range_error
        tail_max = std::max(tail_max, sv.tail);
        return sv.value.real();
    };
    auto p = [&](double r) { return P.evaluate(r); };
    const QuadResult q = detail::pair_variance_rel(p, P.support_bound, k);
    VarianceReport rep;
    rep.statistic = "kernel_weighted:" + kc.weight_id + ":" + P.label;
    rep.method = "quadrature";
    rep.value = std::max(0.0, q.value);
    rep.err = q.error + tail_max;
    return rep;
}

// ---------------------------------------------------------------------------
// Kernel-valued statistic g^R_X(z; F) = sum R(|phi_z(x)|) K(., x):
//   Var = 1/(2 (1-|z|^2)^2) int int |R(r1)-R(r2)|^2 I_z(u)/(1-u^2)^5
//         (2 r1 dr1)(2 r2 dr2),   u = r1 r2,
// with I_z the degree-6 polynomial below. At z = 0 the kernel equals the
// W == 1 D-sharp resummation (1+3u^2)/(1-u^2)^5.

inline VarianceReport identity_Iz(const RadialProfile& R, const Point& z) {
    detail::require_disk_point(z, "identity_Iz");
    if (!R.evaluate) throw std::invalid_argument("identity_Iz: empty profile");
    if (R.support_bound >= 1.0)
        throw std::invalid_argument("identity_Iz: profile must be compactly supported");
    const double z2 = norm_sq(z);
    const double pref = 1.0 / ((1.0 - z2) * (1.0 - z2));
    auto k = [&](double u) {
        const double u2 = u * u;
        const double om = 1.0 - u2;
        return pref * detail::iz_polynomial(u2, z2) / (om * om * om * om * om);
    };
    auto p = [&](double r) { return R.evaluate(r); };
    const QuadResult q = detail::pair_variance_rel(p, R.support_bound, k);
    VarianceReport rep;
    rep.statistic = "identity_Iz:" + R.label;
    rep.method = "quadrature";
    rep.value = std::max(0.0, q.value);
    rep.err = q.error;
    rep.meta = "z=" + std::to_string(std::sqrt(z2));
    return rep;
}

// Residue-derived closed form for the double angular average
//   J_z(x,y) = avg_{t1,t2} K(phi_z(x e^{i t1}), phi_z(y e^{-i t2}))
//              |K(x e^{i t1}, y e^{-i t2})|^2
// against a 256 x 256 trapezoid of the definition. Returns (quadrature,
// closed form); the trapezoid is spectrally accurate for x, y < 1.
inline std::pair<double, double> residue_Jz_check(double x, double y,
                                                  const Point& z) {
    detail::require_disk_point(z, "residue_Jz_check");
    if (x < 0.0 || x >= 1.0 || y < 0.0 || y >= 1.0)
        throw std::invalid_argument("residue_Jz_check: need 0 <= x, y < 1");
    const double z2 = norm_sq(z);
    const double u = x * y;
    const double om = 1.0 - u * u;
    const double closed = detail::iz_polynomial(u * u, z2) /
                          ((1.0 - z2) * (1.0 - z2) * om * om * om * om * om);
    const cplx zc = z.c[0];
    auto phi = [&](cplx w) { return (zc - w) / (1.0 - std::conj(zc) * w); };
    const int n = 256;
    const double two_pi = 6.283185307179586476925;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const cplx a = std::polar(x, two_pi * i / n);
        const cplx pa = phi(a);
        for (int j = 0; j < n; ++j) {
            const cplx b = std::polar(y, -two_pi * j / n);
            const cplx q1 = 1.0 - pa * std::conj(phi(b));
            const cplx q2 = 1.0 - a * std::conj(b);
            sum += (1.0 / (q1 * q1)).real() / std::norm(q2 * q2);
        }
    }
    return {sum / (static_cast<double>(n) * n), closed};
}

// E sup_{||f|| <= 1} |g^R_X(z,f)/g^R_P - f(z)|^2 lower bound: the variance of
// the kernel-valued statistic over the squared mean mass; always >= 1/128.
inline double impossibility_ratio(const RadialProfile& R, const Point& z) {
    auto f = [&](double r) {
        const double om = 1.0 - r * r;
        return R.evaluate(r) * 2.0 * r / (om * om);
    };
    const double mass = integrate(f, 0.0, R.support_bound, 1e-12).value;
    if (!(mass > 0.0))
        throw std::domain_error("impossibility_ratio: profile has zero mass");
    return identity_Iz(R, z).value / (mass * mass);
}

// ---------------------------------------------------------------------------
// Claim A quantities:
//   U(n,s) = (int_0^1 ((1-r)/(1+r))^s r^{2n+1} dr)^2
//   V(n,s) = (2n+2)^{-1} int_0^1 ((1-r)/(1+r))^{2s} r^{2n+1} dr
// with U < V strictly (Cauchy-Schwarz with strict non-proportionality).

struct ClaimA {
    double U = 0.0;
    double V = 0.0;
    double ratio = 0.0;
};

inline ClaimA claimA_UV(int n, double s) {
    if (n < 0) throw std::invalid_argument("claimA_UV: n >= 0 required");
    ClaimA c;
    const double i1 = detail::exp_moment(s, n);
    c.U = i1 * i1;
    c.V = detail::exp_moment(2.0 * s, n) / (2.0 * n + 2.0);
    c.ratio = c.U / c.V;
    return c;
}

// ---------------------------------------------------------------------------
// Lower bound (1/128) (int_{t_N}^1 Phi_N(sqrt(1-t))^2 / t^4 dt)^2 for the
// profile ((1-r)/(1+r))^s cut at hyperbolic radius N+1. The integrand behaves
// like t^{2s-4} near 0, so the value diverges in N for s <= 3/2 and
// stabilizes for larger s. s is accepted up to 2 to expose the transition;
// the divergence statement itself assumes 1 < s <= 3/2.

inline double sharp_divergence_bound(double s, int N) {
    if (!(s > 1.0 && s <= 2.0))
        throw std::domain_error("sharp_divergence_bound: s must lie in (1, 2]");
    if (N < 0) throw std::invalid_argument("sharp_divergence_bound: N >= 0");
    // t_N = 1 - rho^2 = sech^2((N+1)/2); the tanh form rounds to 0 once
    // N ~ 36, so the endpoint is carried in logs.
    const double half = (N + 1.0) / 2.0;
    const double log_tN =
        -(N + 1.0) + 2.0 * std::log(2.0) - 2.0 * std::log1p(std::exp(-2.0 * half));
    // t = e^{-v}; (1-r)/(1+r) = t/(1+r)^2 exactly with r = sqrt(1-t).
    auto f = [s](double v) {
        const double t = std::exp(-v);
        const double r = std::sqrt(1.0 - t);
        const double base = 1.0 + r;
        return std::exp((2.0 * s - 3.0) * -v) / std::pow(base * base, 2.0 * s);
    };
    const double v_hi = -log_tN;
    const double coarse = integrate(f, 0.0, v_hi, 1e-4).value;
    const double integral =
        integrate(f, 0.0, v_hi, std::max(1e-12, 1e-9 * coarse)).value;
    return integral * integral / 128.0;
}

// ---------------------------------------------------------------------------
// d >= 2 diagnostic: sum_k k^d |n|^{2s-d} / (k+|n|)^{2s+1}, the Gamma-ratio
// bound controlling the pluriharmonic numerator/denominator ratio; tends to
// 0 as |n| grows for s in [d, 2d].

inline double pluri_ratio_bound(int n, double s, int d) {
    if (n < 1) throw std::invalid_argument("pluri_ratio_bound: |n| >= 1 required");
    if (d < 1) throw std::invalid_argument("pluri_ratio_bound: d >= 1 required");
    if (2.0 * s <= d)
        throw std::domain_error("pluri_ratio_bound: needs 2s > d");
    // With H(t) = t^d / (1+t)^{2s+1}, the bound is (max H + 2 int_0^inf H)/n.
    // Note the raw degree sum sum_k k^d n^{2s-d}/(k+n)^{2s+1} is a Riemann
    // sum for int H and converges to Beta(d+1, 2s-d) as n grows: it carries
    // no decay of its own, which is why the 1/n prefactor is kept explicit.
    const double t0 = d / (2.0 * s + 1.0 - d);
    const double max_h =
        std::exp(d * std::log(t0) - (2.0 * s + 1.0) * std::log1p(t0));
    const double beta = std::exp(std::lgamma(d + 1.0) + std::lgamma(2.0 * s - d) -
                                 std::lgamma(2.0 * s + 1.0));
    return (max_h + 2.0 * beta) / n;
}

// ---------------------------------------------------------------------------
// Monte Carlo counterparts: unbiased sample variance with delete-1 jackknife
// standard error (the variance is nonlinear in the empirical measure).

inline VarianceReport var_mc(const std::vector<double>& samples,
                             const std::string& statistic) {
    const long n = static_cast<long>(samples.size());
    if (n < 200)
        throw std::invalid_argument("var_mc: at least 200 independent samples required");
    double s1 = 0.0, s2 = 0.0;
    for (double x : samples) { s1 += x; s2 += x * x; }
    const double mean = s1 / n;
    const double var = (s2 - n * mean * mean) / (n - 1.0);
    // delete-1 replicates from the same sums
    std::vector<double> theta(n);
    double tbar = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = samples[i];
        const double m1 = (s1 - x) / (n - 1.0);
        theta[i] = (s2 - x * x - (n - 1.0) * m1 * m1) / (n - 2.0);
        tbar += theta[i];
    }
    tbar /= n;
    double acc = 0.0;
    for (double t : theta) acc += (t - tbar) * (t - tbar);
    VarianceReport rep;
    rep.statistic = statistic;
    rep.method = "mc";
    rep.value = var;
    rep.err = std::sqrt((n - 1.0) / n * acc);
    rep.n_samples = n;
    return rep;
}

// RKHS-valued samples g_i = sum_p c_p K(., x_p): variance of the vector
// statistic, Var = E||g - Eg||^2, estimated unbiasedly through the pairwise
// Gram sums <g_i, g_j> = sum c_p conj(c_q) K(x_q, x_p).
inline VarianceReport var_mc_rkhs(const std::vector<RkhsRecord>& recs,
                                  const std::string& statistic) {
    const long n = static_cast<long>(recs.size());
    if (n < 200)
        throw std::invalid_argument("var_mc_rkhs: at least 200 independent samples required");
    auto inner = [](const RkhsRecord& a, const RkhsRecord& b) {
        cplx s = 0.0;
        for (std::size_t p = 0; p < a.pts.size(); ++p)
            for (std::size_t q = 0; q < b.pts.size(); ++q)
                s += a.coef[p] * std::conj(b.coef[q]) *
                     bergman_kernel(b.pts[q], a.pts[p]);
        return s.real();
    };
    std::vector<double> diag(n), row(n, 0.0);
    double total = 0.0, trace = 0.0;
    for (long i = 0; i < n; ++i) {
        diag[i] = inner(recs[i], recs[i]);
        trace += diag[i];
        row[i] += diag[i];
        for (long j = i + 1; j < n; ++j) {
            const double g = inner(recs[i], recs[j]);
            row[i] += g;
            row[j] += g;
            total += 2.0 * g;
        }
    }
    total += trace;
    const double var = (trace - total / n) / (n - 1.0);
    std::vector<double> theta(n);
    double tbar = 0.0;
    for (long i = 0; i < n; ++i) {
        const double tr_i = trace - diag[i];
        const double tot_i = total - 2.0 * row[i] + diag[i];
        theta[i] = (tr_i - tot_i / (n - 1.0)) / (n - 2.0);
        tbar += theta[i];
    }
    tbar /= n;
    double acc = 0.0;
    for (double t : theta) acc += (t - tbar) * (t - tbar);
    VarianceReport rep;
    rep.statistic = statistic;
    rep.method = "mc";
    rep.value = var;
    rep.err = std::sqrt((n - 1.0) / n * acc);
    rep.n_samples = n;
    return rep;
}

}  // namespace bdpp
