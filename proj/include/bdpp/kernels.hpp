#pragma once

// Bergman kernels: the closed-form unweighted kernel, radial-weight
// coefficient machinery (critical and super-critical weights included),
// series evaluation with certified tails, and the angular-average series
// D-sharp used in variance lower bounds.
//
// Radial weights W(z) = Phi(|z|) give diagonal coefficient sequences. We
// store one scalar per total degree k:
//     K_W(z,w) = sum_k c_k (z . conj(w))^k,
//     c_k = Gamma(d+k) / (Gamma(d) k!  *  2d I_k),
//     I_k = int_0^1 r^{2d+2k-1} Phi(r) dr,
// which folds the multinomial sphere factor into the multinomial expansion
// of (z . conj(w))^k. The same formulas hold at real degree xi >= 0, which
// the variance module uses to extend coefficient sums far beyond any stored
// table.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bdpp/hypgeom.hpp"
#include "bdpp/quadrature.hpp"

namespace bdpp {

inline cplx bergman_kernel(const Point& z, const Point& w) {
    require_same_dim(z, w, "bergman_kernel");
    require_inside(z, "bergman_kernel");
    require_inside(w, "bergman_kernel");
    return std::pow(1.0 - hdot(z, w), -(z.dim() + 1));
}

struct RadialProfile {
    std::function<double(double)> evaluate;  // r in [0,1) -> nonnegative value
    double support_bound = 1.0;              // Phi == 0 on (support_bound, 1)
    bool integrable = true;
    std::string label = "custom";
};

enum class WeightKind { unit, standard_alpha, critical, log_supercritical, custom };

struct WeightSpec {
    WeightKind kind = WeightKind::unit;
    int d = 1;
    double alpha = 0.0;  // standard_alpha exponent
    double gamma = 0.0;  // log_supercritical exponent, in (0,1)
    RadialProfile custom;

    static WeightSpec make(WeightKind kind, int d) {
        WeightSpec w;
        w.kind = kind;
        w.d = d;
        return w;
    }
    static WeightSpec unit(int d = 1) { return make(WeightKind::unit, d); }
    static WeightSpec standard(double alpha, int d = 1) {
        WeightSpec w = make(WeightKind::standard_alpha, d);
        w.alpha = alpha;
        return w;
    }
    static WeightSpec critical(int d = 1) { return make(WeightKind::critical, d); }
    static WeightSpec supercritical(double gamma, int d = 1) {
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("supercritical: gamma must be in (0,1)");
        WeightSpec w = make(WeightKind::log_supercritical, d);
        w.gamma = gamma;
        return w;
    }

    std::string id() const {
        char buf[64];
        switch (kind) {
            case WeightKind::unit: return "unit";
            case WeightKind::standard_alpha:
                std::snprintf(buf, sizeof buf, "alpha:%g", alpha);
                return buf;
            case WeightKind::critical: return "critical";
            case WeightKind::log_supercritical:
                std::snprintf(buf, sizeof buf, "supercritical:%g", gamma);
                return buf;
            case WeightKind::custom: return "custom:" + custom.label;
        }
        return "?";
    }
};

inline double weight_value(const WeightSpec& w, double r) {
    const double t = r * r;
    switch (w.kind) {
        case WeightKind::unit: return 1.0;
        case WeightKind::standard_alpha: return std::pow(1.0 - t, w.alpha);
        case WeightKind::critical: {
            const double lg = std::log(4.0 / (1.0 - t));
            return 1.0 / ((1.0 - t) * lg * lg);
        }
        case WeightKind::log_supercritical: {
            const double lg = std::log(4.0 / (1.0 - t));
            return 1.0 / ((1.0 - t) * std::pow(lg, 2.0 - w.gamma));
        }
        case WeightKind::custom: return w.custom.evaluate(r);
    }
    return 0.0;
}

// int_{log 4}^inf (1 - 4 e^{-x})^p x^{-2+eta} dx for real p >= 0, eta in [0,1).
// This is the substitution t = 1 - 4 e^{-x} applied to the
// critical-family radial integrals; the integrand transitions near
// x = log(4p) with O(1) width, so the finite part is cut at that scale and
// the remainder is the exact x^{-2+eta} tail (correction < e^{-40}).
inline double critical_power_integral(double p, double eta = 0.0) {
    if (p < 0.0) throw std::domain_error("critical_power_integral: p < 0");
    const double log4 = std::log(4.0);
    const double x1 = std::log(4.0 * (p + 1.0)) + 40.0;
    // x = log4 + e^z. At the lower endpoint the integrand carries the branch
    // factor (x - log4)^p, which for non-integer p defeats polynomial
    // quadrature; on the z scale it becomes an e^{(p+1)z} left tail instead.
    auto g = [p, eta, log4](double z) {
        const double y = std::exp(z);
        // log(1 - e^{-y}) needs a different stable form on each side of the
        // crossover: the error is amplified by p, which can be huge.
        const double lb = y < 0.5 ? std::log(-std::expm1(-y))
                                  : std::log1p(-std::exp(-y));
        const double body = p * lb;
        if (body < -745.0) return 0.0;  // below exp underflow
        return std::exp(body) * std::pow(y + log4, eta - 2.0) * y;
    };
    const double finite =
        integrate(g, -45.0, std::log(x1 - log4), 1e-13).value;
    const double tail = std::pow(x1, eta - 1.0) / (1.0 - eta);
    return finite + tail;
}

inline double critical_claim_integral(double k) {
    return critical_power_integral(k, 0.0);
}

// Radial degree integral I(xi) = int_0^1 r^{2d+2xi-1} Phi(r) dr, real xi >= 0.
inline double radial_degree_integral(const WeightSpec& w, double xi) {
    const int d = w.d;
    switch (w.kind) {
        case WeightKind::unit:
            return 0.5 / (d + xi);
        case WeightKind::standard_alpha:
            // (1/2) B(d+xi, alpha+1)
            return 0.5 * std::exp(std::lgamma(d + xi) + std::lgamma(w.alpha + 1.0) -
                                  std::lgamma(d + xi + w.alpha + 1.0));
        case WeightKind::critical:
            return 0.5 * critical_power_integral(d + xi - 1.0, 0.0);
        case WeightKind::log_supercritical:
            return 0.5 * critical_power_integral(d + xi - 1.0, w.gamma);
        case WeightKind::custom: {
            // r = 1 - e^{-v} soaks up an integrable boundary singularity.
            auto f = [&](double v) {
                const double r = 1.0 - std::exp(-v);
                if (r >= w.custom.support_bound) return 0.0;
                return std::exp((2 * d + 2 * xi - 1) * std::log1p(-std::exp(-v))) *
                       w.custom.evaluate(r) * std::exp(-v);
            };
            return integrate(f, 0.0, 40.0, 1e-14).value;
        }
    }
    return 0.0;
}

// Per-degree kernel coefficient at real degree xi.
inline double degree_coefficient(const WeightSpec& w, double xi) {
    const int d = w.d;
    const double comb =
        std::exp(std::lgamma(d + xi) - std::lgamma(d) - std::lgamma(xi + 1.0));
    return comb / (2.0 * d * radial_degree_integral(w, xi));
}

struct KernelCoeffs {
    int d = 1;
    std::string weight_id = "unit";
    WeightSpec weight;
    std::vector<double> coeffs;  // c_0 .. c_N per total degree
    double rho_max = 0.0;        // tail bound certified for |z||w| <= rho_max
    double envelope_C = 0.0;     // c_k <= C (k+1)^{d-1} log(k+2), observed

    int max_degree() const { return static_cast<int>(coeffs.size()) - 1; }

    // Bound on sum_{k>N} c_k u^k via the majorant C (k+1)^{d-1} log(k+2) u^k.
    double tail_bound(double u) const {
        if (u <= 0.0) return 0.0;
        const int n0 = max_degree() + 1;
        double sum = 0.0, k = n0;
        for (;; ++k) {
            const double term = envelope_C * std::pow(k + 1.0, d - 1) *
                                std::log(k + 2.0) * std::pow(u, k);
            sum += term;
            // Ratio of consecutive majorant terms is below q soon after n0.
            const double q = u * std::pow((k + 2.0) / (k + 1.0), d) *
                             std::log(k + 3.0) / std::log(k + 2.0);
            if (q < 1.0 && term < 1e-18 * (sum + 1e-300)) break;
            if (q < 1.0 && term / (1.0 - q) < 1e-16 * sum) {
                sum += term * q / (1.0 - q);
                break;
            }
            if (k > n0 + 4e6) break;  // defensive; q<1 long before this for u<1
        }
        return sum;
    }
};

inline KernelCoeffs radial_weight_coeffs(const WeightSpec& w, int n_max,
                                         double rho_max) {
    if (rho_max >= 1.0)
        throw std::domain_error("radial_weight_coeffs: rho_max must be < 1");
    KernelCoeffs kc;
    kc.d = w.d;
    kc.weight = w;
    kc.weight_id = w.id();
    kc.rho_max = rho_max;
    kc.coeffs.resize(n_max + 1);
    for (int k = 0; k <= n_max; ++k) {
        const double c = degree_coefficient(w, k);
        if (!(c > 0.0) || !std::isfinite(c))
            throw std::runtime_error("radial_weight_coeffs: non-positive coefficient; weight not admissible?");
        kc.coeffs[k] = c;
        const double model = std::pow(k + 1.0, w.d - 1) * std::log(k + 2.0);
        kc.envelope_C = std::max(kc.envelope_C, c / model);
    }
    return kc;
}

// Doubles N from 4096 until the certified tail at rho_max is below 1e-9.
inline KernelCoeffs coeffs_for(const WeightSpec& w, double rho_max,
                               int n_start = 4096) {
    for (int n = n_start;; n *= 2) {
        KernelCoeffs kc = radial_weight_coeffs(w, n, rho_max);
        if (kc.tail_bound(rho_max) < 1e-9) return kc;
        if (n > (1 << 22))
            throw std::runtime_error("coeffs_for: tail will not certify at this rho_max");
    }
}

struct SeriesValue {
    cplx value;
    double tail = 0.0;  // certified bound on the dropped remainder
};

inline SeriesValue weighted_kernel_eval(const KernelCoeffs& kc, const Point& z,
                                        const Point& w) {
    const double u = std::sqrt(norm_sq(z) * norm_sq(w));
    if (u > kc.rho_max + 1e-15)
        throw std::range_error("weighted_kernel_eval: |z||w| beyond rho_max");
    const cplx q = hdot(z, w);
    cplx pw = 1.0, sum = 0.0;
    for (double c : kc.coeffs) {
        sum += c * pw;
        pw *= q;
    }
    return {sum, kc.tail_bound(u)};
}

// D-sharp angular-average series (d=1):
//   sum_n c_n u^n [ (n+1) u^n / (1-u^2)^2  +  2 u^{n+2} / (1-u^2)^3 ].
inline SeriesValue angular_average_Dsharp(const KernelCoeffs& kc, double u) {
    if (kc.d != 1) throw std::invalid_argument("angular_average_Dsharp: d=1 only");
    if (u < 0.0 || u * u > kc.rho_max + 1e-15)
        throw std::range_error("angular_average_Dsharp: u^2 beyond rho_max");
    const double u2 = u * u;
    const double a2 = 1.0 / ((1.0 - u2) * (1.0 - u2));
    const double a3 = a2 / (1.0 - u2);
    double sum = 0.0, pw = 1.0;  // pw = u^{2n}
    for (std::size_t n = 0; n < kc.coeffs.size(); ++n) {
        sum += kc.coeffs[n] * pw * ((n + 1.0) * a2 + 2.0 * u2 * a3);
        pw *= u2;
    }
    // Remainder bound: both bracket terms are <= (n+1) max(a2, 2 a3) u^{2n}.
    const double tail = kc.tail_bound(u2) * (kc.max_degree() + 2.0) *
                        std::max(a2, 2.0 * a3);
    return {sum, tail};
}

// E(t) = (1-t)^{-4} log(2/(1-t)), the comparison envelope for D-sharp.
inline double dsharp_envelope_E(double t) {
    return std::pow(1.0 - t, -4.0) * std::log(2.0 / (1.0 - t));
}

// K_W(t,t)/K_Wcr(t,t) on a grid of radii t; requires W super-critical.
inline std::vector<double> supercritical_ratio_decay(const WeightSpec& w,
                                                     const std::vector<double>& t_grid) {
    if (w.kind != WeightKind::log_supercritical)
        throw std::invalid_argument("supercritical_ratio_decay: weight is not super-critical");
    double rho = 0.0;
    for (double t : t_grid) rho = std::max(rho, t * t);
    const KernelCoeffs num = coeffs_for(w, rho);
    const KernelCoeffs den = coeffs_for(WeightSpec::critical(w.d), rho);
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const Point p{cplx(t, 0.0)};
        out.push_back(weighted_kernel_eval(num, p, p).value.real() /
                      weighted_kernel_eval(den, p, p).value.real());
    }
    return out;
}

// sum_k (k+1)^{d-1} log(k+2) t^k, summed until the geometric remainder is
// negligible (lem-log-series comparisons).
inline double log_series_value(int d, double t) {
    double sum = 0.0, pw = 1.0;
    for (double k = 0;; ++k) {
        const double term = std::pow(k + 1.0, d - 1) * std::log(k + 2.0) * pw;
        sum += term;
        pw *= t;
        const double q = t * std::pow((k + 2.0) / (k + 1.0), d);
        if (q < 1.0 && term * q / (1.0 - q) < 1e-12 * sum) break;
    }
    return sum;
}

inline void save_coeffs(const std::string& path, const KernelCoeffs& kc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_coeffs: cannot open " + path);
    char buf[80];
    std::snprintf(buf, sizeof buf, "# weight=%s d=%d N=%d rho_max=%.17g\n",
                  kc.weight_id.c_str(), kc.d, kc.max_degree(), kc.rho_max);
    out << buf;
    for (std::size_t n = 0; n < kc.coeffs.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", n, kc.coeffs[n]);
        out << buf;
    }
}

inline KernelCoeffs load_coeffs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_coeffs: cannot open " + path);
    std::string header;
    std::getline(in, header);
    KernelCoeffs kc;
    int n_decl = -1;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("weight=", 0) == 0) kc.weight_id = tok.substr(7);
            else if (tok.rfind("d=", 0) == 0) kc.d = std::stoi(tok.substr(2));
            else if (tok.rfind("N=", 0) == 0) n_decl = std::stoi(tok.substr(2));
            else if (tok.rfind("rho_max=", 0) == 0) kc.rho_max = std::stod(tok.substr(8));
        }
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("load_coeffs: malformed row: " + line);
        const double c = std::stod(line.substr(comma + 1));
        kc.coeffs.push_back(c);
        const double k = static_cast<double>(kc.coeffs.size()) - 1.0;
        kc.envelope_C = std::max(
            kc.envelope_C, c / (std::pow(k + 1.0, kc.d - 1) * std::log(k + 2.0)));
    }
    if (n_decl >= 0 && n_decl != kc.max_degree())
        throw std::runtime_error("load_coeffs: row count disagrees with header N");
    return kc;
}

// Sphere factor (d-1)! n_1!...n_d! / (d-1+|n|)! for a multi-index.
inline double sphere_factor(const std::vector<int>& n) {
    const int d = static_cast<int>(n.size());
    double lg = std::lgamma(d);
    int total = 0;
    for (int ni : n) {
        lg += std::lgamma(ni + 1.0);
        total += ni;
    }
    lg -= std::lgamma(d + total);
    return std::exp(lg);
}

}  // namespace bdpp
