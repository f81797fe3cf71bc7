#pragma once

// Samplers for the Bergman determinantal point process.
//
// d=1: zeros of the Gaussian analytic function S(z) = sum a_n z^n with iid
// standard complex Gaussian coefficients (Peres-Virag); the series is
// truncated at a degree certified by a Rouche-style margin test on the
// window circle, and the zeros are located by Aberth-Ehrlich iteration plus
// Newton polishing.
//
// any d: sequential conditional-density sampler (HKPV) for the finite-rank
// projection onto normalized monomials of total degree <= N.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bdpp/hypgeom.hpp"
#include "bdpp/kernels.hpp"
#include "bdpp/rng.hpp"

namespace bdpp {

struct TruncationMeta {
    int degree = 0;          // GAF truncation degree or HKPV degree cutoff
    double tail_margin = 0;  // certified tail / (epsilon * min |S_N|) at acceptance
    int attempts = 1;        // resampling count (close-root or margin retries)
    long proposals = 0;      // HKPV rejection-sampler proposals
    int full_point_count = 0;  // HKPV: points drawn before window restriction
};

struct Configuration {
    int d = 1;
    std::vector<Point> points;
    double window_radius = 0.0;
    std::uint64_t seed = 0;
    std::string generator;  // "gaf" | "hkpv"
    TruncationMeta meta;
};

struct GafSpec {
    double window_radius = 3.0;
    double tail_epsilon = 1e-5;  // margin acceptance threshold, in (0, 1e-3]
    int max_degree = 1 << 15;
};

struct HkpvSpec {
    int d = 1;
    int degree_cutoff = -1;  // -1: auto from the window (see hkpv_auto_cutoff)
    double window_radius = 2.0;
};

// ---------------------------------------------------------------------------
// Polynomial utilities.

// p/p' at z, using the reversed polynomial for |z| > 1 so that only ratios
// of like-magnitude quantities appear.
inline cplx newton_ratio(const std::vector<cplx>& a, cplx z) {
    const int n = static_cast<int>(a.size()) - 1;
    if (std::abs(z) <= 1.0) {
        cplx p = a[n], dp = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            dp = dp * z + p;
            p = p * z + a[i];
        }
        return p / dp;
    }
    const cplx w = 1.0 / z;
    cplx q = a[0], dq = 0.0;
    for (int i = 1; i <= n; ++i) {
        dq = dq * w + q;
        q = q * w + a[i];
    }
    const cplx logderiv = static_cast<double>(n) / z - (dq / q) * (w * w);
    return 1.0 / logderiv;
}

inline cplx poly_eval(const std::vector<cplx>& a, cplx z) {
    cplx p = 0.0;
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) p = p * z + a[i];
    return p;
}

// Aberth-Ehrlich simultaneous iteration; returns all roots.
inline std::vector<cplx> aberth_roots(const std::vector<cplx>& a,
                                      int max_sweeps = 400) {
    const int n = static_cast<int>(a.size()) - 1;
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        // Staggered radii around |z|=1, where most zeros of the truncated
        // series concentrate; the golden-ratio stride avoids symmetry locking.
        const double r = 0.85 + 0.3 * std::fmod(0.6180339887498949 * k, 1.0);
        z[k] = std::polar(r, 6.283185307179586 * (k + 0.37) / n + 0.5);
    }
    std::vector<cplx> ratio(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) ratio[k] = newton_ratio(a, z[k]);
        for (int k = 0; k < n; ++k) {
            cplx rep = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) rep += 1.0 / (z[k] - z[j]);
            cplx step = ratio[k] / (1.0 - ratio[k] * rep);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
                step = cplx(1e-6, 1e-6);  // collision escape
            z[k] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[k])));
        }
        if (worst < 1e-13) break;
    }
    return z;
}

// Winding number of the truncated series on |z| = rho (argument principle).
inline int contour_zero_count(const std::vector<cplx>& a, double rho,
                              int nodes = 8192) {
    double winding = 0.0;
    double prev = std::arg(poly_eval(a, cplx(rho, 0.0)));
    for (int i = 1; i <= nodes; ++i) {
        const double th = 6.283185307179586 * i / nodes;
        const double cur = std::arg(poly_eval(a, std::polar(rho, th)));
        double dphi = cur - prev;
        while (dphi > M_PI) dphi -= 2.0 * M_PI;
        while (dphi < -M_PI) dphi += 2.0 * M_PI;
        winding += dphi;
        prev = cur;
    }
    return static_cast<int>(std::lround(winding / (2.0 * M_PI)));
}

// ---------------------------------------------------------------------------
// GAF sampler.

namespace detail {

// Coefficients a_0..a_n from the stream (seed, attempt); extending n keeps
// the earlier draws, so doubling the degree refines the same realization.
inline std::vector<cplx> gaf_coefficients(std::uint64_t seed, int attempt, int n) {
    PhiloxRng rng(seed, static_cast<std::uint64_t>(attempt));
    std::vector<cplx> a(n + 1);
    for (int i = 0; i <= n; ++i) a[i] = rng.complex_normal();
    return a;
}

}  // namespace detail

// Zeros inside |z| < rho of the degree-N truncation for a fixed realization.
inline std::vector<cplx> gaf_window_zeros(std::uint64_t seed, int attempt, int n,
                                          double rho) {
    const std::vector<cplx> a = detail::gaf_coefficients(seed, attempt, n);
    std::vector<cplx> roots = aberth_roots(a);
    std::vector<cplx> inside;
    double max_coef = 0.0;
    for (const cplx& c : a) max_coef = std::max(max_coef, std::abs(c));
    for (cplx r : roots) {
        if (std::abs(r) >= rho + 1e-9) continue;
        for (int it = 0; it < 40; ++it) {  // Newton polish
            const cplx step = newton_ratio(a, r);
            r -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(r))) break;
        }
        if (std::abs(r) < rho) inside.push_back(r);
    }
    for (const cplx& r : inside)
        if (std::abs(poly_eval(a, r)) > 1e-10 * max_coef)
            throw std::runtime_error("sample_gaf: root residual too large");
    std::sort(inside.begin(), inside.end(), [](cplx u, cplx v) {
        return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    });
    return inside;
}

inline Configuration sample_gaf(const GafSpec& spec, std::uint64_t seed) {
    const double rho = std::tanh(spec.window_radius / 2.0);
    const int n_start = static_cast<int>(std::ceil(16.0 / (1.0 - rho)));
    for (int attempt = 0;; ++attempt) {
        if (attempt > 64) throw std::runtime_error("sample_gaf: too many resamples");
        int n = n_start;
        double margin = 0.0;
        bool ok = false;
        for (; n <= spec.max_degree; n *= 2) {
            const std::vector<cplx> a = detail::gaf_coefficients(seed, attempt, n);
            double min_abs = 1e300;
            for (int i = 0; i < 1024; ++i)
                min_abs = std::min(min_abs,
                                   std::abs(poly_eval(a, std::polar(rho, 6.283185307179586 * i / 1024.0))));
            // 6-sigma bound on the dropped tail, which is a complex Gaussian
            // with variance rho^{2(n+1)} / (1 - rho^2) at each circle point.
            const double tail6 =
                6.0 * std::sqrt(std::pow(rho, 2 * (n + 1)) / (1.0 - rho * rho));
            margin = tail6 / (spec.tail_epsilon * min_abs);
            if (margin < 1.0) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw std::runtime_error("sample_gaf: margin test failed at max_degree");

        std::vector<cplx> zeros = gaf_window_zeros(seed, attempt, n, rho);
        bool clean = true;
        for (std::size_t i = 0; i + 1 < zeros.size() && clean; ++i)
            for (std::size_t j = i + 1; j < zeros.size(); ++j)
                if (std::abs(zeros[i] - zeros[j]) < 1e-10) {
                    clean = false;
                    break;
                }
        if (!clean) continue;  // measure-zero near-collision: resample

        Configuration cfg;
        cfg.d = 1;
        cfg.window_radius = spec.window_radius;
        cfg.seed = seed;
        cfg.generator = "gaf";
        cfg.meta.degree = n;
        cfg.meta.tail_margin = margin;
        cfg.meta.attempts = attempt + 1;
        for (const cplx& z : zeros) cfg.points.emplace_back(z);
        return cfg;
    }
}

// ---------------------------------------------------------------------------
// HKPV sampler.

struct HkpvBasis {
    int d = 1;
    int cutoff = 0;
    std::vector<std::vector<int>> idx;  // multi-indices, |n| <= cutoff
    std::vector<double> scale;          // sqrt(a_n) normalization
    double diag_bound = 0.0;            // sup_ball sum |phi_i|^2
    int size() const { return static_cast<int>(idx.size()); }
};

namespace detail {

inline void enumerate_indices(int d, int total_max, std::vector<int>& cur,
                              std::vector<std::vector<int>>& out, int used) {
    if (static_cast<int>(cur.size()) == d) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k + used <= total_max; ++k) {
        cur.push_back(k);
        enumerate_indices(d, total_max, cur, out, used + k);
        cur.pop_back();
    }
}

}  // namespace detail

inline int hkpv_auto_cutoff(int d, double window_radius) {
    const double t = std::pow(std::tanh(window_radius / 2.0), 2);
    const double full = std::pow(1.0 - t, -(d + 1));
    double partial = 0.0, binom = 1.0, pw = 1.0;
    for (int k = 0;; ++k) {
        partial += binom * pw;  // binom(k+d, d) t^k
        if (partial >= (1.0 - 1e-6) * full) return k;
        binom *= static_cast<double>(k + 1 + d) / (k + 1);
        pw *= t;
        if (k > 100000) throw std::runtime_error("hkpv_auto_cutoff: no convergence");
    }
}

inline HkpvBasis hkpv_basis(int d, int cutoff) {
    HkpvBasis b;
    b.d = d;
    b.cutoff = cutoff;
    std::vector<int> cur;
    detail::enumerate_indices(d, cutoff, cur, b.idx, 0);
    b.scale.reserve(b.idx.size());
    for (const auto& n : b.idx) {
        int total = 0;
        for (int ni : n) total += ni;
        const double a_n = (d + total) / (d * sphere_factor(n));
        b.scale.push_back(std::sqrt(a_n));
        b.diag_bound += a_n * sphere_factor(n);  // sup at |z|=1 of a_n |z^n|^2
    }
    return b;
}

inline void hkpv_eval(const HkpvBasis& b, const Point& x, std::vector<cplx>& out) {
    // Power tables per coordinate, then one product per index.
    static thread_local std::vector<std::vector<cplx>> pow_tab;
    pow_tab.assign(b.d, {});
    for (int i = 0; i < b.d; ++i) {
        auto& col = pow_tab[i];
        col.resize(b.cutoff + 1);
        col[0] = 1.0;
        for (int k = 1; k <= b.cutoff; ++k) col[k] = col[k - 1] * x.c[i];
    }
    out.resize(b.idx.size());
    for (std::size_t j = 0; j < b.idx.size(); ++j) {
        cplx v = b.scale[j];
        for (int i = 0; i < b.d; ++i) v *= pow_tab[i][b.idx[j][i]];
        out[j] = v;
    }
}

// Full draw: exactly basis-size points in the unit ball. Proposals come
// from the normalized kernel-diagonal density K(x,x)/m, so the expected
// proposal count is m H_m rather than (sup K) H_m for uniform proposals.
inline std::vector<Point> sample_hkpv_full(const HkpvBasis& basis, PhiloxRng& rng,
                                           long* proposals_out = nullptr) {
    const int m = basis.size();
    const int d = basis.d;
    // Radial law of K(x,x) dv_d: per-degree masses q_k = binom(k+d,d) d/(d+k).
    std::vector<double> ck(basis.cutoff + 1), qk(basis.cutoff + 1);
    {
        double binom = 1.0;
        for (int k = 0; k <= basis.cutoff; ++k) {
            ck[k] = binom;
            qk[k] = binom * d / static_cast<double>(d + k);
            binom *= static_cast<double>(k + 1 + d) / (k + 1);
        }
    }
    double q_total = 0.0;
    for (double q : qk) q_total += q;
    auto radial_cdf = [&](double r) {
        const double t = r * r;
        double s = 0.0, pw = std::pow(t, d);
        for (int k = 0; k <= basis.cutoff; ++k) {
            s += qk[k] * pw;
            pw *= t;
        }
        return s / q_total;
    };
    auto diag = [&](double r) {
        const double t = r * r;
        double s = 0.0, pw = 1.0;
        for (int k = 0; k <= basis.cutoff; ++k) {
            s += ck[k] * pw;
            pw *= t;
        }
        return s;
    };

    std::vector<std::vector<cplx>> ortho;  // orthonormal coefficient vectors
    std::vector<Point> points;
    std::vector<cplx> phi, v;
    long proposals = 0;
    for (int j = 0; j < m; ++j) {
        for (;;) {
            ++proposals;
            if (proposals > 400L * m * (basis.cutoff + 2) + 100000L)
                throw std::runtime_error("sample_hkpv: rejection sampler stalled");
            // Radius by CDF inversion, direction uniform on the sphere.
            const double u = rng.uniform();
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (radial_cdf(mid) < u ? lo : hi) = mid;
            }
            const double r = 0.5 * (lo + hi);
            std::vector<cplx> c(d);
            double n2 = 0.0;
            for (int i = 0; i < d; ++i) {
                c[i] = {rng.normal(), rng.normal()};
                n2 += std::norm(c[i]);
            }
            const double fac = r / std::sqrt(n2);
            for (auto& ci : c) ci *= fac;
            const Point x(std::move(c));

            hkpv_eval(basis, x, phi);
            double resid = 0.0;
            for (const cplx& p : phi) resid += std::norm(p);
            for (const auto& e : ortho) {
                cplx val = 0.0;  // e evaluated at x
                for (int i = 0; i < m; ++i) val += e[i] * phi[i];
                resid -= std::norm(val);
            }
            if (resid < -1e-9 * basis.diag_bound)
                throw std::runtime_error("sample_hkpv: conditional density went negative");
            resid = std::max(resid, 0.0);
            if (rng.uniform() * diag(r) > resid) continue;

            // Accept: orthonormalize K(., x) against the chosen sections.
            v.resize(m);
            for (int i = 0; i < m; ++i) v[i] = std::conj(phi[i]);
            for (const auto& e : ortho) {
                cplx ip = 0.0;
                for (int i = 0; i < m; ++i) ip += v[i] * std::conj(e[i]);
                for (int i = 0; i < m; ++i) v[i] -= ip * e[i];
            }
            double nrm2 = 0.0;
            for (int i = 0; i < m; ++i) nrm2 += std::norm(v[i]);
            const double inv = 1.0 / std::sqrt(nrm2);
            for (int i = 0; i < m; ++i) v[i] *= inv;
            ortho.push_back(v);
            points.push_back(x);
            break;
        }
    }
    if (proposals_out) *proposals_out = proposals;
    return points;
}

inline Configuration sample_hkpv(const HkpvSpec& spec, std::uint64_t seed) {
    const int cutoff = spec.degree_cutoff >= 0
                           ? spec.degree_cutoff
                           : hkpv_auto_cutoff(spec.d, spec.window_radius);
    const HkpvBasis basis = hkpv_basis(spec.d, cutoff);
    PhiloxRng rng(seed, 0x686b7076u);  // "hkpv" stream tag
    long proposals = 0;
    std::vector<Point> all = sample_hkpv_full(basis, rng, &proposals);

    Configuration cfg;
    cfg.d = spec.d;
    cfg.window_radius = spec.window_radius;
    cfg.seed = seed;
    cfg.generator = "hkpv";
    cfg.meta.degree = cutoff;
    cfg.meta.proposals = proposals;
    cfg.meta.full_point_count = static_cast<int>(all.size());
    const double rho = std::tanh(spec.window_radius / 2.0);
    for (Point& p : all)
        if (std::sqrt(norm_sq(p)) < rho) cfg.points.push_back(std::move(p));
    return cfg;
}

// ---------------------------------------------------------------------------
// Statistics validation.

struct CountStats {
    double radius = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double expected_mean = 0.0;
    double z_score = 0.0;
};

struct PairBin {
    double dist_lo = 0.0, dist_hi = 0.0;
    double empirical_ratio = 0.0;  // observed pairs / first-moment prediction
    double dpp_ratio = 0.0;        // mean 1 - |K|^2/(K K) over the bin
    long n_pairs = 0;
};

struct ValidationReport {
    std::vector<CountStats> counts;
    std::vector<PairBin> pairs;
};

inline ValidationReport validate_statistics(const std::vector<Configuration>& configs,
                                            const std::vector<double>& radii) {
    if (configs.size() < 100)
        throw std::invalid_argument("validate_statistics: need >= 100 configurations");
    ValidationReport rep;
    const int d = configs.front().d;
    const Point origin(std::vector<cplx>(d, 0.0));
    for (double r : radii) {
        CountStats cs;
        cs.radius = r;
        std::vector<double> counts;
        counts.reserve(configs.size());
        for (const auto& cfg : configs) {
            int c = 0;
            for (const auto& p : cfg.points)
                if (bergman_distance(p, origin) < r) ++c;
            counts.push_back(c);
        }
        const double m = static_cast<double>(counts.size());
        for (double c : counts) cs.mean += c;
        cs.mean /= m;
        for (double c : counts) cs.variance += (c - cs.mean) * (c - cs.mean);
        cs.variance /= (m - 1.0);
        cs.expected_mean = ball_volume(r, d);
        cs.z_score = (cs.mean - cs.expected_mean) /
                     std::sqrt(cs.variance / m + 1e-300);
        rep.counts.push_back(cs);
    }

    // Pair statistics: bin by hyperbolic distance; the first-moment
    // prediction per bin comes from a Monte Carlo integral over the product
    // intensity, sampled with a deterministic stream.
    const double bin_w = 0.25;
    const int n_bins = 8;
    std::vector<long> observed(n_bins, 0);
    std::vector<double> q_sum(n_bins, 0.0);
    std::vector<long> q_cnt(n_bins, 0);
    const double window = configs.front().window_radius;
    for (const auto& cfg : configs) {
        for (std::size_t i = 0; i + 1 < cfg.points.size(); ++i)
            for (std::size_t j = i + 1; j < cfg.points.size(); ++j) {
                const double dist = bergman_distance(cfg.points[i], cfg.points[j]);
                const int b = static_cast<int>(dist / bin_w);
                if (b < n_bins) ++observed[b];
            }
    }
    // Product-intensity simulation: points iid with density K(x,x) dA on the
    // window, i.e. hyperbolic-uniform; expected pair count per bin is
    // (configs * lambda^2 / 2) P(bin), lambda = mu(window ball).
    PhiloxRng rng(0xFACEu);
    const double lambda = ball_volume(window, d);
    const long n_mc = 400000;
    std::vector<double> p_bin(n_bins, 0.0);
    auto draw = [&]() {
        // radial CDF inversion by bisection on ball_volume is costly; sample
        // the hyperbolic radius by rejection: the radial density of mu is
        // proportional to e^{dx}(1-e^{-x})^{2d-1}(1+e^{-x}), bounded on the
        // window by 2 e^{d window}.
        for (;;) {
            const double r = window * rng.uniform();
            const double e = std::exp(-r);
            const double dens = 0.5 * std::exp(d * (r - window)) *
                                std::pow(1.0 - e, 2 * d - 1) * (1.0 + e);
            if (rng.uniform() < dens) {
                std::vector<cplx> c(d);
                double n2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    c[i] = {rng.normal(), rng.normal()};
                    n2 += std::norm(c[i]);
                }
                const double rho = std::tanh(r / 2.0);
                const double fac = rho / std::sqrt(n2);
                for (auto& ci : c) ci *= fac;
                return Point(std::move(c));
            }
        }
    };
    for (long it = 0; it < n_mc; ++it) {
        const Point x = draw(), y = draw();
        const double dist = bergman_distance(x, y);
        const int b = static_cast<int>(dist / bin_w);
        if (b < n_bins) {
            p_bin[b] += 1.0;
            const double q = std::norm(bergman_kernel(x, y)) /
                             (bergman_kernel(x, x).real() * bergman_kernel(y, y).real());
            q_sum[b] += 1.0 - q;
            ++q_cnt[b];
        }
    }
    for (int b = 0; b < n_bins; ++b) {
        PairBin pb;
        pb.dist_lo = b * bin_w;
        pb.dist_hi = (b + 1) * bin_w;
        pb.n_pairs = observed[b];
        const double predicted =
            configs.size() * 0.5 * lambda * lambda * (p_bin[b] / n_mc);
        pb.empirical_ratio = predicted > 0.0 ? observed[b] / predicted : 0.0;
        pb.dpp_ratio = q_cnt[b] > 0 ? q_sum[b] / q_cnt[b] : 0.0;
        rep.pairs.push_back(pb);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Configuration archives.

inline void save_configuration(const std::string& path, const Configuration& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_configuration: cannot open " + path);
    char buf[160];
    std::snprintf(buf, sizeof buf, "# dpp d=%d generator=%s seed=%llu R=%.17g N=%d\n",
                  cfg.d, cfg.generator.c_str(),
                  static_cast<unsigned long long>(cfg.seed), cfg.window_radius,
                  cfg.meta.degree);
    out << buf;
    for (const Point& p : cfg.points) {
        std::string line;
        for (int i = 0; i < cfg.d; ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", i ? "," : "",
                          p.c[i].real(), p.c[i].imag());
            line += buf;
        }
        out << line << "\n";
    }
}

inline Configuration load_configuration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_configuration: cannot open " + path);
    Configuration cfg;
    std::string header;
    std::getline(in, header);
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("d=", 0) == 0) cfg.d = std::stoi(tok.substr(2));
            else if (tok.rfind("generator=", 0) == 0) cfg.generator = tok.substr(10);
            else if (tok.rfind("seed=", 0) == 0) cfg.seed = std::stoull(tok.substr(5));
            else if (tok.rfind("R=", 0) == 0) cfg.window_radius = std::stod(tok.substr(2));
            else if (tok.rfind("N=", 0) == 0) cfg.meta.degree = std::stoi(tok.substr(2));
        }
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<cplx> c;
        double re, im;
        char comma;
        while (ls >> re >> comma >> im) {
            c.emplace_back(re, im);
            ls >> comma;  // separator between coordinate pairs, if any
        }
        if (static_cast<int>(c.size()) != cfg.d)
            throw std::runtime_error("load_configuration: wrong coordinate count");
        cfg.points.emplace_back(std::move(c));
    }
    return cfg;
}

}  // namespace bdpp
