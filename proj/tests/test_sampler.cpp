#include <catch2/catch_amalgamated.hpp>

#include <bdpp/sampler.hpp>

#include <cmath>
#include <cstdio>

#include "test_support.hpp"

using namespace bdpp;
using Catch::Approx;

namespace {

GafSpec gaf_r2() {
    GafSpec s;
    s.window_radius = 2.0;
    return s;
}

}  // namespace

TEST_CASE("gaf sampler determinism") {
    const GafSpec spec = gaf_r2();
    const Configuration a = sample_gaf(spec, 42);
    const Configuration b = sample_gaf(spec, 42);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        REQUIRE(a.points[i].c[0] == b.points[i].c[0]);  // bitwise

    const Configuration c = sample_gaf(spec, 43);
    bool same = a.points.size() == c.points.size();
    if (same)
        for (std::size_t i = 0; i < a.points.size(); ++i)
            if (a.points[i].c[0] != c.points[i].c[0]) same = false;
    REQUIRE_FALSE(same);
}

TEST_CASE("gaf truncation stability: doubling the degree moves window zeros < 1e-8") {
    const double rho = std::tanh(1.0);
    for (std::uint64_t seed : {7u, 8u, 9u, 10u}) {
        const int n = 68;
        auto z1 = gaf_window_zeros(seed, 0, n, rho);
        auto z2 = gaf_window_zeros(seed, 0, 2 * n, rho);
        REQUIRE(z1.size() == z2.size());
        for (std::size_t i = 0; i < z1.size(); ++i)
            REQUIRE(std::abs(z1[i] - z2[i]) < 1e-8);
    }
}

TEST_CASE("gaf zero count matches the argument principle") {
    const double rho = std::tanh(1.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Configuration cfg = sample_gaf(gaf_r2(), seed);
        const auto a = detail::gaf_coefficients(seed, cfg.meta.attempts - 1,
                                                cfg.meta.degree);
        REQUIRE(static_cast<int>(cfg.points.size()) ==
                contour_zero_count(a, rho, 8192));
    }
}

TEST_CASE("gaf residuals and window containment") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Configuration cfg = sample_gaf(gaf_r2(), seed);
        const double rho = std::tanh(cfg.window_radius / 2.0);
        const auto a = detail::gaf_coefficients(seed, cfg.meta.attempts - 1,
                                                cfg.meta.degree);
        double max_coef = 0.0;
        for (const cplx& c : a) max_coef = std::max(max_coef, std::abs(c));
        for (const Point& p : cfg.points) {
            REQUIRE(std::abs(p.c[0]) < rho);
            REQUIRE(std::abs(poly_eval(a, p.c[0])) < 1e-10 * max_coef);
        }
        REQUIRE(cfg.meta.tail_margin < 1.0);
    }
}

TEST_CASE("gaf mean count over 300 seeds near the hyperbolic area") {
    const int n_cfg = 300;
    double sum = 0.0, sum2 = 0.0;
    for (int seed = 0; seed < n_cfg; ++seed) {
        const double c =
            static_cast<double>(sample_gaf(gaf_r2(), 1000 + seed).points.size());
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / n_cfg;
    const double var = (sum2 - n_cfg * mean * mean) / (n_cfg - 1);
    const double expect = ball_volume(2.0, 1);  // 1.381097...
    REQUIRE(std::abs(mean - expect) < 3.0 * std::sqrt(var / n_cfg));
}

TEST_CASE("hkpv degenerate rank-1 case is the uniform law") {
    // Cutoff 0: the projection is onto constants, so the single point is
    // uniform for normalized area; E r^2 = 1/2 on the disk.
    HkpvSpec spec;
    spec.d = 1;
    spec.degree_cutoff = 0;
    spec.window_radius = 50.0;  // effectively the whole disk
    double sum_r2 = 0.0;
    const int n = 2000;
    for (int seed = 0; seed < n; ++seed) {
        const Configuration cfg = sample_hkpv(spec, seed);
        REQUIRE(cfg.meta.full_point_count == 1);
        REQUIRE(cfg.points.size() == 1);
        sum_r2 += norm_sq(cfg.points[0]);
    }
    // sd of r^2 under the uniform law is 1/sqrt(12)
    REQUIRE(sum_r2 / n == Approx(0.5).margin(3.0 / std::sqrt(12.0 * n)));
}

TEST_CASE("hkpv point count equals basis size") {
    HkpvSpec spec;
    spec.d = 1;
    spec.window_radius = 2.0;
    const int cutoff = hkpv_auto_cutoff(1, 2.0);
    const HkpvBasis basis = hkpv_basis(1, cutoff);
    REQUIRE(basis.size() == cutoff + 1);
    const Configuration cfg = sample_hkpv(spec, 5);
    REQUIRE(cfg.meta.full_point_count == basis.size());
    REQUIRE(cfg.meta.degree == cutoff);
    const double rho = std::tanh(1.0);
    for (const Point& p : cfg.points) REQUIRE(std::sqrt(norm_sq(p)) < rho);
}

TEST_CASE("hkpv window count agrees with gaf statistics, d=1") {
    HkpvSpec spec;
    spec.d = 1;
    spec.window_radius = 2.0;
    const int n_cfg = 200;
    double sum = 0.0, sum2 = 0.0;
    for (int seed = 0; seed < n_cfg; ++seed) {
        const double c =
            static_cast<double>(sample_hkpv(spec, 500 + seed).points.size());
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / n_cfg;
    const double var = (sum2 - n_cfg * mean * mean) / (n_cfg - 1);
    REQUIRE(std::abs(mean - ball_volume(2.0, 1)) < 3.0 * std::sqrt(var / n_cfg));
}

TEST_CASE("hkpv d=2 count in B(o,1)") {
    HkpvSpec spec;
    spec.d = 2;
    spec.window_radius = 1.0;
    const Point origin(std::vector<cplx>(2, 0.0));
    const int n_cfg = 120;
    double sum = 0.0, sum2 = 0.0;
    for (int seed = 0; seed < n_cfg; ++seed) {
        const Configuration cfg = sample_hkpv(spec, 300 + seed);
        int c = 0;
        for (const Point& p : cfg.points)
            if (bergman_distance(p, origin) < 1.0) ++c;
        sum += c;
        sum2 += static_cast<double>(c) * c;
    }
    const double mean = sum / n_cfg;
    const double var = (sum2 - n_cfg * mean * mean) / (n_cfg - 1);
    REQUIRE(std::abs(mean - ball_volume(1.0, 2)) <
            3.0 * std::sqrt(var / n_cfg) + 1e-9);
}

TEST_CASE("count variance in a euclidean disk matches the closed form t^2/(1-t^4)") {
    // Independent oracle for the d=1 projection process: Var N(D_t) =
    // int_D K - int_D int_D |K|^2 = t^2/(1-t^2) - t^4/(1-t^4).
    const double t = std::tanh(1.0);  // euclidean radius of the R=2 window
    const double closed = t * t / (1.0 - t * t * t * t);
    const int n_cfg = 400;
    double sum = 0.0, sum2 = 0.0;
    for (int seed = 0; seed < n_cfg; ++seed) {
        const double c =
            static_cast<double>(sample_gaf(gaf_r2(), 7000 + seed).points.size());
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / n_cfg;
    const double var = (sum2 - n_cfg * mean * mean) / (n_cfg - 1);
    // var of the sample variance ~ var^2 (2/(n-1) + kurtosis excess/n); allow 20%
    REQUIRE(var == Approx(closed).epsilon(0.20));
}

TEST_CASE("validate_statistics reports sane z-scores and short-range repulsion") {
    std::vector<Configuration> configs;
    for (int seed = 0; seed < 300; ++seed)
        configs.push_back(sample_gaf(gaf_r2(), 2000 + seed));
    const ValidationReport rep = validate_statistics(configs, {1.0, 1.5, 2.0});
    for (const CountStats& cs : rep.counts) {
        REQUIRE(std::abs(cs.z_score) < 4.0);
        REQUIRE(cs.expected_mean == Approx(ball_volume(cs.radius, 1)));
    }
    REQUIRE_FALSE(rep.pairs.empty());
    // Determinantal repulsion: the shortest-distance bin is strongly thinned
    // relative to the product intensity, in both columns.
    REQUIRE(rep.pairs.front().dpp_ratio < 0.25);
    REQUIRE(rep.pairs.front().empirical_ratio < 0.5);
    // theory for the last bin: 1 - (1-tanh^2(d/2))^2 ~ 0.79 at d ~ 1.9
    REQUIRE(rep.pairs.back().dpp_ratio > 0.7);
    REQUIRE(rep.pairs.back().empirical_ratio > 0.5);
    REQUIRE_THROWS_AS(
        validate_statistics(std::vector<Configuration>(configs.begin(),
                                                       configs.begin() + 10),
                            {1.0}),
        std::invalid_argument);
}

TEST_CASE("configuration archive round-trip") {
    const Configuration cfg = sample_gaf(gaf_r2(), 77);
    const std::string path = "archive_rt.txt";
    save_configuration(path, cfg);
    const Configuration back = load_configuration(path);
    REQUIRE(back.d == cfg.d);
    REQUIRE(back.generator == "gaf");
    REQUIRE(back.seed == cfg.seed);
    REQUIRE(back.window_radius == cfg.window_radius);
    REQUIRE(back.meta.degree == cfg.meta.degree);
    REQUIRE(back.points.size() == cfg.points.size());
    for (std::size_t i = 0; i < cfg.points.size(); ++i)
        REQUIRE(back.points[i].c[0] == cfg.points[i].c[0]);  // exact via %.17g

    HkpvSpec hs;
    hs.d = 2;
    hs.window_radius = 1.0;
    const Configuration cfg2 = sample_hkpv(hs, 3);
    save_configuration(path, cfg2);
    const Configuration back2 = load_configuration(path);
    REQUIRE(back2.d == 2);
    REQUIRE(back2.points.size() == cfg2.points.size());
    for (std::size_t i = 0; i < cfg2.points.size(); ++i)
        for (int k = 0; k < 2; ++k)
            REQUIRE(back2.points[i].c[k] == cfg2.points[i].c[k]);
    std::remove(path.c_str());
}
