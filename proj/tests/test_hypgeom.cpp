#include <catch2/catch_amalgamated.hpp>

#include <bdpp/hypgeom.hpp>
#include <bdpp/rng.hpp>

#include <cmath>

#include "test_support.hpp"

using namespace bdpp;
using Catch::Approx;
using testutil::random_point;

TEST_CASE("mobius involution basics") {
    SECTION("phi_o = -id") {
        PhiloxRng rng(11);
        for (int d : {1, 2, 3}) {
            Point o(std::vector<cplx>(d, 0.0));
            Point z = random_point(rng, d);
            Point img = mobius_involution(o, z);
            for (int i = 0; i < d; ++i)
                REQUIRE(std::abs(img.c[i] + z.c[i]) < 1e-15);
        }
    }

    SECTION("phi_w(w) = o, d=1") {
        Point w(cplx(0.5, 0.0));
        Point img = mobius_involution(w, w);
        REQUIRE(std::abs(img.c[0]) < 1e-14);
    }

    SECTION("phi_w is an involution, random pairs, d in {1,2,3}") {
        PhiloxRng rng(12);
        for (int d : {1, 2, 3}) {
            for (int it = 0; it < 1000; ++it) {
                Point w = random_point(rng, d);
                Point z = random_point(rng, d);
                Point back = mobius_involution(w, mobius_involution(w, z));
                for (int i = 0; i < d; ++i)
                    REQUIRE(std::abs(back.c[i] - z.c[i]) < 1e-12);
            }
        }
    }

    SECTION("dimension mismatch and domain errors") {
        Point a(cplx(0.1, 0.0));
        Point b(std::vector<cplx>{0.1, 0.1});
        REQUIRE_THROWS_AS(mobius_involution(a, b), std::invalid_argument);
        REQUIRE_THROWS_AS(mobius_involution(Point(cplx(1.2, 0.0)), a), std::domain_error);
    }
}

TEST_CASE("bergman distance") {
    SECTION("d(o,o) = 0") {
        Point o(cplx(0.0, 0.0));
        REQUIRE(bergman_distance(o, o) == 0.0);
    }

    SECTION("d=1: |x| = tanh(1) sits at hyperbolic distance 2 from the origin") {
        // Oracle: invert d = log((1+r)/(1-r)) analytically, r = tanh(d/2).
        Point x(cplx(std::tanh(1.0), 0.0));
        Point o(cplx(0.0, 0.0));
        REQUIRE(bergman_distance(x, o) == Approx(2.0).epsilon(1e-13));
        REQUIRE(std::tanh(1.0) == Approx(0.761594).margin(1e-6));
    }

    SECTION("symmetry and Mobius invariance") {
        PhiloxRng rng(13);
        for (int d : {1, 2}) {
            for (int it = 0; it < 200; ++it) {
                Point w = random_point(rng, d), x = random_point(rng, d),
                      z = random_point(rng, d);
                const double dxz = bergman_distance(x, z);
                REQUIRE(bergman_distance(z, x) == Approx(dxz).margin(1e-12));
                const double moved = bergman_distance(mobius_involution(w, x),
                                                      mobius_involution(w, z));
                REQUIRE(std::abs(moved - dxz) < 1e-10);
            }
        }
    }

    SECTION("triangle inequality on random triples") {
        PhiloxRng rng(14);
        for (int it = 0; it < 10000; ++it) {
            const int d = 1 + static_cast<int>(rng.uniform() * 3);
            Point a = random_point(rng, d), b = random_point(rng, d),
                  c = random_point(rng, d);
            REQUIRE(bergman_distance(a, c) <=
                    bergman_distance(a, b) + bergman_distance(b, c) + 1e-12);
        }
    }
}

TEST_CASE("mob-id kernel identity residual") {
    Point o(cplx(0.0, 0.0));
    REQUIRE(mobius_kernel_identity_residual(o, o, o) == 0.0);

    PhiloxRng rng(15);
    for (int d : {1, 2}) {
        for (int it = 0; it < 100; ++it) {
            Point x = random_point(rng, d), y = random_point(rng, d),
                  z = random_point(rng, d);
            REQUIRE(mobius_kernel_identity_residual(x, y, z) < 1e-12);
        }
    }
}

TEST_CASE("invariant density") {
    REQUIRE(invariant_density(Point(cplx(0.0, 0.0))) == 1.0);
    // |z|^2 = 0.5
    REQUIRE(invariant_density(Point(cplx(std::sqrt(0.5), 0.0))) == Approx(4.0));
    REQUIRE(invariant_density(Point(std::vector<cplx>{0.5, 0.5})) == Approx(8.0));
}

TEST_CASE("ball volume") {
    REQUIRE(ball_volume(0.0, 1) == 0.0);
    REQUIRE(ball_volume(0.0, 3) == 0.0);

    SECTION("d=1 closed form vs quadrature of the polar integrand") {
        // Oracle: numeric quadrature of (1/4) int e^{-x}(e^x-1)(e^x+1) dx.
        for (double r : {0.5, 1.0, 2.0, 3.0}) {
            auto integrand = [](double x) {
                return std::exp(-x) * (std::exp(x) - 1.0) * (std::exp(x) + 1.0);
            };
            const double quad = 0.25 * integrate(integrand, 0.0, r, 1e-13).value;
            REQUIRE(ball_volume(r, 1) == Approx(quad).epsilon(1e-10));
        }
        REQUIRE(ball_volume(2.0, 1) == Approx((std::cosh(2.0) - 1.0) / 2.0));
        REQUIRE(ball_volume(2.0, 1) == Approx(1.381097).margin(1e-6));
    }

    SECTION("strictly increasing in r") {
        for (int d : {1, 2, 3}) {
            double prev = 0.0;
            for (double r = 0.25; r <= 5.0; r += 0.25) {
                const double v = ball_volume(r, d);
                REQUIRE(v > prev);
                prev = v;
            }
        }
    }

    SECTION("growth limit mu(B(o,r))/e^{dr} -> 1/4^d") {
        REQUIRE(ball_volume(20.0, 1) / std::exp(20.0) == Approx(0.25).margin(1e-8));
        REQUIRE(ball_volume(25.0, 2) / std::exp(50.0) == Approx(1.0 / 16.0).epsilon(1e-6));
    }
}

TEST_CASE("annulus index") {
    Point o(cplx(0.0, 0.0));
    REQUIRE(annulus_index(o, o) == 0);
    // d_B = 1.5, plus the half-open convention around the d_B = 3 boundary
    // (ties resolve by the floor of the computed distance).
    REQUIRE(annulus_index(Point(cplx(std::tanh(0.75), 0.0)), o) == 1);
    REQUIRE(annulus_index(Point(cplx(std::tanh(1.5 + 1e-9), 0.0)), o) == 3);
    REQUIRE(annulus_index(Point(cplx(std::tanh(1.5 - 1e-9), 0.0)), o) == 2);
}

TEST_CASE("poincare mass") {
    SECTION("d=1 closed form anchors") {
        REQUIRE(poincare_mass(2.0, 1) == Approx(1.0 / 6.0).epsilon(1e-12));
        const double s = 1.001;
        REQUIRE((s - 1.0) * poincare_mass(s, 1) ==
                Approx(0.25 - 0.001 / (4.0 * 2.001)).epsilon(1e-12));
    }

    SECTION("closed form matches the quadrature route to 1e-10 relative") {
        for (double s : {1.05, 1.2, 1.5, 2.0}) {
            REQUIRE(poincare_mass_by_quadrature(s, 1) ==
                    Approx(poincare_mass(s, 1)).epsilon(1e-10));
        }
    }

    SECTION("(s-d) g_P(s) approaches d/4^d monotonically") {
        for (int d : {1, 2}) {
            const double target = d * std::pow(0.25, d);
            double prev_err = -1.0, prev_val = -1.0;
            for (double gap : {1e-1, 1e-2, 1e-3}) {
                const double val = gap * poincare_mass(d + gap, d);
                const double err = std::abs(val - target);
                if (prev_err >= 0.0) {
                    REQUIRE(err < prev_err);
                    REQUIRE(val > prev_val);  // monotone in s toward the limit
                }
                prev_err = err;
                prev_val = val;
            }
            REQUIRE(prev_err < 1e-3 * target);
        }
        REQUIRE(2.001 - 2.0 > 0);
        REQUIRE(0.001 * poincare_mass(2.001, 2) == Approx(0.125).epsilon(0.01));
    }

    SECTION("domain guard") {
        REQUIRE_THROWS_AS(poincare_mass(1.0, 1), std::domain_error);
        REQUIRE_THROWS_AS(poincare_mass(1.7, 2), std::domain_error);
    }
}

TEST_CASE("poisson kernel") {
    SECTION("P(o, zeta) = 1") {
        REQUIRE(poisson_kernel(Point(cplx(0.0, 0.0)), BoundaryPoint(cplx(1.0, 0.0))) == 1.0);
        REQUIRE(poisson_kernel(Point(std::vector<cplx>(2, 0.0)),
                               BoundaryPoint(std::vector<cplx>{1.0, 0.0})) == 1.0);
    }

    SECTION("d=1 boundary normalization by 4096-point trapezoid") {
        const Point z(cplx(0.3, 0.4));
        auto f = [&](double th) {
            return poisson_kernel(z, BoundaryPoint(std::polar(1.0, th)));
        };
        REQUIRE(periodic_trapezoid(f, 4096) == Approx(1.0).margin(1e-10));
    }

    SECTION("d=2 sphere mean close to 1, |w|=0.5") {
        PhiloxRng rng(16);
        const Point w(std::vector<cplx>{0.35355339059327373, cplx(0.0, 0.35355339059327373)});
        double sum = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            // Uniform on S^3 via normalized Gaussians.
            std::vector<cplx> c{{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}};
            double n2 = std::norm(c[0]) + std::norm(c[1]);
            const double inv = 1.0 / std::sqrt(n2);
            c[0] *= inv;
            c[1] *= inv;
            sum += poisson_kernel(w, BoundaryPoint(std::move(c)));
        }
        REQUIRE(sum / n == Approx(1.0).margin(0.02));
    }
}
