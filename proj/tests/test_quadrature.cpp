#include <catch2/catch_amalgamated.hpp>

#include <bdpp/quadrature.hpp>

#include <cmath>

using namespace bdpp;
using Catch::Approx;

TEST_CASE("adaptive GL on smooth and singular integrands") {
    REQUIRE(integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value ==
            Approx(2.0).epsilon(1e-13));

    // Integrable endpoint singularity 1/sqrt(x); convergence is geometric in
    // depth here, not spectral, so expect ~1e-8 only.
    REQUIRE(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12).value ==
            Approx(2.0).margin(1e-8));

    // Sharp interior peak.
    auto peak = [](double x) { return 1.0 / (1e-6 + (x - 0.3) * (x - 0.3)); };
    const double exact = (std::atan(0.7 / 1e-3) + std::atan(0.3 / 1e-3)) / 1e-3;
    REQUIRE(integrate(peak, 0.0, 1.0, 1e-10).value == Approx(exact).epsilon(1e-10));
}

TEST_CASE("semi-infinite and 2D helpers") {
    REQUIRE(integrate_to_inf([](double x) { return std::exp(-x); }, 0.0).value ==
            Approx(1.0).epsilon(1e-12));
    REQUIRE(integrate_to_inf([](double x) { return std::exp(-x) * x; }, 0.0).value ==
            Approx(1.0).epsilon(1e-12));

    auto f = [](double x, double y) { return x * y + std::sin(x + y); };
    // int_0^1 int_0^1 = 1/4 + [2 sin(1) - sin(2)] ... via 1D reference:
    auto outer = [](double x) {
        return x * 0.5 + (std::cos(x) - std::cos(x + 1.0));
    };
    const double ref = integrate(outer, 0.0, 1.0, 1e-13).value;
    REQUIRE(integrate2d(f, 0.0, 1.0, 0.0, 1.0, 1e-11).value == Approx(ref).epsilon(1e-10));
}

TEST_CASE("periodic trapezoid is spectrally accurate") {
    auto f = [](double th) { return std::exp(std::cos(th)); };
    // Bessel I_0(1).
    REQUIRE(periodic_trapezoid(f, 64) == Approx(1.2660658777520083).epsilon(1e-14));
}
