#include <doctest.h>

#include <cmath>

#include "chainrisk/error.hpp"
#include "chainrisk/quadrature.hpp"

using namespace chainrisk;

TEST_CASE("adaptive_simpson integrates smooth functions to tolerance") {
    const auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 2.0) < 1e-9);
    CHECK(std::fabs(integrate([](double x) { return std::exp(-x); }, 0.0, 40.0) - (1.0 - std::exp(-40.0))) <
          1e-9);
    // Polynomials of degree <= 3 are exact.
    CHECK(integrate([](double x) { return x * x * x - 2 * x; }, -1.0, 2.0) == doctest::Approx(0.75));
}

TEST_CASE("narrow peaks are found") {
    const auto f = [](double x) { return std::exp(-std::pow((x - 7.3) / 0.01, 2)); };
    CHECK(integrate(f, 0.0, 10.0) == doctest::Approx(0.01 * std::sqrt(M_PI)).epsilon(1e-7));
}

TEST_CASE("integrable endpoint singularity") {
    // ∫_0^1 x^{-1/2} dx = 2; the endpoint is nudged inward.
    QuadratureOptions q;
    q.abs_tol = 1e-6;
    q.max_depth = 60;
    const auto r = adaptive_simpson([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q);
    CHECK(std::fabs(r.value - 2.0) < 1e-3);
}

TEST_CASE("reversed and empty intervals") {
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("non-convergence raises NumericalError") {
    QuadratureOptions q;
    q.max_depth = 2;
    q.initial_panels = 1;
    q.abs_tol = 1e-15;
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, q),
                    NumericalError);
}
