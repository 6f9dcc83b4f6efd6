#include <doctest.h>

#include <cmath>
#include <complex>

#include "mandel/quadrature.hpp"

using namespace mandel;
using quad::cplx;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx I{0.0, 1.0};
} // namespace

TEST_CASE("segment integral of a polynomial is exact") {
    auto f = [](cplx z) { return z * z * z - 2.0 * z + cplx(0.0, 1.5); };
    const cplx a{-1.0, 0.3}, b{2.0, -0.7};
    auto F = [](cplx z) { return 0.25 * z * z * z * z - z * z + cplx(0.0, 1.5) * z; };
    const cplx got = quad::integrate_leg(f, quad::Leg::segment(a, b), 1e-13);
    CHECK(std::abs(got - (F(b) - F(a))) < 1e-12);
}

TEST_CASE("residue over a full circle") {
    auto f = [](cplx z) { return 1.0 / (z - cplx(0.3, 0.2)); };
    const cplx got = quad::integrate_leg(f, quad::Leg::arc(cplx(0.3, 0.2), 0.8, 0.0, 2 * kPi),
                                         1e-13);
    CHECK(std::abs(got - 2.0 * kPi * I) < 1e-11);
}

TEST_CASE("oscillatory integrand converges adaptively") {
    auto f = [](cplx z) { return std::exp(20.0 * I * z.real()); };
    const cplx got = quad::integrate_leg(f, quad::Leg::segment(cplx(0.0), cplx(1.0)), 1e-12);
    const cplx expect = (std::exp(20.0 * I) - 1.0) / (20.0 * I);
    CHECK(std::abs(got - expect) < 1e-11);
}

TEST_CASE("real quadrature: erfc moment") {
    // int_0^inf erfc(u) u du = 1/4 (truncated far beyond the tail)
    const double got = quad::integrate_real([](double u) { return std::erfc(u) * u; }, 0.0,
                                            12.0, 1e-12);
    CHECK(got == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("non-integrable endpoint exhausts the budget") {
    auto f = [](cplx z) { return 1.0 / z; };
    CHECK_THROWS_AS(quad::integrate_leg(f, quad::Leg::segment(cplx(0.0), cplx(1.0)), 1e-12,
                                        20),
                    QuadratureFailure);
}
