#include <doctest.h>

#include <complex>

#include "mandel/specfun.hpp"
#include "oracles.hpp"

using namespace mandel;
using specfun::cplx;
using specfun::TorusModulus;

namespace {
const cplx I{0.0, 1.0};
constexpr double kPi = 3.141592653589793238462643383279502884;
} // namespace

TEST_CASE("theta1 vanishes at the origin and is odd") {
    TorusModulus B(I);
    CHECK(std::abs(specfun::theta1(cplx(0.0), B, 0)) == 0.0);

    TorusModulus B2(cplx(0.2, 1.1));
    const cplx z{0.3, 0.1};
    const cplx plus = specfun::theta1(z, B2, 0);
    const cplx minus = specfun::theta1(-z, B2, 0);
    CHECK(std::abs(plus + minus) < 1e-14 * std::abs(plus));
}

TEST_CASE("theta1 quasi-periodicity") {
    TorusModulus B(I);
    const cplx z{0.25, 0.0};
    const cplx lhs = specfun::theta1(z + 1.0, B, 0);
    const cplx rhs = -specfun::theta1(z, B, 0);
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(rhs));

    // z -> z + B picks up -exp(-i pi B - 2 pi i z)
    TorusModulus B3(cplx(0.13, 0.87));
    const cplx z3{0.21, 0.33};
    const cplx lhs3 = specfun::theta1(z3 + B3.B, B3, 0);
    const cplx factor = -std::exp(-I * kPi * B3.B - 2.0 * kPi * I * z3);
    const cplx rhs3 = factor * specfun::theta1(z3, B3, 0);
    CHECK(std::abs(lhs3 - rhs3) < 1e-10 * std::abs(rhs3));
}

TEST_CASE("theta1 heat equation: dB theta = theta''/(4 pi i)") {
    TorusModulus B(1.2 * I);
    const cplx z{0.3, 0.0};
    const cplx lhs = specfun::theta1_dB(z, B);
    const cplx rhs = specfun::theta1(z, B, 2) / (4.0 * kPi * I);
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("theta constants: even derivative vanishes, |theta1'(0)| invariant under B+1") {
    TorusModulus B(cplx(0.3, 0.9));
    CHECK(std::abs(specfun::theta1(cplx(0.0), B, 2)) < 1e-14);

    TorusModulus Bp(cplx(1.3, 0.9));
    const auto c0 = specfun::theta_constants(B);
    const auto c1 = specfun::theta_constants(Bp);
    CHECK(std::abs(std::abs(c1.deriv1) - std::abs(c0.deriv1)) < 1e-12 * std::abs(c0.deriv1));
    // the exact law theta1'(0|B+1) = e^{i pi/4} theta1'(0|B)
    const cplx law = std::exp(I * kPi / 4.0) * c0.deriv1;
    CHECK(std::abs(c1.deriv1 - law) < 1e-12 * std::abs(law));
}

TEST_CASE("theta constants cross-check mode (series vs FD Richardson)") {
    TorusModulus B(cplx(0.1, 1.05));
    CHECK_NOTHROW(specfun::theta_constants(B, /*cross_check=*/true));
}

TEST_CASE("weierstrass: evenness, Laurent leading term, differential equation") {
    TorusModulus B(I);
    const cplx u{0.31, 0.17};
    const auto wp = specfun::weierstrass(u, B);
    const auto wm = specfun::weierstrass(-u, B);
    CHECK(std::abs(wp.p - wm.p) < 1e-11 * std::abs(wp.p));
    CHECK(std::abs(wp.p_prime + wm.p_prime) < 1e-10 * std::abs(wp.p_prime));
    CHECK(std::abs(wp.zeta_w + wm.zeta_w) < 1e-11 * std::abs(wp.zeta_w));

    // u^2 P(u) -> 1 as u -> 0
    const auto tiny = specfun::weierstrass(cplx(1e-3, 0.0), B);
    CHECK(std::abs(tiny.p * 1e-6 - 1.0) < 1e-5);

    // (P')^2 = 4 P^3 - g2 P - g3 with Eisenstein oracle invariants
    TorusModulus B2(cplx(0.1, 1.3));
    const cplx u2{0.3, 0.2};
    const auto w2 = specfun::weierstrass(u2, B2);
    const auto [g2, g3] = oracles::eisenstein_g2_g3(B2.B);
    const cplx lhs = w2.p_prime * w2.p_prime;
    const cplx rhs = 4.0 * w2.p * w2.p * w2.p - g2 * w2.p - g3;
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(w2.p * w2.p * w2.p)));
}

TEST_CASE("weierstrass quasi-period Legendre relation") {
    TorusModulus B(cplx(0.21, 1.17));
    // eta1 = zeta(1/2), eta2 = zeta(B/2); Legendre: eta1 B - eta2 = i pi
    const cplx eta1 = specfun::weierstrass(cplx(0.5, 0.0), B).zeta_w;
    const cplx eta2 = specfun::weierstrass(0.5 * B.B, B).zeta_w;
    CHECK(std::abs(eta1 * B.B - eta2 - I * kPi) < 1e-11);
}

TEST_CASE("weierstrass rejects lattice points") {
    TorusModulus B(I);
    CHECK_THROWS_AS(specfun::weierstrass(cplx(1.0, 0.0) + B.B, B), LatticePoint);
}

TEST_CASE("modulus domain guard") {
    CHECK_THROWS_AS(TorusModulus(cplx(0.0, 0.01)), ModulusOutOfDomain);
}

TEST_CASE("regularized product closed form") {
    const double sqrt2pi = 2.5066282746310005;
    CHECK(specfun::regularized_product(1.0) == doctest::Approx(sqrt2pi).epsilon(1e-12));
    CHECK(specfun::regularized_product(4.0) == doctest::Approx(sqrt2pi / 2.0).epsilon(1e-12));
    // monotone decreasing in c
    CHECK(specfun::regularized_product(0.5) > specfun::regularized_product(2.0));
    // product(c) * product(1/c) = 2 pi
    const double c = 3.7;
    CHECK(specfun::regularized_product(c) * specfun::regularized_product(1.0 / c) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-14));
}
