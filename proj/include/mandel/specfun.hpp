#pragma once

#include <complex>

#include "mandel/errors.hpp"

namespace mandel::specfun {

using cplx = std::complex<double>;

// Smallest admissible Im B. Moduli closer to the real axis are rejected
// instead of being modular-reduced; the transformation laws are exercised
// by tests, not applied internally.
inline constexpr double kDefaultBMin = 0.05;

// Relative series cutoff: summation stops after two consecutive terms fall
// below rel_tol times the accumulated magnitude.
inline constexpr double kSeriesRelTol = 1e-15;

// Period-lattice ratio B with Im B > 0 and the derived nome q = exp(i*pi*B).
struct TorusModulus {
    cplx B;
    cplx q;

    explicit TorusModulus(cplx B_, double b_min = kDefaultBMin);
};

// Value and z-derivatives of theta_1 at one point, plus the B-derivative of
// log theta_1'(0|B) when produced by theta_constants().
struct ThetaJet {
    cplx d0{};
    cplx d1{};
    cplx d2{};
    cplx d3{};
};

// theta_1'(0|B), theta_1'''(0|B) and d/dB log theta_1'(0|B).
struct ThetaConstants {
    cplx deriv1;
    cplx deriv3;
    cplx dlog_deriv1_dB;
};

struct WeierstrassValues {
    cplx p;       // P(u|B)
    cplx p_prime; // P'(u|B)
    cplx zeta_w;  // zeta(u|B), odd normalization on the lattice Z + B Z
};

// theta_1(z|B) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z).
// The argument is reduced to the fundamental cell first; the exact
// quasi-periodicity factors are applied to all requested derivatives.
ThetaJet theta1_jet(cplx z, const TorusModulus& B, double rel_tol = kSeriesRelTol);

// k-th z-derivative, k in {0,1,2,3}.
cplx theta1(cplx z, const TorusModulus& B, int order, double rel_tol = kSeriesRelTol);

// Term-wise d/dB of theta_1(z|B) (used by the heat-equation self test and
// by theta_constants).
cplx theta1_dB(cplx z, const TorusModulus& B, double rel_tol = kSeriesRelTol);

// Constants at z = 0. With cross_check = true the B-derivative is also
// computed by Richardson-extrapolated central differences in B and the two
// routes must agree to 1e-9 relative.
ThetaConstants theta_constants(const TorusModulus& B, bool cross_check = false,
                               double rel_tol = kSeriesRelTol);

// P, P', zeta on the lattice Z + B Z, built from theta_1 jets.
//   P(u)    = (theta1'/theta1)^2(u) - theta1''(u)/theta1(u) + theta1'''(0)/(3 theta1'(0))
//   zeta(u) = theta1'(u)/theta1(u) - [theta1'''(0)/(3 theta1'(0))] u
// The linear term in zeta enforces zeta(1/2) = -(1/6) theta1'''(0)/theta1'(0).
WeierstrassValues weierstrass(cplx u, const TorusModulus& B,
                              double exclusion_radius = 1e-8);

// Distance from u to the nearest point of Z + B Z.
double lattice_distance(cplx u, const TorusModulus& B);

// Reduce u modulo Z + B Z to the cell centered at 0.
cplx lattice_reduce(cplx u, const TorusModulus& B);

// Zeta-regularized value of prod_{l>=1} (c*l) for c > 0:
//   exp(-zeta_R'(0)) * c^{zeta_R(0)} = sqrt(2*pi) / sqrt(c).
double regularized_product(double c);

} // namespace mandel::specfun
