#pragma once

#include "mandel/errors.hpp"

namespace mandel::heat {

// Heat kernel of the infinite flat cylinder of circumference a:
//   H = e^{-(x-x')^2/4t} / (sqrt(4 pi t) a) * sum_n e^{2 pi i n (y-y')/a - 4 pi^2 n^2 t / a^2}.
// Evaluated through the spectral sum or its Poisson-summed image form,
// whichever converges faster.
double heat_kernel_cylinder(double x, double y, double x2, double y2, double t, double a);

// Sommerfeld kernel on the flat cone of total angle 4 pi (two-sheeted cover
// of the plane branched at the tip); phi coordinates are 4 pi periodic:
//   K = (1/(8 pi t)) e^{-(r^2 + r'^2 - 2 r r' cos dphi)/(4t)}
//       [1 + erf(sqrt(r r' / t) cos(dphi/2))].
double heat_kernel_cone4pi(double r1, double phi1, double r2, double phi2, double t);

// Integral over the infinite 4 pi cone of [K(p,p;t) - 1/(4 pi t)] dA by
// adaptive radial quadrature; equals (1/12)(2pi/beta - beta/2pi) = -1/8 for
// beta = 4 pi, independently of t.
double cone_defect(double t, double abs_tol = 1e-9);

// Small-time relative heat-trace constant for a diagram with the given
// number of interior slits: each slit adds two 4 pi cone points, so the
// constant is 2 K times the cone defect, i.e. -K/4.
double relative_trace_constant(int interior_slits);

} // namespace mandel::heat
