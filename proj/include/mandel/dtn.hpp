#pragma once

#include <vector>

#include "mandel/errors.hpp"

namespace mandel::dtn {

// Per-mode 2x2 block of the Dirichlet-to-Neumann operator of the model
// cylinder (circumference a, cut circles at x = -R and x = +R, spectral
// parameter mu^2 <= 0). The bounded harmonic extension outside contributes
// kappa * Id, the finite cylinder of length 2R the standard hyperbolic
// coupling:
//   block = [[kappa + kappa coth(2 kappa R), -kappa/sinh(2 kappa R)],
//            [-kappa/sinh(2 kappa R), kappa + kappa coth(2 kappa R)]]
// Its eigenvectors are (1,1)/(1,-1) for every mode, with eigenvalues
//   kappa (1 + tanh(kappa R))  and  kappa (1 + coth(kappa R)),
// using coth(2x) - csch(2x) = tanh(x) and coth(2x) + csch(2x) = coth(x).
// At ell = 0, mu = 0 these degenerate to {0, 1/R} (constants are the kernel).
struct DtnBlock {
    int ell = 0;
    double kappa = 0.0;        // sqrt((2 pi ell / a)^2 - mu^2)
    double diag = 0.0;         // block diagonal entry
    double offdiag = 0.0;      // block off-diagonal entry
    double eig_symmetric = 0.0;
    double eig_antisymmetric = 0.0;
};

std::vector<DtnBlock> dtn_blocks(double a, double R, double mu2, int ell_max);

// Lowest eigenvalue lambda_1(mu) = kappa0 (1 + tanh(kappa0 R)), kappa0 = -i mu
// for mu on the positive imaginary axis (mu2 = mu^2 < 0).
double dtn_lambda1(double a, double R, double mu2);

// Zeta-regularized determinant of N(0) with the zero eigenvalue replaced by
// the exact 1/R antisymmetric partner:
//   det* N(0) = (1/R) * [regprod(4 pi/a)]^2 *
//               prod_{l>=1} [(1+tanh(kl R))(1+coth(kl R))/4]^2,   kl = 2 pi l/a.
// The divergent leading product over 2*kl (squared for the +-l multiplicity)
// is evaluated with the zeta-regularized regularized_product; the remaining
// correction converges exponentially.
double dtn_det_star(double a, double R);

// det N(mu^2)/(-i mu) in convergent-ratio form: the kappa-ratio part of the
// correction product has the closed form [sinh(pi x)/(pi x)]^2 with
// x = kappa0 a / (2 pi); tends to dtn_det_star(a, R) as mu -> i 0+.
double dtn_det_ratio(double a, double R, double mu2);

} // namespace mandel::dtn
