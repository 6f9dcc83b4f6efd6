#pragma once

#include <complex>
#include <cstdint>

#include "mandel/surface.hpp"

namespace mandel::tau {

using cplx = std::complex<double>;

struct TauReport {
    cplx tau12{};                   // the single-valued 12th power
    double abs_tau_sq = 0.0;        // |tau|^2 = |tau12|^{1/6}
    double det_im_B = 1.0;          // genus 1: Im B; genus 0: 1
    double determinant_up_to_C = 0.0; // det_im_B * abs_tau_sq
    double constancy_spread = 0.0;  // genus-0 diagnostic
    uint64_t sample_seed = 0;
    int n_samples = 0;
};

// Canonical symmetric bidifferential, chart coefficient in dz(P) dz(Q):
//   genus 0: 1/(P-Q)^2
//   genus 1: P(P-Q|B) - (4 pi i/3) d/dB log theta1'(0|B)
cplx bidifferential_W(const surface::MarkedSurface& ms, cplx P, cplx Q);

// Genus-0 tau^12 by constancy sampling of
//   (1/omega^2) prod_m W(P_m, .) / prod_l W(R_l, .)
// over seeded random points; returns (mean, relative spread).
std::pair<cplx, double> tau12_genus0(const surface::FlatFrame& frame, uint64_t seed,
                                     int n_samples, double constancy_tol);

// Genus-1 tau^12 = theta1'(0|B)^8 prod_l lambda(R_l) / prod_m lambda(P_m).
cplx tau12_genus1(const surface::FlatFrame& frame);

TauReport determinant_up_to_C(const surface::FlatFrame& frame, uint64_t seed = 42,
                              int n_samples = 24);

} // namespace mandel::tau
