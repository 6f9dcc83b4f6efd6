#include "mandel/tau.hpp"

#include <cmath>

#include "mandel/rng.hpp"

namespace mandel::tau {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};
} // namespace

cplx bidifferential_W(const surface::MarkedSurface& ms, cplx P, cplx Q) {
    if (ms.genus == 0) {
        if (std::abs(P - Q) < 1e-12) throw CoincidentPoints("W requires P != Q");
        const cplx d = P - Q;
        return 1.0 / (d * d);
    }
    specfun::TorusModulus tm(ms.B);
    if (specfun::lattice_distance(P - Q, tm) < 1e-12)
        throw CoincidentPoints("W requires P != Q mod lattice");
    const specfun::WeierstrassValues wv = specfun::weierstrass(P - Q, tm);
    const specfun::ThetaConstants tc = specfun::theta_constants(tm);
    return wv.p - (4.0 * kPi * kI / 3.0) * tc.dlog_deriv1_dB;
}

std::pair<cplx, double> tau12_genus0(const surface::FlatFrame& frame, uint64_t seed,
                                     int n_samples, double constancy_tol) {
    const surface::MarkedSurface& ms = frame.surface();
    if (ms.genus != 0) throw Error("tau12_genus0 requires genus 0");
    const int n = ms.n();
    const int nz = int(frame.zeros().size());

    // jets once
    std::vector<cplx> lam_pole(n), lam_zero(nz);
    for (int m = 0; m < n; ++m) lam_pole[m] = frame.lambda_pole(m);
    for (int l = 0; l < nz; ++l) lam_zero[l] = frame.lambda_zero(l);

    // sampling box around the divisor
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const cplx& p : frame.divisor_positions()) {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    const double pad = 0.75 * std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
    lo_x -= pad;
    hi_x += pad;
    lo_y -= pad;
    hi_y += pad;

    SplitMix64 rng(seed);
    std::vector<cplx> values;
    values.reserve(n_samples);
    int guard = 0;
    while (int(values.size()) < n_samples && guard++ < 100 * n_samples) {
        const cplx Q{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
        if (frame.form().divisor_distance(Q, frame.zeros()) < frame.tol().clearance)
            continue;
        const cplx fQ = frame.form().f(Q);
        if (std::abs(fQ) < 1e-8) continue;
        cplx val = 1.0 / (fQ * fQ);
        for (int m = 0; m < n; ++m) {
            const cplx d = ms.points[m] - Q;
            val *= (1.0 / lam_pole[m]) / (d * d);
        }
        for (int l = 0; l < nz; ++l) {
            const cplx d = frame.zeros()[l] - Q;
            val /= (1.0 / lam_zero[l]) / (d * d);
        }
        values.push_back(val);
    }
    if (int(values.size()) < n_samples)
        throw ConstancyViolation("could not draw enough clear sample points");
    cplx mean = 0.0;
    for (const cplx& v : values) mean += v;
    mean /= double(values.size());
    double spread = 0.0;
    for (const cplx& v : values) spread = std::max(spread, std::abs(v - mean));
    spread /= std::max(std::abs(mean), 1e-300);
    if (spread > constancy_tol)
        throw ConstancyViolation("genus-0 evaluand not constant: spread = " +
                                 std::to_string(spread));
    return {mean, spread};
}

cplx tau12_genus1(const surface::FlatFrame& frame) {
    const surface::MarkedSurface& ms = frame.surface();
    if (ms.genus != 1) throw Error("tau12_genus1 requires genus 1");
    const specfun::ThetaConstants tc = specfun::theta_constants(frame.form().modulus());
    cplx out = std::pow(tc.deriv1, 8);
    for (int l = 0; l < int(frame.zeros().size()); ++l) out *= frame.lambda_zero(l);
    for (int m = 0; m < ms.n(); ++m) out /= frame.lambda_pole(m);
    return out;
}

TauReport determinant_up_to_C(const surface::FlatFrame& frame, uint64_t seed,
                              int n_samples) {
    TauReport rep;
    rep.sample_seed = seed;
    const surface::MarkedSurface& ms = frame.surface();
    if (ms.genus == 0) {
        auto [t12, spread] = tau12_genus0(frame, seed, n_samples, frame.tol().constancy_tol);
        rep.tau12 = t12;
        rep.constancy_spread = spread;
        rep.n_samples = n_samples;
        rep.det_im_B = 1.0;
    } else {
        rep.tau12 = tau12_genus1(frame);
        rep.constancy_spread = 0.0;
        rep.det_im_B = ms.B.imag();
    }
    rep.abs_tau_sq = std::pow(std::abs(rep.tau12), 1.0 / 6.0);
    rep.determinant_up_to_C = rep.det_im_B * rep.abs_tau_sq;
    if (!(rep.abs_tau_sq > 0.0) || !std::isfinite(rep.determinant_up_to_C))
        throw NonFinite("tau report degenerate");
    return rep;
}

} // namespace mandel::tau
