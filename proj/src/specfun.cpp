#include "mandel/specfun.hpp"

#include <cmath>
#include <limits>

namespace mandel::specfun {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

long binom(int n, int k) {
    long r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

} // namespace

TorusModulus::TorusModulus(cplx B_, double b_min) : B(B_) {
    if (!(B.imag() >= b_min)) {
        throw ModulusOutOfDomain("Im B = " + std::to_string(B.imag()) +
                                 " below admissible minimum " + std::to_string(b_min));
    }
    q = std::exp(kI * kPi * B);
}

cplx lattice_reduce(cplx u, const TorusModulus& B) {
    // u = s + t*B with s,t real; shift both to [-1/2, 1/2).
    double t = u.imag() / B.B.imag();
    double s = u.real() - t * B.B.real();
    s -= std::round(s);
    t -= std::round(t);
    return s + t * B.B;
}

double lattice_distance(cplx u, const TorusModulus& B) {
    cplx r = lattice_reduce(u, B);
    double d = std::abs(r);
    // The reduced cell is not a Voronoi cell; check the neighboring images.
    for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n)
            d = std::min(d, std::abs(r - cplx(double(m), 0.0) - double(n) * B.B));
    return d;
}

namespace {

// Series evaluation in the reduced cell: all four z-derivative orders in one
// sweep. Terms are 2 (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z) and derivatives.
ThetaJet theta1_series(cplx z, const TorusModulus& B, double rel_tol) {
    ThetaJet jet;
    double mag = 0.0;
    int low_count = 0;
    for (int n = 0; n < 512; ++n) {
        const double k = 2.0 * n + 1.0;
        const cplx qp = std::exp(kI * kPi * B.B * (0.25 * k * k)); // q^{(n+1/2)^2}, analytic in B
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx a = 2.0 * sgn * qp;
        const cplx s = std::sin(k * kPi * z);
        const cplx c = std::cos(k * kPi * z);
        const double kp = k * kPi;
        const cplx t0 = a * s;
        const cplx t1 = a * kp * c;
        const cplx t2 = -a * kp * kp * s;
        const cplx t3 = -a * kp * kp * kp * c;
        jet.d0 += t0;
        jet.d1 += t1;
        jet.d2 += t2;
        jet.d3 += t3;
        const double tmag = std::abs(a) * (1.0 + kp) * (1.0 + std::abs(s) + std::abs(c));
        mag = std::max(mag, std::abs(jet.d1));
        if (tmag < rel_tol * std::max(mag, 1e-300)) {
            if (++low_count >= 2) break;
        } else {
            low_count = 0;
        }
    }
    if (!finite(jet.d0) || !finite(jet.d1) || !finite(jet.d2) || !finite(jet.d3))
        throw NonFinite("theta1 series overflow");
    return jet;
}

} // namespace

ThetaJet theta1_jet(cplx z, const TorusModulus& B, double rel_tol) {
    // z = z0 + m + n B with z0 in the reduced cell.
    double t = z.imag() / B.B.imag();
    double s = z.real() - t * B.B.real();
    const double ms = std::round(s);
    const double nt = std::round(t);
    const long m = long(ms), n = long(nt);
    const cplx z0 = (s - ms) + (t - nt) * B.B;

    ThetaJet base = theta1_series(z0, B, rel_tol);
    if (m == 0 && n == 0) return base;

    // theta1(z0 + m + nB) = (-1)^{m+n} exp(-i pi n^2 B - 2 pi i n z0) theta1(z0);
    // derivatives follow from the product rule with mu' = -2 pi i n mu.
    const double sgn = ((m + n) % 2 == 0) ? 1.0 : -1.0;
    const cplx mu = sgn * std::exp(-kI * kPi * double(n) * double(n) * B.B -
                                   2.0 * kPi * kI * double(n) * z0);
    const cplx lam = -2.0 * kPi * kI * double(n);
    const cplx d[4] = {base.d0, base.d1, base.d2, base.d3};
    cplx out[4];
    for (int k = 0; k < 4; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j <= k; ++j)
            acc += double(binom(k, j)) * std::pow(lam, k - j) * d[j];
        out[k] = mu * acc;
    }
    ThetaJet jet;
    jet.d0 = out[0];
    jet.d1 = out[1];
    jet.d2 = out[2];
    jet.d3 = out[3];
    return jet;
}

cplx theta1(cplx z, const TorusModulus& B, int order, double rel_tol) {
    if (order < 0 || order > 3)
        throw Error("theta1: derivative order must be in {0,1,2,3}");
    ThetaJet jet = theta1_jet(z, B, rel_tol);
    switch (order) {
        case 0: return jet.d0;
        case 1: return jet.d1;
        case 2: return jet.d2;
        default: return jet.d3;
    }
}

cplx theta1_dB(cplx z, const TorusModulus& B, double rel_tol) {
    // Term-wise: d/dB q^{(n+1/2)^2} = i pi (n+1/2)^2 q^{(n+1/2)^2}.
    // Direct summation; callers pass z of moderate imaginary part.
    cplx sum = 0.0;
    double mag = 0.0;
    int low_count = 0;
    for (int n = 0; n < 512; ++n) {
        const double k = 2.0 * n + 1.0;
        const double e = 0.25 * k * k;
        const cplx qp = std::exp(kI * kPi * B.B * e);
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx term = 2.0 * sgn * (kI * kPi * e) * qp * std::sin(k * kPi * z);
        sum += term;
        mag = std::max(mag, std::abs(sum));
        if (std::abs(term) < rel_tol * std::max(mag, 1e-300)) {
            if (++low_count >= 2) break;
        } else {
            low_count = 0;
        }
    }
    if (!finite(sum)) throw NonFinite("theta1_dB series overflow");
    return sum;
}

ThetaConstants theta_constants(const TorusModulus& B, bool cross_check, double rel_tol) {
    ThetaConstants out;
    ThetaJet jet = theta1_jet(cplx(0.0), B, rel_tol);
    out.deriv1 = jet.d1;
    out.deriv3 = jet.d3;

    // Term-wise B-derivative of theta1'(0|B):
    //   theta1'(0|B) = 2 pi sum (-1)^n (2n+1) q^{(n+1/2)^2}.
    cplx dB = 0.0;
    double mag = 0.0;
    int low_count = 0;
    for (int n = 0; n < 512; ++n) {
        const double k = 2.0 * n + 1.0;
        const double e = 0.25 * k * k;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx term = 2.0 * kPi * sgn * k * (kI * kPi * e) * std::exp(kI * kPi * B.B * e);
        dB += term;
        mag = std::max(mag, std::abs(dB));
        if (std::abs(term) < rel_tol * std::max(mag, 1e-300)) {
            if (++low_count >= 2) break;
        } else {
            low_count = 0;
        }
    }
    out.dlog_deriv1_dB = dB / out.deriv1;

    if (cross_check) {
        // Central differences in B with one Richardson level.
        auto logd1 = [&](cplx Bv) {
            TorusModulus Bm(Bv, 0.5 * B.B.imag());
            return std::log(theta1_jet(cplx(0.0), Bm, rel_tol).d1);
        };
        auto fd = [&](double h) {
            return (logd1(B.B + h) - logd1(B.B - h)) / (2.0 * h);
        };
        const double h = 1e-4 * std::max(1.0, std::abs(B.B));
        const cplx d_h = fd(h);
        const cplx d_h2 = fd(0.5 * h);
        const cplx richardson = (4.0 * d_h2 - d_h) / 3.0;
        const double rel = std::abs(richardson - out.dlog_deriv1_dB) /
                           std::max(1e-30, std::abs(out.dlog_deriv1_dB));
        if (rel > 1e-9)
            throw Error("theta_constants cross-check failed: series vs FD differ by " +
                        std::to_string(rel));
    }
    return out;
}

WeierstrassValues weierstrass(cplx u, const TorusModulus& B, double exclusion_radius) {
    if (lattice_distance(u, B) < exclusion_radius)
        throw LatticePoint("weierstrass: argument within exclusion radius of a lattice point");
    const double tr = u.imag() / B.B.imag();
    const double sr = u.real() - tr * B.B.real();
    const double m = std::round(sr);
    const double n = std::round(tr);
    const cplx ur = (sr - m) + (tr - n) * B.B; // u = ur + m + n B

    ThetaJet jet = theta1_jet(ur, B);
    ThetaJet j0 = theta1_jet(cplx(0.0), B);
    const cplx L = jet.d1 / jet.d0;                       // (log theta1)'
    const cplx L1 = jet.d2 / jet.d0 - L * L;              // (log theta1)''
    const cplx L2 = jet.d3 / jet.d0 - 3.0 * (jet.d2 / jet.d0) * L + 2.0 * L * L * L;

    WeierstrassValues w;
    w.p = -L1 + j0.d3 / (3.0 * j0.d1);
    w.p_prime = -L2;
    // zeta(u) = theta1'(u)/theta1(u) + 2 eta1 u on the cell, with
    // eta1 = -theta1'''(0)/(6 theta1'(0)); quasi-periods add 2 eta1 per unit
    // step and 2 eta2 per B-step, eta2 = eta1 B - i pi (Legendre relation).
    const cplx eta1 = -j0.d3 / (6.0 * j0.d1);
    const cplx eta2 = eta1 * B.B - kI * kPi;
    w.zeta_w = L + 2.0 * eta1 * ur + 2.0 * eta1 * m + 2.0 * eta2 * n;
    if (!finite(w.p) || !finite(w.p_prime) || !finite(w.zeta_w))
        throw NonFinite("weierstrass: non-finite value");
    return w;
}

double regularized_product(double c) {
    if (!(c > 0.0)) throw Error("regularized_product requires c > 0");
    // zeta_R(0) = -1/2, zeta_R'(0) = -(1/2) log(2 pi).
    constexpr double kZetaR0 = -0.5;
    constexpr double kZetaRPrime0 = -0.91893853320467274178; // -(1/2) log(2 pi)
    return std::exp(-kZetaRPrime0) * std::pow(c, kZetaR0);
}

} // namespace mandel::specfun
