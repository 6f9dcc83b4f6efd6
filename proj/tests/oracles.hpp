#pragma once

// Test-only independent oracles. These deliberately avoid the library's own
// evaluation paths.

#include <complex>

namespace oracles {

using cplx = std::complex<double>;

// Eisenstein invariants g2, g3 of the lattice Z + B Z via row-summed lattice
// sums: S_k(w) = sum_m (m + w)^{-k} in closed cotangent form, then summed
// over rows n != 0 (exponentially convergent).
//   S4(w) = (pi^4/3) (1 + t^2)(1 + 3 t^2),  t = cot(pi w)
//   S6(w) = (pi^6/15)(1 + t^2)(2 + 15 t^2 + 15 t^4)
inline std::pair<cplx, cplx> eisenstein_g2_g3(cplx B) {
    const double pi = 3.141592653589793238462643383279502884;
    auto cot = [&](cplx w) { return std::cos(w) / std::sin(w); };
    auto S4 = [&](cplx w) {
        const cplx t = cot(pi * w);
        const cplx t2 = t * t;
        return std::pow(pi, 4) / 3.0 * (1.0 + t2) * (1.0 + 3.0 * t2);
    };
    auto S6 = [&](cplx w) {
        const cplx t = cot(pi * w);
        const cplx t2 = t * t;
        return std::pow(pi, 6) / 15.0 * (1.0 + t2) * (2.0 + 15.0 * t2 + 15.0 * t2 * t2);
    };
    const double zeta4 = std::pow(pi, 4) / 90.0;
    const double zeta6 = std::pow(pi, 6) / 945.0;
    cplx sum4 = 2.0 * zeta4;
    cplx sum6 = 2.0 * zeta6;
    for (int n = 1; n < 400; ++n) {
        const cplx t4 = 2.0 * S4(double(n) * B);
        const cplx t6 = 2.0 * S6(double(n) * B);
        sum4 += t4;
        sum6 += t6;
        if (std::abs(t4) < 1e-18 * std::abs(sum4) && std::abs(t6) < 1e-18 * std::abs(sum6))
            break;
    }
    return {60.0 * sum4, 140.0 * sum6};
}

// Closed form for the genus-0 zero-circle contour of (S_B - S_omega)/omega
// around a simple zero R of omega = f dz (S_B = 0 in the uniformizer chart):
//   2 pi i [ (f'')^2/(4 f'^3) - f'''/(4 f'^2) ]   evaluated at R.
inline cplx zero_circle_contour_g0(cplx f1, cplx f2, cplx f3) {
    const cplx I{0.0, 1.0};
    const double pi = 3.141592653589793238462643383279502884;
    return 2.0 * pi * I * (f2 * f2 / (4.0 * f1 * f1 * f1) - f3 / (4.0 * f1 * f1));
}

} // namespace oracles
