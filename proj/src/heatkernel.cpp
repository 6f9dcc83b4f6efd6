#include "mandel/heatkernel.hpp"

#include <cmath>

#include "mandel/quadrature.hpp"

namespace mandel::heat {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
} // namespace

double heat_kernel_cylinder(double x, double y, double x2, double y2, double t, double a) {
    if (!(t > 0.0)) throw Error("heat_kernel_cylinder requires t > 0");
    if (!(a > 0.0)) throw Error("heat_kernel_cylinder requires a > 0");
    const double dx = x - x2;
    const double dy = y - y2;
    const double gauss_x = std::exp(-dx * dx / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
    if (4.0 * kPi * t > a * a) {
        // spectral sum over circle modes
        double s = 1.0;
        for (int n = 1; n < 100000; ++n) {
            const double term = 2.0 * std::cos(2.0 * kPi * n * dy / a) *
                                std::exp(-4.0 * kPi * kPi * n * n * t / (a * a));
            s += term;
            if (std::exp(-4.0 * kPi * kPi * n * n * t / (a * a)) < 1e-18) break;
        }
        return gauss_x * s / a;
    }
    // image sum
    double s = 0.0;
    const int mmax = int(std::ceil(std::sqrt(4.0 * t * 42.0) / a)) + 2;
    for (int m = -mmax; m <= mmax; ++m) {
        const double d = dy + m * a;
        s += std::exp(-d * d / (4.0 * t));
    }
    return gauss_x * s / std::sqrt(4.0 * kPi * t);
}

double heat_kernel_cone4pi(double r1, double phi1, double r2, double phi2, double t) {
    if (!(t > 0.0)) throw Error("heat_kernel_cone4pi requires t > 0");
    const double dphi = phi1 - phi2;
    const double rho2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(dphi);
    const double u = std::sqrt(std::max(r1 * r2, 0.0) / t) * std::cos(0.5 * dphi);
    return (1.0 / (8.0 * kPi * t)) * std::exp(-rho2 / (4.0 * t)) * (1.0 + std::erf(u));
}

double cone_defect(double t, double abs_tol) {
    if (!(t > 0.0)) throw Error("cone_defect requires t > 0");
    // diagonal defect (1/(8 pi t))(erf(r/sqrt t) - 1), area element 4 pi r dr
    auto g = [&](double r) {
        return (heat_kernel_cone4pi(r, 0.0, r, 0.0, t) - 1.0 / (4.0 * kPi * t)) * 4.0 *
               kPi * r;
    };
    const double r_max = 10.0 * std::sqrt(t);
    const double val = quad::integrate_real(g, 0.0, r_max, abs_tol);
    // far-field tail is below erfc(10) ~ 2e-45 of the scale; nothing to add
    return val;
}

double relative_trace_constant(int interior_slits) {
    if (interior_slits < 0) throw Error("interior slit count must be >= 0");
    if (interior_slits == 0) return 0.0;
    return 2.0 * interior_slits * cone_defect(0.5);
}

} // namespace mandel::heat
