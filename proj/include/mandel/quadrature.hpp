#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mandel/errors.hpp"

namespace mandel::quad {

using cplx = std::complex<double>;

// One leg of an integration path: a straight segment or a circular arc.
struct Leg {
    enum class Kind { segment, arc } kind = Kind::segment;
    // segment: from a to b.
    cplx a{}, b{};
    // arc: center, radius, parameter angles (radians, arc runs t0 -> t1).
    cplx center{};
    double radius = 0.0;
    double t0 = 0.0, t1 = 0.0;

    static Leg segment(cplx a, cplx b) {
        Leg l;
        l.kind = Kind::segment;
        l.a = a;
        l.b = b;
        return l;
    }
    static Leg arc(cplx center, double radius, double t0, double t1) {
        Leg l;
        l.kind = Kind::arc;
        l.center = center;
        l.radius = radius;
        l.t0 = t0;
        l.t1 = t1;
        return l;
    }
    cplx start() const;
    cplx end() const;
    double length() const;
    cplx point(double s) const;   // s in [0,1]
    cplx tangent(double s) const; // dz/ds
};

using Path = std::vector<Leg>;

double path_length(const Path& p);

// Adaptive Gauss-Kronrod (G7,K15) for complex line integrals of f(z) dz.
// abs_tol is an absolute tolerance on the whole leg; throws QuadratureFailure
// when the error estimate does not reach it within the subdivision budget.
cplx integrate_leg(const std::function<cplx(cplx)>& f, const Leg& leg,
                   double abs_tol, int max_depth = 48);

cplx integrate_path(const std::function<cplx(cplx)>& f, const Path& path,
                    double abs_tol, int max_depth = 48);

// Adaptive 1-D quadrature of a real integrand on [a,b].
double integrate_real(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth = 48);

} // namespace mandel::quad
