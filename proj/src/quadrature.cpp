#include "mandel/quadrature.hpp"

#include <cmath>

namespace mandel::quad {

namespace {

// Kronrod 15-point nodes/weights on [-1,1]; Gauss-7 weights on the shared nodes.
constexpr double kXgk[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr double kWgk[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
constexpr double kWg[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct GK {
    cplx value;
    double error;
};

// One G7-K15 panel of f(z(s)) z'(s) ds over s in [s0,s1].
template <typename Map>
GK gk_panel(const std::function<cplx(cplx)>& f, const Map& map, double s0, double s1) {
    const double c = 0.5 * (s0 + s1);
    const double h = 0.5 * (s1 - s0);
    cplx k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double s = c + h * kXgk[i];
        auto [z, dz] = map(s);
        const cplx v = f(z) * dz;
        k15 += kWgk[i] * v;
        if (i % 2 == 1) g7 += kWg[i / 2] * v;
    }
    k15 *= h;
    g7 *= h;
    const double diff = std::abs(k15 - g7);
    // Standard QUADPACK-style sharpened error estimate.
    const double err = diff * std::sqrt(diff > 0 ? std::min(1.0, std::pow(200.0 * diff, 0.5)) : 0.0);
    return {k15, std::max(err, diff * 1e-3)};
}

template <typename Map>
cplx adaptive(const std::function<cplx(cplx)>& f, const Map& map, double abs_tol,
              int max_depth) {
    struct Item {
        double s0, s1;
        int depth;
        GK gk;
    };
    std::vector<Item> stack;
    stack.push_back({0.0, 1.0, 0, gk_panel(f, map, 0.0, 1.0)});
    cplx total = 0.0;
    double err_total = 0.0;
    // Depth-first refinement with per-panel tolerance split by length share.
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const double share = (it.s1 - it.s0);
        if (it.gk.error <= abs_tol * share || it.depth >= max_depth) {
            if (it.depth >= max_depth && it.gk.error > 64.0 * abs_tol * share)
                throw QuadratureFailure("adaptive quadrature: refinement budget exhausted");
            total += it.gk.value;
            err_total += it.gk.error;
            continue;
        }
        const double mid = 0.5 * (it.s0 + it.s1);
        stack.push_back({it.s0, mid, it.depth + 1, gk_panel(f, map, it.s0, mid)});
        stack.push_back({mid, it.s1, it.depth + 1, gk_panel(f, map, mid, it.s1)});
    }
    if (!(std::isfinite(total.real()) && std::isfinite(total.imag())))
        throw QuadratureFailure("adaptive quadrature: non-finite result");
    (void)err_total;
    return total;
}

} // namespace

cplx Leg::start() const { return kind == Kind::segment ? a : point(0.0); }
cplx Leg::end() const { return kind == Kind::segment ? b : point(1.0); }

double Leg::length() const {
    if (kind == Kind::segment) return std::abs(b - a);
    return radius * std::abs(t1 - t0);
}

cplx Leg::point(double s) const {
    if (kind == Kind::segment) return a + s * (b - a);
    const double t = t0 + s * (t1 - t0);
    return center + radius * cplx(std::cos(t), std::sin(t));
}

cplx Leg::tangent(double s) const {
    if (kind == Kind::segment) return b - a;
    const double t = t0 + s * (t1 - t0);
    return radius * (t1 - t0) * cplx(-std::sin(t), std::cos(t));
}

double path_length(const Path& p) {
    double L = 0.0;
    for (const auto& leg : p) L += leg.length();
    return L;
}

cplx integrate_leg(const std::function<cplx(cplx)>& f, const Leg& leg, double abs_tol,
                   int max_depth) {
    auto map = [&](double s) { return std::pair<cplx, cplx>(leg.point(s), leg.tangent(s)); };
    return adaptive(f, map, abs_tol, max_depth);
}

cplx integrate_path(const std::function<cplx(cplx)>& f, const Path& path, double abs_tol,
                    int max_depth) {
    cplx total = 0.0;
    const double L = path_length(path);
    for (const auto& leg : path) {
        const double share = L > 0 ? leg.length() / L : 1.0;
        total += integrate_leg(f, leg, abs_tol * std::max(share, 1e-3), max_depth);
    }
    return total;
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth) {
    auto map = [&](double s) {
        return std::pair<cplx, cplx>(cplx(a + s * (b - a), 0.0), cplx(b - a, 0.0));
    };
    std::function<cplx(cplx)> fc = [&](cplx z) { return cplx(f(z.real()), 0.0); };
    return adaptive(fc, map, abs_tol, max_depth).real();
}

} // namespace mandel::quad
