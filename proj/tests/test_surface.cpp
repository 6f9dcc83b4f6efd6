#include <doctest.h>

#include <cmath>
#include <complex>

#include "mandel/surface.hpp"

using namespace mandel;
using surface::cplx;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx I{0.0, 1.0};

surface::MarkedSurface two_pole_sphere() {
    surface::MarkedSurface ms;
    ms.genus = 0;
    ms.points = {cplx(0.0), cplx(1.0)};
    ms.residues = {-1.0, 1.0};
    return ms;
}

surface::MarkedSurface four_pole_sphere() {
    surface::MarkedSurface ms;
    ms.genus = 0;
    ms.points = {cplx(0.0), cplx(1.0), cplx(2.0), cplx(0.7, 0.9)};
    ms.residues = {1.0, -2.0, 0.5, 0.5};
    return ms;
}

surface::MarkedSurface torus_pair(cplx B = I, cplx zp = cplx(0.25, 0.0),
                                  cplx zm = cplx(-0.25, 0.0)) {
    surface::MarkedSurface ms;
    ms.genus = 1;
    ms.B = B;
    ms.points = {zp, zm};
    ms.residues = {1.0, -1.0};
    return ms;
}

} // namespace

TEST_CASE("two-pole sphere: residues verified, no zeros") {
    auto form = surface::build_form(two_pole_sphere());
    CHECK(surface::find_zeros(form).empty());
    // residue theorem over a pole circle
    quad::Path circle{quad::Leg::arc(cplx(1.0), 0.25, 0.0, 2.0 * kPi)};
    const cplx v = surface::integrate_form(form, circle);
    CHECK(std::abs(v - 2.0 * kPi * I) < 1e-10);
}

TEST_CASE("degenerate surfaces rejected") {
    auto ms = two_pole_sphere();
    ms.points[1] = ms.points[0];
    CHECK_THROWS_AS(surface::build_form(ms), DegenerateSurface);

    auto ms2 = two_pole_sphere();
    ms2.residues = {1.0, 1.0};
    CHECK_THROWS_AS(surface::build_form(ms2), DegenerateSurface);
}

TEST_CASE("genus 0, n=4: two zeros of the quadratic numerator") {
    auto form = surface::build_form(four_pole_sphere());
    auto zeros = surface::find_zeros(form);
    REQUIRE(zeros.size() == 2);
    for (const cplx& r : zeros) CHECK(std::abs(form.f(r)) < 1e-9);
}

TEST_CASE("non-simple zero detected") {
    // residues chosen as partial fractions of z^2 / prod(z - z_m):
    // the numerator is exactly z^2, a double zero at the origin.
    surface::MarkedSurface ms;
    ms.genus = 0;
    ms.points = {cplx(-2.0), cplx(-1.0), cplx(1.0), cplx(2.0)};
    ms.residues = {-1.0 / 3.0, 1.0 / 6.0, -1.0 / 6.0, 1.0 / 3.0};
    auto form = surface::build_form(ms);
    CHECK_THROWS_AS(surface::find_zeros(form), NonSimpleZero);
}

TEST_CASE("closed contractible contour integrates to zero") {
    auto form = surface::build_form(four_pole_sphere());
    quad::Path circle{quad::Leg::arc(cplx(8.0, 8.0), 0.7, 0.0, 2.0 * kPi)};
    CHECK(std::abs(surface::integrate_form(form, circle)) < 1e-12);
}

TEST_CASE("clearance violation raised for paths through a pole") {
    auto form = surface::build_form(four_pole_sphere());
    quad::Path bad{quad::Leg::segment(cplx(-1.0, 0.0), cplx(3.0, 0.0))};
    CHECK_THROWS_AS(surface::integrate_form(form, bad), ClearanceViolation);
}

TEST_CASE("genus 1 normalization: purely imaginary periods") {
    auto form = surface::build_form(torus_pair());
    CHECK(std::abs(form.period_a().real()) < 1e-12);
    CHECK(std::abs(form.period_b().real()) < 1e-12);
    // re-measure independently over catalog representatives
    surface::FlatFrame frame(form);
    for (const auto& c : surface::cycle_catalog(frame)) {
        if (c.role == surface::Cycle::Role::a_cycle ||
            c.role == surface::Cycle::Role::b_cycle) {
            const cplx p = surface::integrate_form(form, c.path);
            CHECK(std::abs(p.real()) < 1e-10 * (1.0 + std::abs(p)));
        }
    }
}

TEST_CASE("genus 1 uniqueness of the normalization constant") {
    auto ms = torus_pair();
    auto f1 = surface::build_form(ms);
    // jitter the marked points by a lattice vector: same surface data
    auto ms2 = ms;
    ms2.points[0] += 1.0 + ms.B * 0.0;
    auto f2 = surface::build_form(ms2);
    CHECK(std::abs(f1.normalization_c() - f2.normalization_c()) < 1e-12);
}

TEST_CASE("genus 1 symmetric pair: zeros form a +- pair") {
    auto form = surface::build_form(torus_pair());
    auto zeros = surface::find_zeros(form);
    REQUIRE(zeros.size() == 2);
    // evenness of the coefficient under z -> -z: zeros come in +- pairs
    specfun::TorusModulus tm(form.surface().B);
    const double d = specfun::lattice_distance(zeros[0] + zeros[1], tm);
    CHECK(d < 1e-7);
}

TEST_CASE("pole circles: sum of residues vanishes; zero circles carry none") {
    auto form = surface::build_form(four_pole_sphere());
    surface::FlatFrame frame(form);
    cplx acc = 0.0;
    for (const auto& c : surface::cycle_catalog(frame)) {
        if (c.role == surface::Cycle::Role::pole_circle)
            acc += surface::integrate_form(form, c.path);
        if (c.role == surface::Cycle::Role::zero_circle)
            CHECK(std::abs(surface::integrate_form(form, c.path)) < 1e-11);
    }
    CHECK(std::abs(acc) < 1e-10);
}

TEST_CASE("genus 1: a/b representatives intersect once (combinatorially)") {
    auto form = surface::build_form(torus_pair(cplx(0.1, 1.2), cplx(0.31, 0.12),
                                               cplx(-0.17, -0.05)));
    surface::FlatFrame frame(form);
    quad::Path pa, pb;
    for (const auto& c : surface::cycle_catalog(frame)) {
        if (c.role == surface::Cycle::Role::a_cycle) pa = c.path;
        if (c.role == surface::Cycle::Role::b_cycle) pb = c.path;
    }
    REQUIRE(!pa.empty());
    REQUIRE(!pb.empty());
    auto poly_a = surface::path_polyline(pa);
    auto poly_b = surface::path_polyline(pb);
    int total = 0;
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) {
            auto shifted = poly_a;
            for (auto& z : shifted) z += cplx(double(m), 0.0) + double(n) * form.surface().B;
            total += surface::intersection_number(shifted, poly_b);
        }
    CHECK(std::abs(total) == 1);
}

TEST_CASE("distinguished jets: round cylinder and local models") {
    // omega = dz/(z-1) - dz/z has h* values with lambda1 lambda2 = -1/(p1-p2)^2
    auto form = surface::build_form(two_pole_sphere());
    surface::FlatFrame frame(form);
    const cplx l0 = frame.lambda_pole(0);
    const cplx l1 = frame.lambda_pole(1);
    const cplx prod = l0 * l1;
    const cplx expect = -1.0 / ((cplx(0.0) - cplx(1.0)) * (cplx(0.0) - cplx(1.0)));
    CHECK(std::abs(prod - expect) < 1e-10 * std::abs(expect));

    // zero jets: lambda^2 = f'(R)/2, branch-insensitive modulus
    auto form4 = surface::build_form(four_pole_sphere());
    surface::FlatFrame frame4(form4);
    for (int l = 0; l < 2; ++l) {
        const cplx lam = frame4.lambda_zero(l);
        const cplx back = lam * lam;
        CHECK(std::abs(back - 0.5 * form4.f_jets(frame4.zeros()[l])[1]) <
              1e-12 * std::abs(back));
    }
}

TEST_CASE("flat values and jets are translation invariant (genus 0)") {
    auto ms = four_pole_sphere();
    auto frameA = surface::FlatFrame(surface::build_form(ms));
    auto msB = ms;
    for (auto& p : msB.points) p += cplx(0.37, 0.0);
    auto frameB = surface::FlatFrame(surface::build_form(msB));
    auto ca = surface::forward_coordinates(frameA);
    auto cb = surface::forward_coordinates(frameB);
    REQUIRE(ca.tau.size() == cb.tau.size());
    for (size_t i = 0; i < ca.tau.size(); ++i) {
        CHECK(ca.tau[i] == doctest::Approx(cb.tau[i]).epsilon(1e-9));
        CHECK(ca.theta[i] == doctest::Approx(cb.theta[i]).epsilon(1e-9));
    }
}

TEST_CASE("forward coordinates: dimension counts") {
    auto frame0 = surface::FlatFrame(surface::build_form(four_pole_sphere()));
    auto c0 = surface::forward_coordinates(frame0);
    CHECK(c0.h.size() == 0);
    CHECK(c0.tau.size() == 1);
    CHECK(c0.theta.size() == 1);

    auto frame1 = surface::FlatFrame(surface::build_form(torus_pair(cplx(0.0, 1.1),
                                                                    cplx(0.25, 0.065),
                                                                    cplx(-0.25, -0.065))));
    auto c1 = surface::forward_coordinates(frame1);
    CHECK(c1.h.size() == 1);
    CHECK(c1.tau.size() == 1);
    CHECK(c1.theta.size() == 2);
    CHECK(c1.h[0] > 0.0);
}

TEST_CASE("relabeling marked points leaves coordinates unchanged") {
    auto ms = four_pole_sphere();
    auto ca = surface::forward_coordinates(surface::FlatFrame(surface::build_form(ms)));
    surface::MarkedSurface perm = ms;
    std::swap(perm.points[0], perm.points[2]);
    std::swap(perm.residues[0], perm.residues[2]);
    auto cbv = surface::forward_coordinates(surface::FlatFrame(surface::build_form(perm)));
    for (size_t i = 0; i < ca.tau.size(); ++i) {
        CHECK(ca.tau[i] == doctest::Approx(cbv.tau[i]).epsilon(1e-9));
        CHECK(ca.theta[i] == doctest::Approx(cbv.theta[i]).epsilon(1e-9));
    }
}

TEST_CASE("branch consistency: random closed paths see only enclosed residues") {
    auto form = surface::build_form(four_pole_sphere());
    // rectangle enclosing poles 0 and 1 only (z=0 and z=1)
    quad::Path rect;
    const cplx c0{-0.5, -0.45}, c1{1.45, -0.45}, c2{1.45, 0.45}, c3{-0.5, 0.45};
    rect.push_back(quad::Leg::segment(c0, c1));
    rect.push_back(quad::Leg::segment(c1, c2));
    rect.push_back(quad::Leg::segment(c2, c3));
    rect.push_back(quad::Leg::segment(c3, c0));
    const cplx v = surface::integrate_form(form, rect);
    const cplx expect = 2.0 * kPi * I * (1.0 - 2.0);
    CHECK(std::abs(v - expect) < 1e-10);
}
