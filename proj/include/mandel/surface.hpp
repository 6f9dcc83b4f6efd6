#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mandel/errors.hpp"
#include "mandel/quadrature.hpp"
#include "mandel/specfun.hpp"

namespace mandel::surface {

using cplx = std::complex<double>;

// Central numeric configuration shared by the geometry pipeline.
struct Tolerances {
    double quad_tol = 1e-12;
    double jet_tol = 1e-9;
    double period_tol = 1e-10;
    double merge_tol = 1e-6;     // two zeros closer than this => NonSimpleZero
    double dedupe_tol = 1e-9;    // zero dedupe (mod lattice for genus 1)
    double clearance = 0.05;     // path / divisor clearance
    double series_rel_tol = 1e-15;
    double b_min = 0.05;
    double constancy_tol = 1e-8;
};

// Genus-0 or genus-1 surface with marked points and real residues.
struct MarkedSurface {
    int genus = 0;
    cplx B{0.0, 1.0};                 // used when genus == 1
    std::vector<cplx> points;         // chart positions (fundamental cell for genus 1)
    std::vector<double> residues;     // sum must vanish

    int n() const { return int(points.size()); }
    void validate(const Tolerances& tol = {}) const;
};

struct DivisorPoint {
    enum class Kind { zero, pole };
    Kind kind = Kind::zero;
    int index = -1;           // pole index m or zero index l
    cplx position{};
    double residue = 0.0;      // poles only
    double circumference = 0.0; // poles: 2*pi*|residue|
    cplx jet{};                // lambda = d zeta / dz at the point
    cplx flat_value{};         // zeros: w(R_l); poles: regularized value h*
};

struct Cycle {
    enum class Role { a_cycle, b_cycle, pole_circle, zero_circle, cylinder_core };
    Role role = Role::pole_circle;
    int index = -1;            // pole/zero/cylinder id
    int orientation = +1;
    quad::Path path;
    // genus 1: lattice class of the (closed) contour, z(1) - z(0) = m + n B.
    int lattice_m = 0, lattice_n = 0;
    std::string describe() const;
};

struct DiagramCoordinates {
    std::vector<double> h;      // interior cylinder circumferences (g entries)
    std::vector<double> tau;    // interaction times minus the smallest (2g+n-3)
    std::vector<double> theta;  // imaginary parts of the chosen dual periods (3g+n-3)
    std::vector<std::string> metadata; // which cycle/period defines each entry
};

// The differential omega with real residues and purely imaginary periods.
// genus 0:  omega = sum alpha_m dz/(z - z_m)
// genus 1:  omega = [ sum alpha_m (theta1'/theta1)(z - z_m | B) + c ] dz
class MeromorphicForm {
  public:
    MeromorphicForm() = default;

    const MarkedSurface& surface() const { return ms_; }
    const Tolerances& tol() const { return tol_; }
    cplx normalization_c() const { return c_; }
    cplx period_a() const { return period_a_; } // genus 1, includes c dz part
    cplx period_b() const { return period_b_; }
    const specfun::TorusModulus& modulus() const;

    cplx f(cplx z) const;                 // chart coefficient of omega
    std::array<cplx, 3> f_jets(cplx z) const; // f, f', f''

    // Distance from z to the nearest marked point (mod lattice for genus 1).
    double pole_distance(cplx z) const;
    double divisor_distance(cplx z, const std::vector<cplx>& zeros) const;

    friend MeromorphicForm build_form(const MarkedSurface&, const Tolerances&);

  private:
    MarkedSurface ms_;
    Tolerances tol_;
    cplx c_{0.0};
    cplx period_a_{0.0}, period_b_{0.0};
    std::shared_ptr<specfun::TorusModulus> tm_;
};

// Solves the normalization (genus 1) and verifies residues/period purity.
MeromorphicForm build_form(const MarkedSurface& ms, const Tolerances& tol = {});

// All zeros of omega (2g-2+n of them), canonical deterministic order.
// warm_start: zeros of a nearby configuration; output is label-matched to it.
std::vector<cplx> find_zeros(const MeromorphicForm& form,
                             const std::vector<cplx>* warm_start = nullptr);

// Integral of omega over a path, with clearance checks against the poles and
// (optionally) zeros.
cplx integrate_form(const MeromorphicForm& form, const quad::Path& path,
                    const std::vector<cplx>* zeros = nullptr,
                    bool check_clearance = true);

// Deterministic detour-side plan so finite-difference families stay on one
// branch of the flat coordinate. Divisor ids: poles 0..n-1, zeros n..n+N-1.
struct PathPlan {
    cplx base_point{};
    int ref_zero = 0;
    std::map<std::pair<int, int>, int> detour_side; // (target id, divisor id) -> side
    std::map<int, double> pole_ray_dir;             // pole id -> approach angle
    double a_offset = 0.0, b_offset = 0.0;          // genus-1 closed-cycle offsets
};

// Flat-coordinate machinery over a fixed form: canonical paths, w(z),
// distinguished jets, normalization with the reference zero at w = 0.
class FlatFrame {
  public:
    explicit FlatFrame(MeromorphicForm form, const FlatFrame* base = nullptr);

    const MeromorphicForm& form() const { return form_; }
    const MarkedSurface& surface() const { return form_.surface(); }
    const Tolerances& tol() const { return form_.tol(); }
    const std::vector<cplx>& zeros() const { return zeros_; }
    int ref_zero() const { return plan_.ref_zero; }
    cplx base_point() const { return plan_.base_point; }
    const PathPlan& plan() const { return plan_; }

    // Normalized flat coordinate at a zero (w(R_ref) = 0), and at the poles
    // the regularized value h*_m = lim [w - alpha_m log(z - z_m)].
    cplx w_zero(int l) const;
    cplx hstar_pole(int m) const;

    cplx lambda_zero(int l) const;  // sqrt(f'(R_l)/2), principal branch
    cplx lambda_pole(int m) const;  // exp(h*_m / alpha_m)

    DivisorPoint zero_point(int l) const;
    DivisorPoint pole_point(int m) const;
    std::vector<DivisorPoint> divisor_points() const;

    // Canonical path polyline to zero l (for intersection bookkeeping).
    std::vector<cplx> zero_path_polyline(int l) const;

    // All divisor positions, poles first then zeros.
    std::vector<cplx> divisor_positions() const;

  private:
    friend std::vector<Cycle> cycle_catalog(const FlatFrame&);
    MeromorphicForm form_;
    std::vector<cplx> zeros_;
    PathPlan plan_;
    cplx norm_shift_{0.0};
    mutable std::vector<std::optional<cplx>> w_zero_cache_;
    mutable std::vector<std::optional<cplx>> hstar_cache_;
    mutable std::vector<quad::Path> zero_paths_;
    mutable double richardson_error_ = 0.0;

    quad::Path canonical_path(cplx target, int target_id);
    cplx w_raw(const quad::Path& path) const;
    cplx hstar_regularized(int m) const;
    cplx hstar_richardson(int m) const;
};

// Closed vertical leaf of the |omega| flat structure through a seed point.
struct Leaf {
    std::vector<cplx> polyline;   // closed, polyline[0] == start
    int lattice_m = 0, lattice_n = 0; // genus 1 displacement of the lift
    double height = 0.0;          // Im w gained over one loop (> 0)
    std::vector<int> pole_winding; // genus 0: winding around each pole
};

std::optional<Leaf> trace_vertical_leaf(const MeromorphicForm& form, cplx seed,
                                        const std::vector<cplx>& zeros);

// Small circles around every divisor point, straight a/b representatives
// (genus 1), and cylinder-core representatives, with homology bookkeeping.
std::vector<Cycle> cycle_catalog(const FlatFrame& frame);

// Moduli (h, tau, theta) with machine-readable metadata.
DiagramCoordinates forward_coordinates(const FlatFrame& frame);

// Signed crossing number of two polylines (sum over transversal crossings of
// the sign of det[t1, t2]).
int intersection_number(const std::vector<cplx>& c1, const std::vector<cplx>& c2);

std::vector<cplx> path_polyline(const quad::Path& path, int arc_segments = 64);

} // namespace mandel::surface
