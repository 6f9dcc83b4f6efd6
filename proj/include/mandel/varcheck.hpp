#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "mandel/surface.hpp"
#include "mandel/tau.hpp"

namespace mandel::varcheck {

using cplx = std::complex<double>;

// Schwarzian of the flat coordinate w = int omega in the chart:
//   S_omega = f''/f - (3/2)(f'/f)^2,  omega = f dz.
cplx schwarzian_of_flat_coordinate(const surface::MeromorphicForm& form, cplx z);

// Bergman projective connection in the chart used by this engine:
// genus 0 (uniformizer): 0; genus 1 (flat chart): -8 pi i d/dB log theta1'(0|B).
cplx bergman_projective_connection(const surface::MarkedSurface& ms, cplx z);

struct SchwarzianSample {
    cplx z;
    cplx S_B;
    cplx S_omega;
    cplx integrand; // (S_B - S_omega)/f
};

SchwarzianSample schwarzian_sample(const surface::MeromorphicForm& form, cplx z);

enum class VarKind { twist, height, stretch };

// Raw contour integral of (S_B - S_omega)/omega over the path.
cplx contour_integral(const surface::MeromorphicForm& form, const quad::Path& path);

// Contour value with the variational prefactor applied:
//   twist  -> -(1/6pi) Re,  height -> +(1/6pi) Re,  stretch -> -(1/6pi) Im.
double contour_rhs(const surface::MeromorphicForm& form, const quad::Path& path,
                   VarKind kind);

// Frozen global orientation/sign table for dual cycles. The geometry side
// normalizes every dual cycle to intersection pairing +1 against its period
// class; these signs are the remaining global convention, fixed once on the
// reference configurations and then applied verbatim everywhere.
struct ConventionTable {
    std::string version = "ct-1";
    double stretch_sign = +1.0; // Re-relative coordinates (interaction times)
    double twist_sign = +1.0;   // Im-relative coordinates (relative twists)
    double closed_sign = +1.0;  // Im-closed coordinates (heights/closed twists)
};

// A parametrized family of marked surfaces with a fixed gauge.
struct Family {
    std::function<surface::MarkedSurface(const std::vector<double>&)> make;
    std::vector<double> params0;
    std::vector<std::string> param_names;
};

// genus 0: first three points pinned, remaining points' (Re, Im) free.
Family genus0_family(const std::vector<cplx>& points, const std::vector<double>& residues);
// genus 1: (Re B, Im B) plus (Re, Im) of points[1..] relative to points[0].
Family genus1_family(cplx B, const std::vector<cplx>& points,
                     const std::vector<double>& residues);

struct VarCheckConfig {
    double fd_step = 1e-3;
    double fd_step_2 = 5e-4; // second Richardson step (ratio 2)
    bool richardson = true;
    double tolerance = 1e-6;
    ConventionTable table{};
    surface::Tolerances tol{};
};

struct VarCheckReport {
    std::string coordinate;
    double fd_derivative = 0.0;   // (J^{-T} g)_i — FD value of d log|tau|^2 / d m_i
    double contour_value = 0.0;   // dual-contour value with prefactor and sign
    double rel_discrepancy = 0.0;
    double step_sizes[2] = {0.0, 0.0};
    std::string cycle_id;
    double sign_applied = 1.0;
    bool richardson = true;
    bool pass = false;
};

struct VarCheckResult {
    std::vector<VarCheckReport> reports;
    bool all_pass = false;
    double max_rel_discrepancy = 0.0;
    double jacobian_condition = 0.0;
};

VarCheckResult verify_variational(const Family& family, const VarCheckConfig& cfg);

// Plain central-difference discrepancy at two step sizes (no Richardson);
// used to demonstrate the second-order convergence of the check.
std::pair<double, double> fd_convergence_study(const Family& family,
                                               const VarCheckConfig& cfg,
                                               double step_large);

// Jacobian d(coordinates)/d(parameters) by Richardson-extrapolated central
// differences; also returns its condition number.
struct JacobianResult {
    std::vector<std::vector<double>> J; // J[i][j] = d m_i / d p_j
    double condition = 0.0;
    std::vector<std::string> coordinate_names;
};
JacobianResult moduli_jacobian(const Family& family, const VarCheckConfig& cfg);

} // namespace mandel::varcheck
