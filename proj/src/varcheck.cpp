#include "mandel/varcheck.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace mandel::varcheck {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
} // namespace

cplx schwarzian_of_flat_coordinate(const surface::MeromorphicForm& form, cplx z) {
    if (form.pole_distance(z) < 0.25 * form.tol().clearance)
        throw ClearanceViolation("schwarzian evaluated too close to a pole");
    const auto j = form.f_jets(z);
    if (std::abs(j[0]) < 1e-10)
        throw ClearanceViolation("schwarzian evaluated too close to a zero of omega");
    const cplx r1 = j[1] / j[0];
    return j[2] / j[0] - 1.5 * r1 * r1;
}

cplx bergman_projective_connection(const surface::MarkedSurface& ms, cplx /*z*/) {
    if (ms.genus == 0) return cplx(0.0);
    specfun::TorusModulus tm(ms.B);
    const specfun::ThetaConstants tc = specfun::theta_constants(tm);
    return -8.0 * kPi * cplx(0.0, 1.0) * tc.dlog_deriv1_dB;
}

SchwarzianSample schwarzian_sample(const surface::MeromorphicForm& form, cplx z) {
    SchwarzianSample s;
    s.z = z;
    s.S_B = bergman_projective_connection(form.surface(), z);
    s.S_omega = schwarzian_of_flat_coordinate(form, z);
    s.integrand = (s.S_B - s.S_omega) / form.f(z);
    return s;
}

cplx contour_integral(const surface::MeromorphicForm& form, const quad::Path& path) {
    const cplx S_B = bergman_projective_connection(form.surface(), cplx(0.0));
    auto g = [&](cplx z) {
        const auto j = form.f_jets(z);
        const cplx r1 = j[1] / j[0];
        const cplx S_om = j[2] / j[0] - 1.5 * r1 * r1;
        return (S_B - S_om) / j[0];
    };
    // scale the absolute tolerance by a rough integrand magnitude
    double scale = 1.0;
    for (const auto& leg : path)
        for (int i = 0; i < 5; ++i)
            scale = std::max(scale, std::abs(g(leg.point(0.1 + 0.2 * i))) * leg.length());
    return quad::integrate_path(g, path, form.tol().quad_tol * scale);
}

double contour_rhs(const surface::MeromorphicForm& form, const quad::Path& path,
                   VarKind kind) {
    const cplx I = contour_integral(form, path);
    switch (kind) {
        case VarKind::twist: return -(1.0 / (6.0 * kPi)) * I.real();
        case VarKind::height: return +(1.0 / (6.0 * kPi)) * I.real();
        case VarKind::stretch: return -(1.0 / (6.0 * kPi)) * I.imag();
    }
    return 0.0;
}

Family genus0_family(const std::vector<cplx>& points, const std::vector<double>& residues) {
    if (points.size() < 4) throw Error("genus0_family needs n >= 4");
    Family fam;
    const int nfree = int(points.size()) - 3;
    for (int k = 0; k < nfree; ++k) {
        fam.params0.push_back(points[3 + k].real());
        fam.params0.push_back(points[3 + k].imag());
        fam.param_names.push_back("Re z" + std::to_string(4 + k));
        fam.param_names.push_back("Im z" + std::to_string(4 + k));
    }
    fam.make = [points, residues](const std::vector<double>& p) {
        surface::MarkedSurface ms;
        ms.genus = 0;
        ms.points = points;
        ms.residues = residues;
        for (size_t k = 0; 3 + k < points.size(); ++k)
            ms.points[3 + k] = cplx(p[2 * k], p[2 * k + 1]);
        return ms;
    };
    return fam;
}

Family genus1_family(cplx B, const std::vector<cplx>& points,
                     const std::vector<double>& residues) {
    Family fam;
    fam.params0.push_back(B.real());
    fam.params0.push_back(B.imag());
    fam.param_names.push_back("Re B");
    fam.param_names.push_back("Im B");
    for (size_t k = 1; k < points.size(); ++k) {
        const cplx d = points[k] - points[0];
        fam.params0.push_back(d.real());
        fam.params0.push_back(d.imag());
        fam.param_names.push_back("Re dz" + std::to_string(k));
        fam.param_names.push_back("Im dz" + std::to_string(k));
    }
    fam.make = [points, residues](const std::vector<double>& p) {
        surface::MarkedSurface ms;
        ms.genus = 1;
        ms.B = cplx(p[0], p[1]);
        ms.points = points;
        ms.residues = residues;
        for (size_t k = 1; k < points.size(); ++k)
            ms.points[k] = points[0] + cplx(p[2 * k], p[2 * k + 1]);
        return ms;
    };
    return fam;
}

namespace {

// Context shared by a finite-difference family: the base frame fixes zero
// labels, canonical-path detours and the closed-cycle representatives.
struct FamilyContext {
    surface::FlatFrame base;
    std::vector<int> rel_zeros;           // zero labels with relative periods
    quad::Path a_path, b_path;            // genus 1 closed representatives
    std::vector<std::string> coord_names;
    int n_coords = 0;

    explicit FamilyContext(const Family& fam, const surface::Tolerances& tol)
        : base(surface::build_form(fam.make(fam.params0), tol)) {
        const int nz = int(base.zeros().size());
        for (int l = 0; l < nz; ++l)
            if (l != base.ref_zero()) rel_zeros.push_back(l);
        const int g = base.surface().genus;
        if (g == 1) {
            for (const auto& c : surface::cycle_catalog(base)) {
                if (c.role == surface::Cycle::Role::a_cycle) a_path = c.path;
                if (c.role == surface::Cycle::Role::b_cycle) b_path = c.path;
            }
            coord_names.push_back("Im period(a)");
            coord_names.push_back("Im period(b)");
        }
        for (int l : rel_zeros) coord_names.push_back("tau(zero " + std::to_string(l) + ")");
        for (int l : rel_zeros) coord_names.push_back("theta(zero " + std::to_string(l) + ")");
        n_coords = int(coord_names.size());
    }

    struct Eval {
        std::vector<double> coords;
        double log_abs_tau_sq;
    };

    Eval evaluate(const Family& fam, const std::vector<double>& params) const {
        surface::MeromorphicForm form = surface::build_form(fam.make(params), base.tol());
        surface::FlatFrame frame(std::move(form), &base);
        Eval ev;
        if (base.surface().genus == 1) {
            const cplx pa = surface::integrate_form(frame.form(), a_path);
            const cplx pb = surface::integrate_form(frame.form(), b_path);
            ev.coords.push_back(pa.imag());
            ev.coords.push_back(pb.imag());
        }
        for (int l : rel_zeros) ev.coords.push_back(frame.w_zero(l).real());
        for (int l : rel_zeros) ev.coords.push_back(frame.w_zero(l).imag());
        cplx t12;
        if (base.surface().genus == 0) {
            t12 = tau::tau12_genus0(frame, 42, 24, base.tol().constancy_tol).first;
        } else {
            t12 = tau::tau12_genus1(frame);
        }
        ev.log_abs_tau_sq = std::log(std::abs(t12)) / 6.0;
        return ev;
    }
};

// Dual cycles in M minus the divisor, normalized to intersection pairing +1
// against their period classes, with small-circle corrections decoupling the
// closed duals from the relative periods.
struct DualSystem {
    struct Piece {
        quad::Path path;
        double coeff;
    };
    struct Dual {
        std::vector<Piece> pieces;
        VarKind kind;
        std::string id;
        double table_sign;
    };
    std::vector<Dual> duals; // one per coordinate, same order as coords

    static quad::Path circle_path(cplx center, double radius) {
        quad::Path p;
        p.push_back(quad::Leg::arc(center, radius, 0.0, 2.0 * kPi));
        return p;
    }

    DualSystem(const FamilyContext& ctx, const ConventionTable& table) {
        const auto& frame = ctx.base;
        const auto& ms = frame.surface();
        const int g = ms.genus;

        // small circles around the non-reference zeros
        std::vector<quad::Path> circles;
        std::vector<std::vector<cplx>> circle_polys;
        std::vector<double> pairing; // <circle_l, path to zero l>
        for (int l : ctx.rel_zeros) {
            double r = 0.3;
            for (const cplx& q : frame.divisor_positions()) {
                double d = (g == 1) ? specfun::lattice_distance(q - frame.zeros()[l],
                                                                frame.form().modulus())
                                    : std::abs(q - frame.zeros()[l]);
                if (d > 1e-12) r = std::min(r, 0.35 * d);
            }
            quad::Path c = circle_path(frame.zeros()[l], r);
            circles.push_back(c);
            circle_polys.push_back(surface::path_polyline(c));
            const int p = pair_torus(circle_polys.back(), frame.zero_path_polyline(l), ms);
            if (p == 0) throw Error("dual circle does not link its zero path");
            pairing.push_back(double(p));
        }

        if (g == 1) {
            const std::vector<cplx> a_poly = surface::path_polyline(ctx.a_path);
            const std::vector<cplx> b_poly = surface::path_polyline(ctx.b_path);
            const int q_ba = pair_torus(b_poly, a_poly, ms);
            if (q_ba == 0) throw Error("a/b representatives do not intersect");
            // dual of Im period(a): b-representative, path-decoupled
            Dual da;
            da.kind = VarKind::height;
            da.id = "b-cycle dual of Im period(a)";
            da.table_sign = table.closed_sign;
            da.pieces.push_back({ctx.b_path, 1.0 / q_ba});
            for (size_t k = 0; k < circles.size(); ++k) {
                const int c = pair_torus(b_poly, frame.zero_path_polyline(ctx.rel_zeros[k]), ms);
                if (c != 0)
                    da.pieces.push_back({circles[k], -double(c) / pairing[k] / q_ba});
            }
            duals.push_back(da);
            const int q_ab = pair_torus(a_poly, b_poly, ms);
            Dual db;
            db.kind = VarKind::height;
            db.id = "a-cycle dual of Im period(b)";
            db.table_sign = table.closed_sign;
            db.pieces.push_back({ctx.a_path, 1.0 / q_ab});
            for (size_t k = 0; k < circles.size(); ++k) {
                const int c = pair_torus(a_poly, frame.zero_path_polyline(ctx.rel_zeros[k]), ms);
                if (c != 0)
                    db.pieces.push_back({circles[k], -double(c) / pairing[k] / q_ab});
            }
            duals.push_back(db);
        }
        for (size_t k = 0; k < circles.size(); ++k) {
            Dual dt;
            dt.kind = VarKind::stretch;
            dt.id = "zero-circle(" + std::to_string(ctx.rel_zeros[k]) + ")";
            dt.table_sign = table.stretch_sign;
            dt.pieces.push_back({circles[k], 1.0 / pairing[k]});
            duals.push_back(dt);
        }
        for (size_t k = 0; k < circles.size(); ++k) {
            Dual dh;
            dh.kind = VarKind::twist;
            dh.id = "zero-circle(" + std::to_string(ctx.rel_zeros[k]) + ")";
            dh.table_sign = table.twist_sign;
            dh.pieces.push_back({circles[k], 1.0 / pairing[k]});
            duals.push_back(dh);
        }
    }

    // intersection pairing, summed over lattice translates for genus 1
    static int pair_torus(const std::vector<cplx>& cyc, const std::vector<cplx>& rel,
                          const surface::MarkedSurface& ms) {
        if (ms.genus == 0) return surface::intersection_number(cyc, rel);
        int total = 0;
        for (int m = -2; m <= 2; ++m)
            for (int n = -2; n <= 2; ++n) {
                std::vector<cplx> shifted = cyc;
                const cplx s = cplx(double(m), 0.0) + double(n) * ms.B;
                for (cplx& z : shifted) z += s;
                total += surface::intersection_number(shifted, rel);
            }
        return total;
    }

    std::vector<double> contour_values(const surface::MeromorphicForm& form) const {
        std::vector<double> out;
        for (const auto& d : duals) {
            double acc = 0.0;
            for (const auto& piece : d.pieces) {
                const cplx I = contour_integral(form, piece.path);
                double v = 0.0;
                switch (d.kind) {
                    case VarKind::twist: v = -(1.0 / (6.0 * kPi)) * I.real(); break;
                    case VarKind::height: v = +(1.0 / (6.0 * kPi)) * I.real(); break;
                    case VarKind::stretch: v = -(1.0 / (6.0 * kPi)) * I.imag(); break;
                }
                acc += piece.coeff * v;
            }
            out.push_back(d.table_sign * acc);
        }
        return out;
    }
};

struct FdResult {
    Eigen::MatrixXd J;  // n_coords x n_params
    Eigen::VectorXd g;  // n_params
};

FdResult fd_derivatives(const Family& fam, const FamilyContext& ctx,
                        const VarCheckConfig& cfg) {
    const int np = int(fam.params0.size());
    const int nc = ctx.n_coords;
    FdResult out;
    out.J.resize(nc, np);
    out.g.resize(np);
    for (int j = 0; j < np; ++j) {
        auto central = [&](double h) {
            std::vector<double> pp = fam.params0, pm = fam.params0;
            pp[j] += h;
            pm[j] -= h;
            const auto ep = ctx.evaluate(fam, pp);
            const auto em = ctx.evaluate(fam, pm);
            Eigen::VectorXd d(nc + 1);
            for (int i = 0; i < nc; ++i) d(i) = (ep.coords[i] - em.coords[i]) / (2.0 * h);
            d(nc) = (ep.log_abs_tau_sq - em.log_abs_tau_sq) / (2.0 * h);
            return d;
        };
        Eigen::VectorXd d;
        if (cfg.richardson) {
            const Eigen::VectorXd d1 = central(cfg.fd_step);
            const Eigen::VectorXd d2 = central(cfg.fd_step_2);
            // steps with ratio 2: standard second-order Richardson
            d = (4.0 * d2 - d1) / 3.0;
        } else {
            d = central(cfg.fd_step);
        }
        for (int i = 0; i < nc; ++i) out.J(i, j) = d(i);
        out.g(j) = d(nc);
    }
    return out;
}

} // namespace

JacobianResult moduli_jacobian(const Family& family, const VarCheckConfig& cfg) {
    FamilyContext ctx(family, cfg.tol);
    const FdResult fd = fd_derivatives(family, ctx, cfg);
    JacobianResult out;
    out.coordinate_names = ctx.coord_names;
    out.J.assign(ctx.n_coords, std::vector<double>(family.params0.size(), 0.0));
    for (int i = 0; i < ctx.n_coords; ++i)
        for (int j = 0; j < int(family.params0.size()); ++j) out.J[i][j] = fd.J(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fd.J);
    out.condition = svd.singularValues()(0) /
                    std::max(svd.singularValues()(svd.singularValues().size() - 1), 1e-300);
    if (out.condition > 1e8)
        throw IllConditioned("moduli Jacobian condition number " +
                             std::to_string(out.condition));
    return out;
}

VarCheckResult verify_variational(const Family& family, const VarCheckConfig& cfg) {
    FamilyContext ctx(family, cfg.tol);
    VarCheckResult result;
    if (int(family.params0.size()) != ctx.n_coords)
        throw DimensionMismatch("family parameter count does not match coordinate count");

    if (cfg.fd_step == 0.0) {
        // degenerate request: zero step means zero gradient and 0 = 0
        for (int i = 0; i < ctx.n_coords; ++i) {
            VarCheckReport r;
            r.coordinate = ctx.coord_names[i];
            r.fd_derivative = 0.0;
            r.contour_value = 0.0;
            r.rel_discrepancy = 0.0;
            r.pass = true;
            result.reports.push_back(r);
        }
        result.all_pass = true;
        return result;
    }

    const FdResult fd = fd_derivatives(family, ctx, cfg);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fd.J);
    result.jacobian_condition =
        svd.singularValues()(0) /
        std::max(svd.singularValues()(svd.singularValues().size() - 1), 1e-300);
    if (result.jacobian_condition > 1e8)
        throw IllConditioned("moduli Jacobian condition number too large");

    // FD estimate of d log|tau|^2 / d m_i: solve J^T r_hat = g.
    const Eigen::VectorXd r_hat =
        fd.J.transpose().colPivHouseholderQr().solve(fd.g);

    DualSystem duals(ctx, cfg.table);
    const std::vector<double> r = duals.contour_values(ctx.base.form());

    double rmax = 1e-12;
    for (int i = 0; i < ctx.n_coords; ++i) rmax = std::max(rmax, std::abs(r[i]));
    result.max_rel_discrepancy = 0.0;
    for (int i = 0; i < ctx.n_coords; ++i) {
        VarCheckReport rep;
        rep.coordinate = ctx.coord_names[i];
        rep.fd_derivative = r_hat(i);
        rep.contour_value = r[i];
        rep.rel_discrepancy = std::abs(r_hat(i) - r[i]) / rmax;
        rep.step_sizes[0] = cfg.fd_step;
        rep.step_sizes[1] = cfg.fd_step_2;
        rep.cycle_id = duals.duals[i].id;
        rep.sign_applied = duals.duals[i].table_sign;
        rep.richardson = cfg.richardson;
        rep.pass = rep.rel_discrepancy < cfg.tolerance;
        result.max_rel_discrepancy = std::max(result.max_rel_discrepancy, rep.rel_discrepancy);
        result.reports.push_back(rep);
    }
    result.all_pass = true;
    for (const auto& rep : result.reports) result.all_pass = result.all_pass && rep.pass;
    return result;
}

std::pair<double, double> fd_convergence_study(const Family& family,
                                               const VarCheckConfig& cfg,
                                               double step_large) {
    auto run = [&](double h) {
        VarCheckConfig c = cfg;
        c.fd_step = h;
        c.richardson = false;
        c.tolerance = 1e9; // record discrepancies without failing
        const VarCheckResult res = verify_variational(family, c);
        return res.max_rel_discrepancy;
    };
    return {run(step_large), run(0.5 * step_large)};
}

} // namespace mandel::varcheck
