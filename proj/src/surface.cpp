#include "mandel/surface.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mandel::surface {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI{0.0, 1.0};

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

// Distance from point p to segment [a,b].
double segment_distance(cplx a, cplx b, cplx p) {
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(p - a);
    double t = ((p - a).real() * d.real() + (p - a).imag() * d.imag()) / L2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double leg_distance(const quad::Leg& leg, cplx p) {
    if (leg.kind == quad::Leg::Kind::segment) return segment_distance(leg.a, leg.b, p);
    if (std::abs(p - leg.center) < 1e-14) return leg.radius;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 32; ++i) {
        const double s = double(i) / 32.0;
        d = std::min(d, std::abs(leg.point(s) - p));
    }
    return d;
}

} // namespace

void MarkedSurface::validate(const Tolerances& tol) const {
    if (genus != 0 && genus != 1) throw DegenerateSurface("genus must be 0 or 1");
    const int nn = n();
    if (nn < 2) throw DegenerateSurface("need at least two marked points");
    if (int(residues.size()) != nn)
        throw DegenerateSurface("points/residues size mismatch");
    double sum = 0.0;
    for (double a : residues) {
        if (a == 0.0 || !std::isfinite(a)) throw DegenerateSurface("residues must be nonzero finite");
        sum += a;
    }
    double scale = 0.0;
    for (double a : residues) scale += std::abs(a);
    if (std::abs(sum) > 1e-14 * std::max(1.0, scale))
        throw DegenerateSurface("residues must sum to zero");
    if (genus == 1 && !(B.imag() >= tol.b_min))
        throw ModulusOutOfDomain("Im B below admissible minimum");
    for (int i = 0; i < nn; ++i)
        for (int j = i + 1; j < nn; ++j) {
            double d;
            if (genus == 1) {
                specfun::TorusModulus tm(B, tol.b_min);
                d = specfun::lattice_distance(points[i] - points[j], tm);
            } else {
                d = std::abs(points[i] - points[j]);
            }
            if (d < 1e-9) throw DegenerateSurface("marked points must be pairwise distinct");
        }
}

const specfun::TorusModulus& MeromorphicForm::modulus() const {
    if (!tm_) throw Error("modulus() requires genus 1");
    return *tm_;
}

cplx MeromorphicForm::f(cplx z) const {
    return f_jets(z)[0];
}

std::array<cplx, 3> MeromorphicForm::f_jets(cplx z) const {
    std::array<cplx, 3> out{cplx(0.0), cplx(0.0), cplx(0.0)};
    const int n = ms_.n();
    if (ms_.genus == 0) {
        for (int m = 0; m < n; ++m) {
            const cplx d = z - ms_.points[m];
            const cplx inv = 1.0 / d;
            out[0] += ms_.residues[m] * inv;
            out[1] -= ms_.residues[m] * inv * inv;
            out[2] += 2.0 * ms_.residues[m] * inv * inv * inv;
        }
        return out;
    }
    for (int m = 0; m < n; ++m) {
        const specfun::ThetaJet j = specfun::theta1_jet(z - ms_.points[m], *tm_,
                                                        tol_.series_rel_tol);
        const cplx L = j.d1 / j.d0;
        const cplx L1 = j.d2 / j.d0 - L * L;
        const cplx L2 = j.d3 / j.d0 - 3.0 * (j.d2 / j.d0) * L + 2.0 * L * L * L;
        out[0] += ms_.residues[m] * L;
        out[1] += ms_.residues[m] * L1;
        out[2] += ms_.residues[m] * L2;
    }
    out[0] += c_;
    return out;
}

double MeromorphicForm::pole_distance(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const cplx& p : ms_.points) {
        if (ms_.genus == 1)
            d = std::min(d, specfun::lattice_distance(z - p, *tm_));
        else
            d = std::min(d, std::abs(z - p));
    }
    return d;
}

double MeromorphicForm::divisor_distance(cplx z, const std::vector<cplx>& zeros) const {
    double d = pole_distance(z);
    for (const cplx& r : zeros) {
        if (ms_.genus == 1)
            d = std::min(d, specfun::lattice_distance(z - r, *tm_));
        else
            d = std::min(d, std::abs(z - r));
    }
    return d;
}

namespace {

// Distance from a segment to the nearest lattice copy of any listed point.
double segment_lattice_clearance(cplx a, cplx b, const std::vector<cplx>& pts, cplx B) {
    double d = std::numeric_limits<double>::infinity();
    for (const cplx& p : pts)
        for (int m = -3; m <= 3; ++m)
            for (int n = -3; n <= 3; ++n)
                d = std::min(d, segment_distance(a, b, p + double(m) + double(n) * B));
    return d;
}

// Deterministic clear straight a/b representatives: offset chosen to maximize
// the segment clearance from the listed points.
std::pair<cplx, cplx> clear_period_segments(const MarkedSurface& ms,
                                            const std::vector<cplx>& avoid) {
    cplx best_a{}, best_b{};
    double da = -1.0, db = -1.0;
    for (int k = 0; k < 61; ++k) {
        const double u = (k + 0.5) / 61.0;
        const cplx a0 = ms.points[0] + u * ms.B;
        const double cl_a = segment_lattice_clearance(a0, a0 + 1.0, avoid, ms.B);
        if (cl_a > da) {
            da = cl_a;
            best_a = a0;
        }
        const cplx b0 = ms.points[0] + cplx(u, 0.0);
        const double cl_b = segment_lattice_clearance(b0, b0 + ms.B, avoid, ms.B);
        if (cl_b > db) {
            db = cl_b;
            best_b = b0;
        }
    }
    return {best_a, best_b};
}

} // namespace

MeromorphicForm build_form(const MarkedSurface& ms, const Tolerances& tol) {
    ms.validate(tol);
    MeromorphicForm form;
    form.ms_ = ms;
    form.tol_ = tol;
    if (ms.genus == 1) {
        form.tm_ = std::make_shared<specfun::TorusModulus>(ms.B, tol.b_min);
        // Periods of the third-kind part over straight a/b segments at clear
        // offsets; then Re(A0 + c) = 0, Re(C0 + c B) = 0.
        auto [za, zb] = clear_period_segments(ms, ms.points);
        auto g = [&](cplx z) {
            cplx acc = 0.0;
            for (int m = 0; m < ms.n(); ++m) {
                const specfun::ThetaJet j =
                    specfun::theta1_jet(z - ms.points[m], *form.tm_, tol.series_rel_tol);
                acc += ms.residues[m] * (j.d1 / j.d0);
            }
            return acc;
        };
        const quad::Leg la = quad::Leg::segment(za, za + 1.0);
        const quad::Leg lb = quad::Leg::segment(zb, zb + ms.B);
        const cplx A0 = quad::integrate_leg(g, la, tol.quad_tol);
        const cplx C0 = quad::integrate_leg(g, lb, tol.quad_tol);
        // [[1, 0], [Re B, -Im B]] [c_re, c_im]^T = [-Re A0, -Re C0]^T.
        const double c_re = -A0.real();
        const double c_im = (C0.real() + c_re * ms.B.real()) / ms.B.imag();
        form.c_ = cplx(c_re, c_im);
        form.period_a_ = A0 + form.c_;
        form.period_b_ = C0 + form.c_ * ms.B;
        const double purity = std::abs(form.period_a_.real()) + std::abs(form.period_b_.real());
        const double scale = std::abs(form.period_a_) + std::abs(form.period_b_) + 1.0;
        if (purity > 1e3 * tol.period_tol * scale)
            throw QuadratureFailure("period purity not achieved after normalization");
    }
    // Residue audit by small-circle quadrature around each pole.
    for (int m = 0; m < ms.n(); ++m) {
        double r = 0.45;
        for (int j = 0; j < ms.n(); ++j) {
            if (j == m) continue;
            const double d = (ms.genus == 1)
                                 ? specfun::lattice_distance(ms.points[m] - ms.points[j],
                                                             *form.tm_)
                                 : std::abs(ms.points[m] - ms.points[j]);
            r = std::min(r, 0.4 * d);
        }
        const quad::Leg circle = quad::Leg::arc(ms.points[m], r, 0.0, 2.0 * kPi);
        const cplx val = quad::integrate_leg([&](cplx z) { return form.f(z); }, circle,
                                             tol.quad_tol);
        const cplx expected = 2.0 * kPi * kI * ms.residues[m];
        if (std::abs(val - expected) > 1e-8 * std::max(1.0, std::abs(expected)))
            throw QuadratureFailure("residue audit failed at pole " + std::to_string(m));
    }
    return form;
}

namespace {

// ---- genus 0 zeros: companion matrix of the numerator polynomial ----

std::vector<cplx> poly_mul(const std::vector<cplx>& p, cplx root) {
    // multiply p(z) by (z - root); p given low-to-high.
    std::vector<cplx> q(p.size() + 1, cplx(0.0));
    for (size_t i = 0; i < p.size(); ++i) {
        q[i + 1] += p[i];
        q[i] -= root * p[i];
    }
    return q;
}

std::vector<cplx> poly_deflate(const std::vector<cplx>& p, cplx root) {
    // divide p(z) by (z - root), remainder discarded (root is exact here).
    const int n = int(p.size()) - 1;
    std::vector<cplx> q(n, cplx(0.0));
    cplx carry = p[n];
    for (int i = n - 1; i >= 0; --i) {
        q[i] = carry;
        carry = p[i] + root * carry;
    }
    return q;
}

std::vector<cplx> genus0_zeros(const MeromorphicForm& form) {
    const MarkedSurface& ms = form.surface();
    const int n = ms.n();
    std::vector<cplx> prod{cplx(1.0)};
    for (int j = 0; j < n; ++j) prod = poly_mul(prod, ms.points[j]);
    std::vector<cplx> num(n, cplx(0.0)); // degree n-1 slots
    for (int m = 0; m < n; ++m) {
        const std::vector<cplx> pm = poly_deflate(prod, ms.points[m]);
        for (int i = 0; i < n; ++i) num[i] += ms.residues[m] * pm[i];
    }
    double scale = 0.0;
    for (const cplx& c : num) scale = std::max(scale, std::abs(c));
    if (n == 2) {
        if (std::abs(num[0]) < 1e-12 * std::max(1.0, scale))
            throw DegenerateSurface("two-pole numerator vanished");
        return {};
    }
    // top coefficient: sum alpha_m z_m (the z^{n-1} term cancels by sum alpha = 0)
    if (std::abs(num[n - 1]) > 1e-8 * std::max(1.0, scale))
        throw CountMismatch("numerator degree inconsistent with residue sum");
    num.pop_back();
    const int deg = n - 2;
    if (std::abs(num[deg]) < 1e-10 * std::max(1.0, scale))
        throw CountMismatch("zero at infinity: leading numerator coefficient vanished");
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -num[i] / num[deg];
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> roots;
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
    // Newton polish on the numerator.
    auto np = [&](cplx z) {
        cplx v = num[deg], d = 0.0;
        for (int i = deg - 1; i >= 0; --i) {
            d = d * z + v;
            v = v * z + num[i];
        }
        return std::pair<cplx, cplx>(v, d);
    };
    for (cplx& r : roots) {
        for (int it = 0; it < 50; ++it) {
            auto [v, d] = np(r);
            if (std::abs(d) == 0.0) break;
            const cplx step = v / d;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
    return roots;
}

// ---- genus 1 zeros: argument principle on the subdivided cell + Newton ----

struct CellSearch {
    const MeromorphicForm& form;
    double edge_floor;

    // winding of f along segment a->b, adaptively refined; nullopt if f gets
    // too small on the edge (grid must be jittered).
    std::optional<double> arg_increment(cplx a, cplx b, int depth = 0) const {
        const int N = 8;
        double acc = 0.0;
        cplx prev = form.f(a);
        if (std::abs(prev) < edge_floor) return std::nullopt;
        for (int i = 1; i <= N; ++i) {
            const cplx z = a + (b - a) * (double(i) / N);
            const cplx cur = form.f(z);
            if (std::abs(cur) < edge_floor) return std::nullopt;
            const double d = std::arg(cur / prev);
            if (std::abs(d) > 1.5) {
                if (depth > 12) return std::nullopt;
                auto left = arg_increment(a + (b - a) * (double(i - 1) / N),
                                          a + (b - a) * (double(i) / N), depth + 1);
                if (!left) return std::nullopt;
                acc += *left;
            } else {
                acc += d;
            }
            prev = cur;
        }
        return acc;
    }
};

cplx newton_zero(const MeromorphicForm& form, cplx z, bool* ok) {
    *ok = false;
    for (int it = 0; it < 80; ++it) {
        const auto j = form.f_jets(z);
        if (std::abs(j[1]) == 0.0) return z;
        const cplx step = j[0] / j[1];
        z -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) {
            *ok = true;
            return z;
        }
    }
    return z;
}

double local_scale(const MeromorphicForm& form, cplx z) {
    double s = 0.0;
    const MarkedSurface& ms = form.surface();
    for (int m = 0; m < ms.n(); ++m) {
        const double d = (ms.genus == 1)
                             ? specfun::lattice_distance(z - ms.points[m], form.modulus())
                             : std::abs(z - ms.points[m]);
        s += std::abs(ms.residues[m]) / std::max(d, 1e-6);
    }
    return std::max(s, 1e-12);
}

std::vector<cplx> genus1_zeros(const MeromorphicForm& form) {
    const MarkedSurface& ms = form.surface();
    const specfun::TorusModulus& tm = form.modulus();
    const int n = ms.n();
    const int grid = 8;
    // Deterministic jitter sequence for the cell origin.
    const double jit[6][2] = {{0.05, 0.055}, {0.017, 0.031}, {0.083, 0.027},
                              {0.041, 0.089}, {0.029, 0.013}, {0.071, 0.043}};
    for (int attempt = 0; attempt < 6; ++attempt) {
        const cplx origin = ms.points[0] + cplx(jit[attempt][0], 0.0) +
                            jit[attempt][1] * ms.B;
        CellSearch search{form, 1e-7};
        std::vector<cplx> found;
        bool bad = false;
        double total_winding = 0.0;
        for (int ci = 0; ci < grid && !bad; ++ci) {
            for (int cj = 0; cj < grid && !bad; ++cj) {
                const cplx c00 = origin + cplx(double(ci) / grid, 0.0) +
                                 (double(cj) / grid) * ms.B;
                const cplx c10 = c00 + cplx(1.0 / grid, 0.0);
                const cplx c11 = c10 + (1.0 / grid) * ms.B;
                const cplx c01 = c00 + (1.0 / grid) * ms.B;
                double wind = 0.0;
                for (const auto& [a, b] : {std::pair<cplx, cplx>{c00, c10},
                                           {c10, c11},
                                           {c11, c01},
                                           {c01, c00}}) {
                    auto inc = search.arg_increment(a, b);
                    if (!inc) {
                        bad = true;
                        break;
                    }
                    wind += *inc;
                }
                if (bad) break;
                // poles inside this cell raise the count: winding = Z - P
                int poles_in = 0;
                for (int m = 0; m < n; ++m) {
                    const cplx rel = ms.points[m] - c00;
                    // coordinates in the cell basis (1/grid, B/grid)
                    const double t = rel.imag() / (ms.B.imag() / grid);
                    const double s = (rel.real() - t * ms.B.real() / grid) * grid;
                    // account for lattice copies
                    const double sm = s - std::floor(s / grid) * grid;
                    const double tmn = t - std::floor(t / grid) * grid;
                    if (sm >= 0.0 && sm < 1.0 && tmn >= 0.0 && tmn < 1.0) ++poles_in;
                }
                const double zn = wind / (2.0 * kPi) + poles_in;
                const int zcount = int(std::lround(zn));
                if (std::abs(zn - zcount) > 0.2) {
                    bad = true;
                    break;
                }
                total_winding += zcount;
                if (zcount <= 0) continue;
                const cplx starts[5] = {c00 + 0.5 * (c11 - c00), c00 + 0.25 * (c11 - c00),
                                        c00 + 0.75 * (c11 - c00),
                                        c00 + 0.5 * (c10 - c00) + 0.25 * (c01 - c00),
                                        c00 + 0.25 * (c10 - c00) + 0.5 * (c01 - c00)};
                for (const cplx& s0 : starts) {
                    bool ok = false;
                    const cplx r = newton_zero(form, s0, &ok);
                    if (!ok) continue;
                    if (std::abs(form.f(r)) > 1e-10 * local_scale(form, r)) continue;
                    found.push_back(r);
                }
            }
        }
        if (bad) continue;
        if (int(std::lround(total_winding)) != n) continue;
        // Reduce mod lattice relative to points[0] cell and dedupe.
        std::vector<cplx> dedup;
        for (cplx r : found) {
            const cplx red = ms.points[0] + specfun::lattice_reduce(r - ms.points[0] -
                                                                    0.5 * (1.0 + ms.B), tm) +
                             0.5 * (1.0 + ms.B);
            bool dup = false;
            for (const cplx& d : dedup)
                if (specfun::lattice_distance(red - d, tm) < 1e-7) dup = true;
            if (!dup) dedup.push_back(red);
        }
        if (int(dedup.size()) != n) continue;
        return dedup;
    }
    throw CountMismatch("genus-1 zero search failed to isolate 2g-2+n zeros");
}

} // namespace

std::vector<cplx> find_zeros(const MeromorphicForm& form,
                             const std::vector<cplx>* warm_start) {
    const MarkedSurface& ms = form.surface();
    const int expected = 2 * ms.genus - 2 + ms.n();
    std::vector<cplx> zeros;
    if (warm_start && int(warm_start->size()) == expected && expected > 0) {
        zeros.reserve(expected);
        bool all_ok = true;
        for (const cplx& s : *warm_start) {
            bool ok = false;
            const cplx r = newton_zero(form, s, &ok);
            if (!ok || std::abs(form.f(r)) > 1e-9 * local_scale(form, r)) {
                all_ok = false;
                break;
            }
            zeros.push_back(r);
        }
        if (all_ok) {
            // must stay pairwise distinct and close to the labels
            for (int i = 0; i < expected && all_ok; ++i) {
                for (int j = i + 1; j < expected; ++j) {
                    const double d = (ms.genus == 1)
                                         ? specfun::lattice_distance(zeros[i] - zeros[j],
                                                                     form.modulus())
                                         : std::abs(zeros[i] - zeros[j]);
                    if (d < form.tol().merge_tol) {
                        all_ok = false;
                        break;
                    }
                }
            }
            if (all_ok) return zeros; // label order preserved from warm start
        }
        zeros.clear();
    }

    zeros = (ms.genus == 0) ? genus0_zeros(form) : genus1_zeros(form);
    if (int(zeros.size()) != expected)
        throw CountMismatch("zero count " + std::to_string(zeros.size()) +
                            " does not match 2g-2+n = " + std::to_string(expected));
    for (size_t i = 0; i < zeros.size(); ++i)
        for (size_t j = i + 1; j < zeros.size(); ++j) {
            const double d = (ms.genus == 1)
                                 ? specfun::lattice_distance(zeros[i] - zeros[j],
                                                             form.modulus())
                                 : std::abs(zeros[i] - zeros[j]);
            if (d < form.tol().merge_tol)
                throw NonSimpleZero("two zeros closer than merge tolerance");
        }
    if (warm_start && int(warm_start->size()) == expected) {
        // label-match to the warm-start order
        std::vector<cplx> matched(expected);
        std::vector<bool> used(expected, false);
        for (int i = 0; i < expected; ++i) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int j = 0; j < expected; ++j) {
                if (used[j]) continue;
                const double d = (ms.genus == 1)
                                     ? specfun::lattice_distance((*warm_start)[i] - zeros[j],
                                                                 form.modulus())
                                     : std::abs((*warm_start)[i] - zeros[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            used[best] = true;
            matched[i] = zeros[best];
        }
        return matched;
    }
    // canonical deterministic order: by real part then imaginary part
    std::sort(zeros.begin(), zeros.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return zeros;
}

cplx integrate_form(const MeromorphicForm& form, const quad::Path& path,
                    const std::vector<cplx>* zeros, bool check_clearance) {
    if (check_clearance) {
        const double clr = form.tol().clearance;
        for (const auto& leg : path) {
            for (const cplx& p : form.surface().points) {
                if (leg.kind == quad::Leg::Kind::arc && std::abs(leg.center - p) < 1e-12)
                    continue; // detour arc around this very point
                double d = leg_distance(leg, p);
                if (form.surface().genus == 1) {
                    // check lattice copies near the leg
                    for (int mm = -2; mm <= 2; ++mm)
                        for (int nn = -2; nn <= 2; ++nn)
                            d = std::min(d, leg_distance(leg, p + double(mm) +
                                                                  double(nn) * form.surface().B));
                }
                if (d < 0.5 * clr)
                    throw ClearanceViolation("integration path too close to a pole");
            }
        }
        // zeros are regular points of omega; no clearance needed against them
        (void)zeros;
    }
    const double scale = std::max(1.0, quad::path_length(path));
    return quad::integrate_path([&](cplx z) { return form.f(z); }, path,
                                form.tol().quad_tol * scale);
}

// ---------------------------------------------------------------------------
// FlatFrame
// ---------------------------------------------------------------------------

FlatFrame::FlatFrame(MeromorphicForm form, const FlatFrame* base) : form_(std::move(form)) {
    const std::vector<cplx>* warm = nullptr;
    if (base) warm = &base->zeros_;
    zeros_ = find_zeros(form_, warm);
    const int nz = int(zeros_.size());
    const int np = form_.surface().n();

    if (base) {
        plan_ = base->plan_;
    } else {
        // base point: deterministic clear location anchored to the divisor
        if (form_.surface().genus == 1) {
            const specfun::TorusModulus& tm = form_.modulus();
            double best_d = -1.0;
            cplx best = form_.surface().points[0];
            for (int i = 1; i < 23; ++i)
                for (int j = 1; j < 23; ++j) {
                    const cplx z = form_.surface().points[0] + (i / 23.0) + (j / 23.0) *
                                                                               form_.surface().B;
                    double d = std::numeric_limits<double>::infinity();
                    for (const cplx& p : form_.surface().points)
                        d = std::min(d, specfun::lattice_distance(z - p, tm));
                    for (const cplx& r : zeros_)
                        d = std::min(d, specfun::lattice_distance(z - r, tm));
                    if (d > best_d) {
                        best_d = d;
                        best = z;
                    }
                }
            plan_.base_point = best;
        } else {
            cplx centroid = 0.0;
            for (const cplx& p : form_.surface().points) centroid += p;
            centroid /= double(np);
            double spread = 1.0;
            for (const cplx& p : form_.surface().points)
                spread = std::max(spread, std::abs(p - centroid));
            for (const cplx& r : zeros_) spread = std::max(spread, std::abs(r - centroid));
            double best_d = -1.0;
            cplx best = centroid + 2.2 * spread;
            for (int k = 0; k < 16; ++k) {
                const double th = 2.0 * kPi * (k + 0.31) / 16.0;
                const cplx z = centroid + 1.8 * spread * cplx(std::cos(th), std::sin(th));
                double d = std::numeric_limits<double>::infinity();
                for (const cplx& p : form_.surface().points) d = std::min(d, std::abs(z - p));
                for (const cplx& r : zeros_) d = std::min(d, std::abs(z - r));
                if (d > best_d) {
                    best_d = d;
                    best = z;
                }
            }
            plan_.base_point = best;
        }
        plan_.ref_zero = 0;
    }
    w_zero_cache_.assign(nz, std::nullopt);
    hstar_cache_.assign(np, std::nullopt);
    zero_paths_.assign(nz, quad::Path{});
    if (!base && nz > 0) {
        // reference zero: smallest interaction time at the base configuration;
        // order is canonical (sorted), so index 0 after computing raw times.
        // w_raw differences do not depend on normalization, so compute raw
        // values first with shift 0.
        norm_shift_ = 0.0;
        int ref = 0;
        double best = std::numeric_limits<double>::infinity();
        std::vector<cplx> raw(nz);
        for (int l = 0; l < nz; ++l) {
            quad::Path pth = canonical_path(zeros_[l], np + l);
            zero_paths_[l] = pth;
            raw[l] = w_raw(pth);
            if (raw[l].real() < best) {
                best = raw[l].real();
                ref = l;
            }
        }
        plan_.ref_zero = ref;
        norm_shift_ = -raw[ref];
        for (int l = 0; l < nz; ++l) w_zero_cache_[l] = raw[l] + norm_shift_;
    } else if (nz > 0) {
        norm_shift_ = 0.0;
        quad::Path pref = canonical_path(zeros_[plan_.ref_zero], np + plan_.ref_zero);
        zero_paths_[plan_.ref_zero] = pref;
        const cplx raw_ref = w_raw(pref);
        norm_shift_ = -raw_ref;
        w_zero_cache_[plan_.ref_zero] = cplx(0.0);
    }
}

quad::Path FlatFrame::canonical_path(cplx target, int target_id) {
    // Straight segment from the base point with deterministic circular
    // detours around divisor points that come within the clearance.
    const std::vector<cplx> divisor = divisor_positions();
    const double clr = tol().clearance;
    const cplx a = plan_.base_point;
    const cplx b = target;
    struct Detour {
        double t;
        int id;
        cplx center;
        double radius;
        int side;
    };
    std::vector<Detour> detours;
    const cplx d = b - a;
    const double L2 = std::norm(d);
    for (int id = 0; id < int(divisor.size()); ++id) {
        if (id == target_id) continue; // close approaches to the target are intended
        cplx p = divisor[id];
        if (form_.surface().genus == 1) {
            // use the lattice representative closest to the segment midpoint
            const cplx mid = 0.5 * (a + b);
            p = mid + specfun::lattice_reduce(p - mid, form_.modulus());
        }
        if (std::abs(p - b) < 1e-12) continue; // target itself
        const double t = std::clamp(((p - a).real() * d.real() + (p - a).imag() * d.imag()) / L2,
                                    0.0, 1.0);
        const double dist = std::abs(p - (a + t * d));
        double radius = clr;
        // keep detour arcs clear of neighboring divisor points and make sure
        // neither path endpoint can sit inside a detour circle
        for (int j = 0; j < int(divisor.size()); ++j) {
            if (j == id) continue;
            cplx q = divisor[j];
            if (form_.surface().genus == 1)
                q = p + specfun::lattice_reduce(q - p, form_.modulus());
            radius = std::min(radius, 0.45 * std::abs(q - p));
        }
        radius = std::min(radius, 0.8 * std::abs(p - b));
        radius = std::min(radius, 0.8 * std::abs(p - a));
        if (dist >= radius || t <= 1e-9 || t >= 1.0 - 1e-9) continue;
        int side;
        auto key = std::make_pair(target_id, id);
        auto it = plan_.detour_side.find(key);
        if (it != plan_.detour_side.end()) {
            side = it->second;
        } else {
            const double c = cross(d, p - a);
            side = (c >= 0.0) ? -1 : +1; // bulge away from the point
            plan_.detour_side[key] = side;
        }
        detours.push_back({t, id, p, radius, side});
    }
    std::sort(detours.begin(), detours.end(),
              [](const Detour& x, const Detour& y) { return x.t < y.t; });
    quad::Path path;
    cplx cur = a;
    for (const auto& det : detours) {
        // segment-circle intersection parameters
        const double tf = ((det.center - a).real() * d.real() +
                           (det.center - a).imag() * d.imag()) /
                          L2;
        const double dist = std::abs(det.center - (a + tf * d));
        const double half = std::sqrt(std::max(det.radius * det.radius - dist * dist, 0.0)) /
                            std::sqrt(L2);
        const double t1 = std::max(tf - half, 0.0), t2 = std::min(tf + half, 1.0);
        const cplx e1 = a + t1 * d, e2 = a + t2 * d;
        if (std::abs(e1 - cur) > 1e-15) path.push_back(quad::Leg::segment(cur, e1));
        double th1 = std::arg(e1 - det.center);
        double th2 = std::arg(e2 - det.center);
        // choose sweep so the arc midpoint lies on the requested side of a->b
        double dth = th2 - th1;
        while (dth <= -kPi) dth += 2.0 * kPi;
        while (dth > kPi) dth -= 2.0 * kPi;
        for (int trial = 0; trial < 2; ++trial) {
            const double sweep = (trial == 0) ? dth : (dth > 0 ? dth - 2.0 * kPi : dth + 2.0 * kPi);
            const double thm = th1 + 0.5 * sweep;
            const cplx mid = det.center + det.radius * cplx(std::cos(thm), std::sin(thm));
            const double c = cross(d, mid - a);
            if ((c >= 0.0 ? +1 : -1) == det.side || trial == 1) {
                path.push_back(quad::Leg::arc(det.center, det.radius, th1, th1 + sweep));
                break;
            }
        }
        cur = e2;
    }
    if (std::abs(b - cur) > 1e-15) path.push_back(quad::Leg::segment(cur, b));
    return path;
}

cplx FlatFrame::w_raw(const quad::Path& path) const {
    const double scale = std::max(1.0, quad::path_length(path));
    return quad::integrate_path([&](cplx z) { return form_.f(z); }, path,
                                tol().quad_tol * scale);
}

cplx FlatFrame::w_zero(int l) const {
    if (!w_zero_cache_[l]) {
        auto* self = const_cast<FlatFrame*>(this);
        quad::Path pth = self->canonical_path(zeros_[l], form_.surface().n() + l);
        self->zero_paths_[l] = pth;
        self->w_zero_cache_[l] = w_raw(pth) + norm_shift_;
    }
    return *w_zero_cache_[l];
}

std::vector<cplx> FlatFrame::zero_path_polyline(int l) const {
    w_zero(l); // ensure path built
    return path_polyline(zero_paths_[l]);
}

cplx FlatFrame::hstar_regularized(int m) const {
    const MarkedSurface& ms = form_.surface();
    const cplx zm = ms.points[m];
    const double alpha = ms.residues[m];
    // approach direction: recorded in the plan, default toward the base point
    double phi;
    auto it = plan_.pole_ray_dir.find(m);
    if (it != plan_.pole_ray_dir.end()) {
        phi = it->second;
    } else {
        phi = std::arg(plan_.base_point - zm);
        // adjust to maximize clearance of the radial ray from other divisor points
        const std::vector<cplx> divisor = divisor_positions();
        double best_span = -1.0;
        double best_phi = phi;
        for (int k = 0; k < 16; ++k) {
            const double cand = phi + 2.0 * kPi * k / 16.0;
            double span = std::numeric_limits<double>::infinity();
            for (int id = 0; id < int(divisor.size()); ++id) {
                cplx q = divisor[id];
                if (ms.genus == 1) q = zm + specfun::lattice_reduce(q - zm, form_.modulus());
                if (std::abs(q - zm) < 1e-12) continue;
                const cplx dir{std::cos(cand), std::sin(cand)};
                // distance of q from the ray segment of length 0.9
                span = std::min(span, segment_distance(zm + 0.02 * dir, zm + 0.9 * dir, q));
            }
            if (span > best_span) {
                best_span = span;
                best_phi = cand;
            }
        }
        phi = best_phi;
        const_cast<FlatFrame*>(this)->plan_.pole_ray_dir[m] = phi;
    }
    double rho = 0.45;
    const std::vector<cplx> divisor = divisor_positions();
    for (int id = 0; id < int(divisor.size()); ++id) {
        cplx q = divisor[id];
        if (ms.genus == 1) q = zm + specfun::lattice_reduce(q - zm, form_.modulus());
        const double dq = std::abs(q - zm);
        if (dq > 1e-12) rho = std::min(rho, 0.45 * dq);
    }
    const cplx dir{std::cos(phi), std::sin(phi)};
    const cplx zq = zm + rho * dir;
    auto* self = const_cast<FlatFrame*>(this);
    quad::Path to_zq = self->canonical_path(zq, m);
    const cplx w_zq = w_raw(to_zq) + norm_shift_;
    // regular part of omega integrated along the radial closing segment:
    // h* = w(zq) - alpha Log(zq - zm) + int_{zq}^{zm} [f - alpha/(z - zm)] dz
    auto g = [&](cplx z) { return form_.f(z) - alpha / (z - zm); };
    const cplx tail = quad::integrate_leg(g, quad::Leg::segment(zq, zm), tol().quad_tol);
#ifdef MANDEL_DEBUG_HSTAR
    std::fprintf(stderr,
                 "reg: m=%d rho=%.6f phi=%.6f w_zq=%.12f%+.12fi tail=%.12f%+.12fi\n", m,
                 rho, phi, w_zq.real(), w_zq.imag(), tail.real(), tail.imag());
#endif
    return w_zq - alpha * std::log(zq - zm) + tail;
}

cplx FlatFrame::hstar_richardson(int m) const {
    const MarkedSurface& ms = form_.surface();
    const cplx zm = ms.points[m];
    const double alpha = ms.residues[m];
    const double phi = plan_.pole_ray_dir.at(m);
    const cplx dir{std::cos(phi), std::sin(phi)};
    double rho = 0.45;
    const std::vector<cplx> divisor = divisor_positions();
    for (int id = 0; id < int(divisor.size()); ++id) {
        cplx q = divisor[id];
        if (ms.genus == 1) q = zm + specfun::lattice_reduce(q - zm, form_.modulus());
        const double dq = std::abs(q - zm);
        if (dq > 1e-12) rho = std::min(rho, 0.45 * dq);
    }
    rho *= 0.25;
    auto* self = const_cast<FlatFrame*>(this);
    quad::Path to_r0 = self->canonical_path(zm + rho * dir, m);
    cplx w_cur = w_raw(to_r0) + norm_shift_;
    cplx h[4];
    double r = rho;
    for (int k = 0; k < 4; ++k) {
        h[k] = w_cur - alpha * (std::log(r) + kI * phi);
        if (k < 3) {
            const cplx z_from = zm + r * dir;
            const cplx z_to = zm + 0.5 * r * dir;
            w_cur += quad::integrate_leg([&](cplx z) { return form_.f(z); },
                                         quad::Leg::segment(z_from, z_to), tol().quad_tol);
            r *= 0.5;
        }
    }
    // Richardson ladder in the radius (ratio 2); h(r) = h* + c1 r + c2 r^2 + ...
    cplx e1[3], e2[2];
    for (int k = 0; k < 3; ++k) e1[k] = 2.0 * h[k + 1] - h[k];
    for (int k = 0; k < 2; ++k) e2[k] = (4.0 * e1[k + 1] - e1[k]) / 3.0;
    const cplx e3 = (8.0 * e2[1] - e2[0]) / 7.0;
    richardson_error_ = std::abs(e3 - e2[1]); // ladder's own Cauchy estimate
#ifdef MANDEL_DEBUG_HSTAR
    for (int k = 0; k < 4; ++k)
        std::fprintf(stderr, "h[%d] = %.12f %+.12fi\n", k, h[k].real(), h[k].imag());
    std::fprintf(stderr, "rho0 = %.6f phi = %.6f\n", rho, phi);
#endif
    return e3;
}

cplx FlatFrame::hstar_pole(int m) const {
    if (!hstar_cache_[m]) {
        const cplx reg = hstar_regularized(m);
        cplx rich = hstar_richardson(m);
        // log branches may differ by 2 pi i alpha k between the two routes;
        // compare modulo that shift (lambda is insensitive to it).
        const double alpha = form_.surface().residues[m];
        const double kshift = std::round((rich - reg).imag() / (2.0 * kPi * alpha));
        rich -= kI * 2.0 * kPi * alpha * kshift;
        const double budget = std::max(tol().jet_tol * std::max(1.0, std::abs(reg)),
                                       16.0 * richardson_error_);
        if (std::abs(rich - reg) > budget) {
            std::ostringstream os;
            os << "h* extrapolation drifts across radii at pole " << m << ": reg=("
               << reg.real() << "," << reg.imag() << ") rich=(" << rich.real() << ","
               << rich.imag() << ") budget=" << budget;
            throw JetUnstable(os.str());
        }
        hstar_cache_[m] = reg;
    }
    return *hstar_cache_[m];
}

cplx FlatFrame::lambda_zero(int l) const {
    const auto j = form_.f_jets(zeros_[l]);
    return std::sqrt(0.5 * j[1]);
}

cplx FlatFrame::lambda_pole(int m) const {
    return std::exp(hstar_pole(m) / form_.surface().residues[m]);
}

DivisorPoint FlatFrame::zero_point(int l) const {
    DivisorPoint d;
    d.kind = DivisorPoint::Kind::zero;
    d.index = l;
    d.position = zeros_[l];
    d.jet = lambda_zero(l);
    d.flat_value = w_zero(l);
    if (d.jet == cplx(0.0) || !std::isfinite(std::abs(d.jet)))
        throw JetUnstable("zero jet degenerate");
    return d;
}

DivisorPoint FlatFrame::pole_point(int m) const {
    DivisorPoint d;
    d.kind = DivisorPoint::Kind::pole;
    d.index = m;
    d.position = form_.surface().points[m];
    d.residue = form_.surface().residues[m];
    d.circumference = 2.0 * kPi * std::abs(d.residue);
    d.flat_value = hstar_pole(m);
    d.jet = lambda_pole(m);
    return d;
}

std::vector<DivisorPoint> FlatFrame::divisor_points() const {
    std::vector<DivisorPoint> out;
    for (int m = 0; m < form_.surface().n(); ++m) out.push_back(pole_point(m));
    for (int l = 0; l < int(zeros_.size()); ++l) out.push_back(zero_point(l));
    return out;
}

std::vector<cplx> FlatFrame::divisor_positions() const {
    std::vector<cplx> out = form_.surface().points;
    out.insert(out.end(), zeros_.begin(), zeros_.end());
    return out;
}

// ---------------------------------------------------------------------------
// vertical leaves, cycle catalog, coordinates
// ---------------------------------------------------------------------------

std::optional<Leaf> trace_vertical_leaf(const MeromorphicForm& form, cplx seed,
                                        const std::vector<cplx>& zeros) {
    // dz/ds = i / f(z): unit vertical speed in the flat coordinate.
    const MarkedSurface& ms = form.surface();
    auto divisor_dist = [&](cplx z) { return form.divisor_distance(z, zeros); };
    if (divisor_dist(seed) < 2e-3) return std::nullopt;
    Leaf leaf;
    leaf.polyline.push_back(seed);
    cplx z = seed;
    double s_total = 0.0;
    double max_excursion = 0.0;
    const int max_steps = 200000;
    for (int step = 0; step < max_steps; ++step) {
        const double dd = divisor_dist(z);
        if (dd < 1e-4) return std::nullopt; // ran into a separatrix
        const double dz_cap = std::min(0.35 * dd, 0.02);
        const double ds = dz_cap * std::min(std::abs(form.f(z)), 1e6);
        // classic RK4 on dz/ds = i/f
        auto rhs = [&](cplx zz) { return kI / form.f(zz); };
        const cplx k1 = rhs(z);
        const cplx k2 = rhs(z + 0.5 * ds * k1);
        const cplx k3 = rhs(z + 0.5 * ds * k2);
        const cplx k4 = rhs(z + ds * k3);
        const cplx znew = z + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double step_dz = std::abs(znew - z);
        s_total += ds;
        z = znew;
        leaf.polyline.push_back(z);
        // closure test (mod lattice for genus 1)
        cplx diff = z - seed;
        int mm = 0, nn = 0;
        if (ms.genus == 1) {
            const double t = diff.imag() / ms.B.imag();
            const double s = diff.real() - t * ms.B.real();
            mm = int(std::lround(s));
            nn = int(std::lround(t));
            diff -= cplx(double(mm), 0.0) + double(nn) * ms.B;
        }
        max_excursion = std::max(max_excursion, std::abs(diff));
        if (step > 8 && max_excursion > 8.0 * step_dz && std::abs(diff) < 0.5 * step_dz) {
            leaf.lattice_m = mm;
            leaf.lattice_n = nn;
            leaf.height = s_total; // ds measures Im w directly (approximate)
            leaf.polyline.back() = seed + cplx(double(mm), 0.0) +
                                   (ms.genus == 1 ? double(nn) * ms.B : cplx(0.0));
            if (ms.genus == 0) {
                leaf.pole_winding.assign(ms.n(), 0);
                for (int m = 0; m < ms.n(); ++m) {
                    double acc = 0.0;
                    for (size_t i = 1; i < leaf.polyline.size(); ++i) {
                        const cplx u = leaf.polyline[i - 1] - ms.points[m];
                        const cplx v = leaf.polyline[i] - ms.points[m];
                        acc += std::arg(v / u);
                    }
                    leaf.pole_winding[m] = int(std::lround(acc / (2.0 * kPi)));
                }
            }
            return leaf;
        }
    }
    return std::nullopt;
}

namespace {

double circle_radius_at(const FlatFrame& frame, cplx center) {
    double r = 0.3;
    const auto& ms = frame.surface();
    for (const cplx& q : frame.divisor_positions()) {
        double d;
        if (ms.genus == 1)
            d = specfun::lattice_distance(q - center, frame.form().modulus());
        else
            d = std::abs(q - center);
        if (d > 1e-12) r = std::min(r, 0.35 * d);
    }
    return r;
}

} // namespace

std::string Cycle::describe() const {
    std::ostringstream os;
    switch (role) {
        case Role::a_cycle: os << "a-cycle"; break;
        case Role::b_cycle: os << "b-cycle"; break;
        case Role::pole_circle: os << "pole-circle(" << index << ")"; break;
        case Role::zero_circle: os << "zero-circle(" << index << ")"; break;
        case Role::cylinder_core: os << "cylinder-core(" << index << ")"; break;
    }
    if (orientation < 0) os << " reversed";
    return os.str();
}

std::vector<cplx> path_polyline(const quad::Path& path, int arc_segments) {
    std::vector<cplx> pts;
    for (const auto& leg : path) {
        const int n = (leg.kind == quad::Leg::Kind::segment) ? 1 : arc_segments;
        for (int i = 0; i < n; ++i) {
            if (pts.empty()) pts.push_back(leg.point(0.0));
            pts.push_back(leg.point(double(i + 1) / n));
        }
    }
    return pts;
}

int intersection_number(const std::vector<cplx>& c1, const std::vector<cplx>& c2) {
    int total = 0;
    for (size_t i = 0; i + 1 < c1.size(); ++i) {
        const cplx a = c1[i], b = c1[i + 1];
        for (size_t j = 0; j + 1 < c2.size(); ++j) {
            const cplx c = c2[j], d = c2[j + 1];
            const double d1 = cross(b - a, c - a);
            const double d2 = cross(b - a, d - a);
            const double d3 = cross(d - c, a - c);
            const double d4 = cross(d - c, b - c);
            if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) {
                total += (cross(b - a, d - c) > 0) ? +1 : -1;
            }
        }
    }
    return total;
}

std::vector<Cycle> cycle_catalog(const FlatFrame& frame) {
    const MarkedSurface& ms = frame.surface();
    std::vector<Cycle> out;
    // small circles around every divisor point
    for (int m = 0; m < ms.n(); ++m) {
        Cycle c;
        c.role = Cycle::Role::pole_circle;
        c.index = m;
        const double r = circle_radius_at(frame, ms.points[m]);
        c.path.push_back(quad::Leg::arc(ms.points[m], r, 0.0, 2.0 * kPi));
        out.push_back(c);
    }
    for (int l = 0; l < int(frame.zeros().size()); ++l) {
        Cycle c;
        c.role = Cycle::Role::zero_circle;
        c.index = l;
        const double r = circle_radius_at(frame, frame.zeros()[l]);
        c.path.push_back(quad::Leg::arc(frame.zeros()[l], r, 0.0, 2.0 * kPi));
        out.push_back(c);
    }
    if (ms.genus == 1) {
        // straight a/b representatives at offsets maximizing divisor clearance
        const auto& B = ms.B;
        auto [a0, b0] = clear_period_segments(ms, frame.divisor_positions());
        Cycle ca;
        ca.role = Cycle::Role::a_cycle;
        ca.lattice_m = 1;
        ca.path.push_back(quad::Leg::segment(a0, a0 + 1.0));
        out.push_back(ca);
        Cycle cb;
        cb.role = Cycle::Role::b_cycle;
        cb.lattice_n = 1;
        cb.path.push_back(quad::Leg::segment(b0, b0 + B));
        out.push_back(cb);
        // interior cylinder core: trace vertical leaves from seeds, keep one
        // representative with nonzero lattice displacement (largest height)
        std::optional<Leaf> best_leaf;
        for (int i = 1; i < 7 && !best_leaf; ++i) {
            for (int j = 1; j < 7; ++j) {
                const cplx seed = ms.points[0] + (i / 7.0) + (j / 7.0) * B;
                auto leaf = trace_vertical_leaf(frame.form(), seed, frame.zeros());
                if (leaf && (leaf->lattice_m != 0 || leaf->lattice_n != 0)) {
                    if (!best_leaf || leaf->height > best_leaf->height) best_leaf = leaf;
                }
            }
        }
        if (best_leaf) {
            Cycle cc;
            cc.role = Cycle::Role::cylinder_core;
            cc.index = 0;
            cc.lattice_m = best_leaf->lattice_m;
            cc.lattice_n = best_leaf->lattice_n;
            for (size_t i = 0; i + 1 < best_leaf->polyline.size(); ++i)
                cc.path.push_back(quad::Leg::segment(best_leaf->polyline[i],
                                                     best_leaf->polyline[i + 1]));
            out.push_back(cc);
        }
    } else {
        // cylinder cores per time gap, found by horizontal flow from seeds
        // near each pole followed by vertical leaf tracing
        std::vector<double> times;
        for (int l = 0; l < int(frame.zeros().size()); ++l)
            times.push_back(frame.w_zero(l).real());
        std::sort(times.begin(), times.end());
        int core_index = 0;
        for (size_t gap = 0; gap + 1 < times.size(); ++gap) {
            if (times[gap + 1] - times[gap] < 1e-6) continue;
            const double x_mid = 0.5 * (times[gap] + times[gap + 1]);
            std::vector<Leaf> cores;
            for (int m = 0; m < ms.n(); ++m) {
                for (int k = 0; k < 4; ++k) {
                    const double phi = 2.0 * kPi * (k + 0.37) / 4.0;
                    const double rho = 0.55 * circle_radius_at(frame, ms.points[m]) / 0.35;
                    const cplx dir{std::cos(phi), std::sin(phi)};
                    cplx z = ms.points[m] + rho * dir;
                    // exact w at the start: h* + alpha log(z - z_m) + regular tail
                    const cplx tail = quad::integrate_leg(
                        [&](cplx zz) {
                            return frame.form().f(zz) -
                                   ms.residues[m] / (zz - ms.points[m]);
                        },
                        quad::Leg::segment(ms.points[m], z), frame.tol().quad_tol);
                    cplx w = frame.hstar_pole(m) + ms.residues[m] * std::log(rho * dir) + tail;
                    // horizontal flow dz/ds = 1/f until Re w reaches x_mid
                    bool okflow = true;
                    for (int step = 0; step < 60000; ++step) {
                        const double remaining = x_mid - w.real();
                        if (std::abs(remaining) < 1e-10) break;
                        const double dd = frame.form().divisor_distance(z, frame.zeros());
                        if (dd < 1e-5) {
                            okflow = false;
                            break;
                        }
                        double ds = std::min({0.3 * dd * std::abs(frame.form().f(z)), 0.05,
                                              std::abs(remaining)});
                        ds = std::copysign(ds, remaining);
                        auto rhs = [&](cplx zz) { return 1.0 / frame.form().f(zz); };
                        const cplx k1 = rhs(z);
                        const cplx k2 = rhs(z + 0.5 * ds * k1);
                        const cplx k3 = rhs(z + 0.5 * ds * k2);
                        const cplx k4 = rhs(z + ds * k3);
                        z += (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                        w += ds;
                        if (step == 59999) okflow = false;
                    }
                    if (!okflow) continue;
                    auto leaf = trace_vertical_leaf(frame.form(), z, frame.zeros());
                    if (!leaf) continue;
                    bool dup = false;
                    for (const Leaf& c : cores) {
                        if (std::abs(c.height - leaf->height) < 1e-6 &&
                            c.pole_winding == leaf->pole_winding)
                            dup = true;
                    }
                    if (!dup) cores.push_back(*leaf);
                }
            }
            for (const Leaf& leaf : cores) {
                Cycle cc;
                cc.role = Cycle::Role::cylinder_core;
                cc.index = core_index++;
                for (size_t i = 0; i + 1 < leaf.polyline.size(); ++i)
                    cc.path.push_back(quad::Leg::segment(leaf.polyline[i], leaf.polyline[i + 1]));
                out.push_back(cc);
            }
        }
    }
    return out;
}

DiagramCoordinates forward_coordinates(const FlatFrame& frame) {
    const MarkedSurface& ms = frame.surface();
    const int g = ms.genus, n = ms.n();
    const int nz = int(frame.zeros().size());
    DiagramCoordinates out;

    // interaction times: Re w at the zeros, reference subtracted
    std::vector<std::pair<double, int>> times;
    for (int l = 0; l < nz; ++l) times.push_back({frame.w_zero(l).real(), l});
    std::sort(times.begin(), times.end());
    const double t0 = times.empty() ? 0.0 : times.front().first;
    for (size_t k = 1; k < times.size(); ++k) {
        out.tau.push_back(times[k].first - t0);
        out.metadata.push_back("tau: Re relative period to zero " +
                               std::to_string(times[k].second));
    }
    // theta from relative periods
    for (size_t k = 1; k < times.size(); ++k) {
        const int l = times[k].second;
        out.theta.push_back(frame.w_zero(l).imag() - frame.w_zero(times[0].second).imag());
        out.metadata.push_back("theta: Im relative period to zero " + std::to_string(l));
    }
    if (g == 1) {
        // interior cylinder circumference from the traced core plus one more
        // closed twist coordinate from a complementary primitive class
        auto catalog = cycle_catalog(frame);
        const Cycle* core = nullptr;
        for (const auto& c : catalog)
            if (c.role == Cycle::Role::cylinder_core) core = &c;
        if (!core) throw DimensionMismatch("no interior cylinder core found");
        const cplx core_period = integrate_form(frame.form(), core->path, nullptr, false);
        out.h.push_back(std::abs(core_period.imag()));
        out.metadata.push_back("h: Im period over cylinder-core class (" +
                               std::to_string(core->lattice_m) + "," +
                               std::to_string(core->lattice_n) + ")");
        // complementary class (m', n') with m n' - n m' = 1
        const int m = core->lattice_m, nn = core->lattice_n;
        int mp = 0, np = 0;
        {
            // extended gcd: x*m + y*nn = gcd
            int r0 = m, r1 = nn, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
            while (r1 != 0) {
                const int q = r0 / r1;
                int tmp = r0 - q * r1; r0 = r1; r1 = tmp;
                tmp = x0 - q * x1; x0 = x1; x1 = tmp;
                tmp = y0 - q * y1; y0 = y1; y1 = tmp;
            }
            if (std::abs(r0) != 1) throw DimensionMismatch("core class not primitive");
            mp = -y0 * r0;
            np = x0 * r0; // m*np - nn*mp = r0*(m x0 + nn y0) = r0^2 = 1
        }
        const cplx closed = double(mp) * frame.form().period_a() +
                            double(np) * frame.form().period_b();
        out.theta.push_back(closed.imag());
        out.metadata.push_back("theta: Im period over class (" + std::to_string(mp) + "," +
                               std::to_string(np) + ")");
    }
    const int expect_tau = 2 * g + n - 3;
    const int expect_theta = 3 * g + n - 3;
    if (int(out.tau.size()) != expect_tau || int(out.theta.size()) != expect_theta ||
        int(out.h.size()) != g)
        throw DimensionMismatch("coordinate dimensions do not match (coord) counts");
    return out;
}

} // namespace mandel::surface
