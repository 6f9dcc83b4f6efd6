#include "mandel/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace mandel::fem {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEps = 1e-9;

// 1-D grid with uniform spacing h away from the anchors and a graded window
// of half-width `window` around each anchor: offsets window*(i/m)^beta.
std::vector<double> graded_line(double lo, double hi, double h,
                                const std::vector<double>& anchors, double window,
                                double beta, int levels) {
    std::set<double> pts;
    const int n = std::max(1, int(std::lround((hi - lo) / h)));
    for (int i = 0; i <= n; ++i) pts.insert(lo + (hi - lo) * double(i) / n);
    for (double a : anchors) {
        if (a < lo - kEps || a > hi + kEps) continue;
        for (int i = 0; i <= levels; ++i) {
            const double off = window * std::pow(double(i) / levels, beta);
            if (a + off <= hi + kEps) pts.insert(std::min(a + off, hi));
            if (a - off >= lo - kEps) pts.insert(std::max(a - off, lo));
        }
    }
    std::vector<double> out(pts.begin(), pts.end());
    // drop near-duplicates
    std::vector<double> clean;
    for (double p : out)
        if (clean.empty() || p - clean.back() > 1e-7) clean.push_back(p);
    // make sure anchors survive the dedupe exactly
    for (double a : anchors) {
        if (a < lo - kEps || a > hi + kEps) continue;
        auto it = std::min_element(clean.begin(), clean.end(), [&](double u, double v) {
            return std::abs(u - a) < std::abs(v - a);
        });
        *it = a;
    }
    return clean;
}

Mesh tensor_mesh(const std::vector<double>& xs, const std::vector<double>& ys,
                 const MarkerFn& dirichlet,
                 const std::function<bool(double, double)>& keep_cell) {
    Mesh mesh;
    const int nx = int(xs.size()), ny = int(ys.size());
    std::vector<int> id(nx * ny, -1);
    auto vid = [&](int i, int j) -> int& { return id[i * ny + j]; };
    auto add_vertex = [&](int i, int j) {
        int& v = vid(i, j);
        if (v < 0) {
            v = mesh.n_vertices();
            mesh.vx.push_back(xs[i]);
            mesh.vy.push_back(ys[j]);
            mesh.marker.push_back(dirichlet(xs[i], ys[j]) ? 1 : 0);
        }
        return v;
    };
    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double cx = 0.5 * (xs[i] + xs[i + 1]);
            const double cy = 0.5 * (ys[j] + ys[j + 1]);
            if (!keep_cell(cx, cy)) continue;
            const int v00 = add_vertex(i, j);
            const int v10 = add_vertex(i + 1, j);
            const int v01 = add_vertex(i, j + 1);
            const int v11 = add_vertex(i + 1, j + 1);
            // alternate the diagonal to avoid mesh-wide directional bias
            if ((i + j) % 2 == 0) {
                mesh.tris.push_back({v00, v10, v11});
                mesh.tris.push_back({v00, v11, v01});
            } else {
                mesh.tris.push_back({v00, v10, v01});
                mesh.tris.push_back({v10, v11, v01});
            }
        }
    }
    return mesh;
}

} // namespace

double Mesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& t : tris) {
        const double ax = vx[t[0]], ay = vy[t[0]];
        const double bx = vx[t[1]], by = vy[t[1]];
        const double cx = vx[t[2]], cy = vy[t[2]];
        const double la = std::hypot(bx - cx, by - cy);
        const double lb = std::hypot(ax - cx, ay - cy);
        const double lc = std::hypot(ax - bx, ay - by);
        const double angA = std::acos(std::clamp((lb * lb + lc * lc - la * la) /
                                                     (2.0 * lb * lc), -1.0, 1.0));
        const double angB = std::acos(std::clamp((la * la + lc * lc - lb * lb) /
                                                     (2.0 * la * lc), -1.0, 1.0));
        const double angC = kPi - angA - angB;
        worst = std::min({worst, angA, angB, angC});
    }
    return worst * 180.0 / kPi;
}

MarkerFn square_dirichlet() {
    return [](double x, double y) {
        return std::abs(x + kPi / 2) < kEps || std::abs(x - kPi / 2) < kEps ||
               std::abs(y) < kEps || std::abs(y - kPi) < kEps;
    };
}

MarkerFn slit_strip_dirichlet(double X) {
    return [X](double x, double y) {
        if (std::abs(y) < kEps || std::abs(y - kPi) < kEps) return true;
        if (std::abs(x + X) < kEps || std::abs(x - X) < kEps) return true;
        // the two slits, tips included
        if (std::abs(y - kPi / 2) < kEps && (x <= -kPi + kEps || x >= kPi - kEps))
            return true;
        return false;
    };
}

Mesh make_square_mesh(int n) {
    const double h = kPi / std::max(2, n);
    std::vector<double> xs, ys;
    const int nx = std::max(2, n);
    for (int i = 0; i <= nx; ++i) xs.push_back(-kPi / 2 + kPi * double(i) / nx);
    for (int j = 0; j <= nx; ++j) ys.push_back(kPi * double(j) / nx);
    (void)h;
    return tensor_mesh(xs, ys, square_dirichlet(), [](double, double) { return true; });
}

Mesh make_slit_strip_mesh(double X, int n_unit, double grading_exponent,
                          int grading_levels) {
    if (!(X > kPi)) throw MeshQualityFailure("truncation X must exceed pi");
    const double h = 1.0 / std::max(2, n_unit);
    // x grid: anchors at the slit tips; built symmetrically from 0 so that
    // enlarging X only appends arm cells (the core mesh is X-independent)
    std::vector<double> right =
        graded_line(0.0, X, h, {kPi}, std::min(1.0, 0.5 * (X - kPi)), grading_exponent,
                    grading_levels);
    std::set<double> xs_set;
    for (double x : right) {
        xs_set.insert(x);
        xs_set.insert(-x);
    }
    std::vector<double> xs(xs_set.begin(), xs_set.end());
    std::vector<double> ys =
        graded_line(0.0, kPi, kPi * h, {kPi / 2}, 0.5, grading_exponent, grading_levels);
    Mesh mesh = tensor_mesh(xs, ys, slit_strip_dirichlet(X),
                            [](double, double) { return true; });
    if (mesh.min_angle_deg() < 8.0)
        throw MeshQualityFailure("slit strip mesh min angle too small");
    return mesh;
}

Mesh refine_uniform(const Mesh& mesh, const MarkerFn& dirichlet) {
    Mesh out;
    out.vx = mesh.vx;
    out.vy = mesh.vy;
    out.marker = mesh.marker;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const double x = 0.5 * (mesh.vx[a] + mesh.vx[b]);
        const double y = 0.5 * (mesh.vy[a] + mesh.vy[b]);
        const int v = out.n_vertices();
        out.vx.push_back(x);
        out.vy.push_back(y);
        out.marker.push_back(dirichlet(x, y) ? 1 : 0);
        midpoint[key] = v;
        return v;
    };
    for (const auto& t : mesh.tris) {
        const int ab = mid(t[0], t[1]);
        const int bc = mid(t[1], t[2]);
        const int ca = mid(t[2], t[0]);
        out.tris.push_back({t[0], ab, ca});
        out.tris.push_back({ab, t[1], bc});
        out.tris.push_back({ca, bc, t[2]});
        out.tris.push_back({ab, bc, ca});
    }
    return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "vertices " << mesh.n_vertices() << "\n";
    os.precision(17);
    for (int i = 0; i < mesh.n_vertices(); ++i)
        os << mesh.vx[i] << " " << mesh.vy[i] << " " << mesh.marker[i] << "\n";
    os << "triangles " << mesh.n_triangles() << "\n";
    for (const auto& t : mesh.tris) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Mesh read_mesh(std::istream& is) {
    Mesh mesh;
    std::string word;
    int n = 0;
    if (!(is >> word >> n) || word != "vertices")
        throw Error("mesh parse error: expected 'vertices N'");
    mesh.vx.resize(n);
    mesh.vy.resize(n);
    mesh.marker.resize(n);
    for (int i = 0; i < n; ++i)
        if (!(is >> mesh.vx[i] >> mesh.vy[i] >> mesh.marker[i]))
            throw Error("mesh parse error in vertex block");
    int m = 0;
    if (!(is >> word >> m) || word != "triangles")
        throw Error("mesh parse error: expected 'triangles M'");
    mesh.tris.resize(m);
    for (int i = 0; i < m; ++i)
        if (!(is >> mesh.tris[i][0] >> mesh.tris[i][1] >> mesh.tris[i][2]))
            throw Error("mesh parse error in triangle block");
    return mesh;
}

} // namespace mandel::fem
