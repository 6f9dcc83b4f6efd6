#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mandel/errors.hpp"

namespace mandel::fem {

// Conforming P1 triangulation with Dirichlet markers on the vertices.
struct Mesh {
    std::vector<double> vx, vy;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> marker; // 0 = interior dof, 1 = Dirichlet

    int n_vertices() const { return int(vx.size()); }
    int n_triangles() const { return int(tris.size()); }
    double min_angle_deg() const;
};

using MarkerFn = std::function<bool(double x, double y)>;

// Calibration square (-pi/2, pi/2) x (0, pi), n cells per unit length.
Mesh make_square_mesh(int n);

// Strip (-X, X) x (0, pi) with the two slits {y = pi/2, |x| >= pi} and
// Dirichlet caps at x = +-X. Grading windows concentrate points toward the
// slit lines and tips with node offsets ~ (i/m)^exponent.
Mesh make_slit_strip_mesh(double X, int n_unit, double grading_exponent = 2.0,
                          int grading_levels = 6);

// Red refinement: every triangle into four via edge midpoints; markers are
// re-derived from the supplied geometry predicate.
Mesh refine_uniform(const Mesh& mesh, const MarkerFn& dirichlet);

MarkerFn square_dirichlet();
MarkerFn slit_strip_dirichlet(double X);

// Plain-text mesh format: "vertices N" lines of "x y marker", then
// "triangles M" lines of "i j k".
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

} // namespace mandel::fem
