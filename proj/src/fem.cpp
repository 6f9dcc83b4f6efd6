#include "mandel/fem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>

#include "mandel/rng.hpp"

namespace mandel::fem {

FemSystem assemble_p1(const Mesh& mesh) {
    FemSystem sys;
    sys.dof_of_vertex.assign(mesh.n_vertices(), -1);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (mesh.marker[v] == 0) sys.dof_of_vertex[v] = sys.n_dof++;
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(9 * mesh.n_triangles());
    tm.reserve(9 * mesh.n_triangles());
    for (const auto& t : mesh.tris) {
        const double x1 = mesh.vx[t[0]], y1 = mesh.vy[t[0]];
        const double x2 = mesh.vx[t[1]], y2 = mesh.vy[t[1]];
        const double x3 = mesh.vx[t[2]], y3 = mesh.vy[t[2]];
        const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
        const double area = 0.5 * std::abs(det);
        if (area <= 0.0) throw MeshQualityFailure("degenerate triangle in assembly");
        // gradients of the barycentric basis
        const double b[3] = {y2 - y3, y3 - y1, y1 - y2};
        const double c[3] = {x3 - x2, x1 - x3, x2 - x1};
        for (int i = 0; i < 3; ++i) {
            const int di = sys.dof_of_vertex[t[i]];
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = sys.dof_of_vertex[t[j]];
                if (dj < 0) continue;
                const double kij = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                const double mij = area * ((i == j) ? 1.0 / 6.0 : 1.0 / 12.0);
                tk.emplace_back(di, dj, kij);
                tm.emplace_back(di, dj, mij);
            }
        }
    }
    sys.K.resize(sys.n_dof, sys.n_dof);
    sys.M.resize(sys.n_dof, sys.n_dof);
    sys.K.setFromTriplets(tk.begin(), tk.end());
    sys.M.setFromTriplets(tm.begin(), tm.end());
    return sys;
}

EigenPairs lowest_eigenpairs(const FemSystem& sys, int k, double tol, int max_iter,
                             uint64_t seed) {
    const int n = sys.n_dof;
    const int p = std::min(n, k + 4);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.K);
    if (solver.info() != Eigen::Success)
        throw SolverNonConvergence("sparse factorization of the stiffness matrix failed");

    SplitMix64 rng(seed);
    Eigen::MatrixXd X(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = rng.uniform() - 0.5;

    std::vector<double> prev(k, 0.0);
    Eigen::MatrixXd V;
    Eigen::VectorXd theta;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::MatrixXd Y = solver.solve(sys.M * X);
        // Rayleigh-Ritz on span(Y)
        const Eigen::MatrixXd A = Y.transpose() * (sys.K * Y);
        const Eigen::MatrixXd B = Y.transpose() * (sys.M * Y);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
        if (ges.info() != Eigen::Success)
            throw SolverNonConvergence("dense Rayleigh-Ritz solve failed");
        theta = ges.eigenvalues();
        V = Y * ges.eigenvectors();
        X = V;
        bool converged = true;
        for (int j = 0; j < k; ++j) {
            if (std::abs(theta(j) - prev[j]) > tol * std::max(1.0, std::abs(theta(j))))
                converged = false;
            prev[j] = theta(j);
        }
        if (converged && iter > 2) break;
        if (iter == max_iter - 1)
            throw SolverNonConvergence("subspace iteration did not converge");
    }
    EigenPairs out;
    for (int j = 0; j < k; ++j) {
        out.values.push_back(theta(j));
        Eigen::VectorXd v = V.col(j);
        const double nrm = std::sqrt(v.dot(sys.M * v));
        out.vectors.push_back(v / nrm);
    }
    return out;
}

namespace {

EigenReport two_mesh_report(const Mesh& coarse, const MarkerFn& dirichlet, int k,
                            double X) {
    EigenReport rep;
    rep.truncation_X = X;
    rep.min_angle_deg = coarse.min_angle_deg();
    rep.n_vertices = coarse.n_vertices();
    rep.n_triangles = coarse.n_triangles();
    const FemSystem sys_c = assemble_p1(coarse);
    rep.n_dof = sys_c.n_dof;
    rep.eigenvalues = lowest_eigenpairs(sys_c, k).values;
    const Mesh fine = refine_uniform(coarse, dirichlet);
    rep.fine_n_triangles = fine.n_triangles();
    const FemSystem sys_f = assemble_p1(fine);
    rep.eigenvalues_fine = lowest_eigenpairs(sys_f, k).values;
    for (int j = 0; j < k; ++j)
        rep.extrapolated.push_back((4.0 * rep.eigenvalues_fine[j] - rep.eigenvalues[j]) /
                                   3.0);
    return rep;
}

} // namespace

EigenReport square_calibration_eigs(int n, int k) {
    const Mesh mesh = make_square_mesh(n);
    return two_mesh_report(mesh, square_dirichlet(), k, 0.0);
}

EigenReport slit_strip_eigs(double X, int n_unit, int k, double grading_exponent,
                            int grading_levels) {
    const Mesh mesh = make_slit_strip_mesh(X, n_unit, grading_exponent, grading_levels);
    return two_mesh_report(mesh, slit_strip_dirichlet(X), k, X);
}

std::vector<double> vertex_values(const Mesh& mesh, const FemSystem& sys,
                                  const Eigen::VectorXd& dof_values) {
    std::vector<double> out(mesh.n_vertices(), 0.0);
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (sys.dof_of_vertex[v] >= 0) out[v] = dof_values(sys.dof_of_vertex[v]);
    return out;
}

double l2_norm(const Mesh& mesh, const std::vector<double>& values) {
    double acc = 0.0;
    for (const auto& t : mesh.tris) {
        const double x1 = mesh.vx[t[0]], y1 = mesh.vy[t[0]];
        const double x2 = mesh.vx[t[1]], y2 = mesh.vy[t[1]];
        const double x3 = mesh.vx[t[2]], y3 = mesh.vy[t[2]];
        const double area = 0.5 * std::abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
        const double u1 = values[t[0]], u2 = values[t[1]], u3 = values[t[2]];
        // exact mass integration of the P1 interpolant
        acc += area / 6.0 * (u1 * u1 + u2 * u2 + u3 * u3 + u1 * u2 + u2 * u3 + u1 * u3);
    }
    return std::sqrt(acc);
}

ExtensionResult embedded_mode_extension(const Mesh& mesh,
                                        const std::vector<double>& values) {
    if (int(values.size()) != mesh.n_vertices())
        throw MatchingFailure("value vector does not match the mesh");
    ExtensionResult res;
    res.l2_original = l2_norm(mesh, values);
    Mesh& d = res.doubled;
    d.vx = mesh.vx;
    d.vy = mesh.vy;
    d.marker = mesh.marker;
    d.tris = mesh.tris;
    res.values = values;
    // mirror vertices with y > 0; vertices on y = 0 are shared
    std::vector<int> mirror(mesh.n_vertices(), -1);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (std::abs(mesh.vy[v]) < 1e-12) {
            mirror[v] = v;
            continue;
        }
        mirror[v] = d.n_vertices();
        d.vx.push_back(mesh.vx[v]);
        d.vy.push_back(-mesh.vy[v]);
        d.marker.push_back(mesh.marker[v]);
        res.values.push_back(-values[v]);
    }
    for (const auto& t : mesh.tris)
        d.tris.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]}); // keep orientation
    // residuals
    res.odd_residual = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        res.odd_residual = std::max(res.odd_residual,
                                    std::abs(res.values[mirror[v]] + values[v]) *
                                        (std::abs(mesh.vy[v]) < 1e-12 ? 0.0 : 1.0));
    // identified boundary lines of the glued diagram carry the Dirichlet data
    res.boundary_residual = 0.0;
    for (int v = 0; v < d.n_vertices(); ++v)
        if (d.marker[v] == 1)
            res.boundary_residual = std::max(res.boundary_residual, std::abs(res.values[v]));
    // one-sided normal derivatives across y = 0 from element gradients
    double jump = 0.0;
    std::vector<double> dy_up(mesh.n_vertices(), 0.0), dy_dn(mesh.n_vertices(), 0.0);
    std::vector<int> cnt_up(mesh.n_vertices(), 0), cnt_dn(mesh.n_vertices(), 0);
    auto grad_y = [&](const Mesh& mm, const std::vector<double>& vals,
                      const std::array<int, 3>& t) {
        const double x1 = mm.vx[t[0]], y1 = mm.vy[t[0]];
        const double x2 = mm.vx[t[1]], y2 = mm.vy[t[1]];
        const double x3 = mm.vx[t[2]], y3 = mm.vy[t[2]];
        const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
        const double c[3] = {x3 - x2, x1 - x3, x2 - x1};
        double g = 0.0;
        for (int i = 0; i < 3; ++i) g += vals[t[i]] * c[i];
        return g / det;
    };
    for (size_t e = 0; e < d.tris.size(); ++e) {
        const auto& t = d.tris[e];
        for (int i = 0; i < 3; ++i) {
            const int v = t[i];
            if (v < mesh.n_vertices() && std::abs(d.vy[v]) < 1e-12) {
                const bool upper = e < mesh.tris.size();
                const double g = grad_y(d, res.values, t);
                if (upper) {
                    dy_up[v] += g;
                    cnt_up[v]++;
                } else {
                    dy_dn[v] += g;
                    cnt_dn[v]++;
                }
            }
        }
    }
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (cnt_up[v] > 0 && cnt_dn[v] > 0)
            jump = std::max(jump, std::abs(dy_up[v] / cnt_up[v] - dy_dn[v] / cnt_dn[v]));
    res.normal_jump = jump;
    res.l2_extended = l2_norm(d, res.values);
    return res;
}

} // namespace mandel::fem
