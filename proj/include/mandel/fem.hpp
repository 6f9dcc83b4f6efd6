#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

#include "mandel/mesh.hpp"

namespace mandel::fem {

struct FemSystem {
    Eigen::SparseMatrix<double> K; // stiffness, Dirichlet dofs eliminated
    Eigen::SparseMatrix<double> M; // consistent mass
    std::vector<int> dof_of_vertex; // -1 for Dirichlet vertices
    int n_dof = 0;
};

FemSystem assemble_p1(const Mesh& mesh);

// Lowest k eigenpairs of K u = lambda M u via shift-invert subspace
// iteration (sparse Cholesky of K, deterministic seeded start).
struct EigenPairs {
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors; // dof vectors
};
EigenPairs lowest_eigenpairs(const FemSystem& sys, int k, double tol = 1e-10,
                             int max_iter = 400, uint64_t seed = 7);

struct EigenReport {
    std::vector<double> eigenvalues;      // coarse mesh
    std::vector<double> eigenvalues_fine; // one uniform refinement
    std::vector<double> extrapolated;     // (4 fine - coarse)/3
    int n_vertices = 0, n_triangles = 0, n_dof = 0;
    int fine_n_triangles = 0;
    double min_angle_deg = 0.0;
    double truncation_X = 0.0;
};

// Dirichlet eigenvalues of the calibration square (-pi/2, pi/2) x (0, pi).
EigenReport square_calibration_eigs(int n, int k);

// Dirichlet eigenvalues of the slit strip truncated at |x| = X.
EigenReport slit_strip_eigs(double X, int n_unit, int k,
                            double grading_exponent = 2.0, int grading_levels = 6);

// Vertex values of an eigenvector (Dirichlet vertices filled with zeros).
std::vector<double> vertex_values(const Mesh& mesh, const FemSystem& sys,
                                  const Eigen::VectorXd& dof_values);

// Odd extension U(x,-y) = -U(x,y) onto the doubled mesh, with residuals of
// the gluing conditions.
struct ExtensionResult {
    Mesh doubled;
    std::vector<double> values;
    double odd_residual = 0.0;        // max |U(x,-y) + U(x,y)| over mirrored nodes
    double boundary_residual = 0.0;   // max |U| on the identified boundary lines
    double normal_jump = 0.0;         // max one-sided dU/dy mismatch across y = 0
    double l2_original = 0.0;
    double l2_extended = 0.0;
};
ExtensionResult embedded_mode_extension(const Mesh& mesh,
                                        const std::vector<double>& values);

// L2 norm of a vertex-valued function (P1 interpolant).
double l2_norm(const Mesh& mesh, const std::vector<double>& values);

} // namespace mandel::fem
