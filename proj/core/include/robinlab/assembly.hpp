#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "robinlab/coeff.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/quadrature.hpp"

namespace robinlab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Geometry of one P1 cell: measure, hat-function gradients (one column per
/// local vertex) and vertex coordinates.
struct P1Cell {
    double measure = 0.0;
    Eigen::Matrix<double, 2, 3> grads;
    std::array<Point, 3> points;
    int nloc = 0;

    Point at(const Eigen::Vector3d& bary) const;
};

P1Cell p1_cell(const Mesh& mesh, Index cell);

struct AssemblyOptions {
    CellRule rule = CellRule::Barycenter;
};

/// Matrix realization of
///   a(u, v) = int a grad u . grad v + b u . grad v + c . grad u v + d u v
///           + int_boundary beta u v
/// on P1 hat functions: A(i, j) = a(phi_j, phi_i), rows index test functions.
struct AssembledForm {
    std::shared_ptr<const Mesh> mesh;
    SparseMatrix A;
    SparseMatrix mass;           ///< M_Omega, exact P1 mass
    SparseMatrix boundary_mass;  ///< M_boundary, exact P1 facet mass
    SparseMatrix b_term;         ///< contribution of b alone (part of A)
    SparseMatrix c_term;         ///< contribution of c alone (part of A)
    double omega = 0.0;
    std::vector<Index> dof_map;  ///< dof of each vertex (identity for P1)

    /// A + omega * M_Omega.
    SparseMatrix shifted(double shift) const { return A + shift * mass; }
};

AssembledForm assemble_robin_form(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                  const AssemblyOptions& options = {});

/// Data of the right-hand side functional
///   v -> int f0 v + sum_j int f_j D_j v + int_boundary g v.
/// Empty callables mean zero.
struct RhsData {
    ScalarField f0;
    VectorField f;
    ScalarField g;
};

struct RhsFunctional {
    Eigen::VectorXd vector;
    std::vector<double> f0_samples;
    std::vector<Eigen::Vector2d> f_samples;
    std::vector<double> g_samples;
};

RhsFunctional assemble_rhs(const Mesh& mesh, const RhsData& data, const AssemblyOptions& options = {});

/// weight * int_E g v over the listed edges (vertex pairs, 2D) or vertices
/// (1D, second index -1); g sampled at edge midpoints.
Eigen::VectorXd assemble_edge_functional(const Mesh& mesh, const std::vector<std::array<Index, 2>>& edges,
                                         const ScalarField& g, double weight);

/// Exact P1 mass matrices of the domain and of its boundary.
SparseMatrix mass_matrix(const Mesh& mesh);
SparseMatrix boundary_mass_matrix(const Mesh& mesh);

/// Stiffness of -Laplace plus P1 mass: the discrete H^1 inner product.
SparseMatrix h1_matrix(const Mesh& mesh);

/// Row-sum lumping.
SparseMatrix lumped(const SparseMatrix& m);

/// Symmetric part (X + X^T) / 2.
SparseMatrix symmetric_part(const SparseMatrix& x);

struct CoercivityShift {
    double omega = 0.0;
    int factorizations = 0;
};

/// Smallest omega (doubling from 1, then bisection to 1e-6 relative) such
/// that sym(A) + omega M - eta H is positive semidefinite. Returns 0 when the
/// form is already coercive with constant eta.
CoercivityShift find_coercivity_shift(const AssembledForm& form, double eta);

/// True when x is positive semidefinite up to a relative slack of 1e-12.
bool is_positive_semidefinite(const SparseMatrix& x);

/// Same stiffness as the Robin form; evolution mass M_Omega + M_boundary on
/// the shared dofs, realizing L2(Omega) + L2(boundary) for states (u, u|_boundary).
struct WentzellSystem {
    AssembledForm form;
    SparseMatrix mass;
};

WentzellSystem assemble_wentzell_system(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                        const AssemblyOptions& options = {});

/// Pair (u, u|_boundary) of the product space; the boundary part is shared
/// with the interior dofs, so a state built from a nodal vector is consistent.
struct ProductState {
    Eigen::VectorXd interior;
    Eigen::VectorXd boundary;
    bool consistent = true;

    static ProductState from_nodal(const Mesh& mesh, const Eigen::VectorXd& nodal);
};

/// sqrt of the largest eigenvalue of the pencil (M_boundary, H): the best
/// constant C in ||u||_{L2(boundary)} <= C ||u||_{H1} over P1 functions.
/// Dense computation; intended for small meshes.
double discrete_trace_constant(const Mesh& mesh);

/// Coordinate (row col value) text dump, 17 significant digits, 0-based.
void write_matrix_coordinates(std::ostream& out, const SparseMatrix& m);

}  // namespace robinlab
