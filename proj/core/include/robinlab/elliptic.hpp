#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "robinlab/assembly.hpp"
#include "robinlab/coeff.hpp"
#include "robinlab/fem_function.hpp"

namespace robinlab {

// ---------------------------------------------------------------------------
// Norms of P1 functions
// ---------------------------------------------------------------------------

/// sqrt(u^T M u), exact for P1.
double l2_norm(const FemFunction& u);
/// sqrt(u^T (K + M) u), the full H^1 norm, exact for P1.
double h1_norm(const FemFunction& u);
/// Lumped-mass L^p norm (sum_i m_i |u_i|^p)^(1/p); p = infinity gives max |u_i|.
double lp_norm(const FemFunction& u, double p);
/// Lumped-mass L^p norm with explicit nodal weights.
double weighted_lp_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double p);
double linf_norm(const FemFunction& u);
/// L^2(boundary) norm of the trace, exact for P1.
double boundary_l2_norm(const FemFunction& u);

/// ||u - exact||_{L2} with a degree-4 rule (2D) / 5-point Gauss (1D).
double l2_error(const FemFunction& u, const ScalarField& exact);
/// Full H^1 error ||u - exact||_{H1}.
double h1_error(const FemFunction& u, const ScalarField& exact, const VectorField& exact_grad);

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

struct SolveInfo {
    double condition_estimate = 0.0;
    double relative_residual = 0.0;
};

/// Solves (A + omega M) u = rhs with a sparse LU factorization. Throws
/// SingularSystem when the factorization breaks down, the condition estimate
/// exceeds 1e12, or the relative residual exceeds 1e-10.
FemFunction solve_robin(const AssembledForm& form, const RhsFunctional& rhs, double omega,
                        SolveInfo* info = nullptr);

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

struct ManufacturedProblem {
    std::string name;
    int dim = 2;
    CoefficientField field;
    RhsData data;
    double omega = 1.0;
    ScalarField exact;
    VectorField exact_grad;
    /// Mesh with the given number of cells per unit length.
    std::function<Mesh(int)> mesh;
};

/// u = cos(pi x) on (0,1), or u = cos(pi x) cos(pi y) on the unit square:
/// -Laplace u + u = f0 with homogeneous Neumann data, omega = 1.
ManufacturedProblem cosine_problem(int dim);
/// u = value with f0 = value, omega = 1.
ManufacturedProblem constant_problem(int dim, double value);

struct ConvergenceRow {
    double h = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    double rate_l2 = 0.0;  ///< NaN on the coarsest level
    double rate_h1 = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::vector<FemFunction> solutions;
};

/// Solves on refinements + 1 dyadic levels starting from `base_cells` cells
/// per unit length; rates are successive log2 error ratios.
ConvergenceStudy manufactured_convergence(const ManufacturedProblem& problem, int refinements, int base_cells = 8,
                                          const AssemblyOptions& options = {});

// ---------------------------------------------------------------------------
// Hoelder estimates
// ---------------------------------------------------------------------------

inline constexpr std::size_t kHolderExactVertexCap = 5000;
inline constexpr std::size_t kHolderSampledPairs = 1000000;

struct HolderValue {
    double value = 0.0;
    bool sampled = false;  ///< true when random pair subsampling was used
    std::size_t pairs = 0;
};

/// Vertex-pair seminorm max |u(x) - u(y)| / |x - y|^gamma, for each gamma.
/// Exact up to kHolderExactVertexCap vertices; above that kHolderSampledPairs
/// uniformly random pairs drawn from `seed`. Differences below
/// 1e3 * machine epsilon * max|u| count as zero.
std::vector<HolderValue> holder_seminorms(const FemFunction& u, const std::vector<double>& gammas,
                                          std::uint64_t seed = 42);
double holder_seminorm(const FemFunction& u, double gamma, std::uint64_t seed = 42);

struct HolderEstimate {
    double gamma_hat = 0.0;
    bool floor_warning = false;                  ///< no grid value was bounded; gamma_hat = 0.05
    std::vector<double> grid;                    ///< 0.05, 0.10, ..., 0.95
    std::vector<std::vector<double>> seminorms;  ///< [grid index][level]
    std::vector<double> trajectory;              ///< seminorms at gamma_hat per level
    bool sampled = false;
};

/// Largest grid gamma whose seminorm ratio between every pair of successive
/// levels is at most 1.1 (0/0 counts as bounded). Needs >= 3 levels.
HolderEstimate estimate_holder_exponent(const std::vector<FemFunction>& levels, std::uint64_t seed = 42);

}  // namespace robinlab
