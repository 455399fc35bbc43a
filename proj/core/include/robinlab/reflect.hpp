#pragma once

#include <memory>
#include <vector>

#include "robinlab/assembly.hpp"
#include "robinlab/coeff.hpp"
#include "robinlab/fem_function.hpp"
#include "robinlab/mesh.hpp"

namespace robinlab {

struct JacobianEval {
    Eigen::Matrix2d matrix;
    bool on_breakpoint = false;  ///< evaluated on a psi knot: left-limit value
};

/// Reflection S across the graph of psi inside a chart: S(T(y, s)) = T(y, -s).
class ReflectionOperator {
public:
    explicit ReflectionOperator(BoundaryChart chart) : chart_(std::move(chart)) {}

    const BoundaryChart& chart() const noexcept { return chart_; }

    Point reflect(const Point& x) const;

    /// S' = [[I, 0], [2 grad psi, -1]] in the chart frame, conjugated by the
    /// chart rotation into the domain frame.
    JacobianEval jacobian(const Point& x) const;

    /// True on the domain side U (s > 0) and on the graph itself.
    bool on_domain_side(const Point& x) const;

private:
    BoundaryChart chart_;
};

Point reflect_point(const ReflectionOperator& op, const Point& x);
JacobianEval jacobian_S(const ReflectionOperator& op, const Point& x);

/// a_hat = S' a(Sx) S'^T, b_hat = S' b(Sx), c_hat = S' c(Sx), d_tilde = d(Sx)
/// on the reflected side V; unchanged on U. beta is set to zero.
CoefficientField pushforward_coefficients(const ReflectionOperator& op, const CoefficientField& field);

/// Right-hand side of the extended interior problem: f0_tilde, f_hat as
/// interior data plus `interface_weight` * int_{interface} g v.
struct ExtendedRhs {
    RhsData interior;
    ScalarField g_interface;
    double interface_weight = 2.0;
};

/// The doubled chart region G = U u V with a mirror-symmetric mesh: every
/// V-vertex is the reflection of a U-vertex and every V-cell the image of a
/// U-cell.
struct ExtendedProblem {
    ReflectionOperator reflection;
    std::shared_ptr<const Mesh> mesh_U;
    std::shared_ptr<const Mesh> mesh_G;
    CoefficientField coeffs_hat;
    std::vector<Index> interface_vertices;                  ///< mesh_G numbering
    std::vector<std::array<Index, 2>> interface_edges;      ///< mesh_G numbering
    std::vector<Index> source_in_U;                         ///< per mesh_G vertex: U vertex mapped onto it by S or identity
    std::vector<bool> cell_in_V;                            ///< per mesh_G cell
};

/// Builds U and G meshes in chart coordinates (y, s) on a tensor grid that
/// contains every psi knot, so T and S are affine on each cell. `fill` < 1
/// keeps the closed mesh inside the open cylinder.
ExtendedProblem build_extended_problem(const BoundaryChart& chart, const CoefficientField& field, int cells_y,
                                       int cells_s, double fill = 0.999);

/// alpha_hat = min over the G samples of lambda_min(sym a_hat). A NonElliptic
/// exception here would contradict the ellipticity-preservation property.
EllipticityCertificate certify_extended_ellipticity(const ExtendedProblem& ext, int samples_per_cell = 1);

/// Even extension w(Sx) of a P1 function on mesh_U to mesh_G.
FemFunction extend_function(const ExtendedProblem& ext, const FemFunction& u);

/// f0_tilde = f0(Sx), f_hat = S' f(Sx) on V; g carried to the interface with weight 2.
ExtendedRhs transform_rhs(const ExtendedProblem& ext, const RhsData& data);

/// Assembled load vector of an ExtendedRhs on mesh_G.
Eigen::VectorXd assemble_extended_rhs(const ExtendedProblem& ext, const ExtendedRhs& rhs,
                                      const AssemblyOptions& options = {});

}  // namespace robinlab
