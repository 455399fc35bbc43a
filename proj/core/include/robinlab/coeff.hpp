#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "robinlab/mesh.hpp"

namespace robinlab {

using MatrixField = std::function<Eigen::Matrix2d(const Point&)>;
using VectorField = std::function<Eigen::Vector2d(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// Recorded L-infinity bounds (spectral norm for a, Euclidean for b and c).
struct SupBounds {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double beta = 0.0;
};

/// Operator data of L u = -div(a grad u + b u) + c . grad u + d u with Robin
/// coefficient beta. Fields are arbitrary point-evaluable callables and must
/// be pure: assembly samples them only at quadrature points.
///
/// For dim == 1 only a(0,0), b[0] and c[0] are read.
struct CoefficientField {
    int dim = 2;
    MatrixField a;
    VectorField b;
    VectorField c;
    ScalarField d;
    ScalarField beta;
    SupBounds sup_bounds;
    std::optional<double> b_lipschitz;
    std::string name;

    /// k >= sup|b| and k >= sup div b, available when b is Lipschitz.
    std::optional<double> drift_bound() const;
};

struct EllipticityCertificate {
    double alpha = 0.0;
    std::size_t sample_count = 0;
    double min_observed = 0.0;
};

/// Smallest eigenvalue of (a + a^T)/2 restricted to the leading dim x dim block.
double symmetric_lambda_min(const Eigen::Matrix2d& a, int dim);

/// Sample locations used by certify_ellipticity: the barycenter for one
/// sample, the standard interior rule for three, and a deterministic
/// low-discrepancy barycentric sequence otherwise.
std::vector<Point> cell_sample_points(const Mesh& mesh, Index cell, int samples_per_cell);

/// alpha = min over samples of lambda_min(sym a(x)). Throws NonElliptic at the
/// first sample with lambda_min <= 0.
EllipticityCertificate certify_ellipticity(const CoefficientField& field, const Mesh& mesh,
                                           int samples_per_cell = 1);

/// Largest violation of the recorded sup bounds over the cell samples
/// (<= 0 when the bounds hold).
double sup_bound_violation(const CoefficientField& field, const Mesh& mesh, int samples_per_cell = 1);

// Built-in families.
CoefficientField constant_coefficients(int dim, const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                       const Eigen::Vector2d& c, double d, double beta);
CoefficientField identity_coefficients(int dim);

/// a = lambda(x) I with lambda alternating between 1 and contrast on a
/// tiles x tiles checkerboard over the unit square (periodically continued).
CoefficientField checkerboard_coefficients(double contrast, int tiles);

/// The one-dimensional field a = 1, b = c = sgn(x), d = 0 with constant beta.
CoefficientField sgn_drift_coefficients(double beta = 0.0);

/// a = I, b = (gain * x_1, 0), c = 0, d and beta constant. Lipschitz drift
/// with constant |gain|; sup bounds assume the unit square.
CoefficientField linear_drift_coefficients(double gain, double d, double beta);

/// Piecewise constant a = value * I on an nx x ny grid of rectangular cells
/// covering [x0,x1] x [y0,y1]. Points outside the box clamp to the border cells.
struct ValueTable {
    int nx = 1;
    int ny = 1;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    std::vector<double> values;  // row-major, ny rows of nx values

    double at(const Point& p) const;
};

/// Text format: `nx ny x0 x1 y0 y1` followed by nx*ny values (row-major,
/// first row at y0).
ValueTable load_value_table(const std::string& path);
ValueTable parse_value_table(std::istream& in);
CoefficientField custom_table_coefficients(ValueTable table);

/// Same field with a replaced by t * a.
CoefficientField scaled(const CoefficientField& field, double t);

/// Replaces beta by a constant.
CoefficientField with_beta(CoefficientField field, double beta);
/// Replaces d by a constant.
CoefficientField with_d(CoefficientField field, double d);

}  // namespace robinlab
