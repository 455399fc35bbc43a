#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robinlab/errors.hpp"

namespace robinlab {

/// Coordinates are stored in 2D; interval meshes keep the second component at 0.
using Point = Eigen::Vector2d;
using Index = std::int32_t;

/// Vertex indices of a simplex. Interval cells use the first two slots and
/// set the third to -1.
using Cell = std::array<Index, 3>;

/// Simple closed polygon given as a vertex loop (first vertex not repeated).
using Polygon = std::vector<Point>;

struct BoundaryFacet {
    std::array<Index, 2> vertices{-1, -1};  // 1D: a single vertex, slot 1 is -1
    Point normal = Point::Zero();           // outward unit normal
    double measure = 0.0;                   // edge length (2D) or 1 (counting measure in 1D)
    Index cell = -1;                        // the unique cell owning the facet
};

/// Simplicial mesh of an interval or a polygon. Immutable after construction.
///
/// Cells are reoriented to positive signed measure on construction; boundary
/// facets, their outward normals and the vertex boundary flags are derived
/// from the cell list.
class Mesh {
public:
    Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells);

    int dim() const noexcept { return dim_; }
    int vertices_per_cell() const noexcept { return dim_ + 1; }
    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_cells() const noexcept { return cells_.size(); }

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const Point& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const std::vector<Cell>& cells() const noexcept { return cells_; }
    const Cell& cell(Index c) const { return cells_[static_cast<std::size_t>(c)]; }
    const std::vector<BoundaryFacet>& boundary_facets() const noexcept { return facets_; }
    const std::vector<bool>& vertex_boundary_flag() const noexcept { return on_boundary_; }

    /// Sorted indices of the vertices lying on a boundary facet.
    std::span<const Index> boundary_vertices() const noexcept { return boundary_vertices_; }

    double cell_measure(Index c) const;
    Point barycenter(Index c) const;
    double cell_diameter(Index c) const;

    double total_measure() const;
    double boundary_measure() const;
    double max_cell_diameter() const;

    /// Checks every structural invariant; throws MeshError on the first violation.
    void validate() const;

private:
    void orient_cells();
    void build_facets();

    int dim_;
    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<BoundaryFacet> facets_;
    std::vector<bool> on_boundary_;
    std::vector<Index> boundary_vertices_;
};

/// Uniform mesh of [a, b] with n_cells cells.
Mesh build_interval_mesh(double a, double b, int n_cells);

/// Conforming triangulation of a simple polygon with maximum cell diameter
/// at most 2 * target_h. The polygon edges are reproduced exactly.
Mesh build_polygon_mesh(const Polygon& polygon, double target_h);

/// Structured right-triangle mesh over the tensor grid xs x ys (both strictly
/// increasing). Every grid square is split along the diagonal that runs from
/// its lower-left to its upper-right corner.
Mesh build_structured_mesh(std::span<const double> xs, std::span<const double> ys);

Mesh build_unit_square_mesh(int cells_per_side);

// Polygon helpers.
double signed_area(const Polygon& polygon);
double perimeter(const Polygon& polygon);
bool polygon_contains(const Polygon& polygon, const Point& p);
bool polygon_is_simple(const Polygon& polygon);
Polygon unit_square();
/// L-shaped hexagon [0,1]^2 minus [0.5,1]^2 (re-entrant corner at (0.5,0.5)).
Polygon l_shape();

// Text format: `dim`, then `v x [y]`, `c i j [k]`, `bf i [j] nx [ny]`.
// Doubles are written with 17 significant digits.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

/// Nodal values of a P1 function restricted to the boundary vertices, in the
/// order of Mesh::boundary_vertices().
Eigen::VectorXd trace(const Mesh& mesh, const Eigen::VectorXd& nodal_values);

// ---------------------------------------------------------------------------
// Boundary charts
// ---------------------------------------------------------------------------

/// Continuous piecewise linear function given by a knot table.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

    static PiecewiseLinear constant(double value, double lo, double hi);
    static PiecewiseLinear linear(double slope, double lo, double hi);

    double operator()(double y) const;
    /// Derivative; at a knot the left-limit slope is returned.
    double slope(double y) const;
    bool is_knot(double y, double tol = 0.0) const;
    double lipschitz_constant() const;

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t segment(double y) const;

    std::vector<double> knots_;
    std::vector<double> values_;
};

/// Local description of the boundary near an anchor point z: after the rigid
/// motion x -> O (x - z) the domain is the epigraph {t > psi(y)} inside the
/// cylinder G = {(y, psi(y) + s) : |y| < r, |s| < r}.
struct BoundaryChart {
    Point anchor = Point::Zero();
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
    double radius = 1.0;
    PiecewiseLinear psi;
    double lipschitz_constant = 0.0;

    /// Validates the table and the rotation; throws MeshError.
    static BoundaryChart make(Point anchor, Eigen::Matrix2d rotation, double radius,
                              PiecewiseLinear psi);
    static BoundaryChart flat(double radius);
    static BoundaryChart sloped(double slope, double radius);

    Point to_local(const Point& x) const { return rotation * (x - anchor); }
    Point to_domain(const Point& local) const { return anchor + rotation.transpose() * local; }

    bool contains(const Point& x) const;
};

/// T(y, s) = (y, psi(y) + s), composed with the chart's rigid motion.
Point chart_map_T(const BoundaryChart& chart, double y, double s);

/// Inverse of chart_map_T: returns (y, s).
std::pair<double, double> chart_map_T_inverse(const BoundaryChart& chart, const Point& x);

/// Samples the cylinder and compares membership in the polygon with the
/// sign of s. Points within `margin` of the graph are skipped. Returns the
/// number of disagreements.
int count_chart_mismatches(const BoundaryChart& chart, const Polygon& polygon, int samples,
                           std::uint64_t seed, double margin = 1e-9);

}  // namespace robinlab
