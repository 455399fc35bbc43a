#include "robinlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace robinlab {

NonElliptic::NonElliptic(const Eigen::Vector2d& where, double lambda_min)
    : std::runtime_error("coefficient not strictly elliptic at (" + std::to_string(where.x()) + ", " +
                         std::to_string(where.y()) + "): lambda_min = " + std::to_string(lambda_min)),
      where_(where),
      lambda_min_(lambda_min) {}

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

std::uint64_t edge_key(Index a, Index b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
    if (dim_ != 1 && dim_ != 2) throw MeshError("mesh dimension must be 1 or 2");
    if (cells_.empty()) throw MeshError("mesh has no cells");
    const auto nv = static_cast<Index>(vertices_.size());
    for (auto& c : cells_) {
        for (int k = 0; k < vertices_per_cell(); ++k) {
            if (c[k] < 0 || c[k] >= nv) throw MeshError("cell references a missing vertex");
        }
        if (dim_ == 1) c[2] = -1;
    }
    if (dim_ == 1) {
        for (auto& v : vertices_) v.y() = 0.0;
    }
    orient_cells();
    build_facets();
    validate();
}

void Mesh::orient_cells() {
    for (auto& c : cells_) {
        if (dim_ == 1) {
            if (vertex(c[1]).x() < vertex(c[0]).x()) std::swap(c[0], c[1]);
        } else {
            const double area2 = cross(vertex(c[1]) - vertex(c[0]), vertex(c[2]) - vertex(c[0]));
            if (area2 < 0.0) std::swap(c[1], c[2]);
        }
    }
}

void Mesh::build_facets() {
    facets_.clear();
    on_boundary_.assign(vertices_.size(), false);
    if (dim_ == 1) {
        std::vector<int> count(vertices_.size(), 0);
        for (const auto& c : cells_) {
            ++count[static_cast<std::size_t>(c[0])];
            ++count[static_cast<std::size_t>(c[1])];
        }
        for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
            const auto& c = cells_[ci];
            for (int k = 0; k < 2; ++k) {
                const auto v = static_cast<std::size_t>(c[k]);
                if (count[v] > 2) throw MeshError("interval vertex shared by more than two cells");
                if (count[v] != 1) continue;
                BoundaryFacet f;
                f.vertices = {c[k], -1};
                f.normal = Point(k == 0 ? -1.0 : 1.0, 0.0);
                f.measure = 1.0;
                f.cell = static_cast<Index>(ci);
                facets_.push_back(f);
            }
        }
    } else {
        std::unordered_map<std::uint64_t, int> count;
        count.reserve(cells_.size() * 3);
        for (const auto& c : cells_) {
            for (int k = 0; k < 3; ++k) ++count[edge_key(c[k], c[(k + 1) % 3])];
        }
        for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
            const auto& c = cells_[ci];
            for (int k = 0; k < 3; ++k) {
                const Index a = c[k];
                const Index b = c[(k + 1) % 3];
                const int n = count[edge_key(a, b)];
                if (n > 2) throw MeshError("edge shared by more than two cells");
                if (n != 1) continue;
                const Point e = vertex(b) - vertex(a);
                BoundaryFacet f;
                f.vertices = {a, b};
                f.measure = e.norm();
                f.normal = Point(e.y(), -e.x()) / f.measure;
                f.cell = static_cast<Index>(ci);
                facets_.push_back(f);
            }
        }
    }
    for (const auto& f : facets_) {
        for (int k = 0; k < dim_; ++k) on_boundary_[static_cast<std::size_t>(f.vertices[k])] = true;
    }
    boundary_vertices_.clear();
    for (std::size_t i = 0; i < on_boundary_.size(); ++i) {
        if (on_boundary_[i]) boundary_vertices_.push_back(static_cast<Index>(i));
    }
}

double Mesh::cell_measure(Index ci) const {
    const auto& c = cell(ci);
    if (dim_ == 1) return vertex(c[1]).x() - vertex(c[0]).x();
    return 0.5 * cross(vertex(c[1]) - vertex(c[0]), vertex(c[2]) - vertex(c[0]));
}

Point Mesh::barycenter(Index ci) const {
    const auto& c = cell(ci);
    Point sum = Point::Zero();
    for (int k = 0; k < vertices_per_cell(); ++k) sum += vertex(c[k]);
    return sum / vertices_per_cell();
}

double Mesh::cell_diameter(Index ci) const {
    const auto& c = cell(ci);
    double d = 0.0;
    for (int i = 0; i < vertices_per_cell(); ++i) {
        for (int j = i + 1; j < vertices_per_cell(); ++j) d = std::max(d, (vertex(c[i]) - vertex(c[j])).norm());
    }
    return d;
}

double Mesh::total_measure() const {
    double s = 0.0;
    for (Index c = 0; c < static_cast<Index>(cells_.size()); ++c) s += cell_measure(c);
    return s;
}

double Mesh::boundary_measure() const {
    double s = 0.0;
    for (const auto& f : facets_) s += f.measure;
    return s;
}

double Mesh::max_cell_diameter() const {
    double d = 0.0;
    for (Index c = 0; c < static_cast<Index>(cells_.size()); ++c) d = std::max(d, cell_diameter(c));
    return d;
}

void Mesh::validate() const {
    std::vector<bool> used(vertices_.size(), false);
    for (Index c = 0; c < static_cast<Index>(cells_.size()); ++c) {
        if (!(cell_measure(c) > 0.0)) throw MeshError("cell " + std::to_string(c) + " has non-positive measure");
        for (int k = 0; k < vertices_per_cell(); ++k) used[static_cast<std::size_t>(cell(c)[k])] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) throw MeshError("orphan vertex not used by any cell");
    for (const auto& f : facets_) {
        if (std::abs(f.normal.norm() - 1.0) > 1e-12) throw MeshError("boundary normal is not a unit vector");
        if (f.cell < 0) throw MeshError("boundary facet without owning cell");
    }
    // Connectivity through shared facets (vertices in 1D, edges in 2D).
    DisjointSets sets(cells_.size());
    std::unordered_map<std::uint64_t, std::size_t> first_owner;
    for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
        const auto& c = cells_[ci];
        const int nfacets = dim_ == 1 ? 2 : 3;
        for (int k = 0; k < nfacets; ++k) {
            const std::uint64_t key =
                dim_ == 1 ? static_cast<std::uint64_t>(c[k]) : edge_key(c[k], c[(k + 1) % 3]);
            auto [it, inserted] = first_owner.emplace(key, ci);
            if (!inserted) sets.unite(ci, it->second);
        }
    }
    const std::size_t root = sets.find(0);
    for (std::size_t ci = 1; ci < cells_.size(); ++ci) {
        if (sets.find(ci) != root) throw MeshError("mesh is not connected");
    }
}

Mesh build_interval_mesh(double a, double b, int n_cells) {
    if (!(a < b)) throw MeshError("degenerate interval: need a < b");
    if (n_cells < 1) throw MeshError("interval mesh needs at least one cell");
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        const double t = static_cast<double>(i) / n_cells;
        vertices.emplace_back(i == n_cells ? b : a + (b - a) * t, 0.0);
    }
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(n_cells));
    for (Index i = 0; i < n_cells; ++i) cells.push_back({i, i + 1, -1});
    return Mesh(1, std::move(vertices), std::move(cells));
}

Mesh build_structured_mesh(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2 || ys.size() < 2) throw MeshError("structured mesh needs at least two grid lines per axis");
    const auto strictly_increasing = [](std::span<const double> g) {
        return std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end();
    };
    if (!strictly_increasing(xs) || !strictly_increasing(ys)) {
        throw MeshError("structured grid lines must be strictly increasing");
    }
    const auto nx = static_cast<Index>(xs.size());
    const auto ny = static_cast<Index>(ys.size());
    std::vector<Point> vertices;
    vertices.reserve(xs.size() * ys.size());
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) vertices.emplace_back(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
    }
    std::vector<Cell> cells;
    cells.reserve(2 * static_cast<std::size_t>(nx - 1) * static_cast<std::size_t>(ny - 1));
    for (Index j = 0; j + 1 < ny; ++j) {
        for (Index i = 0; i + 1 < nx; ++i) {
            const Index v00 = j * nx + i;
            const Index v10 = v00 + 1;
            const Index v01 = v00 + nx;
            const Index v11 = v01 + 1;
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    return Mesh(2, std::move(vertices), std::move(cells));
}

Mesh build_unit_square_mesh(int cells_per_side) {
    if (cells_per_side < 1) throw MeshError("need at least one cell per side");
    std::vector<double> grid(static_cast<std::size_t>(cells_per_side) + 1);
    for (int i = 0; i <= cells_per_side; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / cells_per_side;
    return build_structured_mesh(grid, grid);
}

double signed_area(const Polygon& polygon) {
    double s = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) s += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    return 0.5 * s;
}

double perimeter(const Polygon& polygon) {
    double s = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) s += (polygon[(i + 1) % polygon.size()] - polygon[i]).norm();
    return s;
}

bool polygon_contains(const Polygon& polygon, const Point& p) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = polygon[i];
        const Point& b = polygon[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

int orientation_sign(const Point& a, const Point& b, const Point& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orientation_sign(p1, p2, q1);
    const int o2 = orientation_sign(p1, p2, q2);
    const int o3 = orientation_sign(q1, q2, p1);
    const int o4 = orientation_sign(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool polygon_is_simple(const Polygon& polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if ((polygon[(i + 1) % n] - polygon[i]).norm() == 0.0) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            const Point& a1 = polygon[i];
            const Point& a2 = polygon[(i + 1) % n];
            const Point& b1 = polygon[j];
            const Point& b2 = polygon[(j + 1) % n];
            if (adjacent) {
                // Adjacent edges may only share their common endpoint.
                const Point& shared = j == i + 1 ? a2 : a1;
                const Point& other_a = j == i + 1 ? a1 : a2;
                const Point& other_b = j == i + 1 ? b2 : b1;
                if (orientation_sign(shared, other_a, other_b) == 0 &&
                    (other_a - shared).dot(other_b - shared) > 0.0) {
                    return false;
                }
                continue;
            }
            if (segments_intersect(a1, a2, b1, b2)) return false;
        }
    }
    return std::abs(signed_area(polygon)) > 0.0;
}

Polygon unit_square() { return {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}; }

Polygon l_shape() {
    return {Point(0, 0), Point(1, 0), Point(1, 0.5), Point(0.5, 0.5), Point(0.5, 1), Point(0, 1)};
}

Eigen::VectorXd trace(const Mesh& mesh, const Eigen::VectorXd& nodal_values) {
    if (static_cast<std::size_t>(nodal_values.size()) != mesh.num_vertices()) {
        throw std::invalid_argument("trace: nodal vector length does not match the mesh");
    }
    const auto bv = mesh.boundary_vertices();
    Eigen::VectorXd out(static_cast<Eigen::Index>(bv.size()));
    for (std::size_t i = 0; i < bv.size(); ++i) out[static_cast<Eigen::Index>(i)] = nodal_values[bv[i]];
    return out;
}

// ---------------------------------------------------------------------------

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() < 2 || knots_.size() != values_.size()) {
        throw MeshError("piecewise linear table needs >= 2 knots and matching values");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] > knots_[i - 1])) throw MeshError("piecewise linear knots must be strictly increasing");
    }
}

PiecewiseLinear PiecewiseLinear::constant(double value, double lo, double hi) {
    return PiecewiseLinear({lo, hi}, {value, value});
}

PiecewiseLinear PiecewiseLinear::linear(double slope, double lo, double hi) {
    return PiecewiseLinear({lo, hi}, {slope * lo, slope * hi});
}

std::size_t PiecewiseLinear::segment(double y) const {
    // Segment k covers (knots[k], knots[k+1]]; y == knots[0] maps to segment 0.
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), y);
    std::size_t k = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(k, knots_.size() - 2);
}

double PiecewiseLinear::operator()(double y) const {
    const std::size_t k = segment(y);
    const double t = (y - knots_[k]) / (knots_[k + 1] - knots_[k]);
    return values_[k] + t * (values_[k + 1] - values_[k]);
}

double PiecewiseLinear::slope(double y) const {
    const std::size_t k = segment(y);
    return (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);
}

bool PiecewiseLinear::is_knot(double y, double tol) const {
    return std::any_of(knots_.begin(), knots_.end(), [&](double k) { return std::abs(k - y) <= tol; });
}

double PiecewiseLinear::lipschitz_constant() const {
    double l = 0.0;
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
        l = std::max(l, std::abs((values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k])));
    }
    return l;
}

BoundaryChart BoundaryChart::make(Point anchor, Eigen::Matrix2d rotation, double radius, PiecewiseLinear psi) {
    if (!(radius > 0.0)) throw MeshError("chart radius must be positive");
    if (((rotation * rotation.transpose()) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
        throw MeshError("chart rotation is not orthogonal");
    }
    if (psi.knots().empty() || psi.knots().front() > -radius || psi.knots().back() < radius) {
        throw MeshError("psi table must cover [-r, r]");
    }
    BoundaryChart chart;
    chart.anchor = anchor;
    chart.rotation = rotation;
    chart.radius = radius;
    chart.lipschitz_constant = psi.lipschitz_constant();
    chart.psi = std::move(psi);
    return chart;
}

BoundaryChart BoundaryChart::flat(double radius) {
    return make(Point::Zero(), Eigen::Matrix2d::Identity(), radius, PiecewiseLinear::constant(0.0, -radius, radius));
}

BoundaryChart BoundaryChart::sloped(double slope, double radius) {
    return make(Point::Zero(), Eigen::Matrix2d::Identity(), radius, PiecewiseLinear::linear(slope, -radius, radius));
}

bool BoundaryChart::contains(const Point& x) const {
    const Point l = to_local(x);
    return std::abs(l.x()) < radius && std::abs(l.y() - psi(l.x())) < radius;
}

Point chart_map_T(const BoundaryChart& chart, double y, double s) {
    if (!(std::abs(y) < chart.radius) || !(std::abs(s) < chart.radius)) {
        throw ChartDomainError("chart_map_T: (y, s) outside the chart cylinder");
    }
    return chart.to_domain(Point(y, chart.psi(y) + s));
}

std::pair<double, double> chart_map_T_inverse(const BoundaryChart& chart, const Point& x) {
    const Point l = chart.to_local(x);
    const double s = l.y() - chart.psi(l.x());
    if (!(std::abs(l.x()) < chart.radius) || !(std::abs(s) < chart.radius)) {
        throw ChartDomainError("chart_map_T_inverse: point outside the chart cylinder");
    }
    return {l.x(), s};
}

int count_chart_mismatches(const BoundaryChart& chart, const Polygon& polygon, int samples, std::uint64_t seed,
                           double margin) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    int mismatches = 0;
    for (int k = 0; k < samples; ++k) {
        const double y = chart.radius * unit(rng) * (1.0 - 1e-12);
        const double s = chart.radius * unit(rng) * (1.0 - 1e-12);
        if (std::abs(s) <= margin) continue;
        const bool inside = polygon_contains(polygon, chart_map_T(chart, y, s));
        if (inside != (s > 0.0)) ++mismatches;
    }
    return mismatches;
}

}  // namespace robinlab
