#include "robinlab/reflect.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace robinlab {
namespace {

Eigen::Matrix2d local_jacobian(double slope) {
    Eigen::Matrix2d j;
    j << 1.0, 0.0, 2.0 * slope, -1.0;
    return j;
}

double spectral_norm(const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
    eig.computeDirect(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues()(1)));
}

std::vector<double> uniform_with_knots(double lo, double hi, int cells, const std::vector<double>& knots) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(cells) + knots.size() + 1);
    for (int i = 0; i <= cells; ++i) g.push_back(lo + (hi - lo) * i / cells);
    for (double k : knots) {
        if (k > lo && k < hi) g.push_back(k);
    }
    std::sort(g.begin(), g.end());
    // Merge nodes closer than a small fraction of the spacing.
    const double tol = 1e-9 * (hi - lo);
    std::vector<double> out;
    for (double v : g) {
        if (out.empty() || v - out.back() > tol) out.push_back(v);
    }
    out.back() = hi;
    return out;
}

}  // namespace

Point ReflectionOperator::reflect(const Point& x) const {
    const auto [y, s] = chart_map_T_inverse(chart_, x);
    return chart_map_T(chart_, y, -s);
}

JacobianEval ReflectionOperator::jacobian(const Point& x) const {
    const auto ys = chart_map_T_inverse(chart_, x);
    const double y = ys.first;
    JacobianEval out;
    out.on_breakpoint = chart_.psi.is_knot(y);
    const Eigen::Matrix2d& o = chart_.rotation;
    out.matrix = o.transpose() * local_jacobian(chart_.psi.slope(y)) * o;
    return out;
}

bool ReflectionOperator::on_domain_side(const Point& x) const {
    return chart_map_T_inverse(chart_, x).second >= 0.0;
}

Point reflect_point(const ReflectionOperator& op, const Point& x) { return op.reflect(x); }

JacobianEval jacobian_S(const ReflectionOperator& op, const Point& x) { return op.jacobian(x); }

CoefficientField pushforward_coefficients(const ReflectionOperator& op, const CoefficientField& field) {
    if (field.dim != 2) throw std::invalid_argument("reflection requires a two-dimensional coefficient field");
    CoefficientField out;
    out.dim = 2;
    out.name = "pushforward(" + field.name + ")";
    const auto a = field.a;
    const auto b = field.b;
    const auto c = field.c;
    const auto d = field.d;
    out.a = [op, a](const Point& x) -> Eigen::Matrix2d {
        if (op.on_domain_side(x)) return a(x);
        const Eigen::Matrix2d j = op.jacobian(x).matrix;
        return j * a(op.reflect(x)) * j.transpose();
    };
    out.b = [op, b](const Point& x) -> Eigen::Vector2d {
        if (op.on_domain_side(x)) return b(x);
        return op.jacobian(x).matrix * b(op.reflect(x));
    };
    out.c = [op, c](const Point& x) -> Eigen::Vector2d {
        if (op.on_domain_side(x)) return c(x);
        return op.jacobian(x).matrix * c(op.reflect(x));
    };
    out.d = [op, d](const Point& x) { return op.on_domain_side(x) ? d(x) : d(op.reflect(x)); };
    out.beta = [](const Point&) { return 0.0; };
    const double jn = spectral_norm(local_jacobian(op.chart().lipschitz_constant));
    out.sup_bounds.a = field.sup_bounds.a * jn * jn;
    out.sup_bounds.b = field.sup_bounds.b * jn;
    out.sup_bounds.c = field.sup_bounds.c * jn;
    out.sup_bounds.d = field.sup_bounds.d;
    out.sup_bounds.beta = 0.0;
    return out;
}

ExtendedProblem build_extended_problem(const BoundaryChart& chart, const CoefficientField& field, int cells_y,
                                       int cells_s, double fill) {
    if (cells_y < 1 || cells_s < 1) throw MeshError("extended problem needs at least one cell per direction");
    if (!(fill > 0.0 && fill < 1.0)) throw MeshError("fill factor must lie in (0, 1)");
    const double r = fill * chart.radius;
    const std::vector<double> ys = uniform_with_knots(-r, r, cells_y, chart.psi.knots());
    std::vector<double> ss(static_cast<std::size_t>(cells_s) + 1);
    for (int j = 0; j <= cells_s; ++j) ss[static_cast<std::size_t>(j)] = r * j / cells_s;

    const std::size_t ny = ys.size();
    const std::size_t ns = ss.size();
    const auto u_index = [ny](std::size_t i, std::size_t j) { return static_cast<Index>(j * ny + i); };

    std::vector<Point> u_vertices;
    u_vertices.reserve(ny * ns);
    for (std::size_t j = 0; j < ns; ++j) {
        for (std::size_t i = 0; i < ny; ++i) u_vertices.push_back(chart_map_T(chart, ys[i], ss[j]));
    }
    std::vector<Cell> u_cells;
    for (std::size_t j = 0; j + 1 < ns; ++j) {
        for (std::size_t i = 0; i + 1 < ny; ++i) {
            const Index v00 = u_index(i, j), v10 = u_index(i + 1, j);
            const Index v01 = u_index(i, j + 1), v11 = u_index(i + 1, j + 1);
            u_cells.push_back({v00, v10, v11});
            u_cells.push_back({v00, v11, v01});
        }
    }

    // V vertices mirror the U vertices with s > 0; V cells mirror U cells.
    const std::size_t nu = u_vertices.size();
    std::vector<Point> g_vertices = u_vertices;
    std::vector<Index> source(nu);
    for (std::size_t k = 0; k < nu; ++k) source[k] = static_cast<Index>(k);
    std::vector<Index> mirror(nu);
    for (std::size_t i = 0; i < ny; ++i) mirror[static_cast<std::size_t>(u_index(i, 0))] = u_index(i, 0);
    for (std::size_t j = 1; j < ns; ++j) {
        for (std::size_t i = 0; i < ny; ++i) {
            mirror[static_cast<std::size_t>(u_index(i, j))] = static_cast<Index>(g_vertices.size());
            g_vertices.push_back(chart_map_T(chart, ys[i], -ss[j]));
            source.push_back(u_index(i, j));
        }
    }
    std::vector<Cell> g_cells = u_cells;
    std::vector<bool> in_v(u_cells.size(), false);
    for (const auto& c : u_cells) {
        g_cells.push_back({mirror[static_cast<std::size_t>(c[0])], mirror[static_cast<std::size_t>(c[1])],
                           mirror[static_cast<std::size_t>(c[2])]});
        in_v.push_back(true);
    }

    ExtendedProblem ext{ReflectionOperator(chart),
                        std::make_shared<const Mesh>(2, std::move(u_vertices), std::move(u_cells)),
                        std::make_shared<const Mesh>(2, std::move(g_vertices), std::move(g_cells)),
                        CoefficientField{},
                        {},
                        {},
                        std::move(source),
                        std::move(in_v)};
    ext.coeffs_hat = pushforward_coefficients(ext.reflection, field);
    for (std::size_t i = 0; i < ny; ++i) ext.interface_vertices.push_back(u_index(i, 0));
    for (std::size_t i = 0; i + 1 < ny; ++i) ext.interface_edges.push_back({u_index(i, 0), u_index(i + 1, 0)});
    return ext;
}

EllipticityCertificate certify_extended_ellipticity(const ExtendedProblem& ext, int samples_per_cell) {
    return certify_ellipticity(ext.coeffs_hat, *ext.mesh_G, samples_per_cell);
}

FemFunction extend_function(const ExtendedProblem& ext, const FemFunction& u) {
    if (u.mesh != ext.mesh_U &&
        (!u.mesh || u.mesh->num_vertices() != ext.mesh_U->num_vertices())) {
        throw MeshError("extend_function: function does not live on the U mesh");
    }
    Eigen::VectorXd values(static_cast<Eigen::Index>(ext.mesh_G->num_vertices()));
    for (std::size_t k = 0; k < ext.source_in_U.size(); ++k) {
        values[static_cast<Eigen::Index>(k)] = u.values[ext.source_in_U[k]];
    }
    return FemFunction(ext.mesh_G, std::move(values));
}

ExtendedRhs transform_rhs(const ExtendedProblem& ext, const RhsData& data) {
    ExtendedRhs out;
    const ReflectionOperator op = ext.reflection;
    if (data.f0) {
        const auto f0 = data.f0;
        out.interior.f0 = [op, f0](const Point& x) { return op.on_domain_side(x) ? f0(x) : f0(op.reflect(x)); };
    }
    if (data.f) {
        const auto f = data.f;
        out.interior.f = [op, f](const Point& x) -> Eigen::Vector2d {
            if (op.on_domain_side(x)) return f(x);
            return op.jacobian(x).matrix * f(op.reflect(x));
        };
    }
    out.g_interface = data.g;
    out.interface_weight = 2.0;
    return out;
}

Eigen::VectorXd assemble_extended_rhs(const ExtendedProblem& ext, const ExtendedRhs& rhs,
                                      const AssemblyOptions& options) {
    RhsData interior = rhs.interior;
    interior.g = nullptr;
    Eigen::VectorXd v = assemble_rhs(*ext.mesh_G, interior, options).vector;
    v += assemble_edge_functional(*ext.mesh_G, ext.interface_edges, rhs.g_interface, rhs.interface_weight);
    return v;
}

}  // namespace robinlab
