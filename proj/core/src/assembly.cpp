#include "robinlab/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace robinlab {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Exact P1 mass integral of phi_m phi_n on the cell.
double local_mass(const P1Cell& g, int m, int n) {
    if (g.nloc == 2) return g.measure / 6.0 * (m == n ? 2.0 : 1.0);
    return g.measure / 12.0 * (m == n ? 2.0 : 1.0);
}

Point facet_midpoint(const Mesh& mesh, const BoundaryFacet& f) {
    if (mesh.dim() == 1) return mesh.vertex(f.vertices[0]);
    return 0.5 * (mesh.vertex(f.vertices[0]) + mesh.vertex(f.vertices[1]));
}

/// Adds weight * g_f * int_f phi_m phi_n for a facet.
void add_facet_mass(Triplets& t, const Mesh& mesh, const std::array<Index, 2>& v, double measure, double weight) {
    if (mesh.dim() == 1) {
        t.emplace_back(v[0], v[0], weight * measure);
        return;
    }
    const double s = weight * measure / 6.0;
    t.emplace_back(v[0], v[0], 2.0 * s);
    t.emplace_back(v[1], v[1], 2.0 * s);
    t.emplace_back(v[0], v[1], s);
    t.emplace_back(v[1], v[0], s);
}

SparseMatrix from_triplets(std::size_t n, const Triplets& t) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

}  // namespace

P1Cell p1_cell(const Mesh& mesh, Index ci) {
    const auto& c = mesh.cell(ci);
    P1Cell g;
    g.nloc = mesh.vertices_per_cell();
    g.grads.setZero();
    for (int k = 0; k < g.nloc; ++k) g.points[static_cast<std::size_t>(k)] = mesh.vertex(c[k]);
    if (mesh.dim() == 1) {
        const double h = g.points[1].x() - g.points[0].x();
        g.measure = h;
        g.grads(0, 0) = -1.0 / h;
        g.grads(0, 1) = 1.0 / h;
    } else {
        const Point& p0 = g.points[0];
        const Point& p1 = g.points[1];
        const Point& p2 = g.points[2];
        const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
        g.measure = 0.5 * det;
        g.grads.col(0) = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
        g.grads.col(1) = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / det;
        g.grads.col(2) = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / det;
    }
    return g;
}

Point P1Cell::at(const Eigen::Vector3d& bary) const {
    Point p = Point::Zero();
    for (int k = 0; k < nloc; ++k) p += bary[k] * points[static_cast<std::size_t>(k)];
    return p;
}

SparseMatrix mass_matrix(const Mesh& mesh) {
    Triplets t;
    t.reserve(mesh.num_cells() * 9);
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        for (int m = 0; m < g.nloc; ++m) {
            for (int n = 0; n < g.nloc; ++n) t.emplace_back(c[m], c[n], local_mass(g, m, n));
        }
    }
    return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix boundary_mass_matrix(const Mesh& mesh) {
    Triplets t;
    for (const auto& f : mesh.boundary_facets()) add_facet_mass(t, mesh, f.vertices, f.measure, 1.0);
    return from_triplets(mesh.num_vertices(), t);
}

AssembledForm assemble_robin_form(std::shared_ptr<const Mesh> mesh_ptr, const CoefficientField& field,
                                  const AssemblyOptions& options) {
    const Mesh& mesh = *mesh_ptr;
    if (field.dim != mesh.dim()) throw std::invalid_argument("coefficient dimension does not match the mesh");
    const int dim = mesh.dim();
    const auto rule = cell_rule(dim, options.rule);
    const bool piecewise_constant = options.rule == CellRule::Barycenter;

    Triplets stiff, bt, ct, mt, bm;
    const std::size_t ncell = mesh.num_cells();
    stiff.reserve(ncell * 9 * 2);
    bt.reserve(ncell * 9);
    ct.reserve(ncell * 9);
    mt.reserve(ncell * 9);

    for (Index ci = 0; ci < static_cast<Index>(ncell); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        const int nloc = g.nloc;
        Eigen::Matrix3d ka = Eigen::Matrix3d::Zero();
        Eigen::Matrix3d kb = Eigen::Matrix3d::Zero();
        Eigen::Matrix3d kc = Eigen::Matrix3d::Zero();
        Eigen::Matrix3d kd = Eigen::Matrix3d::Zero();
        for (const auto& q : rule) {
            const Point x = g.at(q.bary);
            Eigen::Matrix2d a = field.a(x);
            Eigen::Vector2d b = field.b(x);
            Eigen::Vector2d cc = field.c(x);
            if (dim == 1) {
                a = Eigen::Matrix2d(Eigen::Vector2d(a(0, 0), 0.0).asDiagonal());
                b[1] = 0.0;
                cc[1] = 0.0;
            }
            const double d = field.d(x);
            const double w = q.weight * g.measure;
            for (int m = 0; m < nloc; ++m) {      // test
                for (int n = 0; n < nloc; ++n) {  // trial
                    const Eigen::Vector2d gm = g.grads.col(m);
                    const Eigen::Vector2d gn = g.grads.col(n);
                    ka(m, n) += w * gm.dot(a * gn);
                    if (piecewise_constant) {
                        kb(m, n) += w * b.dot(gm) / nloc;
                        kc(m, n) += w * cc.dot(gn) / nloc;
                        kd(m, n) += d * local_mass(g, m, n) * q.weight;
                    } else {
                        kb(m, n) += w * q.bary[n] * b.dot(gm);
                        kc(m, n) += w * q.bary[m] * cc.dot(gn);
                        kd(m, n) += w * d * q.bary[m] * q.bary[n];
                    }
                }
            }
        }
        for (int m = 0; m < nloc; ++m) {
            for (int n = 0; n < nloc; ++n) {
                stiff.emplace_back(c[m], c[n], ka(m, n) + kd(m, n));
                bt.emplace_back(c[m], c[n], kb(m, n));
                ct.emplace_back(c[m], c[n], kc(m, n));
                mt.emplace_back(c[m], c[n], local_mass(g, m, n));
            }
        }
    }

    for (const auto& f : mesh.boundary_facets()) {
        const double beta = field.beta(facet_midpoint(mesh, f));
        add_facet_mass(stiff, mesh, f.vertices, f.measure, beta);
        add_facet_mass(bm, mesh, f.vertices, f.measure, 1.0);
    }

    const std::size_t n = mesh.num_vertices();
    AssembledForm form;
    form.b_term = from_triplets(n, bt);
    form.c_term = from_triplets(n, ct);
    form.A = from_triplets(n, stiff) + form.b_term + form.c_term;
    form.A.makeCompressed();
    form.mass = from_triplets(n, mt);
    form.boundary_mass = from_triplets(n, bm);
    form.dof_map.resize(n);
    for (std::size_t i = 0; i < n; ++i) form.dof_map[i] = static_cast<Index>(i);
    form.mesh = std::move(mesh_ptr);
    return form;
}

RhsFunctional assemble_rhs(const Mesh& mesh, const RhsData& data, const AssemblyOptions& options) {
    const int dim = mesh.dim();
    const auto rule = cell_rule(dim, options.rule);
    RhsFunctional out;
    out.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        for (const auto& q : rule) {
            const Point x = g.at(q.bary);
            const double w = q.weight * g.measure;
            const double f0 = data.f0 ? data.f0(x) : 0.0;
            Eigen::Vector2d f = data.f ? data.f(x) : Eigen::Vector2d::Zero();
            if (dim == 1) f[1] = 0.0;
            out.f0_samples.push_back(f0);
            out.f_samples.push_back(f);
            for (int m = 0; m < g.nloc; ++m) {
                out.vector[c[m]] += w * (f0 * q.bary[m] + f.dot(g.grads.col(m)));
            }
        }
    }
    for (const auto& f : mesh.boundary_facets()) {
        const double gv = data.g ? data.g(facet_midpoint(mesh, f)) : 0.0;
        out.g_samples.push_back(gv);
        if (dim == 1) {
            out.vector[f.vertices[0]] += gv * f.measure;
        } else {
            out.vector[f.vertices[0]] += 0.5 * gv * f.measure;
            out.vector[f.vertices[1]] += 0.5 * gv * f.measure;
        }
    }
    return out;
}

Eigen::VectorXd assemble_edge_functional(const Mesh& mesh, const std::vector<std::array<Index, 2>>& edges,
                                         const ScalarField& g, double weight) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    if (!g) return out;
    for (const auto& e : edges) {
        if (mesh.dim() == 1) {
            out[e[0]] += weight * g(mesh.vertex(e[0]));
            continue;
        }
        const Point a = mesh.vertex(e[0]);
        const Point b = mesh.vertex(e[1]);
        const double len = (b - a).norm();
        const double gv = g(0.5 * (a + b));
        out[e[0]] += weight * 0.5 * gv * len;
        out[e[1]] += weight * 0.5 * gv * len;
    }
    return out;
}

SparseMatrix h1_matrix(const Mesh& mesh) {
    Triplets t;
    t.reserve(mesh.num_cells() * 9);
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        for (int m = 0; m < g.nloc; ++m) {
            for (int n = 0; n < g.nloc; ++n) {
                t.emplace_back(c[m], c[n], g.measure * g.grads.col(m).dot(g.grads.col(n)) + local_mass(g, m, n));
            }
        }
    }
    return from_triplets(mesh.num_vertices(), t);
}

SparseMatrix lumped(const SparseMatrix& m) {
    const Eigen::VectorXd rows = m * Eigen::VectorXd::Ones(m.cols());
    SparseMatrix out(m.rows(), m.cols());
    out.reserve(Eigen::VectorXi::Constant(m.cols(), 1));
    for (Eigen::Index i = 0; i < rows.size(); ++i) out.insert(i, i) = rows[i];
    out.makeCompressed();
    return out;
}

SparseMatrix symmetric_part(const SparseMatrix& x) {
    SparseMatrix xt = x.transpose();
    SparseMatrix s = 0.5 * (x + xt);
    s.makeCompressed();
    return s;
}

bool is_positive_semidefinite(const SparseMatrix& x) {
    double scale = 0.0;
    for (Eigen::Index k = 0; k < x.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(x, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    SparseMatrix shifted = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) shifted.coeffRef(i, i) += 1e-12 * std::max(scale, 1e-300);
    Eigen::SimplicialLLT<SparseMatrix> llt(shifted);
    return llt.info() == Eigen::Success;
}

CoercivityShift find_coercivity_shift(const AssembledForm& form, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("coercivity constant eta must be positive");
    const SparseMatrix base = symmetric_part(form.A) - eta * h1_matrix(*form.mesh);
    CoercivityShift result;
    const auto ok = [&](double omega) {
        ++result.factorizations;
        return is_positive_semidefinite(SparseMatrix(base + omega * form.mass));
    };
    if (ok(0.0)) return result;
    double lo = 0.0;
    double hi = 1.0;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) throw std::runtime_error("coercivity shift search exceeded its cap");
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.omega = hi;
    return result;
}

WentzellSystem assemble_wentzell_system(std::shared_ptr<const Mesh> mesh, const CoefficientField& field,
                                        const AssemblyOptions& options) {
    WentzellSystem sys;
    sys.form = assemble_robin_form(std::move(mesh), field, options);
    sys.mass = sys.form.mass + sys.form.boundary_mass;
    sys.mass.makeCompressed();
    return sys;
}

ProductState ProductState::from_nodal(const Mesh& mesh, const Eigen::VectorXd& nodal) {
    ProductState s;
    s.interior = nodal;
    s.boundary = trace(mesh, nodal);
    s.consistent = true;
    return s;
}

double discrete_trace_constant(const Mesh& mesh) {
    const auto form = assemble_robin_form(std::make_shared<const Mesh>(mesh), identity_coefficients(mesh.dim()));
    const Eigen::MatrixXd mb = Eigen::MatrixXd(form.boundary_mass);
    const Eigen::MatrixXd h = Eigen::MatrixXd(h1_matrix(mesh));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(mb, h, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

void write_matrix_coordinates(std::ostream& out, const SparseMatrix& m) {
    char buf[96];
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                          static_cast<long long>(it.col()), it.value());
            out << buf;
        }
    }
}

}  // namespace robinlab
