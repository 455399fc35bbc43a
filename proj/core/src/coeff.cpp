#include "robinlab/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Eigenvalues>

namespace robinlab {

std::optional<double> CoefficientField::drift_bound() const {
    if (!b_lipschitz) return std::nullopt;
    return std::max(sup_bounds.b, dim * *b_lipschitz);
}

double symmetric_lambda_min(const Eigen::Matrix2d& a, int dim) {
    if (dim == 1) return a(0, 0);
    const Eigen::Matrix2d sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
    eig.computeDirect(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

std::vector<Point> cell_sample_points(const Mesh& mesh, Index cell, int samples_per_cell) {
    if (samples_per_cell < 1) throw std::invalid_argument("samples_per_cell must be >= 1");
    const auto& c = mesh.cell(cell);
    const auto at = [&](const Eigen::Vector3d& bary) {
        Point p = Point::Zero();
        for (int k = 0; k < mesh.vertices_per_cell(); ++k) p += bary[k] * mesh.vertex(c[k]);
        return p;
    };
    std::vector<Point> out;
    if (samples_per_cell == 1) {
        out.push_back(mesh.barycenter(cell));
        return out;
    }
    if (samples_per_cell == 3 && mesh.dim() == 2) {
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        out = {at({a, b, b}), at({b, a, b}), at({b, b, a})};
        return out;
    }
    for (int k = 0; k < samples_per_cell; ++k) {
        if (mesh.dim() == 1) {
            const double t = std::fmod(0.5 + k * 0.6180339887498949, 1.0);
            out.push_back(at({1.0 - t, t, 0.0}));
        } else {
            double r1 = std::fmod(0.5 + k * 0.7548776662466927, 1.0);
            double r2 = std::fmod(0.5 + k * 0.5698402909980532, 1.0);
            if (r1 + r2 > 1.0) {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            out.push_back(at({1.0 - r1 - r2, r1, r2}));
        }
    }
    return out;
}

EllipticityCertificate certify_ellipticity(const CoefficientField& field, const Mesh& mesh, int samples_per_cell) {
    EllipticityCertificate cert;
    cert.min_observed = std::numeric_limits<double>::infinity();
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        for (const auto& x : cell_sample_points(mesh, ci, samples_per_cell)) {
            const double lam = symmetric_lambda_min(field.a(x), field.dim);
            ++cert.sample_count;
            if (!(lam > 0.0)) throw NonElliptic(x, lam);
            cert.min_observed = std::min(cert.min_observed, lam);
        }
    }
    cert.alpha = cert.min_observed;
    return cert;
}

double sup_bound_violation(const CoefficientField& field, const Mesh& mesh, int samples_per_cell) {
    const int dim = field.dim;
    const auto vec_norm = [dim](const Eigen::Vector2d& v) { return dim == 1 ? std::abs(v[0]) : v.norm(); };
    double worst = -std::numeric_limits<double>::infinity();
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        for (const auto& x : cell_sample_points(mesh, ci, samples_per_cell)) {
            const Eigen::Matrix2d a = field.a(x);
            const double a_norm = dim == 1 ? std::abs(a(0, 0)) : a.jacobiSvd().singularValues()(0);
            worst = std::max({worst, a_norm - field.sup_bounds.a, vec_norm(field.b(x)) - field.sup_bounds.b,
                              vec_norm(field.c(x)) - field.sup_bounds.c,
                              std::abs(field.d(x)) - field.sup_bounds.d});
        }
    }
    for (const auto& f : mesh.boundary_facets()) {
        Point mid = mesh.vertex(f.vertices[0]);
        if (mesh.dim() == 2) mid = 0.5 * (mid + mesh.vertex(f.vertices[1]));
        worst = std::max(worst, std::abs(field.beta(mid)) - field.sup_bounds.beta);
    }
    return worst;
}

CoefficientField constant_coefficients(int dim, const Eigen::Matrix2d& a, const Eigen::Vector2d& b,
                                       const Eigen::Vector2d& c, double d, double beta) {
    CoefficientField f;
    f.dim = dim;
    f.a = [a](const Point&) { return a; };
    f.b = [b](const Point&) { return b; };
    f.c = [c](const Point&) { return c; };
    f.d = [d](const Point&) { return d; };
    f.beta = [beta](const Point&) { return beta; };
    f.sup_bounds = {dim == 1 ? std::abs(a(0, 0)) : a.jacobiSvd().singularValues()(0),
                    dim == 1 ? std::abs(b[0]) : b.norm(), dim == 1 ? std::abs(c[0]) : c.norm(), std::abs(d),
                    std::abs(beta)};
    f.b_lipschitz = 0.0;
    f.name = "constant";
    return f;
}

CoefficientField identity_coefficients(int dim) {
    return constant_coefficients(dim, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                 0.0, 0.0);
}

CoefficientField checkerboard_coefficients(double contrast, int tiles) {
    if (!(contrast >= 1.0)) throw std::invalid_argument("checkerboard contrast must be >= 1");
    if (tiles < 1) throw std::invalid_argument("checkerboard needs at least one tile");
    CoefficientField f = identity_coefficients(2);
    f.a = [contrast, tiles](const Point& x) {
        const auto ix = static_cast<long>(std::floor(x.x() * tiles));
        const auto iy = static_cast<long>(std::floor(x.y() * tiles));
        const bool dark = ((ix + iy) % 2 + 2) % 2 == 1;
        return Eigen::Matrix2d((dark ? contrast : 1.0) * Eigen::Matrix2d::Identity());
    };
    f.sup_bounds.a = contrast;
    f.name = "checkerboard";
    return f;
}

CoefficientField sgn_drift_coefficients(double beta) {
    CoefficientField f = identity_coefficients(1);
    const auto sgn = [](const Point& x) {
        return Eigen::Vector2d(static_cast<double>((x.x() > 0.0) - (x.x() < 0.0)), 0.0);
    };
    f.b = sgn;
    f.c = sgn;
    f.beta = [beta](const Point&) { return beta; };
    f.sup_bounds.b = 1.0;
    f.sup_bounds.c = 1.0;
    f.sup_bounds.beta = std::abs(beta);
    f.b_lipschitz.reset();
    f.name = "sgn_drift";
    return f;
}

CoefficientField linear_drift_coefficients(double gain, double d, double beta) {
    CoefficientField f = identity_coefficients(2);
    f.b = [gain](const Point& x) { return Eigen::Vector2d(gain * x.x(), 0.0); };
    f.d = [d](const Point&) { return d; };
    f.beta = [beta](const Point&) { return beta; };
    f.sup_bounds.b = std::abs(gain);
    f.sup_bounds.d = std::abs(d);
    f.sup_bounds.beta = std::abs(beta);
    f.b_lipschitz = std::abs(gain);
    f.name = "linear_drift";
    return f;
}

double ValueTable::at(const Point& p) const {
    const int ix = std::clamp(static_cast<int>(std::floor((p.x() - x0) / (x1 - x0) * nx)), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>(std::floor((p.y() - y0) / (y1 - y0) * ny)), 0, ny - 1);
    return values[static_cast<std::size_t>(iy * nx + ix)];
}

ValueTable parse_value_table(std::istream& in) {
    ValueTable t;
    if (!(in >> t.nx >> t.ny >> t.x0 >> t.x1 >> t.y0 >> t.y1) || t.nx < 1 || t.ny < 1 || !(t.x1 > t.x0) ||
        !(t.y1 > t.y0)) {
        throw ConfigError("value table: bad header (expected nx ny x0 x1 y0 y1)");
    }
    t.values.resize(static_cast<std::size_t>(t.nx) * static_cast<std::size_t>(t.ny));
    for (auto& v : t.values) {
        if (!(in >> v)) throw ConfigError("value table: too few values");
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("value table: values must be positive and finite");
    }
    double extra = 0.0;
    if (in >> extra) throw ConfigError("value table: too many values");
    return t;
}

ValueTable load_value_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open value table '" + path + "'");
    return parse_value_table(in);
}

CoefficientField custom_table_coefficients(ValueTable table) {
    CoefficientField f = identity_coefficients(2);
    f.sup_bounds.a = *std::max_element(table.values.begin(), table.values.end());
    f.a = [t = std::move(table)](const Point& x) { return Eigen::Matrix2d(t.at(x) * Eigen::Matrix2d::Identity()); };
    f.name = "custom_table";
    return f;
}

CoefficientField scaled(const CoefficientField& field, double t) {
    CoefficientField f = field;
    f.a = [a = field.a, t](const Point& x) { return Eigen::Matrix2d(t * a(x)); };
    f.sup_bounds.a = std::abs(t) * field.sup_bounds.a;
    return f;
}

CoefficientField with_beta(CoefficientField field, double beta) {
    field.beta = [beta](const Point&) { return beta; };
    field.sup_bounds.beta = std::abs(beta);
    return field;
}

CoefficientField with_d(CoefficientField field, double d) {
    field.d = [d](const Point&) { return d; };
    field.sup_bounds.d = std::abs(d);
    return field;
}

}  // namespace robinlab
