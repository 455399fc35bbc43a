#include "robinlab/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/SparseLU>

namespace robinlab {
namespace {

double quad_form(const SparseMatrix& m, const Eigen::VectorXd& v) { return v.dot(m * v); }

Eigen::VectorXd lumped_weights(const Mesh& mesh) {
    return mass_matrix(mesh) * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.num_vertices()));
}

double sparse_norm1(const SparseMatrix& m) {
    double best = 0.0;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

}  // namespace

double l2_norm(const FemFunction& u) { return std::sqrt(std::max(0.0, quad_form(mass_matrix(*u.mesh), u.values))); }

double h1_norm(const FemFunction& u) { return std::sqrt(std::max(0.0, quad_form(h1_matrix(*u.mesh), u.values))); }

double weighted_lp_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double p) {
    if (std::isinf(p)) return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
    if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) sum += weights[i] * std::pow(std::abs(values[i]), p);
    return std::pow(sum, 1.0 / p);
}

double lp_norm(const FemFunction& u, double p) { return weighted_lp_norm(u.values, lumped_weights(*u.mesh), p); }

double linf_norm(const FemFunction& u) { return u.values.size() == 0 ? 0.0 : u.values.cwiseAbs().maxCoeff(); }

double boundary_l2_norm(const FemFunction& u) {
    return std::sqrt(std::max(0.0, quad_form(boundary_mass_matrix(*u.mesh), u.values)));
}

double l2_error(const FemFunction& u, const ScalarField& exact) {
    const Mesh& mesh = *u.mesh;
    const auto rule = accurate_rule(mesh.dim());
    double sum = 0.0;
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        for (const auto& q : rule) {
            double uh = 0.0;
            for (int k = 0; k < g.nloc; ++k) uh += q.bary[k] * u.values[c[k]];
            const double e = uh - exact(g.at(q.bary));
            sum += q.weight * g.measure * e * e;
        }
    }
    return std::sqrt(sum);
}

double h1_error(const FemFunction& u, const ScalarField& exact, const VectorField& exact_grad) {
    const Mesh& mesh = *u.mesh;
    const auto rule = accurate_rule(mesh.dim());
    double sum = 0.0;
    for (Index ci = 0; ci < static_cast<Index>(mesh.num_cells()); ++ci) {
        const auto g = p1_cell(mesh, ci);
        const auto& c = mesh.cell(ci);
        Eigen::Vector2d grad = Eigen::Vector2d::Zero();
        for (int k = 0; k < g.nloc; ++k) grad += u.values[c[k]] * g.grads.col(k);
        for (const auto& q : rule) {
            double uh = 0.0;
            for (int k = 0; k < g.nloc; ++k) uh += q.bary[k] * u.values[c[k]];
            const Point x = g.at(q.bary);
            const double e = uh - exact(x);
            Eigen::Vector2d ge = grad - exact_grad(x);
            if (mesh.dim() == 1) ge[1] = 0.0;
            sum += q.weight * g.measure * (e * e + ge.squaredNorm());
        }
    }
    return std::sqrt(sum);
}

FemFunction solve_robin(const AssembledForm& form, const RhsFunctional& rhs, double omega, SolveInfo* info) {
    const SparseMatrix k = form.shifted(omega);
    if (rhs.vector.size() != k.rows()) throw std::invalid_argument("right-hand side length does not match the form");
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(k);
    lu.factorize(k);
    if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU factorization failed: shift in the discrete spectrum");

    // Inverse iteration estimates the largest magnitude of K^{-1}.
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd x(k.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = unit(rng);
    x.normalize();
    double inv_norm = 0.0;
    for (int it = 0; it < 8; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        const double n = y.norm();
        if (!std::isfinite(n)) throw SingularSystem("solve produced non-finite values");
        inv_norm = std::max(inv_norm, n);
        if (n == 0.0) break;
        x = y / n;
    }
    const double cond = sparse_norm1(k) * inv_norm;

    Eigen::VectorXd u = lu.solve(rhs.vector);
    const double rn = rhs.vector.norm();
    const double res = (k * u - rhs.vector).norm() / (rn > 0.0 ? rn : 1.0);
    if (info) {
        info->condition_estimate = cond;
        info->relative_residual = res;
    }
    if (!(cond <= 1e12)) throw SingularSystem("shifted system is numerically singular (condition estimate above 1e12)");
    if (!(res <= 1e-10)) throw SingularSystem("relative residual above 1e-10");
    return FemFunction(form.mesh, std::move(u));
}

ManufacturedProblem cosine_problem(int dim) {
    constexpr double pi = std::numbers::pi;
    ManufacturedProblem p;
    p.dim = dim;
    p.field = identity_coefficients(dim);
    p.omega = 1.0;
    if (dim == 1) {
        p.name = "cos1d";
        p.exact = [](const Point& x) { return std::cos(pi * x.x()); };
        p.exact_grad = [](const Point& x) { return Eigen::Vector2d(-pi * std::sin(pi * x.x()), 0.0); };
        p.data.f0 = [](const Point& x) { return (1.0 + pi * pi) * std::cos(pi * x.x()); };
        p.mesh = [](int n) { return build_interval_mesh(0.0, 1.0, n); };
    } else if (dim == 2) {
        p.name = "cos2d";
        p.exact = [](const Point& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); };
        p.exact_grad = [](const Point& x) {
            return Eigen::Vector2d(-pi * std::sin(pi * x.x()) * std::cos(pi * x.y()),
                                   -pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
        };
        p.data.f0 = [](const Point& x) {
            return (1.0 + 2.0 * pi * pi) * std::cos(pi * x.x()) * std::cos(pi * x.y());
        };
        p.mesh = [](int n) { return build_unit_square_mesh(n); };
    } else {
        throw std::invalid_argument("manufactured problems exist for dim 1 and 2");
    }
    return p;
}

ManufacturedProblem constant_problem(int dim, double value) {
    ManufacturedProblem p = cosine_problem(dim);
    p.name = dim == 1 ? "const1d" : "const2d";
    p.exact = [value](const Point&) { return value; };
    p.exact_grad = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
    p.data.f0 = [value](const Point&) { return value; };
    return p;
}

ConvergenceStudy manufactured_convergence(const ManufacturedProblem& problem, int refinements, int base_cells,
                                          const AssemblyOptions& options) {
    if (refinements < 0 || base_cells < 1) throw std::invalid_argument("invalid refinement schedule");
    ConvergenceStudy study;
    for (int level = 0; level <= refinements; ++level) {
        const int n = base_cells << level;
        auto mesh = std::make_shared<const Mesh>(problem.mesh(n));
        const auto form = assemble_robin_form(mesh, problem.field, options);
        const auto rhs = assemble_rhs(*mesh, problem.data, options);
        FemFunction u = solve_robin(form, rhs, problem.omega);
        ConvergenceRow row;
        row.h = 1.0 / n;
        row.l2_error = l2_error(u, problem.exact);
        row.h1_error = h1_error(u, problem.exact, problem.exact_grad);
        row.rate_l2 = std::numeric_limits<double>::quiet_NaN();
        row.rate_h1 = std::numeric_limits<double>::quiet_NaN();
        if (!study.rows.empty()) {
            const auto& prev = study.rows.back();
            row.rate_l2 = std::log2(prev.l2_error / row.l2_error);
            row.rate_h1 = std::log2(prev.h1_error / row.h1_error);
        }
        study.rows.push_back(row);
        study.solutions.push_back(std::move(u));
    }
    return study;
}

std::vector<HolderValue> holder_seminorms(const FemFunction& u, const std::vector<double>& gammas,
                                          std::uint64_t seed) {
    for (double g : gammas) {
        if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
    }
    const auto& pts = u.mesh->vertices();
    const std::size_t n = pts.size();
    const std::size_t ng = gammas.size();
    // Track max over pairs of log|du| - gamma log|dx|.
    std::vector<double> best(ng, -std::numeric_limits<double>::infinity());
    const double noise =
        u.values.size() == 0 ? 0.0 : 1e3 * std::numeric_limits<double>::epsilon() * u.values.cwiseAbs().maxCoeff();
    const auto visit = [&](std::size_t i, std::size_t j) {
        const double du = std::abs(u.values[static_cast<Eigen::Index>(i)] - u.values[static_cast<Eigen::Index>(j)]);
        if (du <= noise) return;
        const double dx = (pts[i] - pts[j]).norm();
        if (dx == 0.0) return;
        const double a = std::log(du);
        const double b = std::log(dx);
        for (std::size_t k = 0; k < ng; ++k) best[k] = std::max(best[k], a - gammas[k] * b);
    };
    bool sampled = false;
    std::size_t pairs = 0;
    if (n <= kHolderExactVertexCap) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
        }
        pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
    } else {
        sampled = true;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (pairs < kHolderSampledPairs) {
            const std::size_t i = pick(rng);
            const std::size_t j = pick(rng);
            if (i == j) continue;
            visit(i, j);
            ++pairs;
        }
    }
    std::vector<HolderValue> out(ng);
    for (std::size_t k = 0; k < ng; ++k) {
        out[k].value = std::isinf(best[k]) ? 0.0 : std::exp(best[k]);
        out[k].sampled = sampled;
        out[k].pairs = pairs;
    }
    return out;
}

double holder_seminorm(const FemFunction& u, double gamma, std::uint64_t seed) {
    return holder_seminorms(u, {gamma}, seed).front().value;
}

HolderEstimate estimate_holder_exponent(const std::vector<FemFunction>& levels, std::uint64_t seed) {
    if (levels.size() < 3) throw std::invalid_argument("Hoelder exponent estimate needs at least 3 levels");
    HolderEstimate est;
    for (int k = 1; k <= 19; ++k) est.grid.push_back(0.05 * k);
    est.seminorms.assign(est.grid.size(), std::vector<double>(levels.size(), 0.0));
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto vals = holder_seminorms(levels[l], est.grid, seed);
        for (std::size_t k = 0; k < est.grid.size(); ++k) {
            est.seminorms[k][l] = vals[k].value;
            est.sampled = est.sampled || vals[k].sampled;
        }
    }
    const auto bounded = [](const std::vector<double>& s) {
        for (std::size_t l = 1; l < s.size(); ++l) {
            if (s[l - 1] == 0.0 && s[l] == 0.0) continue;
            if (!(s[l] <= 1.1 * s[l - 1])) return false;
        }
        return true;
    };
    std::size_t chosen = 0;
    bool found = false;
    for (std::size_t k = est.grid.size(); k-- > 0;) {
        if (bounded(est.seminorms[k])) {
            chosen = k;
            found = true;
            break;
        }
    }
    est.floor_warning = !found;
    est.gamma_hat = est.grid[chosen];
    est.trajectory = est.seminorms[chosen];
    return est;
}

}  // namespace robinlab
