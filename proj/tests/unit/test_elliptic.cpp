#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "generators.hpp"
#include "robinlab/elliptic.hpp"

using namespace robinlab;

namespace {

std::shared_ptr<const Mesh> interval(int n) { return std::make_shared<const Mesh>(build_interval_mesh(0.0, 1.0, n)); }
std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

}  // namespace

TEST_CASE("norms of simple functions") {
    const auto m = square(8);
    const auto one = FemFunction::interpolate(m, [](const Point&) { return 1.0; });
    CHECK(l2_norm(one) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h1_norm(one) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(one, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linf_norm(one) == 1.0);
    CHECK(boundary_l2_norm(one) == doctest::Approx(2.0).epsilon(1e-14));
    const auto x = FemFunction::interpolate(m, [](const Point& p) { return p.x(); });
    CHECK(l2_norm(x) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
    CHECK(h1_norm(x) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-13));
    CHECK(lp_norm(x, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(l2_error(x, [](const Point& p) { return p.x(); }) < 1e-14);
    CHECK(h1_error(x, [](const Point& p) { return p.x(); }, [](const Point&) { return Eigen::Vector2d(1, 0); }) <
          1e-13);
    CHECK(weighted_lp_norm(Eigen::Vector2d(3, 4), Eigen::Vector2d(1, 1), 2.0) == doctest::Approx(5.0));
}

TEST_CASE("solve_robin examples") {
    SUBCASE("-u'' + u = 1 with Neumann data") {
        const auto m = interval(10);
        const auto form = assemble_robin_form(m, identity_coefficients(1));
        RhsData d;
        d.f0 = [](const Point&) { return 1.0; };
        SolveInfo info;
        const auto u = solve_robin(form, assemble_rhs(*m, d), 1.0, &info);
        CHECK((u.values.array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(info.relative_residual <= 1e-10);
        CHECK(info.condition_estimate > 1.0);
    }
    SUBCASE("Robin data with beta = 1, g = 1, omega = 0") {
        const auto m = interval(10);
        const auto form = assemble_robin_form(m, with_beta(identity_coefficients(1), 1.0));
        RhsData d;
        d.g = [](const Point&) { return 1.0; };
        const auto u = solve_robin(form, assemble_rhs(*m, d), 0.0);
        CHECK((u.values.array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("shift in the discrete spectrum") {
        const auto m = interval(12);
        const auto form = assemble_robin_form(m, identity_coefficients(1));
        RhsData d;
        d.f0 = [](const Point& x) { return x.x(); };
        const auto rhs = assemble_rhs(*m, d);
        CHECK_THROWS_AS(solve_robin(form, rhs, 0.0), SingularSystem);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig((Eigen::MatrixXd(form.A)),
                                                                      (Eigen::MatrixXd(form.mass)));
        CHECK_THROWS_AS(solve_robin(form, rhs, -eig.eigenvalues()(1)), SingularSystem);
        CHECK_NOTHROW(solve_robin(form, rhs, -0.5 * eig.eigenvalues()(1)));
    }
}

TEST_CASE("solution does not depend on the vertex numbering") {
    gen::Rng rng(55);
    const Mesh base = build_unit_square_mesh(6);
    std::vector<Index> perm(base.num_vertices());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<Point> verts(base.num_vertices());
    for (std::size_t k = 0; k < perm.size(); ++k) verts[static_cast<std::size_t>(perm[k])] = base.vertices()[k];
    std::vector<Cell> cells;
    for (const auto& c : base.cells()) cells.push_back({perm[c[0]], perm[c[1]], perm[c[2]]});
    const auto m1 = std::make_shared<const Mesh>(base);
    const auto m2 = std::make_shared<const Mesh>(2, verts, cells);

    Eigen::Matrix2d a;
    a << 2, 0.5, -0.5, 1;
    const auto f = constant_coefficients(2, a, Eigen::Vector2d(1, -1), Eigen::Vector2d(0.3, 0.2), 0.5, 0.25);
    RhsData d;
    d.f0 = [](const Point& x) { return std::sin(3 * x.x()) + x.y(); };
    d.g = [](const Point& x) { return x.x() * x.y(); };
    const auto u1 = solve_robin(assemble_robin_form(m1, f), assemble_rhs(*m1, d), 2.0);
    const auto u2 = solve_robin(assemble_robin_form(m2, f), assemble_rhs(*m2, d), 2.0);
    for (std::size_t k = 0; k < perm.size(); ++k) {
        CHECK(std::abs(u1.values[static_cast<Eigen::Index>(k)] - u2.values[perm[k]]) <= 1e-10);
    }
}

TEST_CASE("stability estimate is never exceeded") {
    // Exact constants of the discrete data-to-solution maps under the barycenter/midpoint sampling.
    const auto m = square(5);
    const Mesh& mesh = *m;
    Eigen::Matrix2d a;
    a << 1.5, 0.4, -0.2, 1;
    const auto field = constant_coefficients(2, a, Eigen::Vector2d(0.5, 0), Eigen::Vector2d(0, 0.5), 0.0, 0.3);
    const auto form = assemble_robin_form(m, field);
    const double omega = find_coercivity_shift(form, 0.2).omega + 0.1;
    const Eigen::MatrixXd s = Eigen::MatrixXd(form.shifted(omega));
    const Eigen::MatrixXd h = Eigen::MatrixXd(h1_matrix(mesh));
    const Eigen::Index nv = static_cast<Eigen::Index>(mesh.num_vertices());
    const Eigen::Index nc = static_cast<Eigen::Index>(mesh.num_cells());
    const Eigen::Index nf = static_cast<Eigen::Index>(mesh.boundary_facets().size());
    Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(nv, nc), b1 = Eigen::MatrixXd::Zero(nv, 2 * nc);
    Eigen::MatrixXd bg = Eigen::MatrixXd::Zero(nv, nf);
    Eigen::VectorXd wc(nc), wf(nf);
    for (Index c = 0; c < nc; ++c) {
        const auto g = p1_cell(mesh, c);
        wc[c] = g.measure;
        for (int k = 0; k < 3; ++k) {
            b0(mesh.cell(c)[k], c) += g.measure / 3.0;
            for (int j = 0; j < 2; ++j) b1(mesh.cell(c)[k], 2 * c + j) += g.measure * g.grads(j, k);
        }
    }
    for (Index f = 0; f < nf; ++f) {
        const auto& facet = mesh.boundary_facets()[static_cast<std::size_t>(f)];
        wf[f] = facet.measure;
        for (Index v : facet.vertices) bg(v, f) += facet.measure / 2.0;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
    const auto constant = [&](const Eigen::MatrixXd& b, const Eigen::VectorXd& w) {
        const Eigen::MatrixXd sol = lu.solve(b);
        const Eigen::MatrixXd gram = sol.transpose() * h * sol;
        const Eigen::VectorXd inv_sqrt = w.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * gram * inv_sqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (scaled + scaled.transpose()));
        return std::sqrt(eig.eigenvalues().maxCoeff());
    };
    Eigen::VectorXd wc2(2 * nc);
    for (Index c = 0; c < nc; ++c) wc2[2 * c] = wc2[2 * c + 1] = wc[c];
    const double c_const = std::max({constant(b0, wc), constant(b1, wc2), constant(bg, wf)});

    gen::Rng rng(66);
    for (int k = 0; k < 20; ++k) {
        const double p = rng.uniform(0, 8), q = rng.uniform(-2, 2), r = rng.uniform(0, 8);
        RhsData d;
        d.f0 = [p, q](const Point& x) { return q + std::sin(p * x.x() - x.y()); };
        d.f = [p, r](const Point& x) { return Eigen::Vector2d(std::cos(r * x.y()), p * x.x() - 1.0); };
        d.g = [q, r](const Point& x) { return q * std::cos(r * (x.x() + x.y())); };
        const auto rhs = assemble_rhs(mesh, d);
        double n0 = 0.0, n1 = 0.0, ng = 0.0;
        for (Index c = 0; c < nc; ++c) {
            n0 += wc[c] * rhs.f0_samples[static_cast<std::size_t>(c)] * rhs.f0_samples[static_cast<std::size_t>(c)];
            n1 += wc[c] * rhs.f_samples[static_cast<std::size_t>(c)].squaredNorm();
        }
        for (Index f = 0; f < nf; ++f) ng += wf[f] * rhs.g_samples[static_cast<std::size_t>(f)] * rhs.g_samples[static_cast<std::size_t>(f)];
        const auto u = solve_robin(form, rhs, omega);
        CHECK(h1_norm(u) <= c_const * (std::sqrt(n0) + std::sqrt(n1) + std::sqrt(ng)) * (1.0 + 1e-10));
    }
}

TEST_CASE("manufactured convergence in one dimension") {
    const auto study = manufactured_convergence(cosine_problem(1), 4);
    REQUIRE(study.rows.size() == 5);
    CHECK(std::isnan(study.rows[0].rate_l2));
    for (std::size_t k = 1; k < study.rows.size(); ++k) {
        CHECK(study.rows[k].rate_l2 >= 1.8);
        CHECK(study.rows[k].rate_l2 <= 2.2);
        CHECK(study.rows[k].rate_h1 >= 0.8);
        CHECK(study.rows[k].rate_h1 <= 1.2);
        CHECK(study.rows[k].h == doctest::Approx(0.5 * study.rows[k - 1].h));
    }
}

TEST_CASE("manufactured convergence in two dimensions") {
    const auto study = manufactured_convergence(cosine_problem(2), 3);
    for (std::size_t k = 1; k < study.rows.size(); ++k) {
        CHECK(study.rows[k].rate_l2 >= 1.8);
        CHECK(study.rows[k].rate_l2 <= 2.2);
    }
}

TEST_CASE("constants are reproduced exactly") {
    for (int dim : {1, 2}) {
        const auto study = manufactured_convergence(constant_problem(dim, 2.5), 2, 4);
        for (const auto& row : study.rows) {
            CHECK(row.l2_error <= 1e-10);
            CHECK(row.h1_error <= 1e-10);
        }
    }
}

TEST_CASE("holder seminorm examples") {
    const auto m = interval(64);
    const auto x = FemFunction::interpolate(m, [](const Point& p) { return p.x(); });
    CHECK(holder_seminorm(x, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto c = FemFunction::interpolate(m, [](const Point&) { return 4.0; });
    CHECK(holder_seminorm(c, 0.3) == 0.0);
    const auto sq = FemFunction::interpolate(m, [](const Point& p) { return std::sqrt(p.x()); });
    CHECK(holder_seminorm(sq, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    const auto vals = holder_seminorms(sq, {0.25, 0.5, 1.0});
    CHECK(vals.size() == 3);
    CHECK_FALSE(vals[0].sampled);
    CHECK(vals[0].pairs == 65 * 64 / 2);
    CHECK(vals[2].value == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("holder seminorm switches to sampling above the vertex cap") {
    const auto m = square(72);
    REQUIRE(m->num_vertices() > kHolderExactVertexCap);
    const auto x = FemFunction::interpolate(m, [](const Point& p) { return p.x() + 2 * p.y(); });
    const auto v = holder_seminorms(x, {1.0}, 3);
    CHECK(v[0].sampled);
    CHECK(v[0].pairs == kHolderSampledPairs);
    CHECK(v[0].value <= std::sqrt(5.0) + 1e-12);
    CHECK(v[0].value >= 0.9 * std::sqrt(5.0));
    CHECK(holder_seminorms(x, {1.0}, 3)[0].value == v[0].value);
}

TEST_CASE("holder exponent estimates") {
    SUBCASE("smooth solution") {
        const auto study = manufactured_convergence(cosine_problem(2), 2);
        const auto est = estimate_holder_exponent(study.solutions);
        CHECK(est.gamma_hat >= 0.95 - 1e-12);
        CHECK_FALSE(est.floor_warning);
        CHECK(est.grid.size() == 19);
        CHECK(est.trajectory.size() == 3);
    }
    SUBCASE("constants") {
        std::vector<FemFunction> levels;
        for (int n : {4, 8, 16}) levels.push_back(FemFunction::interpolate(square(n), [](const Point&) { return 1.0; }));
        const auto est = estimate_holder_exponent(levels);
        CHECK(est.gamma_hat == doctest::Approx(0.95));
        CHECK_FALSE(est.floor_warning);
    }
    SUBCASE("solved constants carry only roundoff") {
        std::vector<FemFunction> levels;
        const auto field = identity_coefficients(2);
        RhsData data;
        data.f0 = [](const Point&) { return 1.0; };
        for (int n : {8, 16, 32}) {
            const auto mesh = square(n);
            levels.push_back(solve_robin(assemble_robin_form(mesh, field), assemble_rhs(*mesh, data), 1.0));
        }
        const auto est = estimate_holder_exponent(levels);
        CHECK(est.gamma_hat == doctest::Approx(0.95));
        CHECK_FALSE(est.floor_warning);
    }
    SUBCASE("a cusp limits the exponent") {
        std::vector<FemFunction> levels;
        for (int n : {16, 64, 256, 1024}) {
            levels.push_back(FemFunction::interpolate(interval(n), [](const Point& p) { return std::pow(p.x(), 0.3); }));
        }
        const auto est = estimate_holder_exponent(levels);
        // Seminorms at gamma grow like 4^(gamma - 0.3) per level; 4^0.05 < 1.1 < 4^0.1.
        CHECK(est.gamma_hat == doctest::Approx(0.35));
        const std::size_t k = static_cast<std::size_t>(std::lround(est.gamma_hat / 0.05)) - 1;
        for (std::size_t l = 1; l < levels.size(); ++l) {
            CHECK(est.seminorms[k][l] <= 1.1 * est.seminorms[k][l - 1]);
        }
    }
    SUBCASE("floor warning when nothing is bounded") {
        std::vector<FemFunction> levels;
        for (int n : {4, 16, 64}) {
            levels.push_back(FemFunction::interpolate(interval(n), [n](const Point& p) { return p.x() < 0.5 ? 0.0 : n; }));
        }
        const auto est = estimate_holder_exponent(levels);
        CHECK(est.floor_warning);
        CHECK(est.gamma_hat == doctest::Approx(0.05));
    }
    CHECK_THROWS_AS(estimate_holder_exponent({}), std::invalid_argument);
}
