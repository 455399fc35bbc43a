#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "generators.hpp"
#include "robinlab/assembly.hpp"
#include "robinlab/fem_function.hpp"

using namespace robinlab;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

Eigen::VectorXd ones(const Mesh& m) { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.num_vertices())); }

double max_abs(const SparseMatrix& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    }
    return v;
}

CoefficientField random_field(gen::Rng& rng, bool symmetric) {
    const Eigen::Matrix2d a0 = gen::elliptic_matrix(rng, 0.2, 4.0, symmetric ? 0.0 : 1.0);
    const Eigen::Vector2d b0 = gen::vector(rng, 2);
    const Eigen::Vector2d c0 = symmetric ? b0 : Eigen::Vector2d(gen::vector(rng, 2));
    CoefficientField f = identity_coefficients(2);
    f.a = [a0](const Point& x) { return Eigen::Matrix2d((1.5 + std::sin(5 * x.x() * x.y())) * a0); };
    f.b = [b0](const Point& x) { return Eigen::Vector2d((1.0 + x.x()) * b0); };
    f.c = [c0](const Point& x) { return Eigen::Vector2d((1.0 + x.x()) * c0); };
    f.d = [](const Point& x) { return x.y() - 0.5; };
    f.beta = [](const Point& x) { return std::cos(3 * x.x()); };
    return f;
}

}  // namespace

TEST_CASE("assemble_robin_form examples") {
    const auto m = square(8);
    SUBCASE("Neumann Laplacian has constants in its kernel") {
        const auto form = assemble_robin_form(m, identity_coefficients(2));
        CHECK((form.A * ones(*m)).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("mass term") {
        const auto f = constant_coefficients(2, Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                                             Eigen::Vector2d::Zero(), 1.0, 0.0);
        const auto form = assemble_robin_form(m, f);
        CHECK(ones(*m).dot(form.A * ones(*m)) == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("boundary term") {
        const auto f = constant_coefficients(2, Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                                             Eigen::Vector2d::Zero(), 0.0, 1.0);
        const auto form = assemble_robin_form(m, f);
        CHECK(ones(*m).dot(form.A * ones(*m)) == doctest::Approx(4.0).epsilon(1e-13));
    }
    SUBCASE("interval boundary term uses counting measure") {
        const auto line = std::make_shared<const Mesh>(build_interval_mesh(0.0, 1.0, 5));
        const auto f = constant_coefficients(1, Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(),
                                             Eigen::Vector2d::Zero(), 0.0, 1.0);
        CHECK(ones(*line).dot(assemble_robin_form(line, f).A * ones(*line)) == doctest::Approx(2.0));
    }
}

TEST_CASE("form entries match direct evaluation on P1 functions") {
    // a(u, v) for linear u, v on a uniform field equals the integral of the integrand over the square.
    const auto m = square(6);
    Eigen::Matrix2d a;
    a << 2, 0.5, -0.3, 1;
    const Eigen::Vector2d b(0.4, -1), c(1.5, 0.2);
    const double d = 0.7, beta = 0.0;
    const auto form = assemble_robin_form(m, constant_coefficients(2, a, b, c, d, beta));
    const auto u = FemFunction::interpolate(m, [](const Point& x) { return x.x(); });
    const auto v = FemFunction::interpolate(m, [](const Point& x) { return x.y(); });
    // grad u = e1, grad v = e2, int x = int y = 1/2, int x y = 1/4.
    const double expected = a(1, 0) + b[1] * 0.5 + c[0] * 0.5 + d * 0.25;
    CHECK(v.values.dot(form.A * u.values) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mass matrices") {
    const auto m = square(5);
    const auto form = assemble_robin_form(m, identity_coefficients(2));
    CHECK(max_abs(SparseMatrix(form.mass - SparseMatrix(form.mass.transpose()))) == 0.0);
    CHECK(ones(*m).dot(form.mass * ones(*m)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ones(*m).dot(form.boundary_mass * ones(*m)) == doctest::Approx(4.0).epsilon(1e-14));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((Eigen::MatrixXd(form.mass)));
    CHECK(eig.eigenvalues()(0) > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigb((Eigen::MatrixXd(form.boundary_mass)));
    CHECK(eigb.eigenvalues()(0) > -1e-14);
    for (std::size_t k = 0; k < form.dof_map.size(); ++k) CHECK(form.dof_map[k] == static_cast<Index>(k));
}

TEST_CASE("symmetric fields give symmetric matrices") {
    gen::Rng rng(3);
    const auto m = square(7);
    for (int k = 0; k < 10; ++k) {
        const auto form = assemble_robin_form(m, random_field(rng, true));
        CHECK(max_abs(SparseMatrix(form.A - SparseMatrix(form.A.transpose()))) <= 1e-12);
    }
}

TEST_CASE("antisymmetric part comes from b and c") {
    gen::Rng rng(4);
    const auto m = square(7);
    for (int k = 0; k < 10; ++k) {
        CoefficientField f = random_field(rng, false);
        const Eigen::Matrix2d a0 = gen::elliptic_matrix(rng, 0.2, 4.0, 0.0);
        f.a = [a0](const Point&) { return a0; };
        const auto form = assemble_robin_form(m, f);
        const SparseMatrix drift = form.b_term + form.c_term;
        const SparseMatrix diff = (form.A - SparseMatrix(form.A.transpose())) -
                                  (drift - SparseMatrix(drift.transpose()));
        CHECK(max_abs(diff) <= 1e-12);
    }
}

TEST_CASE("assemble_rhs examples") {
    const auto m = square(8);
    const Eigen::VectorXd one = ones(*m);
    RhsData d0;
    d0.f0 = [](const Point&) { return 1.0; };
    CHECK(one.dot(assemble_rhs(*m, d0).vector) == doctest::Approx(1.0).epsilon(1e-14));
    RhsData dg;
    dg.g = [](const Point&) { return 1.0; };
    CHECK(one.dot(assemble_rhs(*m, dg).vector) == doctest::Approx(4.0).epsilon(1e-14));
    RhsData df;
    df.f = [](const Point&) { return Eigen::Vector2d(1.0, 0.0); };
    const auto x1 = FemFunction::interpolate(m, [](const Point& x) { return x.x(); });
    CHECK(x1.values.dot(assemble_rhs(*m, df).vector) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(one.dot(assemble_rhs(*m, df).vector)) < 1e-14);
    CHECK(assemble_rhs(*m, RhsData{}).vector.norm() == 0.0);
}

TEST_CASE("rhs superposition") {
    gen::Rng rng(12);
    const auto m = square(6);
    for (int k = 0; k < 20; ++k) {
        const double s1 = rng.uniform(-2, 2), s2 = rng.uniform(-2, 2);
        const double p = rng.uniform(0, 5);
        RhsData d1;
        d1.f0 = [p](const Point& x) { return std::sin(p * x.x()); };
        d1.f = [p](const Point& x) { return Eigen::Vector2d(x.y(), p); };
        d1.g = [p](const Point& x) { return p * x.x(); };
        RhsData d2;
        d2.f0 = [](const Point& x) { return x.y(); };
        d2.f = [](const Point& x) { return Eigen::Vector2d(1.0, x.x()); };
        d2.g = [](const Point&) { return -1.0; };
        RhsData mix;
        mix.f0 = [&](const Point& x) { return s1 * d1.f0(x) + s2 * d2.f0(x); };
        mix.f = [&](const Point& x) { return Eigen::Vector2d(s1 * d1.f(x) + s2 * d2.f(x)); };
        mix.g = [&](const Point& x) { return s1 * d1.g(x) + s2 * d2.g(x); };
        const Eigen::VectorXd lhs = assemble_rhs(*m, mix).vector;
        const Eigen::VectorXd rhs = s1 * assemble_rhs(*m, d1).vector + s2 * assemble_rhs(*m, d2).vector;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("rhs samples are recorded") {
    const auto m = square(2);
    RhsData d;
    d.f0 = [](const Point&) { return 2.0; };
    d.g = [](const Point&) { return 3.0; };
    const auto r = assemble_rhs(*m, d);
    CHECK(r.f0_samples.size() == m->num_cells());
    CHECK(r.g_samples.size() == m->boundary_facets().size());
}

TEST_CASE("three-point rule reproduces the barycenter rule for constant data") {
    const auto m = square(4);
    Eigen::Matrix2d a;
    a << 2, 0.3, 0.1, 1;
    const auto f = constant_coefficients(2, a, Eigen::Vector2d(1, 2), Eigen::Vector2d(-1, 0.5), 0.4, 0.2);
    const auto bary = assemble_robin_form(m, f);
    const auto three = assemble_robin_form(m, f, {CellRule::ThreePoint});
    CHECK(max_abs(SparseMatrix(bary.A - three.A)) <= 1e-13);
}

TEST_CASE("find_coercivity_shift examples") {
    SUBCASE("Laplacian, eta 0.5") {
        const auto form = assemble_robin_form(square(6), identity_coefficients(2));
        const auto s = find_coercivity_shift(form, 0.5);
        CHECK(s.omega <= 1.0);
        CHECK(s.omega >= 0.5 * (1.0 - 1e-6));
    }
    SUBCASE("negative boundary coefficient on the interval") {
        const auto line = std::make_shared<const Mesh>(build_interval_mesh(0.0, 1.0, 16));
        const auto form = assemble_robin_form(line, with_beta(identity_coefficients(1), -1.0));
        const auto s = find_coercivity_shift(form, 0.1);
        CHECK(s.omega > 0.0);
        CHECK(std::isfinite(s.omega));
        const SparseMatrix h = h1_matrix(*line);
        CHECK(is_positive_semidefinite(SparseMatrix(symmetric_part(form.A) + s.omega * form.mass - 0.1 * h)));
        CHECK_FALSE(is_positive_semidefinite(
            SparseMatrix(symmetric_part(form.A) + 0.99 * s.omega * form.mass - 0.1 * h)));
    }
    SUBCASE("already coercive") {
        const auto f = constant_coefficients(2, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(),
                                             Eigen::Vector2d::Zero(), 1.0, 0.0);
        CHECK(find_coercivity_shift(assemble_robin_form(square(4), f), 1e-3).omega == 0.0);
    }
}

TEST_CASE("discrete Garding inequality with the found shift") {
    gen::Rng rng(21);
    const auto m = square(6);
    for (int t = 0; t < 5; ++t) {
        const auto form = assemble_robin_form(m, random_field(rng, false));
        const double eta = rng.uniform(0.05, 0.15);
        const double omega = find_coercivity_shift(form, eta).omega;
        const SparseMatrix sym = symmetric_part(form.A) + omega * form.mass;
        const SparseMatrix h = h1_matrix(*m);
        for (int k = 0; k < 200; ++k) {
            const Eigen::VectorXd x = gen::vector(rng, static_cast<Eigen::Index>(m->num_vertices()));
            CHECK(x.dot(sym * x) >= eta * x.dot(h * x) - 1e-9 * x.dot(h * x));
        }
    }
}

TEST_CASE("Wentzell system") {
    SUBCASE("interval with two cells") {
        const auto line = std::make_shared<const Mesh>(build_interval_mesh(0.0, 1.0, 2));
        const auto w = assemble_wentzell_system(line, identity_coefficients(1));
        const Eigen::MatrixXd mb(w.form.boundary_mass);
        CHECK(mb(0, 0) == 1.0);
        CHECK(mb(2, 2) == 1.0);
        CHECK(mb.cwiseAbs().sum() == 2.0);
        CHECK(Eigen::MatrixXd(w.mass - w.form.mass - w.form.boundary_mass).norm() == 0.0);
    }
    SUBCASE("unit square") {
        const auto m = square(8);
        const auto w = assemble_wentzell_system(m, identity_coefficients(2));
        CHECK(w.form.boundary_mass.diagonal().sum() > 0.0);
        CHECK(ones(*m).dot(w.form.boundary_mass * ones(*m)) == doctest::Approx(4.0).epsilon(1e-10));
        CHECK((w.form.A * ones(*m)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("product states share boundary dofs") {
    const auto m = square(4);
    gen::Rng rng(8);
    const Eigen::VectorXd u = gen::vector(rng, static_cast<Eigen::Index>(m->num_vertices()));
    const auto s = ProductState::from_nodal(*m, u);
    CHECK(s.consistent);
    CHECK(s.boundary == trace(*m, u));
    CHECK(s.interior == u);
}

TEST_CASE("lumping and symmetric part") {
    const auto m = square(3);
    const SparseMatrix mass = mass_matrix(*m);
    const SparseMatrix l = lumped(mass);
    CHECK(l.nonZeros() == static_cast<Eigen::Index>(m->num_vertices()));
    CHECK(Eigen::VectorXd(l.diagonal()).isApprox(Eigen::VectorXd(mass * ones(*m)), 1e-14));
    SparseMatrix x(2, 2);
    x.insert(0, 1) = 2.0;
    const Eigen::MatrixXd s(symmetric_part(x));
    CHECK(s(0, 1) == 1.0);
    CHECK(s(1, 0) == 1.0);
}

TEST_CASE("discrete trace constant bounds the trace") {
    const Mesh m = build_unit_square_mesh(4);
    const double c = discrete_trace_constant(m);
    const SparseMatrix mb = boundary_mass_matrix(m);
    const SparseMatrix h = h1_matrix(m);
    gen::Rng rng(13);
    for (int k = 0; k < 200; ++k) {
        const Eigen::VectorXd u = gen::vector(rng, static_cast<Eigen::Index>(m.num_vertices()));
        CHECK(u.dot(mb * u) <= c * c * u.dot(h * u) * (1.0 + 1e-10));
    }
}

TEST_CASE("matrix coordinate dump") {
    SparseMatrix x(2, 3);
    x.insert(1, 2) = 0.1;
    x.insert(0, 0) = -2.0;
    std::ostringstream out;
    write_matrix_coordinates(out, x);
    const std::string s = out.str();
    CHECK(s.find("1 2 0.10000000000000001") != std::string::npos);
    CHECK(s.find("0 0 -2") != std::string::npos);
}
