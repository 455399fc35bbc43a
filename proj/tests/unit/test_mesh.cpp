#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "robinlab/assembly.hpp"
#include "robinlab/elliptic.hpp"
#include "robinlab/mesh.hpp"

using namespace robinlab;

namespace {

double polygon_perimeter(const Polygon& p) { return perimeter(p); }

void check_mesh_invariants(const Mesh& m) {
    m.validate();
    for (const auto& f : m.boundary_facets()) CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-12);
    for (Index c = 0; c < static_cast<Index>(m.num_cells()); ++c) CHECK(m.cell_measure(c) > 0.0);
}

}  // namespace

TEST_CASE("interval mesh of (0,1) with two cells") {
    const Mesh m = build_interval_mesh(0.0, 1.0, 2);
    REQUIRE(m.num_vertices() == 3);
    CHECK(m.vertex(0).x() == 0.0);
    CHECK(m.vertex(1).x() == 0.5);
    CHECK(m.vertex(2).x() == 1.0);
    REQUIRE(m.boundary_facets().size() == 2);
    for (const auto& f : m.boundary_facets()) {
        CHECK(f.measure == 1.0);
        const double x = m.vertex(f.vertices[0]).x();
        CHECK(f.normal.x() == (x == 0.0 ? -1.0 : 1.0));
    }
    CHECK(m.boundary_measure() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("interval mesh of (-1,1) with four cells") {
    const Mesh m = build_interval_mesh(-1.0, 1.0, 4);
    CHECK(m.num_vertices() == 5);
    for (Index c = 0; c < 4; ++c) CHECK(m.cell_measure(c) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("interval mesh rejects degenerate input") {
    CHECK_THROWS_AS(build_interval_mesh(0.0, 1.0, 0), MeshError);
    CHECK_THROWS_AS(build_interval_mesh(1.0, 1.0, 3), MeshError);
    CHECK_THROWS_AS(build_interval_mesh(2.0, 1.0, 3), MeshError);
}

TEST_CASE("polygon meshes reproduce perimeter and area") {
    SUBCASE("unit square h = 0.5") {
        const Mesh m = build_polygon_mesh(unit_square(), 0.5);
        check_mesh_invariants(m);
        CHECK(std::abs(m.boundary_measure() - 4.0) <= 1e-10);
        CHECK(m.max_cell_diameter() <= 2 * 0.5 + 1e-12);
    }
    SUBCASE("unit square h = 0.25") {
        const Mesh m = build_polygon_mesh(unit_square(), 0.25);
        check_mesh_invariants(m);
        CHECK(std::abs(m.total_measure() - 1.0) <= 1e-10);
        CHECK(m.max_cell_diameter() <= 2 * 0.25 + 1e-12);
    }
    SUBCASE("L-shape h = 0.25") {
        const Polygon l = l_shape();
        // Edge lengths 1, 0.5, 0.5, 0.5, 0.5, 1.
        CHECK(polygon_perimeter(l) == doctest::Approx(4.0));
        const Mesh m = build_polygon_mesh(l, 0.25);
        check_mesh_invariants(m);
        CHECK(std::abs(m.boundary_measure() - 4.0) <= 1e-10);
        CHECK(std::abs(m.total_measure() - 0.75) <= 1e-10);
    }
}

TEST_CASE("refinement keeps area and perimeter") {
    for (const Polygon& poly : {unit_square(), l_shape()}) {
        double h = 0.5;
        const Mesh ref = build_polygon_mesh(poly, h);
        for (int k = 0; k < 3; ++k) {
            h *= 0.5;
            const Mesh m = build_polygon_mesh(poly, h);
            CHECK(std::abs(m.total_measure() - ref.total_measure()) <= 1e-10);
            CHECK(std::abs(m.boundary_measure() - ref.boundary_measure()) <= 1e-10);
            CHECK(m.max_cell_diameter() <= 2 * h + 1e-12);
        }
    }
}

TEST_CASE("random convex and star polygons mesh cleanly") {
    gen::Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = rng.integer(3, 9);
        Polygon p;
        for (int k = 0; k < n; ++k) {
            const double t = 2.0 * std::numbers::pi * (k + rng.uniform(0.0, 0.5)) / n;
            const double r = rng.uniform(0.6, 1.0);
            p.emplace_back(r * std::cos(t), r * std::sin(t));
        }
        const Mesh m = build_polygon_mesh(p, 0.2);
        check_mesh_invariants(m);
        CHECK(std::abs(m.boundary_measure() - perimeter(p)) <= 1e-10);
        CHECK(std::abs(m.total_measure() - std::abs(signed_area(p))) <= 1e-10);
    }
}

TEST_CASE("polygon mesh rejects bad input") {
    const Polygon bowtie{Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1)};
    CHECK_THROWS_AS(build_polygon_mesh(bowtie, 0.2), MeshError);
    CHECK_THROWS_AS(build_polygon_mesh(unit_square(), 0.0), MeshError);
    CHECK_THROWS_AS(build_polygon_mesh(unit_square(), -1.0), MeshError);
}

TEST_CASE("structured mesh invariants") {
    const Mesh m = build_unit_square_mesh(8);
    check_mesh_invariants(m);
    CHECK(m.num_cells() == 128);
    CHECK(std::abs(m.boundary_measure() - 4.0) <= 1e-12);
    const std::vector<double> bad{0.0, 0.5, 0.5, 1.0};
    const std::vector<double> ok{0.0, 1.0};
    CHECK_THROWS_AS(build_structured_mesh(bad, ok), MeshError);
}

TEST_CASE("mesh constructor rejects broken meshes") {
    const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(0, 1), Point(5, 5)};
    CHECK_THROWS_AS(Mesh(2, v, {Cell{0, 1, 2}}), MeshError);                  // orphan vertex
    CHECK_THROWS_AS(Mesh(2, {Point(0, 0), Point(1, 0), Point(2, 0)}, {Cell{0, 1, 2}}), MeshError);  // zero area
    const std::vector<Point> two{Point(0, 0), Point(1, 0), Point(0, 1), Point(3, 3), Point(4, 3), Point(3, 4)};
    CHECK_THROWS_AS(Mesh(2, two, {Cell{0, 1, 2}, Cell{3, 4, 5}}), MeshError);  // disconnected
    CHECK_THROWS_AS(Mesh(2, v, {Cell{0, 1, 7}}), MeshError);
}

TEST_CASE("cells are reoriented to positive area") {
    const Mesh m(2, {Point(0, 0), Point(1, 0), Point(0, 1)}, {Cell{0, 2, 1}});
    CHECK(m.cell_measure(0) == doctest::Approx(0.5));
    for (const auto& f : m.boundary_facets()) {
        const Point mid = 0.5 * (m.vertex(f.vertices[0]) + m.vertex(f.vertices[1]));
        const Point centroid = m.barycenter(0);
        CHECK(f.normal.dot(mid - centroid) > 0.0);
    }
}

TEST_CASE("chart map examples") {
    const BoundaryChart flat = BoundaryChart::flat(0.5);
    const Point p = chart_map_T(flat, 0.3, 0.2);
    CHECK(p.x() == doctest::Approx(0.3));
    CHECK(p.y() == doctest::Approx(0.2));
    CHECK(chart_map_T(flat, 0.3, 0.0).y() == 0.0);

    const BoundaryChart kink =
        BoundaryChart::make(Point::Zero(), Eigen::Matrix2d::Identity(), 0.5, PiecewiseLinear({-0.5, 0.0, 0.5}, {0.5, 0.0, 0.5}));
    const Point q = chart_map_T(kink, 0.2, 0.1);
    CHECK(q.x() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(q.y() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(kink.lipschitz_constant == doctest::Approx(1.0));

    CHECK_THROWS_AS(chart_map_T(flat, 0.6, 0.0), ChartDomainError);
    CHECK_THROWS_AS(chart_map_T(flat, 0.0, -0.5), ChartDomainError);
    CHECK_THROWS_AS(chart_map_T_inverse(flat, Point(0.0, 0.7)), ChartDomainError);
}

TEST_CASE("chart validation") {
    Eigen::Matrix2d skewed;
    skewed << 1.0, 0.1, 0.0, 1.0;
    CHECK_THROWS_AS(BoundaryChart::make(Point::Zero(), skewed, 0.5, PiecewiseLinear::constant(0, -0.5, 0.5)), MeshError);
    CHECK_THROWS_AS(BoundaryChart::make(Point::Zero(), Eigen::Matrix2d::Identity(), 0.5,
                                        PiecewiseLinear::constant(0, -0.4, 0.5)),
                    MeshError);
    CHECK_THROWS_AS(PiecewiseLinear({0.0, 0.0}, {1.0, 2.0}), MeshError);
}

TEST_CASE("chart map is invertible on random charts") {
    gen::Rng rng(11);
    for (int c = 0; c < 20; ++c) {
        const BoundaryChart ch = gen::chart(rng, rng.uniform(0.2, 2.0), rng.integer(1, 6), 3.0);
        const double r = ch.radius;
        for (int k = 0; k < 50; ++k) {
            const double y = rng.uniform(-r, r) * 0.999;
            const double s = rng.uniform(-r, r) * 0.999;
            const auto [y2, s2] = chart_map_T_inverse(ch, chart_map_T(ch, y, s));
            CHECK(std::abs(y2 - y) <= 1e-12 * (1 + r));
            CHECK(std::abs(s2 - s) <= 1e-12 * (1 + r));
        }
    }
}

TEST_CASE("piecewise linear samples respect the Lipschitz constant") {
    gen::Rng rng(3);
    for (int c = 0; c < 20; ++c) {
        const auto psi = gen::graph(rng, 1.0, rng.integer(1, 8), 4.0);
        const double lip = psi.lipschitz_constant();
        for (int k = 0; k < 200; ++k) {
            const double y1 = rng.uniform(-1, 1), y2 = rng.uniform(-1, 1);
            CHECK(std::abs(psi(y1) - psi(y2)) <= lip * std::abs(y1 - y2) + 1e-14);
        }
    }
}

TEST_CASE("chart cylinder membership agrees with the epigraph of the unit square bottom") {
    // Bottom edge of the unit square seen from (0.5, 0): domain is {s > 0}.
    const BoundaryChart ch = BoundaryChart::make(Point(0.5, 0.0), Eigen::Matrix2d::Identity(), 0.4,
                                                 PiecewiseLinear::constant(0.0, -0.4, 0.4));
    CHECK(count_chart_mismatches(ch, unit_square(), 2000, 42) == 0);
    // The same chart with a tilted graph misclassifies points.
    const BoundaryChart tilted = BoundaryChart::make(Point(0.5, 0.0), Eigen::Matrix2d::Identity(), 0.4,
                                                     PiecewiseLinear::linear(0.5, -0.4, 0.4));
    CHECK(count_chart_mismatches(tilted, unit_square(), 2000, 42) > 0);
}

TEST_CASE("trace restricts nodal values to the boundary") {
    auto m = std::make_shared<const Mesh>(build_unit_square_mesh(4));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m->num_vertices()));
    const Eigen::VectorXd t1 = trace(*m, ones);
    CHECK(t1.size() == 16);
    CHECK(t1.minCoeff() == 1.0);
    CHECK(t1.maxCoeff() == 1.0);

    const auto u = FemFunction::interpolate(m, [](const Point& p) { return p.x(); });
    const Eigen::VectorXd tx = trace(*m, u.values);
    const auto bv = m->boundary_vertices();
    for (std::size_t i = 0; i < bv.size(); ++i) CHECK(tx[static_cast<Eigen::Index>(i)] == m->vertex(bv[i]).x());
    CHECK_THROWS_AS(trace(*m, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("trace inequality with the discrete trace constant") {
    auto m = std::make_shared<const Mesh>(build_polygon_mesh(l_shape(), 0.2));
    const double c = discrete_trace_constant(*m);
    CHECK(c > 0.0);
    gen::Rng rng(5);
    for (int k = 0; k < 100; ++k) {
        const FemFunction u(m, gen::vector(rng, static_cast<Eigen::Index>(m->num_vertices())));
        CHECK(boundary_l2_norm(u) <= c * h1_norm(u) * (1 + 1e-10));
    }
}

TEST_CASE("mesh file round trip is exact") {
    for (const Mesh& m : {build_polygon_mesh(l_shape(), 0.3), build_interval_mesh(-1.0, 2.0, 7)}) {
        std::stringstream ss;
        write_mesh(ss, m);
        const Mesh back = read_mesh(ss);
        REQUIRE(back.num_vertices() == m.num_vertices());
        REQUIRE(back.num_cells() == m.num_cells());
        for (std::size_t i = 0; i < m.num_vertices(); ++i) CHECK(back.vertices()[i] == m.vertices()[i]);
        CHECK(back.cells() == m.cells());
        std::stringstream again;
        write_mesh(again, back);
        std::stringstream first;
        write_mesh(first, m);
        CHECK(again.str() == first.str());
    }
}

TEST_CASE("mesh file reader rejects inconsistent files") {
    std::istringstream wrong_normal("2\nv 0 0\nv 1 0\nv 0 1\nc 0 1 2\nbf 0 1 0 1\nbf 1 2 0.70710678118654757 0.70710678118654757\nbf 2 0 -1 0\n");
    CHECK_THROWS_AS(read_mesh(wrong_normal), MeshError);
    std::istringstream garbage("2\nv 0 0\nq 1 2\n");
    CHECK_THROWS_AS(read_mesh(garbage), MeshError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_mesh(empty), MeshError);
    std::istringstream one_d("1\nv 0\nv 1\nc 0 1\nbf 0 -1\nbf 1 1\n");
    const Mesh m = read_mesh(one_d);
    CHECK(m.boundary_facets().size() == 2);
}
