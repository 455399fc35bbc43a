#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "generators.hpp"
#include "robinlab/config.hpp"
#include "robinlab/report.hpp"

using namespace robinlab;

TEST_CASE("defaults round-trip") {
    const ProblemConfig def;
    const std::string text = def.to_string();
    CHECK(text.rfind("[domain]\nkind = unit_square\n", 0) == 0);
    CHECK(ProblemConfig::parse_string(text) == def);
    CHECK(ProblemConfig::parse_string(text).hash() == def.hash());
    CHECK(ProblemConfig::parse_string("") == def);
}

TEST_CASE("parsing a hand-written config") {
    const auto cfg = ProblemConfig::parse_string(R"(
# comment
[domain]
kind = interval
a = -1
b = 1
h = 0.01

[coefficients]
family = sgn_drift
beta = 0.25

[boundary]
model = wentzell

[evolution]
scheme = cn
dt = 1e-5
t_end = 2e-4
lumped = false
)");
    CHECK(cfg.domain == "interval");
    CHECK(cfg.a == -1.0);
    CHECK(cfg.family == "sgn_drift");
    CHECK(cfg.model == BoundaryModel::Wentzell);
    CHECK(cfg.scheme == Scheme::CrankNicolson);
    CHECK_FALSE(cfg.lumped);
    CHECK(problem_dim(cfg) == 1);
    CHECK(build_problem_mesh(cfg).num_cells() == 200);
    const auto field = build_problem_field(cfg);
    CHECK(field.dim == 1);
    CHECK(field.beta(Point(1, 0)) == 0.25);
    const auto ev = build_evolution_config(cfg);
    CHECK(ev.steps() == 20);
    CHECK(ev.model == BoundaryModel::Wentzell);
}

TEST_CASE("random configs round-trip exactly") {
    gen::Rng rng(88);
    const char* families[] = {"constant", "checkerboard", "linear_drift"};
    for (int k = 0; k < 200; ++k) {
        ProblemConfig c;
        c.family = families[rng.integer(0, 2)];
        c.a11 = rng.uniform(0.1, 10);
        c.a12 = rng.uniform(-1, 1);
        c.b1 = rng.uniform(-1, 1) * 1e-7;
        c.d = rng.uniform(-1, 1) / 3.0;
        c.beta = rng.uniform(-5, 5);
        c.contrast = rng.uniform(1, 1000);
        c.tiles = rng.integer(1, 16);
        c.h = rng.uniform(0.01, 0.5);
        c.f0 = rng.integer(0, 1) ? "cos" : "sign_split";
        c.omega_policy = rng.integer(0, 1) ? "auto" : "fixed";
        c.model = rng.integer(0, 1) ? BoundaryModel::Robin : BoundaryModel::Wentzell;
        c.lumped = rng.integer(0, 1) == 1;
        if (rng.integer(0, 1)) {
            c.domain = "polygon";
            c.polygon = {Point(0, 0), Point(rng.uniform(1, 2), 0), Point(1, rng.uniform(1, 2)), Point(0, 1)};
        }
        const auto back = ProblemConfig::parse_string(c.to_string());
        CHECK(back == c);
        CHECK(back.to_string() == c.to_string());
    }
}

TEST_CASE("invalid configs are rejected") {
    const char* bad[] = {
        "[nowhere]\nx = 1\n",
        "[domain]\nsize = 3\n",
        "kind = interval\n",
        "[domain]\nh = 0.1\nh = 0.2\n",
        "[domain]\nh = abc\n",
        "[domain]\nh = -1\n",
        "[domain]\nh\n",
        "[domain\nh = 1\n",
        "[domain]\nkind = torus\n",
        "[domain]\nkind = interval\na = 1\nb = 0\n",
        "[domain]\nkind = polygon\nvertices = 0 0; 1 0\n",
        "[domain]\nkind = polygon\nvertices = 0 0; 1 1; 1 0; 0 1\n",
        "[coefficients]\nfamily = sgn_drift\n",
        "[domain]\nkind = interval\n[coefficients]\nfamily = checkerboard\n",
        "[coefficients]\nfamily = checkerboard\ncontrast = 0.5\n",
        "[coefficients]\ntiles = 2.5\n",
        "[coefficients]\nfamily = custom_table\n",
        "[shift]\neta = 0\n",
        "[evolution]\ndt = 0.1\nt_end = 0.01\n",
        "[evolution]\nlumped = yes\n",
        "[domain]\nh = inf\n",
        "[domain]\nh = 1e999\n",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(ProblemConfig::parse_string(text), ConfigError);
    }
    CHECK_THROWS_AS(ProblemConfig::load("/nonexistent/robinlab.cfg"), ConfigError);
}

TEST_CASE("config files and value tables load from disk") {
    const std::string table = "robinlab_test_table.txt";
    const std::string cfg_path = "robinlab_test.cfg";
    {
        std::ofstream t(table);
        t << "2 1 0 1 0 1\n1 50\n";
        std::ofstream c(cfg_path);
        c << "[coefficients]\nfamily = custom_table\ntable = " << table << "\n";
    }
    const auto cfg = ProblemConfig::load(cfg_path);
    const auto field = build_problem_field(cfg);
    CHECK(field.a(Point(0.75, 0.5))(0, 0) == 50.0);
    std::remove(table.c_str());
    std::remove(cfg_path.c_str());
}

TEST_CASE("problem builders") {
    ProblemConfig c;
    c.h = 0.25;
    CHECK(build_problem_mesh(c).num_cells() == 32);
    c.domain = "l_shape";
    const Mesh l = build_problem_mesh(c);
    CHECK(l.total_measure() == doctest::Approx(0.75).epsilon(1e-12));
    c.domain = "unit_square";
    c.f0 = "sign_split";
    c.f0_value = 2.0;
    const auto rhs = build_problem_rhs(c);
    CHECK(rhs.f0(Point(0.2, 0.5)) == 2.0);
    CHECK(rhs.f0(Point(0.7, 0.5)) == -2.0);
    CHECK_FALSE(rhs.g);
    CHECK_FALSE(rhs.f);
    c.g = 1.5;
    c.f1 = 1.0;
    const auto rhs2 = build_problem_rhs(c);
    CHECK(rhs2.g(Point(0, 0)) == 1.5);
    CHECK(rhs2.f(Point(0, 0)) == Eigen::Vector2d(1.0, 0.0));
    c.family = "linear_drift";
    c.gain = 0.3;
    CHECK(build_problem_field(c).b_lipschitz.value() == doctest::Approx(0.3));
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("report CSV layout") {
    Report r("evolve", 0xabcull, 42, {"t", "L2", "verdict"});
    r.add_row({0.1, 1.0 / 3.0, std::string("ok")});
    r.add_row({0.2, 1e-300, std::string("violated")});
    const std::string csv = r.to_csv();
    CHECK(csv ==
          "# config=0000000000000abc seed=42 command=evolve version=0.3.0\n"
          "t,L2,verdict\n"
          "0.10000000000000001,0.33333333333333331,ok\n"
          "0.20000000000000001,1e-300,violated\n");
    CHECK_THROWS_AS(r.add_row({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(r.add_row({1.0, 2.0, std::string("a,b")}), std::invalid_argument);
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(-0.5) == "-0.5");
}
