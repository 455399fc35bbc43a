#include <memory>

#include <benchmark/benchmark.h>

#include "robinlab/assembly.hpp"
#include "robinlab/counterexample.hpp"
#include "robinlab/elliptic.hpp"
#include "robinlab/reflect.hpp"

using namespace robinlab;

namespace {

void BM_AssembleCheckerboard(benchmark::State& state) {
    const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(static_cast<int>(state.range(0))));
    const auto field = checkerboard_coefficients(100.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_robin_form(mesh, field));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(mesh->num_vertices()));
}
BENCHMARK(BM_AssembleCheckerboard)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_SolveRobin(benchmark::State& state) {
    const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(static_cast<int>(state.range(0))));
    const auto form = assemble_robin_form(mesh, with_beta(identity_coefficients(2), 1.0));
    RhsData data;
    data.f0 = [](const Point&) { return 1.0; };
    const auto rhs = assemble_rhs(*mesh, data);
    for (auto _ : state) benchmark::DoNotOptimize(solve_robin(form, rhs, 1.0));
}
BENCHMARK(BM_SolveRobin)->RangeMultiplier(2)->Range(16, 128);

void BM_CoercivityShift(benchmark::State& state) {
    Eigen::Matrix2d a;
    a << 1.0, 0.5, -0.5, 1.0;
    const auto field = constant_coefficients(2, a, Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), 0.0, -0.5);
    const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(static_cast<int>(state.range(0))));
    const auto form = assemble_robin_form(mesh, field);
    for (auto _ : state) benchmark::DoNotOptimize(find_coercivity_shift(form, 0.5));
}
BENCHMARK(BM_CoercivityShift)->Arg(16)->Arg(32);

void BM_HolderEstimate(benchmark::State& state) {
    std::vector<FemFunction> levels;
    for (int n : {8, 16, 32}) {
        const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(n));
        const auto form = assemble_robin_form(mesh, identity_coefficients(2));
        RhsData data;
        data.f0 = [](const Point& x) { return x.x() < 0.5 ? 1.0 : -1.0; };
        levels.push_back(solve_robin(form, assemble_rhs(*mesh, data), 1.0));
    }
    for (auto _ : state) benchmark::DoNotOptimize(estimate_holder_exponent(levels));
}
BENCHMARK(BM_HolderEstimate);

void BM_ReflectionJacobian(benchmark::State& state) {
    const auto chart = BoundaryChart::make(Point::Zero(), Eigen::Matrix2d::Identity(), 1.0,
                                           PiecewiseLinear({-1.0, -0.2, 0.4, 1.0}, {0.0, 0.3, -0.1, 0.2}));
    const ReflectionOperator op(chart);
    Point x(0.1, 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(op.jacobian(x));
        benchmark::DoNotOptimize(x = op.reflect(x));
    }
}
BENCHMARK(BM_ReflectionJacobian);

void BM_Counterexample(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(verify_counterexample(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_Counterexample)->Arg(1)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
