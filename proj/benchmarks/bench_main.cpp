#include <memory>

#include <benchmark/benchmark.h>

#include "mgt/fem.hpp"
#include "mgt/harness.hpp"
#include "mgt/integrator.hpp"
#include "mgt/models.hpp"

using namespace mgt;

namespace {

std::shared_ptr<const Mesh> mesh_for(int dim, int n) {
  if (dim == 1) return std::make_shared<const Mesh>(interval_mesh(0.4, n));
  return std::make_shared<const Mesh>(square_triangle_mesh(0.5, 0.5 / n));
}

void BM_Assemble(benchmark::State& state) {
  const auto mesh = mesh_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mesh));
  state.counters["nodes"] = static_cast<double>(mesh->n_nodes());
}
BENCHMARK(BM_Assemble)->Args({1, 600})->Args({2, 50})->Args({2, 100})->Unit(benchmark::kMicrosecond);

void BM_StepFactorization(benchmark::State& state) {
  const auto ops = std::make_shared<const FemOperators>(
      assemble(mesh_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)))));
  const MediumParams m = water(1.5e-5, 1e-2);
  for (auto _ : state) benchmark::DoNotOptimize(LinearStepper(ops, m, 5e-7, NewmarkParams{}));
}
BENCHMARK(BM_StepFactorization)->Args({1, 600})->Args({2, 50})->Unit(benchmark::kMicrosecond);

void BM_LinearStep(benchmark::State& state) {
  const auto ops = std::make_shared<const FemOperators>(
      assemble(mesh_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)))));
  const LinearStepper stepper(ops, water(1.5e-5, 1e-2), 5e-7, NewmarkParams{});
  AcousticState s = AcousticState::zero(ops->n_nodes);
  s.u = ops->extend_to_full(Vector::Ones(ops->n_interior()));
  const Vector load = Vector::Zero(ops->n_interior());
  for (auto _ : state) {
    s = stepper.step(s, load);
    benchmark::DoNotOptimize(s.u.data());
  }
}
BENCHMARK(BM_LinearStep)->Args({1, 600})->Args({2, 50})->Unit(benchmark::kMicrosecond);

void BM_WesterveltStep(benchmark::State& state) {
  const ProblemSpec spec = channel_1d_scenario(0.0, 1.5e-5);
  const auto ops = build_operators(spec);
  const NewmarkParams p;
  const double dt = stable_dt(spec.medium, 1e-2, ops->mesh->h(), p, spec.final_time).dt;
  const NonlinearStepper stepper(ops, spec.medium, spec.nonlin, NonlinearModel::westervelt, dt, p);
  const InitialFields init = sample_initial(spec, *ops->mesh);
  const AcousticState s0 = stepper.initial_state(init.u0, init.u1, init.u2, nullptr);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s0, nullptr));
}
BENCHMARK(BM_WesterveltStep)->Unit(benchmark::kMicrosecond);

void BM_ChannelRun(benchmark::State& state) {
  const ProblemSpec spec = channel_1d_scenario(1e-3, 1.5e-5);
  const auto ops = build_operators(spec);
  const NewmarkParams p;
  const TimeGrid grid = stable_dt(spec.medium, 1e-2, ops->mesh->h(), p, spec.final_time);
  for (auto _ : state) benchmark::DoNotOptimize(run_problem(spec, grid, p, {}, ops));
  state.counters["steps"] = static_cast<double>(grid.steps);
}
BENCHMARK(BM_ChannelRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
