// Microbenchmarks for the hot paths: flow sampling, chord assembly,
// transported forms and the nonlinear residual.
#include <benchmark/benchmark.h>

#include "efem/field_catalog.hpp"
#include "efem/operators.hpp"
#include "efem/spaces.hpp"

using namespace efem;

namespace {

EvolvingMesh<2> bench_mesh(int n) {
  FieldParams fp;
  fp.rate = 0.15;
  fp.omega = 0.7;
  return EvolvingMesh<2>(
      build_circle_mesh(1.0, n),
      FlowMap<2>(make_field<2>("rotating-circle", fp, 1.0), 1.0, 64));
}

void BM_FlowSample(benchmark::State& state) {
  FieldParams fp;
  fp.amplitude = 0.25;
  fp.frequency = 1.5;
  FlowMap<2> flow(make_field<2>("radial-circle", fp, 1.0), 1.0,
                  static_cast<int>(state.range(0)));
  const Vec<2> p(1.0, 0.0);
  const Vec<2> tau(0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(flow.sample(p, 0.8, tau).jdet);
}
BENCHMARK(BM_FlowSample)->Arg(64)->Arg(256);

void BM_AssembleMass(benchmark::State& state) {
  auto mesh = bench_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_mass(mesh, 0.5).sum());
}
BENCHMARK(BM_AssembleMass)->Arg(64)->Arg(256)->Arg(1024);

void BM_TransportedForms(benchmark::State& state) {
  auto mesh = bench_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(transported_forms(mesh, 0.5).mass_J.sum());
}
BENCHMARK(BM_TransportedForms)->Arg(64)->Arg(256);

void BM_PLaplaceResidual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto mesh = bench_mesh(n);
  OperatorSpec op;
  op.kind = OperatorKind::PLaplace;
  op.p = 3.0;
  op.epsilon = 1e-8;
  op.alpha = 0.5;
  Vector u(n);
  for (int i = 0; i < n; ++i)
    u[i] = std::sin(mesh.reference().node_parameter[i]);
  for (auto _ : state)
    benchmark::DoNotOptimize(nonlinear_residual(op, mesh, 0.5, u).sum());
}
BENCHMARK(BM_PLaplaceResidual)->Arg(64)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
