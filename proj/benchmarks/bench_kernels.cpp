#include <benchmark/benchmark.h>

#include "bubbly/greens.hpp"
#include "bubbly/operators.hpp"
#include "bubbly/spectral.hpp"

using namespace bubbly;

namespace {

const Lattice& honeycomb() {
  static const Lattice lat = make_lattice(LatticeKind::Honeycomb, 1.0);
  return lat;
}

const BoundaryBasis& basis() {
  static const DimerGeometry geo = make_dimer(honeycomb(), 0.2);
  return geo.basis;
}

GreensParams params(GreensMethod method) {
  GreensParams p;
  p.lattice = honeycomb();
  p.alpha = dirac_point(honeycomb());
  p.k = 0.5;
  p.method = method;
  return p;
}

void BM_GreenEwald(benchmark::State& state) {
  const GreensParams p = params(GreensMethod::Ewald);
  const Vec2 x(0.31, 0.17);
  for (auto _ : state) benchmark::DoNotOptimize(green_value(p, x));
}
BENCHMARK(BM_GreenEwald);

void BM_GreenSpectral(benchmark::State& state) {
  const GreensParams p = params(GreensMethod::Spectral);
  const Vec2 x(0.31, 0.17);
  for (auto _ : state) benchmark::DoNotOptimize(green_value(p, x));
}
BENCHMARK(BM_GreenSpectral);

// Reused Ewald sum: the per-point cost inside the layer-potential loops.
void BM_EwaldSumEval(benchmark::State& state) {
  const EwaldSum sum(honeycomb(), dirac_point(honeycomb()).alpha, 1.0);
  const Vec2 x(0.31, 0.17);
  for (auto _ : state) benchmark::DoNotOptimize(sum.eval(0.5, x));
}
BENCHMARK(BM_EwaldSumEval);

void BM_KernelTableBuild(benchmark::State& state) {
  const Vec2 alpha = dirac_point(honeycomb()).alpha;
  for (auto _ : state) {
    KernelTable table(basis(), alpha);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_KernelTableBuild)->Unit(benchmark::kMillisecond);

// One objective evaluation of the characteristic-value search.
void BM_SigmaMin(benchmark::State& state) {
  const KernelTable table(basis(), dirac_point(honeycomb()).alpha);
  const Material material;
  for (auto _ : state) benchmark::DoNotOptimize(sigma_min(assemble_A(table, material, 0.246)));
}
BENCHMARK(BM_SigmaMin)->Unit(benchmark::kMillisecond);

void BM_BandPointAtK(benchmark::State& state) {
  const QuasiMomentum k = dirac_point(honeycomb());
  for (auto _ : state) benchmark::DoNotOptimize(solve_bands(basis(), Material{}, k));
}
BENCHMARK(BM_BandPointAtK)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
