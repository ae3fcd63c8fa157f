// Serial reference against the OpenMP kernels: projector sups over a region
// and band construction on both surfaces.

#include <benchmark/benchmark.h>

#include <cmath>

#include "caustica/bands.hpp"
#include "caustica/disk.hpp"
#include "caustica/norms.hpp"
#include "caustica/revolution.hpp"

using namespace caustica;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void set_label(benchmark::State& state) { state.SetLabel(state.range(1) ? "openmp" : "serial"); }

void BM_DiskSup(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) + 0.137;
  const double delta = std::pow(lambda, -1.0 / 3.0);
  const Cutoff cutoff;
  const DiskModes family(disk_band_spectrum(lambda, delta, cutoff, 0.0, nullptr, Exec::parallel));
  const Band band = assemble_band(family, lambda, delta, cutoff);
  const Region region = Region::disk_annulus(0.3, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(sup_over_region(band, family, region, exec_of(state)).sup);
  set_label(state);
}

void BM_DiskBand(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) + 0.137;
  const double delta = std::pow(lambda, -1.0 / 3.0);
  const Cutoff cutoff;
  for (auto _ : state)
    benchmark::DoNotOptimize(disk_band_spectrum(lambda, delta, cutoff, 0.0, nullptr, exec_of(state)).size());
  set_label(state);
}

void BM_RevolutionBand(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) + 0.137;
  const double delta = std::pow(lambda, -1.0 / 3.0);
  const RevolutionProfile profile = RevolutionProfile::perturbed(0.1);
  RevBandOptions options;
  options.exec = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(rev_band_spectrum(profile, lambda, delta, Cutoff{}, 0.05, options).size());
  set_label(state);
}

}  // namespace

BENCHMARK(BM_DiskSup)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiskBand)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RevolutionBand)->ArgsProduct({{60}, {0, 1}})->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
