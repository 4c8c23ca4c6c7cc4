// Microbenchmarks for the hot paths: measure pairing, spectral series
// evaluation, kernel transforms, cluster decomposition, and the almost-period
// scan.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "fqc/almost_periods.hpp"
#include "fqc/generators.hpp"
#include "fqc/harness.hpp"
#include "fqc/measures.hpp"
#include "fqc/probes.hpp"
#include "fqc/spectral.hpp"

namespace {

void bm_pair_measure(benchmark::State& state) {
  const auto comb = fqc::dirac_comb(1, 1.0, fqc::cplx(1.0, 0.0), {0.0},
                                    double(state.range(0)));
  const auto probe = fqc::ProbeFunction::standard_bump(1);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.125;
    if (t > 8.0) t = 0.0;
    benchmark::DoNotOptimize(fqc::pair_measure(comb.measure, probe, {t}, 1.0));
  }
}
BENCHMARK(bm_pair_measure)->Arg(256)->Arg(2048);

void bm_spectral_evaluate(benchmark::State& state) {
  const auto comb = fqc::dirac_comb(1, 1.0, fqc::cplx(1.0, 0.0), {0.0}, 64.0,
                                    double(state.range(0)));
  const auto probe = fqc::ProbeFunction::gaussian(1);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.3;
    if (t > 4.0) t = 0.0;
    benchmark::DoNotOptimize(fqc::spectral_evaluate(comb.spectrum, probe, {t}));
  }
}
BENCHMARK(bm_spectral_evaluate)->Arg(16)->Arg(64);

void bm_probe_fourier_bump(benchmark::State& state) {
  const auto probe = fqc::ProbeFunction::standard_bump(size_t(state.range(0)));
  double q = 0.3;
  for (auto _ : state) {
    q += 0.17;
    if (q > 6.0) q = 0.3;
    fqc::Point y(probe.dim(), 0.0);
    y[0] = q;
    benchmark::DoNotOptimize(
        fqc::probe_fourier(probe, y, fqc::TransformDirection::forward, 1e-9));
  }
}
BENCHMARK(bm_probe_fourier_bump)->Arg(1)->Arg(2)->Arg(3);

void bm_cluster_decompose(benchmark::State& state) {
  const double radius = double(state.range(0));
  const auto mu =
      fqc::dirac_comb(1, 1.0, fqc::cplx(1.0, 0.0), {0.0}, radius).measure;
  const auto nu =
      fqc::dirac_comb(1, 1.0, fqc::cplx(2.0, 0.0), {0.0}, radius).measure;
  const fqc::BallUnion domain({{{0.0}, radius}});
  for (auto _ : state)
    benchmark::DoNotOptimize(fqc::cluster_decompose(mu, nu, domain, 0.5));
}
BENCHMARK(bm_cluster_decompose)->Arg(128)->Arg(1024);

void bm_find_almost_periods(benchmark::State& state) {
  const double pitch = std::ldexp(1.0, -int(state.range(0)));
  std::vector<fqc::Sampled1D> family;
  family.emplace_back(
      [](double u) {
        return fqc::cplx(std::cos(2.0 * 3.141592653589793 * u), 0.0);
      },
      0.0, 40.0, pitch, 2.0 * 3.141592653589793);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fqc::find_almost_periods(family, 0.05, 1.0, 20.0, 4.0 * pitch));
}
BENCHMARK(bm_find_almost_periods)->Arg(8)->Arg(11);

}  // namespace

BENCHMARK_MAIN();
