#include "ebal/analysis.hpp"
#include "ebal/extended.hpp"
#include "ebal/gramians.hpp"
#include "ebal/reference_data.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace ebal;

namespace {

const LtiSystem& msd() {
  static const LtiSystem s = ph_to_lti(build_msd_example());
  return s;
}

void BM_sweep_parallel(benchmark::State& st) {
  const auto w = log_grid(1e-3, 1e3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sigma_max_sweep(msd(), w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sweep_serial(benchmark::State& st) {
  const auto w = log_grid(1e-3, 1e3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sigma_max_sweep_serial(msd(), w));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// find_scale evaluates its doubling grid with OpenMP; range(0) threads, 1 is the serial reference.
void BM_find_scale(benchmark::State& st) {
  const LtiSystem& s = msd();
  const Matrix eps = reference::msd_slack_c * Matrix::Identity(s.n(), s.n());
  const Matrix Pb = solve_lyapunov(s.A.transpose(), s.B * s.B.transpose() + eps);
  const Matrix Gc = reference::msd_gamma_c();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto r = find_scale<CtrlCertificate>([&](double b) { return build_ctrl_certificate(s, Pb, Gc, b); },
                                         [](const CtrlCertificate& c) { return c.margin; }, 1.0);
    benchmark::DoNotOptimize(r.scale);
  }
  omp_set_num_threads(saved);
}

void BM_lyapunov_bartels_stewart(benchmark::State& st) {
  const Matrix W = msd().B * msd().B.transpose() + Matrix::Identity(10, 10);
  for (auto _ : st) benchmark::DoNotOptimize(solve_lyapunov(msd().A, W));
}

void BM_lyapunov_kronecker(benchmark::State& st) {
  const Matrix W = msd().B * msd().B.transpose() + Matrix::Identity(10, 10);
  for (auto _ : st) benchmark::DoNotOptimize(solve_lyapunov_kronecker(msd().A, W));
}

}  // namespace

BENCHMARK(BM_sweep_parallel)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_sweep_serial)->Arg(256)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_find_scale)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lyapunov_bartels_stewart)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_lyapunov_kronecker)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
