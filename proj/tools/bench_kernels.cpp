// Timing comparison of the OpenMP loss kernels against the serial reference
// on synthetic large instances. Usage: ppfit_bench [points] [segments] [reps]
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ppfit/io.hpp"
#include "ppfit/losses.hpp"
#include "ppfit/serial_ref.hpp"

using namespace ppfit;

namespace {

PiecewisePolynomial random_model(std::size_t segments, int degree,
                                 SplitMix64& rng) {
  std::vector<double> coeffs(segments * static_cast<std::size_t>(degree + 1));
  for (double& c : coeffs) c = 4.0 * rng.unit() - 2.0;
  return PiecewisePolynomial(Breakpoints::uniform(segments, 0.0, 1.0), degree,
                             std::move(coeffs));
}

Dataset make_points(std::size_t n, SplitMix64& rng) {
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = 2.0 * rng.unit() - 1.0;
  }
  return Dataset(std::move(x), std::move(y));
}

template <typename F>
double time_best(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    f();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best * 1e3;  // ms
}

volatile double sink;

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::stoull(argv[1]) : 2'000'000;
  const std::size_t m = argc > 2 ? std::stoull(argv[2]) : 4096;
  const int reps = argc > 3 ? std::stoi(argv[3]) : 5;
  const int degree = 7;

  SplitMix64 rng(42);
  const PiecewisePolynomial pp = random_model(m, degree, rng);
  const Dataset data = make_points(n, rng);
  const ContinuityMode mode{ContinuityMode::Kind::periodic, 2};
  const ObjectiveWeights w{0.2, 0.5};

  std::printf("threads=%d points=%zu segments=%zu degree=%d reps=%d\n",
              omp_get_max_threads(), n, m, degree, reps);
  std::printf("%-18s %12s %12s %9s\n", "kernel", "reference ms", "openmp ms",
              "ratio");

  const auto row = [&](const char* name, double ts, double tp) {
    std::printf("%-18s %12.2f %12.2f %8.2fx\n", name, ts, tp, ts / tp);
  };

  row("loss_l2", time_best(reps, [&] { sink = serial::loss_l2(pp, data); }),
      time_best(reps, [&] { sink = loss_l2(pp, data); }));
  row("loss_energy",
      time_best(reps, [&] { sink = serial::loss_energy(pp); }),
      time_best(reps, [&] { sink = loss_energy(pp); }));
  const EnergyKernel cached(pp.breakpoints(), pp.degree());
  row("energy (cached G)",
      time_best(reps, [&] { sink = serial::loss_energy(pp); }),
      time_best(reps, [&] { sink = cached.value(pp.coeffs()); }));
  row("energy_quad(64)",
      time_best(reps, [&] { sink = serial::energy_quadrature(pp, 64); }),
      time_best(reps, [&] { sink = energy_quadrature(pp, 64); }));
  row("gradient",
      time_best(reps,
                [&] { sink = serial::scalarized_gradient(pp, data, mode, w)[0]; }),
      time_best(reps,
                [&] { sink = scalarized_gradient(pp, data, mode, w)[0]; }));

  // consistency spot check
  const double a = loss_energy(pp);
  const double b = serial::loss_energy(pp);
  std::printf("energy rel diff vs serial: %.3e\n",
              std::abs(a - b) / std::max(1.0, std::abs(a)));
  return 0;
}
