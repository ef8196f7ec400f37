// Compares the serial reference kernels against the OpenMP versions on
// regression-sized problems and reports timings plus the max deviation
// (which must be exactly zero: the parallel kernels partition work so the
// summation order matches the serial ones).

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include <omp.h>

#include "panelaudit/kernels.hpp"

using namespace panelaudit;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()> &fn, int reps) {
  fn(); // warm-up
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main() {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;

  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-28s %10s %10s %9s %10s\n", "kernel", "serial ms", "omp ms",
              "speedup", "max |diff|");

  for (auto [n, p] : {std::pair{8000, 120}, {20000, 200}, {50000, 300}}) {
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) x(i, j) = gauss(rng);
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e(i) = gauss(rng);
    std::vector<int> cluster(n);
    const int g = 200;
    for (int i = 0; i < n; ++i) cluster[i] = i % g;

    Eigen::MatrixXd a, b;
    const double t_xs = time_ms([&] { a = kernels::crossprod_serial(x); }, 3);
    const double t_xp = time_ms([&] { b = kernels::crossprod_omp(x); }, 3);
    std::printf("%-28s %10.2f %10.2f %8.2fx %10.2e\n",
                ("crossprod " + std::to_string(n) + "x" + std::to_string(p))
                    .c_str(),
                t_xs, t_xp, t_xs / t_xp, (a - b).cwiseAbs().maxCoeff());

    const double t_ms_ = time_ms(
        [&] { a = kernels::cluster_meat_serial(x, e, cluster, g); }, 3);
    const double t_mp = time_ms(
        [&] { b = kernels::cluster_meat_omp(x, e, cluster, g); }, 3);
    std::printf("%-28s %10.2f %10.2f %8.2fx %10.2e\n",
                ("cluster_meat " + std::to_string(n) + "x" +
                 std::to_string(p))
                    .c_str(),
                t_ms_, t_mp, t_ms_ / t_mp, (a - b).cwiseAbs().maxCoeff());
  }
  return 0;
}
