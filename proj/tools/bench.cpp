#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnet/assemble.hpp"
#include "bnet/kernels.hpp"
#include "bnet/rng.hpp"

// Times the parallel batch kernels against their serial reference
// implementations on the same inputs and confirms the outputs agree bitwise.

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

long mismatches(const std::vector<double>& a, const std::vector<double>& b) {
  long bad = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++bad;
  return bad;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  long points = 20000;
  int reps = 5;
  int threads = 0;
  app.add_option("--points", points, "evaluation points per kernel");
  app.add_option("--reps", reps, "repetitions (best time kept)");
  app.add_option("--threads", threads, "thread count (0 = library default)");
  CLI11_PARSE(app, argc, argv);

  if (threads > 0) bnet::set_threads(threads);
  std::printf("threads available: %d\n", bnet::max_threads());

  bnet::Rng rng(20240831);

  // Workload 1: spline series evaluation. A 2-d coefficient set around a
  // thousand basis functions is representative of the approximation sweeps.
  bnet::BesovParams params;
  params.p = 2.0;
  params.q = 2.0;
  params.m = 2;
  params.s = bnet::SmoothnessVector{{0.5, 1.0}};
  auto coeffs = bnet::sample_besov_ball(rng, params, 4, 1.0);

  std::vector<std::vector<double>> pts2(std::size_t(points), std::vector<double>(2));
  for (auto& p : pts2)
    for (double& v : p) v = rng.uniform01();

  std::vector<double> serial, parallel;
  const double t_ser_exp = best_of(reps, [&] {
    serial = bnet::expansion_eval_batch_serial(coeffs, pts2);
  });
  const double t_par_exp = best_of(reps, [&] {
    parallel = bnet::expansion_eval_batch(coeffs, pts2);
  });
  std::printf("expansion_eval_batch  n=%ld  serial %.4fs  parallel %.4fs  speedup %.2fx  mismatches %ld\n",
              points, t_ser_exp, t_par_exp, t_ser_exp / t_par_exp,
              mismatches(serial, parallel));

  // Workload 2: network forward pass over the same point cloud, using a
  // compiled B-spline unit so the depth and sparsity are realistic.
  auto build = bnet::bspline_net(2, 2, bnet::gadget_budget(1e-3));
  const double t_ser_net = best_of(reps, [&] {
    serial = bnet::forward_batch_serial(build.net, pts2);
  });
  const double t_par_net = best_of(reps, [&] {
    parallel = bnet::forward_batch(build.net, pts2);
  });
  std::printf("forward_batch         n=%ld  serial %.4fs  parallel %.4fs  speedup %.2fx  mismatches %ld\n",
              points, t_ser_net, t_par_net, t_ser_net / t_par_net,
              mismatches(serial, parallel));
  return 0;
}
