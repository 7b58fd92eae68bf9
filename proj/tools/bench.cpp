// Benchmark of the OpenMP kernels against their plain-loop references.
// Each kernel runs both ways; the table reports timings, speedup, and the
// largest deviation between the two results (which must be negligible).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "hsl/char_sums.hpp"
#include "hsl/geometry.hpp"
#include "hsl/hidden_polynomial.hpp"
#include "hsl/hidden_radius.hpp"
#include "hsl/parallel.hpp"

using namespace hsl;

namespace {

using clock_type = std::chrono::steady_clock;

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = clock_type::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(clock_type::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial_s, double parallel_s, double max_dev) {
  std::printf("%-28s %10.1f ms %10.1f ms %7.2fx   %.2e\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, max_dev);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0, reps = 3;
  CLI::App app{"serial vs OpenMP kernel comparison"};
  app.add_option("--threads", threads, "thread count (default: all)");
  app.add_option("--reps", reps, "repetitions, best-of");
  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  std::printf("threads: %d\n", thread_count());
  std::printf("%-28s %13s %13s %9s   %s\n", "kernel", "serial", "openmp", "speedup",
              "max |diff|");

  {
    auto ctx = FieldCtx::parse("11");
    Grid grid(ctx, 5);  // 161051 points
    std::vector<PointIndex> ser, par;
    double ts = time_best_of(reps, [&] { ser = sphere_points_ref(grid, ctx->one()); });
    double tp = time_best_of(reps, [&] { par = sphere_points(grid, ctx->one()); });
    row("sphere-points q=11 d=5", ts, tp, ser == par ? 0.0 : 1.0);
  }

  {
    auto ctx = FieldCtx::parse("9");
    Grid grid(ctx, 3);
    double es = 0, ep = 0;
    double ts = time_best_of(reps, [&] { es = sphere_fourier_max_error_ref(grid); });
    double tp = time_best_of(reps, [&] { ep = sphere_fourier_max_error(grid); });
    row("sphere-fourier q=9 d=3", ts, tp, std::abs(es - ep));
  }

  {
    auto ctx = FieldCtx::parse("27");
    TvTable ser, par;
    double ts = time_best_of(reps, [&] { ser = min_pairwise_tv_ref(ctx, 3); });
    double tp = time_best_of(reps, [&] { par = min_pairwise_tv(ctx, 3); });
    double dev = 0;
    for (std::size_t i = 0; i < ser.tv.size(); ++i)
      dev = std::max(dev, std::abs(ser.tv[i] - par.tv[i]));
    row("tv-table q=27 d=3", ts, tp, dev);
  }

  {
    auto ctx = FieldCtx::parse("11");
    std::vector<ClassifierSuccess> ser, par;
    double ts =
        time_best_of(reps, [&] { ser = classifier_success_rates_ref(ctx, 3, 20, 400, 7); });
    double tp = time_best_of(reps, [&] { par = classifier_success_rates(ctx, 3, 20, 400, 7); });
    double dev = 0;
    for (std::size_t i = 0; i < ser.size(); ++i)
      dev = std::max(dev, std::abs(ser[i].rate - par[i].rate));
    row("classifier-mc q=11 d=3", ts, tp, dev);
  }

  {
    auto ctx = FieldCtx::parse("7");
    CensusReport ser, par;
    double ts = time_best_of(reps, [&] { ser = typicality_census_ref(ctx, 2, 1u << 20, 7); });
    double tp = time_best_of(reps, [&] { par = typicality_census(ctx, 2, 1u << 20, 7); });
    row("census q=7 t=2", ts, tp,
        std::abs(static_cast<double>(ser.failing) - static_cast<double>(par.failing)));
  }

  {
    auto ctx = FieldCtx::parse("1009");
    SatoTateHistogram ser, par;
    double ts = time_best_of(reps, [&] { ser = sato_tate_histogram_ref(*ctx, 20); });
    double tp = time_best_of(reps, [&] { par = sato_tate_histogram(*ctx, 20); });
    double dev = std::abs(ser.l1_to_semicircle - par.l1_to_semicircle);
    for (std::size_t i = 0; i < ser.bins.size(); ++i)
      dev = std::max(dev, std::abs(static_cast<double>(ser.bins[i] - par.bins[i])));
    row("sato-tate q=1009", ts, tp, dev);
  }

  return 0;
}
