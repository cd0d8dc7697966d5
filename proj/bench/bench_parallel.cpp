// Serial vs OpenMP timings for the campaign and the grid-search oracle.
//
//   rpos_bench [trials_per_point] [threads]

#include "rpos/campaign.hpp"
#include "rpos/grid_search.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace {

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int trials = argc > 1 ? std::atoi(argv[1]) : 10;
  const int threads = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

  const auto s = rpos::default_scenario();
  rpos::CampaignConfig cfg;
  cfg.trials_per_point = trials;
  cfg.threads = threads;

  rpos::CampaignResult serial, parallel;
  const double ts = seconds([&] { serial = rpos::run_campaign_serial(s, cfg); });
  const double tp = seconds([&] { parallel = rpos::run_campaign(s, cfg); });
  std::printf("campaign  %zu trials x %zu methods  serial %.3fs  omp(%d) %.3fs  speedup %.2f  %s\n",
              serial.summary.trials, cfg.methods.size(), ts, threads, tp, ts / tp,
              serial.records == parallel.records ? "identical" : "MISMATCH");

  const auto sim = rpos::synthesize(s, s.ground_truth_points[10], rpos::trial_seed(1, 0));
  rpos::Measurements m = sim.measurements;
  const rpos::PackedObjective obj(rpos::Model::joint, m.toa, m.aoa, s.locators);
  rpos::GridSpec grid{rpos::Vec3(0, 0, 0), rpos::Vec3(20, 10, 3), 0.05};
  rpos::GridResult gs, gp;
  const double gs_t = seconds([&] { gs = rpos::grid_search_serial(obj, grid); });
  const double gp_t = seconds([&] { gp = rpos::grid_search(obj, grid, threads); });
  std::printf("grid      %zu nodes  serial %.3fs  omp(%d) %.3fs  speedup %.2f  %s\n", gs.evaluated,
              gs_t, threads, gp_t, gs_t / gp_t, gs.best == gp.best ? "identical" : "MISMATCH");
  return serial.records == parallel.records && gs.best == gp.best ? 0 : 1;
}
