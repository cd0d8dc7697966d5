#pragma once

#include "rpos/likelihood.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rpos {

/// Axis-aligned lattice lo + i * step, inclusive of hi where it falls on a node.
struct GridSpec {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  double step = 0.05;  // m
};

struct GridResult {
  Vec3 best = Vec3::Zero();
  double value = 0.0;
  std::size_t evaluated = 0;
};

/// Profiled log-likelihood in flat arrays, for brute-force evaluation.
/// Agrees with profiled_log_likelihood() to rounding.
class PackedObjective {
 public:
  PackedObjective(Model model, std::span<const ToaMeasurement> toa,
                  std::span<const AoaMeasurement> aoa, std::span<const Locator> locators);

  /// -inf where x coincides with an active locator.
  double operator()(const Vec3& x) const;

 private:
  std::vector<double> toa_px_, toa_py_, toa_pz_, range_, weight_;
  std::vector<double> aoa_px_, aoa_py_, aoa_pz_, gx_, gy_, gz_, kappa_;
  double weight_sum_ = 0.0;
};

/// Exhaustive maximization over the lattice. Ties go to the lowest linear
/// index (x fastest), so the result does not depend on the thread count.
GridResult grid_search(const PackedObjective& objective, const GridSpec& grid, int threads = 0);

/// Single-threaded reference of grid_search.
GridResult grid_search_serial(const PackedObjective& objective, const GridSpec& grid);

}  // namespace rpos
