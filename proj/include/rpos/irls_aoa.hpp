#pragma once

#include "rpos/core.hpp"

#include <span>
#include <vector>

namespace rpos {

// Bearing-only IRLS initializer: weighted least-squares intersection of
// bearing lines, reweighted with Andrews' sine function of each bearing's
// angular residual. The loop structure mirrors the TDoA IRLS.

struct BearingLine {
  Vec3 anchor = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit, global frame
  double weight = 1.0;
};

struct IrlsAoaParams {
  int max_iterations = 10;
  double epsilon = 1e-5;    // m
  double e_max = 0.2;       // rad
};

IrlsAoaParams aoa_params(const AlgorithmParams& params);

/// Point minimizing sum_k w_k * dist(x, line_k)^2.
/// Throws EstimationError(degenerate_geometry) if fewer than two weighted,
/// non-parallel lines remain.
Vec3 bearing_ls_position(std::span<const BearingLine> lines);

/// Angle in [0, pi] between the bearing and the ray from its anchor to x.
double angular_residual(const BearingLine& line, const Vec3& x);

struct IrlsAoaResult {
  PositionEstimate estimate;  // weights_aoa holds the final Andrews weights
  std::vector<double> residuals;
  double delta = 0.0;
};

/// Output weights are index-aligned with `locators`; locators without an
/// AoA measurement get weight 0.
IrlsAoaResult irls_aoa(std::span<const Locator> locators, std::span<const AoaMeasurement> aoa,
                       const IrlsAoaParams& params);

}  // namespace rpos
