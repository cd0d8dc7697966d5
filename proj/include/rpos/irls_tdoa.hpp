#pragma once

#include "rpos/core.hpp"

#include <span>
#include <vector>

namespace rpos {

/// Reference-free iteratively reweighted TDoA positioning.
///
/// Every locator serves once as the TDoA reference; the K single-reference
/// WLS fixes are blended by normalized weights, and the weights are redrawn
/// from Andrews' sine function of each reference's mean TDoA residual
/// against the blended position. References whose residual exceeds e_max get
/// weight zero and drop out of every other reference's system as well.
///
/// `ranges`, `weights`, and the returned per-locator vectors are index
/// aligned with `locators`. The reference `r` is a 0-based locator index.

struct IrlsParams {
  int max_iterations = 10;  // N_it
  double epsilon = 1e-5;    // m
  double e_max = 2.5;       // m
  /// If nonzero, only the `subset_size` locators with the smallest ranges
  /// take part (the others get weight 0 throughout).
  int subset_size = 0;
};

IrlsParams tdoa_params(const AlgorithmParams& params);

struct TdoaLinearSystem {
  int reference = 0;
  Eigen::MatrixX4d matrix_a;     // (K-1) x 4, rows in ascending locator order
  Eigen::VectorXd vector_b;      // K-1
  Eigen::VectorXd row_weights;   // K-1
};

struct IrlsState {
  Vec3 estimate = Vec3::Zero();  // weighted-average position
  std::vector<double> weights;   // Andrews weights, in [0, 1]
  std::vector<double> residuals; // mean TDoA residual per reference, m
  int iteration = 0;
  double delta = 0.0;            // m
};

struct IrlsTdoaResult {
  PositionEstimate estimate;       // weights_toa holds the final weights
  std::vector<double> normalized_weights;
  std::vector<Vec3> reference_estimates;
  IrlsState state;
};

/// d_k - d_r for k != r, ascending k.
Eigen::VectorXd distance_differences(std::span<const double> ranges, int r);

TdoaLinearSystem build_system(std::span<const Locator> locators, std::span<const double> ranges,
                              std::span<const double> weights, int r);

/// p_r plus the first three entries of the WLS solution.
/// Throws EstimationError(degenerate_geometry) if the normal matrix is
/// singular or its condition number reaches 1e12.
Vec3 wls_reference_estimate(const TdoaLinearSystem& system, std::span<const Locator> locators);

/// Throws EstimationError(all_rejected) if every weight is zero.
std::vector<double> normalize_weights(std::span<const double> weights);

Vec3 weighted_average(std::span<const Vec3> estimates, std::span<const double> normalized_weights);

std::vector<double> residual_errors(std::span<const Locator> locators,
                                    std::span<const double> ranges, const Vec3& x_wa);

/// Andrews' sine weight; 1 at e = 0 and 0 beyond e_max.
double andrews_weight(double e, double e_max);

/// Runs the reweighting loop for at most `max_iterations` rounds or until two
/// successive blended estimates differ by at most epsilon. Locators without a
/// ToA measurement are left out. Throws EstimationError(all_rejected) when
/// every locator gets weight 0; the last valid state is copied to
/// `last_state` first when it is non-null.
IrlsTdoaResult irls_tdoa(std::span<const Locator> locators, std::span<const ToaMeasurement> toa,
                         const IrlsParams& params, IrlsState* last_state = nullptr);

}  // namespace rpos
