#pragma once

#include "rpos/irls_aoa.hpp"
#include "rpos/irls_tdoa.hpp"
#include "rpos/likelihood.hpp"

#include <span>
#include <string>
#include <vector>

namespace rpos {

enum class Modalities { both, toa_only, aoa_only, none_flagged };

const char* to_string(Modalities m);
Modalities modalities_from_string(const std::string& s);

struct InitializationResult {
  Vec3 initial_point = Vec3::Zero();
  double variance_toa = 0.0;  // m^2, +inf when unavailable
  double variance_aoa = 0.0;
  Modalities active_modalities = Modalities::both;
  std::vector<double> weights_toa;  // final IRLS TDoA weights, per locator
  std::vector<double> weights_aoa;  // final IRLS AoA weights, per locator
  Vec3 toa_estimate = Vec3::Zero();
  Vec3 aoa_estimate = Vec3::Zero();
  bool toa_failed = false;
  bool aoa_failed = false;
  std::vector<std::string> warnings;
};

/// Inverse-variance blend of the two initial fixes. An infinite variance
/// gives its estimate zero weight. Throws EstimationError(no_reliable_initializer)
/// if both variances are infinite.
Vec3 fuse_estimates(const Vec3& x_toa, double var_toa, const Vec3& x_aoa, double var_aoa);

Modalities gate_modalities(double var_toa, double var_aoa, double sigma_max_sq);

/// Runs both IRLS initializers, derives their variance proxies from the
/// ToA and AoA log-likelihood Hessians at the respective fixes (with the
/// final IRLS weights), gates, and blends. Falls back to the surviving
/// modality when one initializer fails; throws if both fail.
InitializationResult initialize_joint(std::span<const Locator> locators,
                                      std::span<const ToaMeasurement> toa,
                                      std::span<const AoaMeasurement> aoa,
                                      const AlgorithmParams& params);

/// Measurement copies carrying the initializer's weights: ToA weight w_T and
/// AoA concentration kappa_max * w_aoa. A modality the gate dropped gets all
/// weights zero so it leaves the joint log-likelihood.
Measurements weighted_measurements(const InitializationResult& init,
                                   std::span<const Locator> locators, const Measurements& raw,
                                   double kappa_max);

}  // namespace rpos
