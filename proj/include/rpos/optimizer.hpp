#pragma once

#include "rpos/likelihood.hpp"

#include <functional>
#include <span>

namespace rpos {

enum class AscentDirection {
  newton,    // Newton step on the profiled Hessian, gradient step where it is indefinite
  steepest,  // plain gradient direction
};

struct OptimizerConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;  // LL units per meter
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
  double initial_step = 1.0;  // m, first trial length of a gradient step
  int max_backtracks = 60;
  AscentDirection direction = AscentDirection::newton;
};

/// What the line search needs at one point.
struct ObjectiveSample {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

using Objective = std::function<ObjectiveSample(const Vec3&)>;

struct AscentResult {
  Vec3 position = Vec3::Zero();
  ObjectiveSample final_sample;
  double initial_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Backtracking (Armijo) ascent. Every accepted step increases the value.
AscentResult maximize_objective(const Objective& objective, const Vec3& x0,
                                const OptimizerConfig& config);

struct OptimizerDiagnostics {
  bool perturbed_start = false;  // x0 sat on a locator and was nudged
  Vec3 start = Vec3::Zero();
  double initial_value = 0.0;
  double final_value = 0.0;
  double gradient_norm = 0.0;
};

/// Maximizes the chosen log-likelihood over x with tau profiled in closed
/// form. For Model::joint with no positive ToA weight the ToA term is absent.
/// `variance` of the result is the Hessian variance proxy at the optimum, or
/// +inf when the Hessian there is not negative definite.
PositionEstimate maximize(Model model, const Vec3& x0, std::span<const ToaMeasurement> toa,
                          std::span<const AoaMeasurement> aoa, std::span<const Locator> locators,
                          const OptimizerConfig& config = {},
                          OptimizerDiagnostics* diagnostics = nullptr);

/// Value of the profiled objective, the quantity `maximize` ascends.
double profiled_log_likelihood(Model model, const Vec3& x, std::span<const ToaMeasurement> toa,
                               std::span<const AoaMeasurement> aoa,
                               std::span<const Locator> locators);

}  // namespace rpos
