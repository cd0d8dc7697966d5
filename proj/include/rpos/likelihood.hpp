#pragma once

#include "rpos/core.hpp"

#include <span>

namespace rpos {

/// Which log-likelihood an estimator maximizes.
enum class Model { toa, aoa, joint };

const char* to_string(Model model);

/// Value and derivatives of a log-likelihood at (x, tau). Derivatives in the
/// transmit time are taken with respect to the range offset c * tau (meters),
/// which keeps them on the same scale as the position derivatives.
struct LikelihoodEvaluation {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();  // position block
  double gradient_offset = 0.0;
  Vec3 hessian_x_offset = Vec3::Zero();
  double hessian_offset_offset = 0.0;
};

/// -sum_k w_k (d_k - |p_k - x| - tau c)^2 / 2. Zero-weight terms are skipped.
double toa_log_likelihood(const Vec3& x, double tau, std::span<const ToaMeasurement> toa,
                          std::span<const Locator> locators);

/// Closed-form maximizer of the ToA log-likelihood over tau at fixed x.
/// Throws EstimationError(no_toa_information) when every weight is zero.
double profile_tau(const Vec3& x, std::span<const ToaMeasurement> toa,
                   std::span<const Locator> locators);

/// sum_k kappa_k u_k^T Omega_k^T (x - p_k) / |x - p_k|.
/// Throws EstimationError(undefined_direction) if x sits on a locator with kappa > 0.
double aoa_log_likelihood(const Vec3& x, std::span<const AoaMeasurement> aoa,
                          std::span<const Locator> locators);

double joint_log_likelihood(const Vec3& x, double tau, std::span<const ToaMeasurement> toa,
                            std::span<const AoaMeasurement> aoa, std::span<const Locator> locators);

/// Analytic value, gradient and Hessian. `toa` is ignored for Model::aoa and
/// `aoa` for Model::toa. Requires x away from every active locator.
LikelihoodEvaluation evaluate_with_derivatives(Model model, const Vec3& x, double tau,
                                               std::span<const ToaMeasurement> toa,
                                               std::span<const AoaMeasurement> aoa,
                                               std::span<const Locator> locators);

/// Position Hessian with the transmit time profiled out (Schur complement of
/// the offset block). Equal to `hessian` when no ToA term is active.
Mat3 profiled_hessian(const LikelihoodEvaluation& eval);

/// Mean of the diagonal of (-H)^-1 for the position block.
/// Throws EstimationError(not_local_maximum) if H is not negative definite.
double variance_from_hessian(const LikelihoodEvaluation& eval);
double variance_from_hessian(const Mat3& hessian);

}  // namespace rpos
