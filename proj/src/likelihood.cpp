#include "rpos/likelihood.hpp"

#include <cmath>
#include <limits>

namespace rpos {

const char* to_string(Model model) {
  switch (model) {
    case Model::toa: return "toa";
    case Model::aoa: return "aoa";
    case Model::joint: return "joint";
  }
  return "unknown";
}

double toa_log_likelihood(const Vec3& x, double tau, std::span<const ToaMeasurement> toa,
                          std::span<const Locator> locators) {
  const double offset = tau * kSpeedOfLight;
  double ll = 0.0;
  for (const auto& m : toa) {
    if (m.weight == 0.0) continue;
    const auto& loc = locator_by_id(locators, m.locator_id);
    const double r = m.range - (loc.position - x).norm() - offset;
    ll -= m.weight * r * r / 2.0;
  }
  return ll;
}

double profile_tau(const Vec3& x, std::span<const ToaMeasurement> toa,
                   std::span<const Locator> locators) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& m : toa) {
    if (m.weight == 0.0) continue;
    const auto& loc = locator_by_id(locators, m.locator_id);
    num += m.weight * (m.range - (loc.position - x).norm());
    den += m.weight;
  }
  if (!(den > 0.0)) throw EstimationError(ErrorCode::no_toa_information, "no ToA information");
  return num / (kSpeedOfLight * den);
}

double aoa_log_likelihood(const Vec3& x, std::span<const AoaMeasurement> aoa,
                          std::span<const Locator> locators) {
  double ll = 0.0;
  for (const auto& m : aoa) {
    if (m.concentration == 0.0) continue;
    const auto& loc = locator_by_id(locators, m.locator_id);
    const Vec3 v = x - loc.position;
    const double rho = v.norm();
    if (rho == 0.0) {
      throw EstimationError(ErrorCode::undefined_direction,
                            "undefined direction at locator position");
    }
    ll += m.concentration * direction_global(loc, m.direction).dot(v) / rho;
  }
  return ll;
}

double joint_log_likelihood(const Vec3& x, double tau, std::span<const ToaMeasurement> toa,
                            std::span<const AoaMeasurement> aoa, std::span<const Locator> locators) {
  return toa_log_likelihood(x, tau, toa, locators) + aoa_log_likelihood(x, aoa, locators);
}

namespace {

void add_toa_terms(LikelihoodEvaluation& ev, const Vec3& x, double offset,
                   std::span<const ToaMeasurement> toa, std::span<const Locator> locators) {
  for (const auto& m : toa) {
    if (m.weight == 0.0) continue;
    const auto& loc = locator_by_id(locators, m.locator_id);
    const Vec3 v = x - loc.position;
    const double rho = v.norm();
    if (rho == 0.0) {
      throw EstimationError(ErrorCode::undefined_direction,
                            "ToA derivatives undefined at locator position");
    }
    const Vec3 u = v / rho;
    const double w = m.weight;
    const double r = m.range - rho - offset;
    const Mat3 uut = u * u.transpose();

    ev.value -= w * r * r / 2.0;
    ev.gradient += w * r * u;
    ev.hessian += w * (-uut + r * (Mat3::Identity() - uut) / rho);
    ev.gradient_offset += w * r;
    ev.hessian_x_offset -= w * u;
    ev.hessian_offset_offset -= w;
  }
}

void add_aoa_terms(LikelihoodEvaluation& ev, const Vec3& x, std::span<const AoaMeasurement> aoa,
                   std::span<const Locator> locators) {
  for (const auto& m : aoa) {
    if (m.concentration == 0.0) continue;
    const auto& loc = locator_by_id(locators, m.locator_id);
    const Vec3 v = x - loc.position;
    const double rho = v.norm();
    if (rho == 0.0) {
      throw EstimationError(ErrorCode::undefined_direction,
                            "undefined direction at locator position");
    }
    const Vec3 g = direction_global(loc, m.direction);
    const double kappa = m.concentration;
    const double a = g.dot(v);
    const double rho2 = rho * rho;
    const double rho3 = rho2 * rho;

    ev.value += kappa * a / rho;
    ev.gradient += kappa * (g / rho - a * v / rho3);
    ev.hessian += kappa * (-(g * v.transpose() + v * g.transpose()) / rho3 -
                           a * Mat3::Identity() / rho3 + 3.0 * a * v * v.transpose() / (rho3 * rho2));
  }
}

}  // namespace

LikelihoodEvaluation evaluate_with_derivatives(Model model, const Vec3& x, double tau,
                                               std::span<const ToaMeasurement> toa,
                                               std::span<const AoaMeasurement> aoa,
                                               std::span<const Locator> locators) {
  LikelihoodEvaluation ev;
  if (model != Model::aoa) add_toa_terms(ev, x, tau * kSpeedOfLight, toa, locators);
  if (model != Model::toa) add_aoa_terms(ev, x, aoa, locators);
  return ev;
}

Mat3 profiled_hessian(const LikelihoodEvaluation& ev) {
  if (ev.hessian_offset_offset >= 0.0) return ev.hessian;
  return ev.hessian -
         ev.hessian_x_offset * ev.hessian_x_offset.transpose() / ev.hessian_offset_offset;
}

double variance_from_hessian(const Mat3& hessian) {
  const Mat3 information = -0.5 * (hessian + hessian.transpose());
  Eigen::LLT<Mat3> llt(information);
  if (!hessian.allFinite() || llt.info() != Eigen::Success) {
    throw EstimationError(ErrorCode::not_local_maximum, "estimate not at a local maximum");
  }
  const Mat3 covariance = llt.solve(Mat3::Identity());
  const double var = covariance.trace() / 3.0;
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw EstimationError(ErrorCode::not_local_maximum, "estimate not at a local maximum");
  }
  return var;
}

double variance_from_hessian(const LikelihoodEvaluation& eval) {
  return variance_from_hessian(eval.hessian);
}

}  // namespace rpos
