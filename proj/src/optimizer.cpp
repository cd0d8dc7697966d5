#include "rpos/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpos {

namespace {

bool has_toa(std::span<const ToaMeasurement> toa) {
  return std::any_of(toa.begin(), toa.end(), [](const auto& m) { return m.weight > 0.0; });
}

bool has_aoa(std::span<const AoaMeasurement> aoa) {
  return std::any_of(aoa.begin(), aoa.end(), [](const auto& m) { return m.concentration > 0.0; });
}

// Resolves a model against the measurements actually carrying weight.
Model effective_model(Model model, std::span<const ToaMeasurement> toa,
                      std::span<const AoaMeasurement> aoa) {
  if (model == Model::joint) {
    if (!has_toa(toa)) return Model::aoa;
    if (!has_aoa(aoa)) return Model::toa;
  }
  return model;
}

double profiled_tau(Model model, const Vec3& x, std::span<const ToaMeasurement> toa,
                    std::span<const Locator> locators) {
  return model == Model::aoa ? 0.0 : profile_tau(x, toa, locators);
}

// Nearest point 1e-6 m from x toward the locator centroid when x coincides
// with an active locator.
bool nudge_off_locators(Vec3& x, Model model, std::span<const ToaMeasurement> toa,
                        std::span<const AoaMeasurement> aoa, std::span<const Locator> locators) {
  bool on_locator = false;
  auto check = [&](int id) {
    if ((locator_by_id(locators, id).position - x).norm() == 0.0) on_locator = true;
  };
  if (model != Model::aoa) {
    for (const auto& m : toa) if (m.weight > 0.0) check(m.locator_id);
  }
  if (model != Model::toa) {
    for (const auto& m : aoa) if (m.concentration > 0.0) check(m.locator_id);
  }
  if (!on_locator) return false;

  Vec3 centroid = Vec3::Zero();
  for (const auto& l : locators) centroid += l.position;
  centroid /= static_cast<double>(locators.size());
  Vec3 dir = centroid - x;
  if (dir.norm() == 0.0) dir = -Vec3::UnitZ();
  x += 1e-6 * dir.normalized();
  return true;
}

}  // namespace

AscentResult maximize_objective(const Objective& objective, const Vec3& x0,
                                const OptimizerConfig& config) {
  AscentResult res;
  res.position = x0;
  res.final_sample = objective(x0);
  res.initial_value = res.final_sample.value;

  for (int it = 0; it < config.max_iterations; ++it) {
    const auto& cur = res.final_sample;
    if (cur.gradient.norm() <= config.gradient_tolerance) break;

    Vec3 step;
    if (config.direction == AscentDirection::newton) {
      Eigen::LLT<Mat3> llt(-0.5 * (cur.hessian + cur.hessian.transpose()));
      step = (llt.info() == Eigen::Success) ? Vec3(llt.solve(cur.gradient)) : Vec3::Zero();
      if (!step.allFinite() || step.dot(cur.gradient) <= 0.0) step.setZero();
    } else {
      step.setZero();
    }
    if (step.isZero()) step = cur.gradient * (config.initial_step / cur.gradient.norm());

    const double slope = cur.gradient.dot(step);
    double t = 1.0;
    bool accepted = false;
    ObjectiveSample trial;
    Vec3 x_trial;
    for (int b = 0; b <= config.max_backtracks; ++b, t *= config.shrink) {
      x_trial = res.position + t * step;
      try {
        trial = objective(x_trial);
      } catch (const EstimationError&) {
        continue;  // landed on a locator
      }
      if (!std::isfinite(trial.value)) continue;
      if (trial.value >= cur.value + config.sufficient_increase * t * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the increase drops below the value's rounding
      // error; keep stepping while the gradient still shrinks.
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(cur.value));
      if (std::abs(trial.value - cur.value) <= noise &&
          trial.gradient.norm() < cur.gradient.norm()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    res.position = x_trial;
    res.final_sample = trial;
    res.iterations = it + 1;
  }
  // A zero budget never certifies convergence.
  res.converged = config.max_iterations > 0 &&
                  res.final_sample.gradient.norm() <= config.gradient_tolerance;
  return res;
}

double profiled_log_likelihood(Model model, const Vec3& x, std::span<const ToaMeasurement> toa,
                               std::span<const AoaMeasurement> aoa,
                               std::span<const Locator> locators) {
  const Model m = effective_model(model, toa, aoa);
  const double tau = profiled_tau(m, x, toa, locators);
  switch (m) {
    case Model::toa: return toa_log_likelihood(x, tau, toa, locators);
    case Model::aoa: return aoa_log_likelihood(x, aoa, locators);
    case Model::joint: return joint_log_likelihood(x, tau, toa, aoa, locators);
  }
  return 0.0;
}

PositionEstimate maximize(Model model, const Vec3& x0, std::span<const ToaMeasurement> toa,
                          std::span<const AoaMeasurement> aoa, std::span<const Locator> locators,
                          const OptimizerConfig& config, OptimizerDiagnostics* diagnostics) {
  const Model m = effective_model(model, toa, aoa);
  if (m != Model::aoa && !has_toa(toa)) {
    throw EstimationError(ErrorCode::no_toa_information, "no ToA information");
  }
  Vec3 start = x0;
  const bool perturbed = nudge_off_locators(start, m, toa, aoa, locators);

  const Objective objective = [&](const Vec3& x) {
    const double tau = profiled_tau(m, x, toa, locators);
    const auto ev = evaluate_with_derivatives(m, x, tau, toa, aoa, locators);
    return ObjectiveSample{ev.value, ev.gradient, profiled_hessian(ev)};
  };
  const AscentResult res = maximize_objective(objective, start, config);

  PositionEstimate out;
  out.position = res.position;
  out.iterations = res.iterations;
  out.converged = res.converged;
  try {
    out.variance = variance_from_hessian(res.final_sample.hessian);
  } catch (const EstimationError&) {
    out.variance = std::numeric_limits<double>::infinity();
  }
  if (m != Model::aoa) out.transmit_time = profile_tau(res.position, toa, locators);

  out.weights_toa.assign(locators.size(), 0.0);
  out.weights_aoa.assign(locators.size(), 0.0);
  for (std::size_t k = 0; k < locators.size(); ++k) {
    for (const auto& t : toa) {
      if (t.locator_id == locators[k].id && m != Model::aoa) out.weights_toa[k] = t.weight;
    }
    for (const auto& a : aoa) {
      if (a.locator_id == locators[k].id && m != Model::toa) out.weights_aoa[k] = a.weight;
    }
  }

  if (diagnostics) {
    diagnostics->perturbed_start = perturbed;
    diagnostics->start = start;
    diagnostics->initial_value = res.initial_value;
    diagnostics->final_value = res.final_sample.value;
    diagnostics->gradient_norm = res.final_sample.gradient.norm();
  }
  return out;
}

}  // namespace rpos
