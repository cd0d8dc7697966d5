#include "rpos/fusion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpos {

const char* to_string(Modalities m) {
  switch (m) {
    case Modalities::both: return "both";
    case Modalities::toa_only: return "toa_only";
    case Modalities::aoa_only: return "aoa_only";
    case Modalities::none_flagged: return "none_flagged";
  }
  return "unknown";
}

Modalities modalities_from_string(const std::string& s) {
  if (s == "both") return Modalities::both;
  if (s == "toa_only") return Modalities::toa_only;
  if (s == "aoa_only") return Modalities::aoa_only;
  if (s == "none_flagged") return Modalities::none_flagged;
  throw std::invalid_argument("unknown modalities '" + s + "'");
}

Vec3 fuse_estimates(const Vec3& x_toa, double var_toa, const Vec3& x_aoa, double var_aoa) {
  const bool toa_ok = std::isfinite(var_toa) && var_toa > 0.0;
  const bool aoa_ok = std::isfinite(var_aoa) && var_aoa > 0.0;
  if (!toa_ok && !aoa_ok) {
    throw EstimationError(ErrorCode::no_reliable_initializer, "no reliable initializer");
  }
  if (!aoa_ok) return x_toa;
  if (!toa_ok) return x_aoa;
  const double it = 1.0 / var_toa;
  const double ia = 1.0 / var_aoa;
  return (it * x_toa + ia * x_aoa) / (it + ia);
}

Modalities gate_modalities(double var_toa, double var_aoa, double sigma_max_sq) {
  const bool toa_bad = !(var_toa <= sigma_max_sq);
  const bool aoa_bad = !(var_aoa <= sigma_max_sq);
  if (toa_bad && aoa_bad) return Modalities::none_flagged;
  if (toa_bad) return Modalities::aoa_only;
  if (aoa_bad) return Modalities::toa_only;
  return Modalities::both;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weight_of(std::span<const Locator> locators, std::span<const double> weights, int id) {
  for (std::size_t k = 0; k < locators.size(); ++k) {
    if (locators[k].id == id) return k < weights.size() ? weights[k] : 0.0;
  }
  return 0.0;
}

}  // namespace

Measurements weighted_measurements(const InitializationResult& init,
                                   std::span<const Locator> locators, const Measurements& raw,
                                   double kappa_max) {
  const bool use_toa = init.active_modalities != Modalities::aoa_only;
  const bool use_aoa = init.active_modalities != Modalities::toa_only;
  Measurements out = raw;
  for (auto& m : out.toa) {
    m.weight = use_toa ? weight_of(locators, init.weights_toa, m.locator_id) : 0.0;
  }
  for (auto& m : out.aoa) {
    m.weight = use_aoa ? weight_of(locators, init.weights_aoa, m.locator_id) : 0.0;
    m.concentration = kappa_max * m.weight;
  }
  return out;
}

InitializationResult initialize_joint(std::span<const Locator> locators,
                                      std::span<const ToaMeasurement> toa,
                                      std::span<const AoaMeasurement> aoa,
                                      const AlgorithmParams& params) {
  InitializationResult res;
  const auto K = locators.size();
  res.weights_toa.assign(K, 0.0);
  res.weights_aoa.assign(K, 0.0);
  res.variance_toa = kInf;
  res.variance_aoa = kInf;
  Measurements raw{std::vector<ToaMeasurement>(toa.begin(), toa.end()),
                   std::vector<AoaMeasurement>(aoa.begin(), aoa.end())};

  try {
    const auto t = irls_tdoa(locators, toa, tdoa_params(params));
    res.toa_estimate = t.estimate.position;
    res.weights_toa = t.estimate.weights_toa;
  } catch (const EstimationError& e) {
    res.toa_failed = true;
    res.warnings.push_back(std::string("IRLS TDoA failed: ") + e.what());
  }
  try {
    const auto a = irls_aoa(locators, aoa, aoa_params(params));
    res.aoa_estimate = a.estimate.position;
    res.weights_aoa = a.estimate.weights_aoa;
  } catch (const EstimationError& e) {
    res.aoa_failed = true;
    res.warnings.push_back(std::string("IRLS AoA failed: ") + e.what());
  }
  if (res.toa_failed && res.aoa_failed) {
    throw EstimationError(ErrorCode::no_reliable_initializer, "no reliable initializer");
  }

  // Variance proxies, using the weights each initializer produced.
  InitializationResult both = res;
  both.active_modalities = Modalities::both;
  const Measurements w = weighted_measurements(both, locators, raw, params.kappa_max);
  if (!res.toa_failed) {
    try {
      const double tau = profile_tau(res.toa_estimate, w.toa, locators);
      const auto ev = evaluate_with_derivatives(Model::toa, res.toa_estimate, tau, w.toa, {}, locators);
      res.variance_toa = variance_from_hessian(ev);
    } catch (const EstimationError& e) {
      res.warnings.push_back(std::string("ToA variance unavailable: ") + e.what());
    }
  }
  if (!res.aoa_failed) {
    try {
      const auto ev = evaluate_with_derivatives(Model::aoa, res.aoa_estimate, 0.0, {}, w.aoa, locators);
      res.variance_aoa = variance_from_hessian(ev);
    } catch (const EstimationError& e) {
      res.warnings.push_back(std::string("AoA variance unavailable: ") + e.what());
    }
  }

  res.active_modalities = gate_modalities(res.variance_toa, res.variance_aoa, params.sigma_max_sq);
  // A failed initializer has no weights to offer the joint likelihood.
  if (res.toa_failed) res.active_modalities = Modalities::aoa_only;
  if (res.aoa_failed) res.active_modalities = Modalities::toa_only;

  switch (res.active_modalities) {
    case Modalities::toa_only: res.initial_point = res.toa_estimate; break;
    case Modalities::aoa_only: res.initial_point = res.aoa_estimate; break;
    case Modalities::both:
    case Modalities::none_flagged:
      try {
        res.initial_point =
            fuse_estimates(res.toa_estimate, res.variance_toa, res.aoa_estimate, res.variance_aoa);
      } catch (const EstimationError&) {
        res.initial_point = 0.5 * (res.toa_estimate + res.aoa_estimate);
        res.warnings.push_back("both variance proxies unavailable; using the midpoint");
      }
      break;
  }
  return res;
}

}  // namespace rpos
