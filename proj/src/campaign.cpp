#include "rpos/campaign.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rpos {

const char* to_string(InitMode m) {
  switch (m) {
    case InitMode::init: return "init";
    case InitMode::no_init_1: return "no_init_1";
    case InitMode::no_init_2: return "no_init_2";
  }
  return "unknown";
}

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::fallback: return "fallback";
    case TrialStatus::failed: return "failed";
  }
  return "unknown";
}

std::string method_name(const MethodSpec& m) {
  return std::string(to_string(m.model)) + ":" + to_string(m.init);
}

std::vector<MethodSpec> all_methods() {
  std::vector<MethodSpec> out;
  for (Model model : {Model::toa, Model::aoa, Model::joint}) {
    for (InitMode init : {InitMode::init, InitMode::no_init_1, InitMode::no_init_2}) {
      out.push_back({model, init});
    }
  }
  return out;
}

std::vector<MethodSpec> parse_methods(const std::string& list) {
  if (list.empty() || list == "all") return all_methods();
  auto parse_model = [](const std::string& s) {
    if (s == "toa") return Model::toa;
    if (s == "aoa") return Model::aoa;
    if (s == "joint") return Model::joint;
    throw std::invalid_argument("unknown model '" + s + "'");
  };
  auto parse_init = [](const std::string& s) {
    if (s == "init") return InitMode::init;
    if (s == "no_init_1") return InitMode::no_init_1;
    if (s == "no_init_2") return InitMode::no_init_2;
    throw std::invalid_argument("unknown init mode '" + s + "'");
  };

  std::vector<MethodSpec> out;
  auto add = [&](MethodSpec m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      const Model model = parse_model(token);
      for (InitMode init : {InitMode::init, InitMode::no_init_1, InitMode::no_init_2}) {
        add({model, init});
      }
    } else {
      add({parse_model(token.substr(0, colon)), parse_init(token.substr(colon + 1))});
    }
  }
  if (out.empty()) throw std::invalid_argument("no methods in '" + list + "'");
  return out;
}

double error_2d(const Vec3& estimate, const Vec3& truth) {
  return std::hypot(estimate.x() - truth.x(), estimate.y() - truth.y());
}

namespace {

constexpr std::uint64_t kStartStream = 0x5eed0f0ff5e7ULL;

struct Start {
  Vec3 point = Vec3::Zero();
  Measurements measurements;
  Modalities modalities = Modalities::both;
  TrialStatus status = TrialStatus::ok;
};

Modalities modalities_of(Model model) {
  switch (model) {
    case Model::toa: return Modalities::toa_only;
    case Model::aoa: return Modalities::aoa_only;
    case Model::joint: return Modalities::both;
  }
  return Modalities::both;
}

Start initialized_start(const Scenario& s, const Measurements& raw, Model model) {
  const auto& params = s.algorithm_params;
  Start st;
  st.modalities = modalities_of(model);
  st.measurements = raw;
  switch (model) {
    case Model::toa: {
      const auto r = irls_tdoa(s.locators, raw.toa, tdoa_params(params));
      st.point = r.estimate.position;
      for (std::size_t k = 0; k < st.measurements.toa.size(); ++k) {
        st.measurements.toa[k].weight = r.estimate.weights_toa[k];
      }
      break;
    }
    case Model::aoa: {
      const auto r = irls_aoa(s.locators, raw.aoa, aoa_params(params));
      st.point = r.estimate.position;
      for (std::size_t k = 0; k < st.measurements.aoa.size(); ++k) {
        st.measurements.aoa[k].weight = r.estimate.weights_aoa[k];
        st.measurements.aoa[k].concentration = params.kappa_max * r.estimate.weights_aoa[k];
      }
      break;
    }
    case Model::joint: {
      const auto init = initialize_joint(s.locators, raw.toa, raw.aoa, params);
      st.point = init.initial_point;
      st.modalities = init.active_modalities;
      st.measurements = weighted_measurements(init, s.locators, raw, params.kappa_max);
      break;
    }
  }
  return st;
}

// Unit weights on every measurement, kappa = kappa_max.
Measurements unit_weights(const Measurements& raw, double kappa_max) {
  Measurements m = raw;
  for (auto& t : m.toa) t.weight = 1.0;
  for (auto& a : m.aoa) {
    a.weight = 1.0;
    a.concentration = kappa_max;
  }
  return m;
}

}  // namespace

std::vector<TrialRecord> run_trial_on(const Scenario& s, const SimulatedTrial& sim,
                                      std::uint64_t seed, const std::vector<MethodSpec>& methods,
                                      const OptimizerConfig& optimizer,
                                      const TrialContext& ctx) {
  const Vec3& x_true = sim.truth.position;
  const Measurements unit = unit_weights(sim.measurements, s.algorithm_params.kappa_max);

  // One horizontal start offset per trial, shared by the three models.
  Rng start_rng(mix64(seed ^ kStartStream));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double ox = gauss(start_rng);
  const double oy = gauss(start_rng);
  const double sigma = s.baseline_params.sigma_init;
  const Vec3 near_truth = x_true + Vec3(sigma * ox, sigma * oy, 0.0);
  const Vec3 center = area_center(s);

  std::vector<TrialRecord> out;
  out.reserve(methods.size());
  for (const auto& method : methods) {
    Start st;
    st.modalities = modalities_of(method.model);
    st.measurements = unit;
    switch (method.init) {
      case InitMode::init:
        try {
          st = initialized_start(s, sim.measurements, method.model);
        } catch (const std::exception&) {
          st.point = center;
          st.status = TrialStatus::fallback;
        }
        break;
      case InitMode::no_init_1: st.point = center; break;
      case InitMode::no_init_2: st.point = near_truth; break;
    }

    TrialRecord rec;
    rec.trial_id = ctx.trial_id;
    rec.point_index = ctx.point_index;
    rec.in_central = ctx.in_central;
    rec.seed = seed;
    rec.method = method;
    rec.ground_truth = x_true;
    rec.active_modalities = st.modalities;
    rec.status = st.status;
    try {
      const auto est = maximize(method.model, st.point, st.measurements.toa, st.measurements.aoa,
                                s.locators, optimizer);
      rec.estimate = est.position;
      rec.converged = est.converged;
    } catch (const std::exception&) {
      rec.estimate = st.point;
      rec.converged = false;
      rec.status = TrialStatus::failed;
    }
    rec.error_2d = error_2d(rec.estimate, x_true);
    out.push_back(rec);
  }
  return out;
}

std::vector<TrialRecord> run_trial(const Scenario& s, const Vec3& x_true, std::uint64_t seed,
                                   const std::vector<MethodSpec>& methods,
                                   const OptimizerConfig& optimizer, const TrialContext& ctx) {
  return run_trial_on(s, synthesize(s, x_true, seed), seed, methods, optimizer, ctx);
}

double percentile(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

const MethodSummary* CampaignSummary::find(const MethodSpec& m) const {
  for (const auto& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

CampaignSummary summarize(const std::vector<TrialRecord>& records,
                          const std::vector<MethodSpec>& methods) {
  CampaignSummary summary;
  std::vector<std::uint64_t> ids;
  for (const auto& r : records) ids.push_back(r.trial_id);
  std::sort(ids.begin(), ids.end());
  summary.trials = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());

  for (const auto& method : methods) {
    MethodSummary ms;
    ms.method = method;
    std::vector<double> errors, central;
    for (const auto& r : records) {
      if (!(r.method == method)) continue;
      errors.push_back(r.error_2d);
      if (r.in_central) central.push_back(r.error_2d);
      if (r.active_modalities == Modalities::none_flagged) ++ms.flagged;
      if (r.status == TrialStatus::fallback) ++ms.fallback;
      if (r.status == TrialStatus::failed) ++ms.failed;
      if (!r.converged) ++ms.not_converged;
    }
    std::sort(errors.begin(), errors.end());
    ms.all.count = errors.size();
    if (!errors.empty()) {
      double sum = 0.0;
      for (double e : errors) sum += e;
      ms.all.mean = sum / static_cast<double>(errors.size());
      ms.all.median = percentile(errors, 0.5);
      ms.all.p95 = percentile(errors, 0.95);
      ms.all.p99 = percentile(errors, 0.99);
      for (std::size_t i = 0; i < errors.size(); ++i) {
        ms.cdf.emplace_back(errors[i],
                            static_cast<double>(i + 1) / static_cast<double>(errors.size()));
      }
    }
    ms.central_count = central.size();
    if (!central.empty()) {
      double sum = 0.0;
      for (double e : central) sum += e;
      ms.central_mean = sum / static_cast<double>(central.size());
      ms.central_max = *std::max_element(central.begin(), central.end());
    }
    summary.methods.push_back(std::move(ms));
  }
  return summary;
}

namespace {

struct TrialPlan {
  std::vector<bool> central;
  std::size_t count = 0;
};

TrialPlan plan(const Scenario& s, const CampaignConfig& c) {
  if (c.trials_per_point < 1) throw std::invalid_argument("trials_per_point must be >= 1");
  checked(s);
  TrialPlan p;
  p.central.assign(s.ground_truth_points.size(), false);
  for (int i : central_point_indices(s)) p.central[i] = true;
  p.count = s.ground_truth_points.size() * static_cast<std::size_t>(c.trials_per_point);
  return p;
}

std::vector<TrialRecord> one_trial(const Scenario& s, const CampaignConfig& c, const TrialPlan& p,
                                   std::size_t id) {
  const int point = static_cast<int>(id / static_cast<std::size_t>(c.trials_per_point));
  const std::uint64_t seed = trial_seed(c.seed, id);
  return run_trial(s, s.ground_truth_points[point], seed, c.methods, c.optimizer,
                   TrialContext{point, id, p.central[point]});
}

CampaignResult collect(std::vector<std::vector<TrialRecord>>&& per_trial,
                       const CampaignConfig& c) {
  CampaignResult res;
  for (auto& t : per_trial) {
    res.records.insert(res.records.end(), t.begin(), t.end());
  }
  res.summary = summarize(res.records, c.methods);
  return res;
}

}  // namespace

CampaignResult run_campaign_serial(const Scenario& s, const CampaignConfig& c) {
  const TrialPlan p = plan(s, c);
  std::vector<std::vector<TrialRecord>> per_trial(p.count);
  for (std::size_t id = 0; id < p.count; ++id) per_trial[id] = one_trial(s, c, p, id);
  return collect(std::move(per_trial), c);
}

CampaignResult run_campaign(const Scenario& s, const CampaignConfig& c) {
  const TrialPlan p = plan(s, c);
  std::vector<std::vector<TrialRecord>> per_trial(p.count);
  const int nthreads = c.threads > 0 ? c.threads : omp_get_max_threads();
  const long n = static_cast<long>(p.count);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
  for (long id = 0; id < n; ++id) {
    per_trial[id] = one_trial(s, c, p, static_cast<std::size_t>(id));
  }
  return collect(std::move(per_trial), c);
}

}  // namespace rpos
