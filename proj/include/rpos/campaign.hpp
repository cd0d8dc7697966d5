#pragma once

#include "rpos/fusion.hpp"
#include "rpos/likelihood.hpp"
#include "rpos/optimizer.hpp"
#include "rpos/simulator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rpos {

/// How the ML search is started.
///   init       IRLS initializers, their weights, gating
///   no_init_1  area center, unit weights
///   no_init_2  truth plus a horizontal Gaussian offset (sigma_init), unit weights
enum class InitMode { init, no_init_1, no_init_2 };

const char* to_string(InitMode m);

struct MethodSpec {
  Model model = Model::joint;
  InitMode init = InitMode::init;
  bool operator==(const MethodSpec&) const = default;
};

/// "joint:init" style name.
std::string method_name(const MethodSpec& m);

/// Parses a comma list of "model" (all three init modes) or "model:init".
/// Empty or "all" gives every combination. Throws std::invalid_argument.
std::vector<MethodSpec> parse_methods(const std::string& list);

std::vector<MethodSpec> all_methods();

enum class TrialStatus {
  ok,
  fallback,  // initializer failed; started like no_init_1
  failed,    // ML search threw; the start point is reported
};

const char* to_string(TrialStatus s);

struct TrialRecord {
  std::uint64_t trial_id = 0;
  int point_index = 0;
  bool in_central = false;
  std::uint64_t seed = 0;
  MethodSpec method;
  Vec3 ground_truth = Vec3::Zero();
  Vec3 estimate = Vec3::Zero();
  double error_2d = 0.0;  // m, horizontal
  bool converged = false;
  Modalities active_modalities = Modalities::both;
  TrialStatus status = TrialStatus::ok;

  bool operator==(const TrialRecord&) const = default;
};

double error_2d(const Vec3& estimate, const Vec3& truth);

struct TrialContext {
  int point_index = 0;
  std::uint64_t trial_id = 0;
  bool in_central = false;
};

/// One measurement set shared by every requested method. Never throws for
/// estimator failures; they are recorded in the status field.
std::vector<TrialRecord> run_trial(const Scenario& scenario, const Vec3& x_true,
                                   std::uint64_t seed, const std::vector<MethodSpec>& methods,
                                   const OptimizerConfig& optimizer = {},
                                   const TrialContext& context = {});

/// Same as above on a supplied measurement set.
std::vector<TrialRecord> run_trial_on(const Scenario& scenario, const SimulatedTrial& sim,
                                      std::uint64_t seed, const std::vector<MethodSpec>& methods,
                                      const OptimizerConfig& optimizer = {},
                                      const TrialContext& context = {});

struct SummaryStats {
  std::size_t count = 0;
  std::optional<double> mean, median, p95, p99;
};

struct MethodSummary {
  MethodSpec method;
  SummaryStats all;
  std::size_t central_count = 0;
  std::optional<double> central_mean, central_max;
  std::size_t flagged = 0;   // none_flagged gate
  std::size_t fallback = 0;
  std::size_t failed = 0;
  std::size_t not_converged = 0;
  std::vector<std::pair<double, double>> cdf;  // (error, fraction <= error)
};

struct CampaignSummary {
  std::size_t trials = 0;
  std::vector<MethodSummary> methods;
  const MethodSummary* find(const MethodSpec& m) const;
};

/// Percentile with linear interpolation between closest order statistics,
/// position (n - 1) * q. `sorted` must be ascending and non-empty.
double percentile(std::span<const double> sorted, double q);

CampaignSummary summarize(const std::vector<TrialRecord>& records,
                          const std::vector<MethodSpec>& methods);

struct CampaignConfig {
  int trials_per_point = 100;
  std::uint64_t seed = 1;
  std::vector<MethodSpec> methods = all_methods();
  int threads = 0;  // 0 = OpenMP default
  OptimizerConfig optimizer;
};

struct CampaignResult {
  std::vector<TrialRecord> records;  // trial order, then method order
  CampaignSummary summary;
};

/// Trial t at point i has id i * trials_per_point + t and seed
/// trial_seed(seed, id). Output is identical for every thread count.
CampaignResult run_campaign(const Scenario& scenario, const CampaignConfig& config);

/// Single-threaded reference of run_campaign.
CampaignResult run_campaign_serial(const Scenario& scenario, const CampaignConfig& config);

}  // namespace rpos
