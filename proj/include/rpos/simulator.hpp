#pragma once

#include "rpos/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace rpos {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial seed: mix64(campaign_seed ^ mix64(trial_index + 1)).
/// Trials can then run in any order or thread and draw the same numbers.
std::uint64_t trial_seed(std::uint64_t campaign_seed, std::uint64_t trial_index);

/// One draw from the von Mises-Fisher distribution on the unit sphere
/// (Wood's rejection sampler). kappa = +inf returns `mean` exactly.
Vec3 sample_vmf(const Vec3& mean, double kappa, Rng& rng);

/// Mean resultant length of a 3D VMF: coth(kappa) - 1/kappa.
double vmf_mean_resultant_length(double kappa);

/// Rotates `v` by `angle` radians about a uniformly random axis perpendicular to it.
Vec3 perturb_direction(const Vec3& v, double angle, Rng& rng);

struct TruthRecord {
  Vec3 position = Vec3::Zero();
  double tau = 0.0;            // s
  std::vector<bool> nlos;      // per locator
  std::vector<double> range_bias;  // m, 0 for LOS
};

struct SimulatedTrial {
  Measurements measurements;  // unit weights, concentration = kappa_max
  TruthRecord truth;
};

/// Deterministic for a fixed (scenario, x_true, seed). Draw order per trial:
/// tau, then per locator in index order: NLOS flag, range noise, NLOS bias,
/// NLOS direction perturbation, VMF direction.
SimulatedTrial synthesize(const Scenario& scenario, const Vec3& x_true, std::uint64_t seed);

/// Raw measurement dump: trial,locator_id,range_m,ux,uy,uz,is_nlos,tau_s.
void write_measurements_header(std::ostream& os);
void write_measurements_rows(std::ostream& os, std::uint64_t trial, const SimulatedTrial& sim);

}  // namespace rpos
