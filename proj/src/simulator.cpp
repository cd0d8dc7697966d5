#include "rpos/simulator.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

namespace rpos {

namespace {

constexpr double kNlosMinDeviation = 15.0 * std::numbers::pi / 180.0;
constexpr double kNlosMaxDeviation = 45.0 * std::numbers::pi / 180.0;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Any unit vector perpendicular to v.
Vec3 any_perpendicular(const Vec3& v) {
  const Vec3 a = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return v.cross(a).normalized();
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t campaign_seed, std::uint64_t trial_index) {
  return mix64(campaign_seed ^ mix64(trial_index + 1));
}

double vmf_mean_resultant_length(double kappa) {
  if (std::isinf(kappa)) return 1.0;
  return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

Vec3 sample_vmf(const Vec3& mean, double kappa, Rng& rng) {
  const Vec3 mu = mean.normalized();
  if (std::isinf(kappa)) return mu;

  // Wood (1994) with dimension 3.
  constexpr double dm1 = 2.0;
  const double b = dm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);
  double w = 0.0;
  for (;;) {
    const double z = uniform01(rng);  // Beta(1, 1) in three dimensions
    const double u = uniform01(rng);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const Vec3 e1 = any_perpendicular(mu);
  const Vec3 e2 = mu.cross(e1);
  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  return (w * mu + s * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

Vec3 perturb_direction(const Vec3& v, double angle, Rng& rng) {
  const Vec3 u = v.normalized();
  const Vec3 e1 = any_perpendicular(u);
  const Vec3 e2 = u.cross(e1);
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const Vec3 axis = std::cos(phi) * e1 + std::sin(phi) * e2;
  return (u * std::cos(angle) + axis.cross(u) * std::sin(angle)).normalized();
}

SimulatedTrial synthesize(const Scenario& s, const Vec3& x_true, std::uint64_t seed) {
  Rng rng(seed);
  const auto& n = s.noise_params;
  const auto K = s.locators.size();

  SimulatedTrial out;
  out.truth.position = x_true;
  out.truth.nlos.assign(K, false);
  out.truth.range_bias.assign(K, 0.0);
  out.truth.tau = n.tau_min + (n.tau_max - n.tau_min) * uniform01(rng);
  const double offset = out.truth.tau * kSpeedOfLight;

  for (std::size_t k = 0; k < K; ++k) {
    const auto& loc = s.locators[k];
    const bool nlos = uniform01(rng) < n.p_nlos;
    const double noise = n.range_sigma * gaussian(rng);
    double bias = 0.0;
    if (nlos) bias = n.nlos_bias_min + (n.nlos_bias_max - n.nlos_bias_min) * uniform01(rng);

    const Vec3 v = x_true - loc.position;
    Vec3 mean_local = (loc.orientation.transpose() * v).normalized();
    double kappa = n.aoa_kappa;
    if (nlos) {
      const double dev =
          kNlosMinDeviation + (kNlosMaxDeviation - kNlosMinDeviation) * uniform01(rng);
      mean_local = perturb_direction(mean_local, dev, rng);
      kappa = n.nlos_aoa_kappa;
    }
    const Vec3 dir = sample_vmf(mean_local, kappa, rng);

    out.truth.nlos[k] = nlos;
    out.truth.range_bias[k] = bias;
    out.measurements.toa.push_back(ToaMeasurement{loc.id, v.norm() + offset + noise + bias, 1.0});
    out.measurements.aoa.push_back(
        AoaMeasurement{loc.id, dir, 1.0, s.algorithm_params.kappa_max});
  }
  return out;
}

void write_measurements_header(std::ostream& os) {
  os << "trial,locator_id,range_m,ux,uy,uz,is_nlos,tau_s\n";
}

void write_measurements_rows(std::ostream& os, std::uint64_t trial, const SimulatedTrial& sim) {
  std::string line;
  const auto& m = sim.measurements;
  for (std::size_t k = 0; k < m.toa.size(); ++k) {
    line.clear();
    line += std::to_string(trial);
    line += ',';
    line += std::to_string(m.toa[k].locator_id);
    line += ',';
    append_double(line, m.toa[k].range);
    for (int i = 0; i < 3; ++i) {
      line += ',';
      append_double(line, m.aoa[k].direction(i));
    }
    line += sim.truth.nlos[k] ? ",1," : ",0,";
    append_double(line, sim.truth.tau);
    line += '\n';
    os << line;
  }
}

}  // namespace rpos
