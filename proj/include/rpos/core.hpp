#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpos {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// A fixed, synchronized anchor. Columns of `orientation` are the locator's
/// local axes expressed in the global frame (right-handed, z up).
struct Locator {
  int id = 0;  // 1-based; locators[k].id == k + 1 in a valid scenario
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

/// Pseudo-range d_k = ToA * c. Includes the unknown transmit-time offset.
struct ToaMeasurement {
  int locator_id = 0;
  double range = 0.0;   // m
  double weight = 1.0;  // relative inverse variance, >= 0
};

/// Unit direction in the locator's own frame.
struct AoaMeasurement {
  int locator_id = 0;
  Vec3 direction = Vec3::UnitX();
  double weight = 1.0;         // in [0, 1]
  double concentration = 0.0;  // kappa_max * weight
};

/// One measurement set: at most one ToA and one AoA per locator.
struct Measurements {
  std::vector<ToaMeasurement> toa;
  std::vector<AoaMeasurement> aoa;
};

enum class ErrorCode {
  no_toa_information,
  undefined_direction,
  not_local_maximum,
  degenerate_geometry,
  all_rejected,
  no_reliable_initializer,
};

const char* to_string(ErrorCode code);

/// Failure of an estimator stage. Callers in the pipeline catch these
/// and fall back; they never escape a campaign.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct PositionEstimate {
  Vec3 position = Vec3::Zero();
  double variance = 0.0;  // m^2, scalar proxy from the Hessian
  std::vector<double> weights_toa;
  std::vector<double> weights_aoa;
  int iterations = 0;
  bool converged = false;
  std::optional<double> transmit_time;  // s
};

struct AlgorithmParams {
  int N_it = 10;
  double e_max = 2.5;          // m
  double epsilon = 1e-5;       // m
  double sigma_max_sq = 10.0;  // m^2
  double kappa_max = 10.0;
  double e_max_aoa = 0.2;      // rad, angular cutoff of the bearing IRLS
  int subset_size = 0;         // 0 = use every locator in IRLS TDoA
};

struct NoiseParams {
  double range_sigma = 0.3;  // m
  double aoa_kappa = 400.0;  // +inf means exact directions
  double p_nlos = 0.15;
  double nlos_bias_min = 2.0;   // m
  double nlos_bias_max = 10.0;  // m
  double nlos_aoa_kappa = 5.0;
  double tau_min = 0.0;   // s
  double tau_max = 1e-6;  // s
};

struct BaselineParams {
  double sigma_init = 3.0;  // m
};

struct Scenario {
  std::vector<Locator> locators;
  std::vector<Vec3> ground_truth_points;
  AlgorithmParams algorithm_params;
  NoiseParams noise_params;
  BaselineParams baseline_params;
  /// Indices into ground_truth_points; empty means "the 6 nearest the centroid".
  std::vector<int> central_points;
};

/// Thrown by `checked()` with every violated invariant.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Returns every violated invariant; empty when the scenario is valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// Returns the scenario unchanged, or throws ScenarioError.
const Scenario& checked(const Scenario& scenario);

bool is_orthonormal(const Mat3& m, double tol = 1e-9);

/// Maps a direction from the locator frame to the global frame.
inline Vec3 direction_global(const Locator& locator, const Vec3& direction_local) {
  return locator.orientation * direction_local;
}

/// Locator for a 1-based id; throws std::out_of_range if it is not present.
const Locator& locator_by_id(std::span<const Locator> locators, int id);

/// Six locators near 7 m around a 20 m x 10 m hall, 28 grid points at 1.5 m.
Scenario default_scenario();

/// Rotation whose first column points from `from` to `to`, third column as
/// close to global z as possible.
Mat3 look_at(const Vec3& from, const Vec3& to);

/// Center of the ground-truth bounding box (the "no init 1" start point).
Vec3 area_center(const Scenario& scenario);

/// Resolved central-area subset (explicit list or the 6 points nearest the
/// ground-truth centroid in the horizontal plane).
std::vector<int> central_point_indices(const Scenario& scenario, int count = 6);

}  // namespace rpos
