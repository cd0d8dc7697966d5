#include "rpos/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rpos {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& e : errors) os << "\n  - " << e;
  return os.str();
}

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_toa_information: return "no_toa_information";
    case ErrorCode::undefined_direction: return "undefined_direction";
    case ErrorCode::not_local_maximum: return "not_local_maximum";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::all_rejected: return "all_rejected";
    case ErrorCode::no_reliable_initializer: return "no_reliable_initializer";
  }
  return "unknown";
}

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

bool is_orthonormal(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m;
  return ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol);
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> errors;
  const auto K = s.locators.size();
  if (K < 5) {
    errors.push_back("at least 5 locators required, got " + std::to_string(K));
  }
  for (std::size_t k = 0; k < K; ++k) {
    const auto& loc = s.locators[k];
    const std::string tag = "locator " + std::to_string(loc.id);
    if (loc.id != static_cast<int>(k) + 1) {
      errors.push_back(tag + ": id must equal its 1-based position " + std::to_string(k + 1));
    }
    if (!finite(loc.position)) errors.push_back(tag + ": position not finite");
    if (!is_orthonormal(loc.orientation)) errors.push_back(tag + ": orientation not orthonormal");
  }
  for (std::size_t i = 0; i < s.ground_truth_points.size(); ++i) {
    if (!finite(s.ground_truth_points[i])) {
      errors.push_back("ground truth point " + std::to_string(i) + " not finite");
    }
  }

  const auto& a = s.algorithm_params;
  if (!(a.N_it >= 1)) errors.push_back("N_it must be >= 1");
  if (!(a.e_max > 0)) errors.push_back("e_max must be > 0");
  if (!(a.epsilon > 0)) errors.push_back("epsilon must be > 0");
  if (!(a.sigma_max_sq > 0)) errors.push_back("sigma_max_sq must be > 0");
  if (!(a.kappa_max > 0)) errors.push_back("kappa_max must be > 0");
  if (!(a.e_max_aoa > 0)) errors.push_back("e_max_aoa must be > 0");
  if (a.subset_size != 0 && a.subset_size < 5) errors.push_back("subset_size must be 0 or >= 5");

  const auto& n = s.noise_params;
  if (!(n.range_sigma >= 0)) errors.push_back("range_sigma must be >= 0");
  if (!(n.aoa_kappa > 0)) errors.push_back("aoa_kappa must be > 0");
  if (!(n.p_nlos >= 0 && n.p_nlos <= 1)) errors.push_back("p_nlos must be in [0, 1]");
  if (!(n.nlos_bias_min >= 0 && n.nlos_bias_max >= n.nlos_bias_min)) {
    errors.push_back("nlos_bias_range must satisfy 0 <= min <= max");
  }
  if (!(n.nlos_aoa_kappa > 0)) errors.push_back("nlos_aoa_kappa must be > 0");
  if (!(n.tau_max >= n.tau_min) || !std::isfinite(n.tau_min) || !std::isfinite(n.tau_max)) {
    errors.push_back("tau_range must satisfy min <= max");
  }
  if (!(s.baseline_params.sigma_init >= 0)) errors.push_back("sigma_init must be >= 0");

  for (int idx : s.central_points) {
    if (idx < 0 || idx >= static_cast<int>(s.ground_truth_points.size())) {
      errors.push_back("central point index " + std::to_string(idx) + " out of range");
    }
  }
  return errors;
}

const Scenario& checked(const Scenario& scenario) {
  auto errors = validate_scenario(scenario);
  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return scenario;
}

const Locator& locator_by_id(std::span<const Locator> locators, int id) {
  if (id >= 1 && id <= static_cast<int>(locators.size()) && locators[id - 1].id == id) {
    return locators[id - 1];
  }
  for (const auto& l : locators) {
    if (l.id == id) return l;
  }
  throw std::out_of_range("no locator with id " + std::to_string(id));
}

Mat3 look_at(const Vec3& from, const Vec3& to) {
  const Vec3 boresight = (to - from).normalized();
  Vec3 left = Vec3::UnitZ().cross(boresight);
  if (left.norm() < 1e-12) left = Vec3::UnitY();  // looking straight up/down
  left.normalize();
  const Vec3 up = boresight.cross(left);
  Mat3 m;
  m.col(0) = boresight;
  m.col(1) = left;
  m.col(2) = up;
  return m;
}

Scenario default_scenario() {
  Scenario s;
  // Hall roughly 20 m x 10 m. Heights vary around 7 m so that the vertical
  // column of the TDoA system is not identically zero.
  const Vec3 positions[] = {
      {0.0, 0.0, 6.2},   {10.0, -1.0, 7.6}, {20.0, 0.0, 6.6},
      {20.0, 10.0, 7.4}, {10.0, 11.0, 6.0}, {0.0, 10.0, 7.8},
  };
  const Vec3 aim(10.0, 5.0, 1.5);
  int id = 1;
  for (const auto& p : positions) {
    s.locators.push_back(Locator{id++, p, look_at(p, aim)});
  }
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 7; ++i) {
      s.ground_truth_points.emplace_back(2.0 + i * (16.0 / 6.0), 2.0 + 2.0 * j, 1.5);
    }
  }
  return s;
}

Vec3 area_center(const Scenario& s) {
  if (s.ground_truth_points.empty()) {
    Vec3 c = Vec3::Zero();
    for (const auto& l : s.locators) c += l.position;
    return s.locators.empty() ? c : Vec3(c / static_cast<double>(s.locators.size()));
  }
  Vec3 lo = s.ground_truth_points.front();
  Vec3 hi = lo;
  for (const auto& p : s.ground_truth_points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return 0.5 * (lo + hi);
}

std::vector<int> central_point_indices(const Scenario& s, int count) {
  if (!s.central_points.empty()) return s.central_points;
  const auto& pts = s.ground_truth_points;
  if (pts.empty()) return {};
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p.head<2>();
  centroid /= static_cast<double>(pts.size());

  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return (pts[a].head<2>() - centroid).norm() < (pts[b].head<2>() - centroid).norm();
  });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(count)));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace rpos
