#pragma once

#include "rpos/core.hpp"

#include <vector>

namespace testing {

inline std::vector<rpos::Locator> locators_at(const std::vector<rpos::Vec3>& positions) {
  std::vector<rpos::Locator> out;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    out.push_back({static_cast<int>(k + 1), positions[k], rpos::Mat3::Identity()});
  }
  return out;
}

// Positions of the default layout.
inline std::vector<rpos::Vec3> default_positions() {
  return {{0, 0, 6.2}, {10, -1, 7.6}, {20, 0, 6.6}, {20, 10, 7.4}, {10, 11, 6.0}, {0, 10, 7.8}};
}

inline std::vector<rpos::ToaMeasurement> toa_from(const std::vector<double>& ranges,
                                                  const std::vector<double>& weights = {}) {
  std::vector<rpos::ToaMeasurement> out;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    out.push_back({static_cast<int>(k + 1), ranges[k], weights.empty() ? 1.0 : weights[k]});
  }
  return out;
}

// Exact ranges from x plus a common offset.
inline std::vector<double> exact_ranges(const std::vector<rpos::Locator>& locators,
                                        const rpos::Vec3& x, double offset = 0.0) {
  std::vector<double> out;
  for (const auto& l : locators) out.push_back((x - l.position).norm() + offset);
  return out;
}

// Exact bearings in each locator's frame.
inline std::vector<rpos::AoaMeasurement> exact_bearings(const std::vector<rpos::Locator>& locators,
                                                        const rpos::Vec3& x, double kappa = 10.0) {
  std::vector<rpos::AoaMeasurement> out;
  for (const auto& l : locators) {
    const rpos::Vec3 u = l.orientation.transpose() * (x - l.position).normalized();
    out.push_back({l.id, u, 1.0, kappa});
  }
  return out;
}

inline rpos::Mat3 rotation(const rpos::Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace testing
