#include "rpos/irls_aoa.hpp"

#include "rpos/irls_tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rpos {

IrlsAoaParams aoa_params(const AlgorithmParams& p) {
  return IrlsAoaParams{p.N_it, p.epsilon, p.e_max_aoa};
}

Vec3 bearing_ls_position(std::span<const BearingLine> lines) {
  Mat3 normal = Mat3::Zero();
  Vec3 rhs = Vec3::Zero();
  int used = 0;
  for (const auto& line : lines) {
    if (line.weight == 0.0) continue;
    const Mat3 proj = Mat3::Identity() - line.direction * line.direction.transpose();
    normal += line.weight * proj;
    rhs += line.weight * proj * line.anchor;
    ++used;
  }
  if (used >= 2) {
    Eigen::SelfAdjointEigenSolver<Mat3> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo > 1e-12 * hi) return normal.ldlt().solve(rhs);
  }
  throw EstimationError(ErrorCode::degenerate_geometry, "degenerate bearing geometry");
}

double angular_residual(const BearingLine& line, const Vec3& x) {
  const Vec3 v = x - line.anchor;
  const double rho = v.norm();
  if (rho == 0.0) throw EstimationError(ErrorCode::undefined_direction, "undefined direction");
  return std::acos(std::clamp(line.direction.dot(v) / rho, -1.0, 1.0));
}

IrlsAoaResult irls_aoa(std::span<const Locator> locators, std::span<const AoaMeasurement> aoa,
                       const IrlsAoaParams& params) {
  const auto K = locators.size();
  std::vector<BearingLine> lines(K);
  std::vector<bool> present(K, false);
  for (const auto& m : aoa) {
    for (std::size_t k = 0; k < K; ++k) {
      if (locators[k].id != m.locator_id) continue;
      lines[k] = BearingLine{locators[k].position,
                             direction_global(locators[k], m.direction).normalized(), 1.0};
      present[k] = true;
    }
  }
  const auto count = std::count(present.begin(), present.end(), true);
  for (std::size_t k = 0; k < K; ++k) {
    lines[k].weight = present[k] ? 1.0 / static_cast<double>(count) : 0.0;
  }

  Vec3 x = bearing_ls_position(lines);
  std::vector<double> weights(K, 0.0);
  std::vector<double> residuals(K, std::numeric_limits<double>::quiet_NaN());
  double delta = std::numeric_limits<double>::infinity();
  int iteration = 0;

  while (iteration < params.max_iterations && delta > params.epsilon) {
    ++iteration;
    for (std::size_t k = 0; k < K; ++k) {
      if (!present[k]) continue;
      try {
        residuals[k] = angular_residual(lines[k], x);
      } catch (const EstimationError&) {
        residuals[k] = std::numbers::pi;
      }
      weights[k] = andrews_weight(residuals[k], params.e_max);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw EstimationError(ErrorCode::all_rejected, "all bearings rejected");
    for (std::size_t k = 0; k < K; ++k) lines[k].weight = weights[k] / total;

    const Vec3 next = bearing_ls_position(lines);
    delta = (next - x).norm();
    x = next;
  }

  IrlsAoaResult result;
  result.estimate.position = x;
  result.estimate.weights_aoa = weights;
  result.estimate.iterations = iteration;
  result.estimate.converged = delta <= params.epsilon;
  result.residuals = residuals;
  result.delta = delta;
  return result;
}

}  // namespace rpos
