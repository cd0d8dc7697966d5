#include "rpos/irls_tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace rpos {

IrlsParams tdoa_params(const AlgorithmParams& p) {
  return IrlsParams{p.N_it, p.epsilon, p.e_max, p.subset_size};
}

Eigen::VectorXd distance_differences(std::span<const double> ranges, int r) {
  const auto K = static_cast<int>(ranges.size());
  Eigen::VectorXd out(K - 1);
  for (int k = 0, row = 0; k < K; ++k) {
    if (k == r) continue;
    out(row++) = ranges[k] - ranges[r];
  }
  return out;
}

TdoaLinearSystem build_system(std::span<const Locator> locators, std::span<const double> ranges,
                              std::span<const double> weights, int r) {
  const auto K = static_cast<int>(locators.size());
  TdoaLinearSystem sys;
  sys.reference = r;
  sys.matrix_a.resize(K - 1, 4);
  sys.vector_b.resize(K - 1);
  sys.row_weights.resize(K - 1);

  const Vec3& pr = locators[r].position;
  for (int k = 0, row = 0; k < K; ++k) {
    if (k == r) continue;
    const Vec3 dp = locators[k].position - pr;
    const double dd = ranges[k] - ranges[r];
    sys.matrix_a.row(row) << dp.x(), dp.y(), dp.z(), dd;
    sys.vector_b(row) = 0.5 * (dp.squaredNorm() - dd * dd);
    sys.row_weights(row) = weights[k];
    ++row;
  }
  return sys;
}

Vec3 wls_reference_estimate(const TdoaLinearSystem& sys, std::span<const Locator> locators) {
  const auto& A = sys.matrix_a;
  const auto& w = sys.row_weights;
  const Eigen::Matrix4d normal = A.transpose() * w.asDiagonal() * A;
  const Eigen::Vector4d rhs = A.transpose() * w.asDiagonal() * sys.vector_b;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(normal, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo < 1e12)) {
    throw EstimationError(ErrorCode::degenerate_geometry,
                          "degenerate geometry for reference " + std::to_string(sys.reference));
  }
  const Eigen::Vector4d theta = normal.ldlt().solve(rhs);
  return locators[sys.reference].position + theta.head<3>();
}

std::vector<double> normalize_weights(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw EstimationError(ErrorCode::all_rejected, "all locators rejected");
  std::vector<double> out(weights.size());
  std::transform(weights.begin(), weights.end(), out.begin(), [&](double w) { return w / total; });
  return out;
}

Vec3 weighted_average(std::span<const Vec3> estimates, std::span<const double> normalized_weights) {
  Vec3 out = Vec3::Zero();
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (normalized_weights[k] != 0.0) out += normalized_weights[k] * estimates[k];
  }
  return out;
}

std::vector<double> residual_errors(std::span<const Locator> locators,
                                    std::span<const double> ranges, const Vec3& x_wa) {
  const auto K = locators.size();
  std::vector<double> dist(K);
  for (std::size_t k = 0; k < K; ++k) dist[k] = (x_wa - locators[k].position).norm();

  std::vector<double> e(K, 0.0);
  for (std::size_t r = 0; r < K; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (k == r) continue;
      sum += std::abs((ranges[k] - ranges[r]) - (dist[k] - dist[r]));
    }
    e[r] = sum / static_cast<double>(K - 1);
  }
  return e;
}

double andrews_weight(double e, double e_max) {
  if (e > e_max) return 0.0;
  if (e == 0.0) return 1.0;
  const double a = e * std::numbers::pi / e_max;
  // sin(pi) is not exactly zero in floating point.
  if (e == e_max) return 0.0;
  return std::clamp(std::sin(a) / a, 0.0, 1.0);
}

namespace {

struct Round {
  std::vector<Vec3> estimates;
  std::vector<bool> usable;
};

// One single-reference WLS fix per locator; degenerate references are marked.
Round solve_all_references(std::span<const Locator> locators, std::span<const double> ranges,
                           std::span<const double> weights) {
  const auto K = locators.size();
  Round round{std::vector<Vec3>(K, Vec3::Zero()), std::vector<bool>(K, false)};
  for (std::size_t r = 0; r < K; ++r) {
    try {
      const auto sys = build_system(locators, ranges, weights, static_cast<int>(r));
      round.estimates[r] = wls_reference_estimate(sys, locators);
      round.usable[r] = true;
    } catch (const EstimationError&) {
      round.usable[r] = false;
    }
  }
  return round;
}

// Degenerate references contribute nothing for this round.
std::vector<double> mask_and_normalize(std::span<const double> normalized, const Round& round) {
  std::vector<double> masked(normalized.begin(), normalized.end());
  for (std::size_t k = 0; k < masked.size(); ++k) {
    if (!round.usable[k]) masked[k] = 0.0;
  }
  return normalize_weights(masked);
}

bool any_usable(const Round& round) {
  return std::any_of(round.usable.begin(), round.usable.end(), [](bool b) { return b; });
}

IrlsTdoaResult run(std::span<const Locator> locators, std::span<const double> ranges,
                   const IrlsParams& params, IrlsState* last_state) {
  const auto K = locators.size();
  IrlsState state;
  state.weights.assign(K, 1.0 / static_cast<double>(K));
  state.residuals.assign(K, 0.0);

  Round round = solve_all_references(locators, ranges, state.weights);
  if (!any_usable(round)) {
    throw EstimationError(ErrorCode::degenerate_geometry, "degenerate geometry for every reference");
  }
  auto normalized = mask_and_normalize(state.weights, round);
  state.estimate = weighted_average(round.estimates, normalized);
  state.delta = std::numeric_limits<double>::infinity();

  bool degenerate = false;
  while (state.iteration < params.max_iterations && state.delta > params.epsilon) {
    ++state.iteration;
    state.residuals = residual_errors(locators, ranges, state.estimate);
    std::vector<double> weights(K);
    for (std::size_t k = 0; k < K; ++k) weights[k] = andrews_weight(state.residuals[k], params.e_max);

    std::vector<double> next_normalized;
    try {
      next_normalized = mask_and_normalize(weights, round);
    } catch (const EstimationError&) {
      if (last_state) *last_state = state;
      throw;
    }
    const Vec3 previous = state.estimate;
    state.weights = std::move(weights);
    normalized = std::move(next_normalized);
    state.estimate = weighted_average(round.estimates, normalized);

    Round next = solve_all_references(locators, ranges, state.weights);
    state.delta = (state.estimate - previous).norm();
    if (!any_usable(next)) {
      degenerate = true;
      break;
    }
    round = std::move(next);
  }

  IrlsTdoaResult result;
  result.estimate.position = state.estimate;
  result.estimate.weights_toa = state.weights;
  result.estimate.iterations = state.iteration;
  result.estimate.converged = !degenerate && state.delta <= params.epsilon;
  result.normalized_weights = normalized;
  result.reference_estimates = round.estimates;
  result.state = state;
  if (last_state) *last_state = state;
  return result;
}

}  // namespace

IrlsTdoaResult irls_tdoa(std::span<const Locator> locators, std::span<const ToaMeasurement> toa,
                         const IrlsParams& params, IrlsState* last_state) {
  const auto K = locators.size();
  std::vector<int> members;
  std::vector<double> all_ranges(K, std::numeric_limits<double>::quiet_NaN());
  for (const auto& m : toa) {
    for (std::size_t k = 0; k < K; ++k) {
      if (locators[k].id == m.locator_id) all_ranges[k] = m.range;
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (std::isfinite(all_ranges[k])) members.push_back(static_cast<int>(k));
  }
  if (params.subset_size > 0 && static_cast<int>(members.size()) > params.subset_size) {
    std::stable_sort(members.begin(), members.end(),
                     [&](int a, int b) { return all_ranges[a] < all_ranges[b]; });
    members.resize(params.subset_size);
    std::sort(members.begin(), members.end());
  }
  if (members.size() < 5) {
    throw EstimationError(ErrorCode::degenerate_geometry,
                          "IRLS TDoA needs at least 5 locators with ToA, got " +
                              std::to_string(members.size()));
  }

  if (members.size() == K) return run(locators, all_ranges, params, last_state);

  std::vector<Locator> sub_locators;
  std::vector<double> sub_ranges;
  for (int k : members) {
    sub_locators.push_back(locators[k]);
    sub_ranges.push_back(all_ranges[k]);
  }
  IrlsState sub_state;
  IrlsTdoaResult sub;
  try {
    sub = run(sub_locators, sub_ranges, params, &sub_state);
  } catch (...) {
    if (last_state) *last_state = sub_state;
    throw;
  }

  auto scatter = [&](const std::vector<double>& v, double fill) {
    std::vector<double> out(K, fill);
    for (std::size_t i = 0; i < members.size(); ++i) out[members[i]] = v[i];
    return out;
  };
  IrlsTdoaResult result = sub;
  result.estimate.weights_toa = scatter(sub.estimate.weights_toa, 0.0);
  result.normalized_weights = scatter(sub.normalized_weights, 0.0);
  result.state.weights = scatter(sub.state.weights, 0.0);
  result.state.residuals = scatter(sub.state.residuals, std::numeric_limits<double>::quiet_NaN());
  result.reference_estimates.assign(K, Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 0; i < members.size(); ++i) {
    result.reference_estimates[members[i]] = sub.reference_estimates[i];
  }
  if (last_state) *last_state = result.state;
  return result;
}

}  // namespace rpos
