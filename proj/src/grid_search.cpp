#include "rpos/grid_search.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpos {

namespace {
constexpr std::size_t kMaxLocators = 64;
}

PackedObjective::PackedObjective(Model model, std::span<const ToaMeasurement> toa,
                                 std::span<const AoaMeasurement> aoa,
                                 std::span<const Locator> locators) {
  if (model != Model::aoa) {
    for (const auto& m : toa) {
      if (m.weight == 0.0) continue;
      const auto& p = locator_by_id(locators, m.locator_id).position;
      toa_px_.push_back(p.x());
      toa_py_.push_back(p.y());
      toa_pz_.push_back(p.z());
      range_.push_back(m.range);
      weight_.push_back(m.weight);
      weight_sum_ += m.weight;
    }
    if (range_.size() > kMaxLocators) {
      throw std::invalid_argument("PackedObjective supports at most 64 ToA terms");
    }
  }
  if (model != Model::toa) {
    for (const auto& m : aoa) {
      if (m.concentration == 0.0) continue;
      const auto& loc = locator_by_id(locators, m.locator_id);
      const Vec3 g = direction_global(loc, m.direction);
      aoa_px_.push_back(loc.position.x());
      aoa_py_.push_back(loc.position.y());
      aoa_pz_.push_back(loc.position.z());
      gx_.push_back(g.x());
      gy_.push_back(g.y());
      gz_.push_back(g.z());
      kappa_.push_back(m.concentration);
    }
  }
}

double PackedObjective::operator()(const Vec3& x) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double value = 0.0;

  const std::size_t nt = range_.size();
  if (nt > 0) {
    // d_k - |p_k - x| holds the range offset plus residual; profile it out.
    double r[kMaxLocators];
    double mean = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      const double dx = x.x() - toa_px_[k], dy = x.y() - toa_py_[k], dz = x.z() - toa_pz_[k];
      const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (rho == 0.0) return kNegInf;
      r[k] = range_[k] - rho;
      mean += weight_[k] * r[k];
    }
    mean /= weight_sum_;
    for (std::size_t k = 0; k < nt; ++k) {
      const double e = r[k] - mean;
      value -= weight_[k] * e * e / 2.0;
    }
  }

  for (std::size_t k = 0; k < kappa_.size(); ++k) {
    const double dx = x.x() - aoa_px_[k], dy = x.y() - aoa_py_[k], dz = x.z() - aoa_pz_[k];
    const double rho = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (rho == 0.0) return kNegInf;
    value += kappa_[k] * (gx_[k] * dx + gy_[k] * dy + gz_[k] * dz) / rho;
  }
  return value;
}

namespace {

struct Lattice {
  long nx, ny, nz;
  long count() const { return nx * ny * nz; }
};

Lattice lattice_of(const GridSpec& g) {
  auto n = [&](double lo, double hi) {
    return static_cast<long>(std::floor((hi - lo) / g.step + 1e-9)) + 1;
  };
  return Lattice{n(g.lo.x(), g.hi.x()), n(g.lo.y(), g.hi.y()), n(g.lo.z(), g.hi.z())};
}

Vec3 node(const GridSpec& g, const Lattice& l, long idx) {
  const long i = idx % l.nx;
  const long j = (idx / l.nx) % l.ny;
  const long k = idx / (l.nx * l.ny);
  return g.lo + g.step * Vec3(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  long index = -1;
  void offer(double v, long idx) {
    if (idx < 0) return;
    if (v > value || (v == value && (index < 0 || idx < index))) {
      value = v;
      index = idx;
    }
  }
};

GridResult finish(const GridSpec& g, const Lattice& l, const Best& best) {
  GridResult res;
  res.evaluated = static_cast<std::size_t>(l.count());
  res.value = best.value;
  res.best = best.index >= 0 ? node(g, l, best.index) : g.lo;
  return res;
}

}  // namespace

GridResult grid_search_serial(const PackedObjective& objective, const GridSpec& g) {
  const Lattice l = lattice_of(g);
  Best best;
  for (long idx = 0; idx < l.count(); ++idx) best.offer(objective(node(g, l, idx)), idx);
  return finish(g, l, best);
}

GridResult grid_search(const PackedObjective& objective, const GridSpec& g, int threads) {
  const Lattice l = lattice_of(g);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  Best best;
#pragma omp parallel num_threads(nthreads)
  {
    Best local;
#pragma omp for schedule(static)
    for (long idx = 0; idx < l.count(); ++idx) local.offer(objective(node(g, l, idx)), idx);
#pragma omp critical
    best.offer(local.value, local.index);
  }
  return finish(g, l, best);
}

}  // namespace rpos
