#include "helpers.hpp"
#include "rpos/likelihood.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace rpos;

namespace {

const std::vector<double> kRanges = {129.45220231242337, 128.1386017799159, 134.5761832564511,
                                     138.69579994704827, 128.76590300647706, 131.33646765991824};
const std::vector<double> kWeights = {1.0, 0.7, 0.4, 0.9, 0.2, 0.6};
const double kOffset = 118.7;  // m
const Vec3 kX(6.0, 3.5, 2.0);

std::vector<AoaMeasurement> fixture_bearings() {
  const double dirs[] = {0.6007212985974549,   0.30036064929872747, -0.7408896016035278,
                         -0.2004414573445789,  0.5011036433614473,  -0.8418541208472314,
                         -0.6991266372144912,  0.2996257016633534,  -0.649189020270599,
                         -0.6011734334104011,  -0.4007822889402674, -0.6913494484219612,
                         -0.10050378152592122, -0.7035264706814485, -0.7035264706814485,
                         0.502518907629606,    -0.502518907629606,  -0.7035264706814484};
  const double kappa[] = {10.0, 8.0, 6.0, 9.0, 3.0, 7.0};
  std::vector<AoaMeasurement> out;
  for (int k = 0; k < 6; ++k) {
    out.push_back({k + 1, Vec3(dirs[3 * k], dirs[3 * k + 1], dirs[3 * k + 2]), 1.0, kappa[k]});
  }
  return out;
}

void check_vec(const Vec3& got, const Vec3& want, double tol) {
  for (int i = 0; i < 3; ++i) CHECK(got(i) == doctest::Approx(want(i)).epsilon(tol));
}

void check_mat(const Mat3& got, const double (&want)[9], double tol) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(got(i, j) == doctest::Approx(want[3 * i + j]).epsilon(tol));
}

using Scalar = std::function<double(const Vec3&)>;

Vec3 fd_gradient(const Scalar& f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    g(i) = (f(x + e) - f(x - e)) / (2 * h);
  }
  return g;
}

double rel_err(const Vec3& a, const Vec3& b) {
  return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
}

}  // namespace

TEST_CASE("toa log-likelihood examples") {
  const auto locs = testing::locators_at({Vec3::Zero()});
  CHECK(toa_log_likelihood(Vec3(3, 4, 0), 0.0, testing::toa_from({5.0}), locs) == 0.0);
  CHECK(toa_log_likelihood(Vec3(3, 4, 0), 0.0, testing::toa_from({6.0}), locs) == -0.5);
}

TEST_CASE("toa value, gradient and hessian against the reference") {
  const auto locs = testing::locators_at(testing::default_positions());
  const auto toa = testing::toa_from(kRanges, kWeights);
  const double tau = kOffset / kSpeedOfLight;
  CHECK(toa_log_likelihood(kX, tau, toa, locs) == doctest::Approx(-11.384696804304687).epsilon(1e-9));
  const auto ev = evaluate_with_derivatives(Model::toa, kX, tau, toa, {}, locs);
  CHECK(ev.value == doctest::Approx(-11.384696804304687).epsilon(1e-9));
  check_vec(ev.gradient, Vec3(-0.8999732632592639, -0.5001062757977071, -3.848995106645402), 1e-7);
  check_mat(ev.hessian,
            {-1.569193898216616, -0.3162096417051683, -0.004362396477819247, -0.3162096417051683,
             -0.3114552033748784, 0.16562925989601987, -0.004362396477819247, 0.16562925989601987,
             -0.36136776227617096},
            1e-7);
  check_mat(profiled_hessian(ev),
            {-1.506926883430216, -0.31884601515227534, 0.22950643907743307,
             -0.31884601515227534, -0.31134357982946753, 0.1557272983152573, 0.22950643907743307,
             0.1557272983152573, 0.5170207782953242},
            1e-7);
  CHECK(ev.hessian_offset_offset == doctest::Approx(-(1.0 + 0.7 + 0.4 + 0.9 + 0.2 + 0.6)));
}

TEST_CASE("profile_tau") {
  SUBCASE("reference value") {
    const auto locs = testing::locators_at(testing::default_positions());
    const auto toa = testing::toa_from(kRanges, kWeights);
    CHECK(profile_tau(kX, toa, locs) == doctest::Approx(4.03337369304126e-07).epsilon(1e-12));
  }
  SUBCASE("symmetric mean of two residuals") {
    const auto locs = testing::locators_at({Vec3(0, 0, 0), Vec3(10, 0, 0)});
    const Vec3 x(4, 3, 0);
    const auto toa = testing::toa_from({5.0 + 1.0, std::hypot(6.0, 3.0) + 3.0});
    CHECK(profile_tau(x, toa, locs) * kSpeedOfLight == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("all weights zero") {
    const auto locs = testing::locators_at(testing::default_positions());
    const auto toa = testing::toa_from(kRanges, std::vector<double>(6, 0.0));
    CHECK_THROWS_AS(profile_tau(kX, toa, locs), EstimationError);
  }
}

TEST_CASE("aoa value, gradient and hessian against the reference") {
  const auto locs = testing::locators_at(testing::default_positions());
  const auto aoa = fixture_bearings();
  CHECK(aoa_log_likelihood(kX, aoa, locs) == doctest::Approx(40.29519867041917).epsilon(1e-12));
  const auto ev = evaluate_with_derivatives(Model::aoa, kX, 0.0, {}, aoa, locs);
  check_vec(ev.gradient, Vec3(0.3281641223039693, -0.07036807333207107, -1.0713545749980873), 1e-10);
  check_mat(ev.hessian,
            {-0.14693128464664026, 0.017439903546396598, -0.0016928313455319005,
             0.017439903546396598, -0.2707997303575978, -0.03601613913443337,
             -0.0016928313455319005, -0.03601613913443337, -0.3888841683074014},
            1e-10);
}

TEST_CASE("aoa log-likelihood is undefined on a locator") {
  const auto locs = testing::locators_at(testing::default_positions());
  CHECK_THROWS_AS(aoa_log_likelihood(locs[2].position, fixture_bearings(), locs), EstimationError);
  auto aoa = fixture_bearings();
  aoa[2].concentration = 0.0;
  CHECK_NOTHROW(aoa_log_likelihood(locs[2].position, aoa, locs));
}

TEST_CASE("joint is the sum of its parts") {
  const auto locs = testing::locators_at(testing::default_positions());
  const auto toa = testing::toa_from(kRanges, kWeights);
  const auto aoa = fixture_bearings();
  const double tau = kOffset / kSpeedOfLight;
  CHECK(joint_log_likelihood(kX, tau, toa, aoa, locs) ==
        doctest::Approx(toa_log_likelihood(kX, tau, toa, locs) + aoa_log_likelihood(kX, aoa, locs))
            .epsilon(1e-14));
  const auto ej = evaluate_with_derivatives(Model::joint, kX, tau, toa, aoa, locs);
  const auto et = evaluate_with_derivatives(Model::toa, kX, tau, toa, aoa, locs);
  const auto ea = evaluate_with_derivatives(Model::aoa, kX, tau, toa, aoa, locs);
  CHECK((ej.gradient - et.gradient - ea.gradient).norm() < 1e-12);
  CHECK((ej.hessian - et.hessian - ea.hessian).norm() < 1e-12);
}

TEST_CASE("variance proxy") {
  Mat3 h;
  h << 2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 4.0;
  CHECK(variance_from_hessian(Mat3(-h)) == doctest::Approx(0.6604046242774566).epsilon(1e-14));
  CHECK_THROWS_AS(variance_from_hessian(h), EstimationError);

  // The reference instance is not a local maximum of the profiled joint model.
  const auto locs = testing::locators_at(testing::default_positions());
  const auto ev = evaluate_with_derivatives(Model::joint, kX, kOffset / kSpeedOfLight,
                                            testing::toa_from(kRanges, kWeights),
                                            fixture_bearings(), locs);
  try {
    variance_from_hessian(profiled_hessian(ev));
    FAIL("expected not_local_maximum");
  } catch (const EstimationError& e) {
    CHECK(e.code() == ErrorCode::not_local_maximum);
  }
}

TEST_CASE("analytic derivatives match central differences on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(0.0, 20.0), uy(0.0, 10.0), uz(0.0, 3.0), uw(0.1, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto locs = testing::locators_at(testing::default_positions());
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 x(ux(rng), uy(rng), uz(rng));
    std::vector<double> ranges, w;
    std::vector<AoaMeasurement> aoa;
    for (const auto& l : locs) {
      ranges.push_back((x - l.position).norm() + 30.0 + g(rng));
      w.push_back(uw(rng));
      aoa.push_back({l.id, Vec3(g(rng), g(rng), g(rng)).normalized(), 1.0, 10.0 * uw(rng)});
    }
    const auto toa = testing::toa_from(ranges, w);
    const Vec3 x0 = x + Vec3(g(rng), g(rng), 0.3 * g(rng));
    const double tau = 29.0 / kSpeedOfLight;

    for (Model m : {Model::toa, Model::aoa, Model::joint}) {
      const auto ev = evaluate_with_derivatives(m, x0, tau, toa, aoa, locs);
      const Scalar f = [&](const Vec3& y) {
        return evaluate_with_derivatives(m, y, tau, toa, aoa, locs).value;
      };
      CHECK(rel_err(ev.gradient, fd_gradient(f, x0, 1e-5)) < 1e-4);
      for (int i = 0; i < 3; ++i) {
        const Scalar gi = [&](const Vec3& y) {
          return evaluate_with_derivatives(m, y, tau, toa, aoa, locs).gradient(i);
        };
        CHECK(rel_err(ev.hessian.row(i).transpose(), fd_gradient(gi, x0, 1e-5)) < 1e-4);
      }
    }
    // d/d(offset) of the ToA term and its mixed derivatives.
    const auto ev = evaluate_with_derivatives(Model::toa, x0, tau, toa, {}, locs);
    const double h = 1e-4;
    const auto at = [&](double off) {
      return evaluate_with_derivatives(Model::toa, x0, off / kSpeedOfLight, toa, {}, locs);
    };
    const double off = tau * kSpeedOfLight;
    const double d_off = (at(off + h).value - at(off - h).value) / (2 * h);
    CHECK(ev.gradient_offset == doctest::Approx(d_off).epsilon(1e-4));
    const Vec3 d_mixed = (at(off + h).gradient - at(off - h).gradient) / (2 * h);
    CHECK(rel_err(ev.hessian_x_offset, d_mixed) < 1e-4);

    // Profiling zeroes the offset derivative.
    const double tau_star = profile_tau(x0, toa, locs);
    const auto ep = evaluate_with_derivatives(Model::toa, x0, tau_star, toa, {}, locs);
    CHECK(std::abs(ep.gradient_offset) < 1e-9);
  }
}

TEST_CASE("zero-weight terms are skipped") {
  const auto locs = testing::locators_at(testing::default_positions());
  auto w = kWeights;
  w[3] = 0.0;
  auto ranges = kRanges;
  const double tau = kOffset / kSpeedOfLight;
  const double base = toa_log_likelihood(kX, tau, testing::toa_from(ranges, w), locs);
  ranges[3] += 1000.0;
  CHECK(toa_log_likelihood(kX, tau, testing::toa_from(ranges, w), locs) == base);
}
