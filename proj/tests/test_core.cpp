#include "helpers.hpp"
#include "rpos/core.hpp"
#include "rpos/scenario_io.hpp"

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

using namespace rpos;

TEST_CASE("default scenario is valid") {
  const auto s = default_scenario();
  CHECK(validate_scenario(s).empty());
  CHECK(s.locators.size() == 6);
  CHECK(s.ground_truth_points.size() == 28);
  for (const auto& l : s.locators) {
    CHECK(l.position.z() > 5.5);
    CHECK(l.position.z() < 8.5);
    CHECK(is_orthonormal(l.orientation));
    CHECK(l.orientation.determinant() == doctest::Approx(1.0));
  }
  for (const auto& p : s.ground_truth_points) CHECK(p.z() == 1.5);
}

TEST_CASE("six locators at about 7 m with identity orientations are valid") {
  auto s = default_scenario();
  for (auto& l : s.locators) {
    l.position.z() = 7.0 + 0.1 * l.id;
    l.orientation = Mat3::Identity();
  }
  CHECK(validate_scenario(s).empty());
}

TEST_CASE("five locators is the minimum") {
  auto s = default_scenario();
  s.locators.pop_back();
  for (auto& l : s.locators) l.orientation = Mat3::Identity();
  CHECK(validate_scenario(s).empty());
  s.locators.pop_back();
  const auto errors = validate_scenario(s);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("at least 5 locators") != std::string::npos);
}

TEST_CASE("scaled orientation row is reported") {
  auto s = default_scenario();
  s.locators[2].orientation.row(1) *= 2.0;
  const auto errors = validate_scenario(s);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("orientation not orthonormal") != std::string::npos);
  CHECK_THROWS_AS(checked(s), ScenarioError);
}

TEST_CASE("every violation is reported") {
  auto s = default_scenario();
  s.algorithm_params.e_max = 0.0;
  s.algorithm_params.epsilon = -1.0;
  s.algorithm_params.N_it = 0;
  s.algorithm_params.kappa_max = 0.0;
  s.algorithm_params.sigma_max_sq = -2.0;
  s.noise_params.p_nlos = 1.5;
  CHECK(validate_scenario(s).size() == 6);
}

TEST_CASE("validation is idempotent") {
  const auto s = default_scenario();
  const Scenario& once = checked(s);
  CHECK(validate_scenario(checked(once)).empty());
}

TEST_CASE("direction_global") {
  Locator l;
  CHECK((direction_global(l, Vec3::UnitX()) - Vec3::UnitX()).norm() < 1e-15);
  l.orientation = testing::rotation(Vec3::UnitZ(), std::numbers::pi / 2);
  CHECK((direction_global(l, Vec3::UnitX()) - Vec3::UnitY()).norm() < 1e-15);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 axis(g(rng), g(rng), g(rng));
    l.orientation = testing::rotation(axis, g(rng));
    const Vec3 u = Vec3(g(rng), g(rng), g(rng)).normalized();
    CHECK(std::abs(direction_global(l, u).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("look_at points the first axis at the target") {
  const Vec3 from(3, -1, 7), to(10, 5, 1.5);
  const Mat3 m = look_at(from, to);
  CHECK(is_orthonormal(m));
  CHECK((m.col(0) - (to - from).normalized()).norm() < 1e-12);
  CHECK(m.col(2).z() > 0.0);
}

TEST_CASE("area center and central subset") {
  const auto s = default_scenario();
  CHECK((area_center(s) - Vec3(10, 5, 1.5)).norm() < 1e-12);
  const auto central = central_point_indices(s);
  REQUIRE(central.size() == 6);
  for (int i : central) {
    const Vec3& p = s.ground_truth_points[i];
    CHECK(std::abs(p.x() - 10.0) < 3.0);
    CHECK(std::abs(p.y() - 5.0) < 1.5);
  }
}

TEST_CASE("locator_by_id") {
  const auto s = default_scenario();
  CHECK(locator_by_id(s.locators, 4).position == s.locators[3].position);
  CHECK_THROWS_AS(locator_by_id(s.locators, 9), std::out_of_range);
}

TEST_CASE("scenario json round trip") {
  auto s = default_scenario();
  s.noise_params.aoa_kappa = std::numeric_limits<double>::infinity();
  s.central_points = {1, 2, 3};
  const auto doc = scenario_to_json(s);
  CHECK(doc["noise_params"]["aoa_kappa"] == "inf");
  const auto back = scenario_from_json(doc);
  REQUIRE(back.locators.size() == s.locators.size());
  for (std::size_t k = 0; k < s.locators.size(); ++k) {
    CHECK(back.locators[k].position == s.locators[k].position);
    CHECK(back.locators[k].orientation == s.locators[k].orientation);
  }
  CHECK(back.ground_truth_points == s.ground_truth_points);
  CHECK(std::isinf(back.noise_params.aoa_kappa));
  CHECK(back.central_points == s.central_points);
  CHECK(scenario_to_json(back) == doc);
}

TEST_CASE("missing sections take defaults") {
  auto doc = scenario_to_json(default_scenario());
  doc.erase("noise_params");
  doc.erase("baseline_params");
  const auto s = scenario_from_json(doc);
  CHECK(s.noise_params.range_sigma == NoiseParams{}.range_sigma);
  CHECK(s.baseline_params.sigma_init == 3.0);
}

TEST_CASE("malformed scenario documents") {
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"locators": 3})")), std::runtime_error);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), std::runtime_error);
}

TEST_CASE("shipped default scenario matches the built-in one") {
  std::ifstream is(RPOS_SOURCE_DIR "/scenarios/default.json");
  REQUIRE(is.good());
  const auto doc = nlohmann::json::parse(is);
  CHECK(scenario_to_json(scenario_from_json(doc)) == scenario_to_json(default_scenario()));
}
