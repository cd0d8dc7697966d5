#include "rpos/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace rpos {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error(std::string(what) + ": expected an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Row-major 3x3.
Mat3 mat3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("orientation: expected 3 rows");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3_from(j[r], "orientation row").transpose();
  return m;
}

json mat3_to(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec3_to(m.row(r).transpose()));
  return rows;
}

// Concentrations may be given as "inf" to request exact directions.
double kappa_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw std::runtime_error("concentration: expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

json kappa_to(double k) {
  if (std::isinf(k)) return "inf";
  return k;
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_range(const json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const auto& r = obj.at(key);
  if (!r.is_array() || r.size() != 2) {
    throw std::runtime_error(std::string(key) + ": expected [min, max]");
  }
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  try {
    Scenario s;
    for (const auto& jl : doc.at("locators")) {
      Locator l;
      l.id = jl.at("id").get<int>();
      l.position = vec3_from(jl.at("position"), "position");
      l.orientation = jl.contains("orientation") ? mat3_from(jl.at("orientation")) : Mat3::Identity();
      s.locators.push_back(l);
    }
    if (doc.contains("ground_truth_points")) {
      for (const auto& jp : doc.at("ground_truth_points")) {
        s.ground_truth_points.push_back(vec3_from(jp, "ground_truth_points"));
      }
    }
    if (doc.contains("algorithm_params")) {
      const auto& a = doc.at("algorithm_params");
      auto& p = s.algorithm_params;
      read_opt(a, "N_it", p.N_it);
      read_opt(a, "e_max", p.e_max);
      read_opt(a, "epsilon", p.epsilon);
      read_opt(a, "sigma_max_sq", p.sigma_max_sq);
      read_opt(a, "kappa_max", p.kappa_max);
      read_opt(a, "e_max_aoa", p.e_max_aoa);
      read_opt(a, "subset_size", p.subset_size);
    }
    if (doc.contains("noise_params")) {
      const auto& n = doc.at("noise_params");
      auto& p = s.noise_params;
      read_opt(n, "range_sigma", p.range_sigma);
      if (n.contains("aoa_kappa")) p.aoa_kappa = kappa_from(n.at("aoa_kappa"));
      read_opt(n, "p_nlos", p.p_nlos);
      read_range(n, "nlos_bias_range", p.nlos_bias_min, p.nlos_bias_max);
      if (n.contains("nlos_aoa_kappa")) p.nlos_aoa_kappa = kappa_from(n.at("nlos_aoa_kappa"));
      read_range(n, "tau_range", p.tau_min, p.tau_max);
    }
    if (doc.contains("baseline_params")) {
      read_opt(doc.at("baseline_params"), "sigma_init", s.baseline_params.sigma_init);
    }
    read_opt(doc, "central_points", s.central_points);
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["locators"] = json::array();
  for (const auto& l : s.locators) {
    doc["locators"].push_back(
        {{"id", l.id}, {"position", vec3_to(l.position)}, {"orientation", mat3_to(l.orientation)}});
  }
  doc["ground_truth_points"] = json::array();
  for (const auto& p : s.ground_truth_points) doc["ground_truth_points"].push_back(vec3_to(p));

  const auto& a = s.algorithm_params;
  doc["algorithm_params"] = {{"N_it", a.N_it},
                             {"e_max", a.e_max},
                             {"epsilon", a.epsilon},
                             {"sigma_max_sq", a.sigma_max_sq},
                             {"kappa_max", a.kappa_max},
                             {"e_max_aoa", a.e_max_aoa},
                             {"subset_size", a.subset_size}};
  const auto& n = s.noise_params;
  doc["noise_params"] = {{"range_sigma", n.range_sigma},
                         {"aoa_kappa", kappa_to(n.aoa_kappa)},
                         {"p_nlos", n.p_nlos},
                         {"nlos_bias_range", {n.nlos_bias_min, n.nlos_bias_max}},
                         {"nlos_aoa_kappa", kappa_to(n.nlos_aoa_kappa)},
                         {"tau_range", {n.tau_min, n.tau_max}}};
  doc["baseline_params"] = {{"sigma_init", s.baseline_params.sigma_init}};
  if (!s.central_points.empty()) doc["central_points"] = s.central_points;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("scenario parse error in " + path.string() + ": " + e.what());
  }
  Scenario s = scenario_from_json(doc);
  checked(s);
  return s;
}

}  // namespace rpos
