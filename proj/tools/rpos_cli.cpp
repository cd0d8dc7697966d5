// rpos: Monte Carlo campaigns for the robust positioning pipeline.
//
//   rpos simulate --scenario s.json --trials 10 --seed 7 --out dir
//   rpos evaluate --scenario s.json --trials 100 --seed 7 --methods joint --out dir
//   rpos report   --in dir/records.csv --out dir2
//   rpos scenario --out default.json
//
// Failures print one JSON object {"error": ..., "message": ...} on stderr and
// exit nonzero.

#include "rpos/campaign.hpp"
#include "rpos/report.hpp"
#include "rpos/scenario_io.hpp"
#include "rpos/simulator.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int fail(const std::string& code, const std::string& message, int status = 1) {
  nlohmann::json err = {{"error", code}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return status;
}

rpos::Scenario scenario_from(const std::string& path) {
  return path.empty() ? rpos::default_scenario() : rpos::load_scenario(path);
}

void print_table(const rpos::CampaignSummary& summary) {
  auto fmt = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("    -   ");
    std::snprintf(buf, sizeof(buf), "%8.3f", *v);
    return std::string(buf);
  };
  std::cout << "method              n      mean    median       p95       p99\n";
  for (const auto& m : summary.methods) {
    char head[32];
    std::snprintf(head, sizeof(head), "%-16s %5zu", rpos::method_name(m.method).c_str(), m.all.count);
    std::cout << head << "  " << fmt(m.all.mean) << "  " << fmt(m.all.median) << "  "
              << fmt(m.all.p95) << "  " << fmt(m.all.p99) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust ToA/AoA positioning: simulation and evaluation campaigns"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", methods = "all", format = "both", in_path;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;

  auto* simulate = app.add_subcommand("simulate", "dump raw synthetic measurements");
  simulate->add_option("--scenario", scenario_path, "scenario JSON (default layout if omitted)");
  simulate->add_option("--trials", trials, "trials per ground-truth point")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "campaign seed");
  simulate->add_option("--out", out_dir, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "run a Monte Carlo campaign");
  evaluate->add_option("--scenario", scenario_path, "scenario JSON (default layout if omitted)");
  evaluate->add_option("--trials", trials, "trials per ground-truth point")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", seed, "campaign seed");
  evaluate->add_option("--methods", methods, "comma list of model or model:init");
  evaluate->add_option("--out", out_dir, "output directory");
  evaluate->add_option("--format", format, "csv, json or both");
  evaluate->add_option("--threads", threads, "worker threads (0 = OpenMP default)");

  auto* report = app.add_subcommand("report", "re-aggregate saved trial records");
  report->add_option("--in", in_path, "records.csv from a previous evaluate")->required();
  report->add_option("--methods", methods, "restrict to these methods");
  report->add_option("--out", out_dir, "output directory");
  report->add_option("--format", format, "csv, json or both");

  auto* scenario_cmd = app.add_subcommand("scenario", "write the default scenario as JSON");
  scenario_cmd->add_option("--out", out_dir, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*simulate) {
      const auto s = scenario_from(scenario_path);
      fs::create_directories(out_dir);
      const auto path = fs::path(out_dir) / "measurements.csv";
      std::ofstream os(path, std::ios::binary);
      if (!os) return fail("io", "cannot write " + path.string());
      rpos::write_measurements_header(os);
      std::uint64_t id = 0;
      for (const auto& p : s.ground_truth_points) {
        for (int t = 0; t < trials; ++t, ++id) {
          rpos::write_measurements_rows(os, id, rpos::synthesize(s, p, rpos::trial_seed(seed, id)));
        }
      }
      std::cout << path.string() << '\n';
    } else if (*evaluate) {
      const auto s = scenario_from(scenario_path);
      rpos::CampaignConfig cfg;
      cfg.trials_per_point = trials;
      cfg.seed = seed;
      cfg.methods = rpos::parse_methods(methods);
      cfg.threads = threads;
      const auto fmt = rpos::parse_format(format);
      const auto result = rpos::run_campaign(s, cfg);
      for (const auto& p : rpos::emit_report(result.summary, result.records, out_dir, fmt)) {
        std::cout << p.string() << '\n';
      }
      print_table(result.summary);
    } else if (*report) {
      std::ifstream is(in_path, std::ios::binary);
      if (!is) return fail("io", "cannot read " + in_path);
      const auto records = rpos::read_records_csv(is);
      const auto selected = methods == "all" ? rpos::methods_in(records) : rpos::parse_methods(methods);
      const auto summary = rpos::summarize(records, selected);
      for (const auto& p : rpos::emit_report(summary, records, out_dir, rpos::parse_format(format))) {
        std::cout << p.string() << '\n';
      }
      print_table(summary);
    } else if (*scenario_cmd) {
      std::ofstream os(out_dir, std::ios::binary);
      if (!os) return fail("io", "cannot write " + out_dir);
      os << rpos::scenario_to_json(rpos::default_scenario()).dump(2) << '\n';
    }
  } catch (const rpos::ScenarioError& e) {
    nlohmann::json err = {{"error", "invalid_scenario"}, {"message", e.what()}, {"violations", e.errors()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    return fail("usage", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
