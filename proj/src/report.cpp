#include "rpos/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rpos {

using nlohmann::json;

namespace {

void put(std::string& line, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, ptr);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": bad number '" +
                             std::string(field) + "'");
  }
  return value;
}

bool parse_flag(std::string_view field, std::size_t line_no) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": bad flag '" +
                           std::string(field) + "'");
}

TrialStatus parse_status(std::string_view s, std::size_t line_no) {
  if (s == "ok") return TrialStatus::ok;
  if (s == "fallback") return TrialStatus::fallback;
  if (s == "failed") return TrialStatus::failed;
  throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": bad status '" +
                           std::string(s) + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json stats_json(const MethodSummary& m) {
  return {{"mean", optional_number(m.all.mean)},
          {"median", optional_number(m.all.median)},
          {"p95", optional_number(m.all.p95)},
          {"p99", optional_number(m.all.p99)}};
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kRecordColumns << '\n';
  std::string line;
  for (const auto& r : records) {
    line.clear();
    line += std::to_string(r.trial_id) + ',' + std::to_string(r.point_index) + ',' +
            (r.in_central ? "1" : "0") + ',' + std::to_string(r.seed) + ',' +
            to_string(r.method.model) + ',' + to_string(r.method.init);
    for (int i = 0; i < 3; ++i) {
      line += ',';
      put(line, r.ground_truth(i));
    }
    for (int i = 0; i < 3; ++i) {
      line += ',';
      put(line, r.estimate(i));
    }
    line += ',';
    put(line, r.error_2d);
    line += r.converged ? ",1," : ",0,";
    line += to_string(r.active_modalities);
    line += ',';
    line += to_string(r.status);
    line += '\n';
    os << line;
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordColumns) {
    throw std::runtime_error("records.csv: missing or unexpected header");
  }
  std::vector<TrialRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 16) {
      throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": expected 16 fields");
    }
    TrialRecord r;
    r.trial_id = parse_number<std::uint64_t>(f[0], line_no);
    r.point_index = parse_number<int>(f[1], line_no);
    r.in_central = parse_flag(f[2], line_no);
    r.seed = parse_number<std::uint64_t>(f[3], line_no);
    try {
      r.method = parse_methods(std::string(f[4]) + ":" + std::string(f[5])).front();
      r.active_modalities = modalities_from_string(std::string(f[14]));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": " + e.what());
    }
    for (int i = 0; i < 3; ++i) r.ground_truth(i) = parse_number<double>(f[6 + i], line_no);
    for (int i = 0; i < 3; ++i) r.estimate(i) = parse_number<double>(f[9 + i], line_no);
    r.error_2d = parse_number<double>(f[12], line_no);
    r.converged = parse_flag(f[13], line_no);
    r.status = parse_status(f[15], line_no);
    out.push_back(r);
  }
  return out;
}

std::vector<MethodSpec> methods_in(const std::vector<TrialRecord>& records) {
  std::vector<MethodSpec> out;
  for (const auto& r : records) {
    if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
  }
  return out;
}

json summary_to_json(const CampaignSummary& summary) {
  json doc;
  doc["trials"] = summary.trials;
  doc["methods"] = json::array();
  json table = json::object();
  for (const auto& m : summary.methods) {
    json cdf = json::array();
    for (const auto& [e, p] : m.cdf) cdf.push_back({e, p});
    json entry = stats_json(m);
    entry["model"] = to_string(m.method.model);
    entry["init"] = to_string(m.method.init);
    entry["count"] = m.all.count;
    entry["central"] = {{"count", m.central_count},
                        {"mean", optional_number(m.central_mean)},
                        {"max", optional_number(m.central_max)}};
    entry["flagged"] = m.flagged;
    entry["fallback"] = m.fallback;
    entry["failed"] = m.failed;
    entry["not_converged"] = m.not_converged;
    entry["cdf"] = std::move(cdf);
    doc["methods"].push_back(std::move(entry));
    table[to_string(m.method.model)][to_string(m.method.init)] = stats_json(m);
  }
  doc["table"] = std::move(table);
  return doc;
}

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "both" || s == "csv,json" || s == "json,csv") return ReportFormat::both;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv, json or both)");
}

std::vector<std::filesystem::path> emit_report(const CampaignSummary& summary,
                                               const std::vector<TrialRecord>& records,
                                               const std::filesystem::path& out_dir,
                                               ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string());

  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
  };
  if (format != ReportFormat::json) {
    const auto p = out_dir / "records.csv";
    auto os = open(p);
    write_records_csv(os, records);
    if (!os) throw std::runtime_error("write failed: " + p.string());
    written.push_back(p);
  }
  if (format != ReportFormat::csv) {
    const auto p = out_dir / "summary.json";
    auto os = open(p);
    os << summary_to_json(summary).dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed: " + p.string());
    written.push_back(p);
  }
  return written;
}

}  // namespace rpos
