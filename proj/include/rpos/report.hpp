#pragma once

#include "rpos/campaign.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace rpos {

/// Column order of records.csv.
inline constexpr const char* kRecordColumns =
    "trial_id,point_index,in_central,seed,model,init,gt_x,gt_y,gt_z,est_x,est_y,est_z,"
    "error_2d,converged,active_modalities,status";

/// Doubles use the shortest representation that parses back to the same value.
void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records);

/// Throws std::runtime_error naming the offending line on malformed input.
std::vector<TrialRecord> read_records_csv(std::istream& is);

/// Methods in first-appearance order.
std::vector<MethodSpec> methods_in(const std::vector<TrialRecord>& records);

/// Per-method statistics plus a model x init table of {mean, median, p95, p99}.
/// Missing statistics are null.
nlohmann::json summary_to_json(const CampaignSummary& summary);

enum class ReportFormat { csv, json, both };

ReportFormat parse_format(const std::string& s);

/// Writes records.csv and/or summary.json into `out_dir` (created if needed)
/// and returns the written paths. Throws std::runtime_error if a file cannot
/// be written.
std::vector<std::filesystem::path> emit_report(const CampaignSummary& summary,
                                               const std::vector<TrialRecord>& records,
                                               const std::filesystem::path& out_dir,
                                               ReportFormat format);

}  // namespace rpos
