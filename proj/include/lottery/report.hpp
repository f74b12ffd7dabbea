#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lottery/analysis.hpp"
#include "lottery/evaluation.hpp"
#include "lottery/instance.hpp"

namespace lottery {

// Shortest round-trip decimal with up to 10 significant digits, '.' decimal
// separator, locale-independent.
std::string format_sig10(double v);

// One CSV row per group-size class.
struct OutcomeRow {
  std::string instance_id;
  std::string mechanism;
  int n = 0, k = 0, m = 0;
  int size_class = 0;
  double u_mean = 0;
  double u_se = 0;
  EvalMethod method = EvalMethod::ExactEnum;
  long long replicas = 0;  // 0 for exact
  std::optional<std::uint64_t> seed;
  double utilization = 0;
  double fairness_ratio = 0;
  std::optional<double> envy_margin;
  // Appended by eval/sweep: worst-case bounds and their PASS/FAIL verdicts.
  std::optional<double> bound_eff, bound_fair;
  std::optional<bool> eff_pass, fair_pass;
};

std::string outcome_csv_header(bool with_bounds);
std::string outcome_row_csv(const OutcomeRow& row, bool with_bounds);

// Rows for one evaluated mechanism: per-size-class utilities plus the
// instance-level utilization/fairness columns repeated on each row.
std::vector<OutcomeRow> outcome_rows(const std::string& instance_id, const std::string& mechanism,
                                     const Instance& inst, const UtilityVector& util,
                                     std::optional<double> envy_margin);

std::string bounds_csv_header();
std::string bounds_csv_row(const std::string& instance_id, const Instance& inst,
                           const BoundRecord& rec);
std::string bounds_json(const std::string& instance_id, const Instance& inst,
                        const BoundRecord& rec);

// Instance files: {"k": int, "group_sizes": [int,...]}; named constructions:
// {"tag": string, "params": {...}}. Unknown fields are rejected.
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& inst);
NamedConstruction named_construction_from_json_text(const std::string& text);
bool json_text_is_named_construction(const std::string& text);

// Profiles: {"kind": "group_declaration"|"ticket_request", "actions": [...]}.
ActionProfile profile_from_json_text(const std::string& text, const Instance& inst);
std::string profile_to_json_text(const ActionProfile& profile);

std::string instance_stats_json(const Instance& inst);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lottery
