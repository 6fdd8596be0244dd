#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace psched {

using Json = nlohmann::ordered_json;

/// Thrown when an instance or schedule document is malformed.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One class of clients sharing the same meeting requirements.
struct CohortSpec {
  std::string label;
  int population = 0;   ///< number of members
  int visits = 0;       ///< required meetings per member over the horizon
  int slot_length = 1;  ///< consecutive slots occupied by one meeting
  int gap = 0;          ///< minimum day gap between consecutive meetings

  bool operator==(const CohortSpec&) const = default;
};

/// Identifies one member of one cohort. Members are 1-based.
struct StudentId {
  int cohort = 0;
  int member = 1;

  auto operator<=>(const StudentId&) const = default;
};

/// A scheduling instance: planning horizon, provider availability and the
/// cohorts that demand meetings. Immutable after construction.
struct ProblemInstance {
  int days = 0;            ///< planning horizon D in workdays
  int slots_per_day = 0;   ///< slots P per day
  int emergency_quota = 0; ///< slots L reserved per day for walk-ins
  std::vector<std::vector<std::uint8_t>> availability;  ///< D x P, entries 0/1
  std::vector<CohortSpec> cohorts;

  bool operator==(const ProblemInstance&) const = default;

  /// 1-based accessor into the availability matrix.
  bool available(int day, int slot) const {
    return availability[static_cast<size_t>(day - 1)][static_cast<size_t>(slot - 1)] != 0;
  }

  int total_students() const {
    int n = 0;
    for (const auto& c : cohorts) n += c.population;
    return n;
  }

  /// Total slots demanded by all visits, excluding emergency reservations.
  std::int64_t total_visit_slots() const {
    std::int64_t n = 0;
    for (const auto& c : cohorts)
      n += std::int64_t(c.population) * c.visits * c.slot_length;
    return n;
  }

  std::int64_t available_slot_count() const {
    std::int64_t n = 0;
    for (const auto& row : availability)
      for (auto v : row) n += v;
    return n;
  }
};

/// Day-distance implied by the gap rows. Gap windows start at t in
/// [1, D - gap]; with gap >= D no window fits inside the horizon and only the
/// one-visit-per-day rule remains, so the effective pairwise gap drops to 0.
inline int effective_gap(const CohortSpec& cohort, int days) {
  return cohort.gap < days ? cohort.gap : 0;
}

/// Repeats a weekly 0/1 pattern `weeks` times into a full availability matrix.
inline std::vector<std::vector<std::uint8_t>> tile_availability(
    const std::vector<std::vector<std::uint8_t>>& weekly_pattern, int weeks) {
  if (weeks < 1) throw std::invalid_argument("weeks must be >= 1");
  if (weekly_pattern.empty()) throw std::invalid_argument("weekly_pattern must not be empty");
  const size_t width = weekly_pattern.front().size();
  for (const auto& row : weekly_pattern) {
    if (row.size() != width)
      throw std::invalid_argument("weekly_pattern rows must all have the same length");
    for (auto v : row)
      if (v != 0 && v != 1) throw std::invalid_argument("weekly_pattern entries must be 0 or 1");
  }
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(weekly_pattern.size() * static_cast<size_t>(weeks));
  for (int t = 0; t < weeks; ++t)
    for (const auto& row : weekly_pattern) out.push_back(row);
  return out;
}

enum class Severity { fatal, warning };

struct Diagnostic {
  Severity severity = Severity::fatal;
  std::string code;
  std::string message;
};

namespace detail {

inline int longest_available_run(const std::vector<std::uint8_t>& row) {
  int best = 0, run = 0;
  for (auto v : row) {
    run = v ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace detail

/// Necessary-condition screening. A fatal diagnostic means the instance admits
/// no feasible schedule; an empty result is not a feasibility proof.
inline std::vector<Diagnostic> precheck(const ProblemInstance& inst) {
  std::vector<Diagnostic> out;

  // (a) every day must be able to host the emergency quota
  for (int d = 1; d <= inst.days; ++d) {
    int avail = 0;
    for (int k = 1; k <= inst.slots_per_day; ++k) avail += inst.available(d, k);
    if (avail < inst.emergency_quota)
      out.push_back({Severity::fatal, "day_emergency_capacity",
                     "day " + std::to_string(d) + " has only " + std::to_string(avail) +
                         " available slots but emergency_quota is " +
                         std::to_string(inst.emergency_quota)});
  }

  // (b) total demand vs. total supply
  const std::int64_t demand =
      inst.total_visit_slots() + std::int64_t(inst.days) * inst.emergency_quota;
  const std::int64_t supply = inst.available_slot_count();
  if (demand > supply)
    out.push_back({Severity::fatal, "total_capacity",
                   "total demanded slots " + std::to_string(demand) +
                       " exceed available slots " + std::to_string(supply)});

  for (size_t c = 0; c < inst.cohorts.size(); ++c) {
    const CohortSpec& cohort = inst.cohorts[c];
    if (cohort.population == 0 || cohort.visits == 0) continue;

    // (c) visits spread across gap-separated days must fit the horizon
    const int span = (cohort.visits - 1) * (effective_gap(cohort, inst.days) + 1) + 1;
    if (span > inst.days)
      out.push_back({Severity::fatal, "visit_spacing_horizon",
                     "cohort \"" + cohort.label + "\" needs a span of " + std::to_string(span) +
                         " days for " + std::to_string(cohort.visits) +
                         " gap-separated visits but the horizon has only " +
                         std::to_string(inst.days)});

    // (d) some day must offer a long enough run of available slots
    bool fits_somewhere = false;
    for (const auto& row : inst.availability)
      if (detail::longest_available_run(row) >= cohort.slot_length) {
        fits_somewhere = true;
        break;
      }
    if (!fits_somewhere)
      out.push_back({Severity::fatal, "slot_run_too_short",
                     "cohort \"" + cohort.label + "\" needs " +
                         std::to_string(cohort.slot_length) +
                         " consecutive available slots but no day offers such a run"});
  }
  return out;
}

namespace detail {

inline int require_int(const Json& obj, const std::string& field, const std::string& where) {
  if (!obj.contains(field)) throw ParseError("missing required field \"" + where + field + "\"");
  const Json& v = obj.at(field);
  if (!v.is_number_integer())
    throw ParseError("field \"" + where + field + "\" must be an integer");
  return v.get<int>();
}

inline std::vector<std::vector<std::uint8_t>> read_matrix(const Json& arr,
                                                          const std::string& field,
                                                          int expected_cols) {
  if (!arr.is_array() || arr.empty())
    throw ParseError("field \"" + field + "\" must be a non-empty array of rows");
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(arr.size());
  for (size_t r = 0; r < arr.size(); ++r) {
    const Json& row = arr[r];
    if (!row.is_array())
      throw ParseError("field \"" + field + "\" row " + std::to_string(r + 1) +
                       " must be an array");
    if (static_cast<int>(row.size()) != expected_cols)
      throw ParseError("field \"" + field + "\" row " + std::to_string(r + 1) + " has " +
                       std::to_string(row.size()) + " entries, expected slots_per_day=" +
                       std::to_string(expected_cols));
    std::vector<std::uint8_t> cells;
    cells.reserve(row.size());
    for (size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number_integer())
        throw ParseError("field \"" + field + "\" row " + std::to_string(r + 1) + " entry " +
                         std::to_string(k + 1) + " must be an integer");
      const int v = row[k].get<int>();
      if (v != 0 && v != 1)
        throw ParseError("field \"" + field + "\" row " + std::to_string(r + 1) + " entry " +
                         std::to_string(k + 1) + " must be 0 or 1");
      cells.push_back(static_cast<std::uint8_t>(v));
    }
    out.push_back(std::move(cells));
  }
  return out;
}

}  // namespace detail

/// Result of loading a config document. `week_length` is the weekly-pattern
/// row count when the availability was tiled, otherwise the full horizon.
struct LoadedConfig {
  ProblemInstance instance;
  int week_length = 0;
};

inline LoadedConfig parse_config(const std::string& config_text) {
  Json doc;
  try {
    doc = Json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config root must be a JSON object");

  static const std::set<std::string> known = {"days",   "slots_per_day", "emergency_quota",
                                              "availability", "weekly_pattern", "weeks",
                                              "cohorts"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) throw ParseError("unknown field \"" + item.key() + "\"");

  ProblemInstance inst;
  inst.slots_per_day = detail::require_int(doc, "slots_per_day", "");
  if (inst.slots_per_day < 1) throw ParseError("field \"slots_per_day\" must be >= 1");
  inst.emergency_quota = detail::require_int(doc, "emergency_quota", "");
  if (inst.emergency_quota < 0) throw ParseError("field \"emergency_quota\" must be >= 0");

  const bool has_avail = doc.contains("availability");
  const bool has_pattern = doc.contains("weekly_pattern");
  const bool has_weeks = doc.contains("weeks");
  if (has_pattern != has_weeks)
    throw ParseError("fields \"weekly_pattern\" and \"weeks\" must be given together");
  if (has_avail == has_pattern)
    throw ParseError("exactly one of \"availability\" or \"weekly_pattern\"+\"weeks\" required");

  int week_length = 0;
  if (has_avail) {
    inst.days = detail::require_int(doc, "days", "");
    if (inst.days < 1) throw ParseError("field \"days\" must be >= 1");
    inst.availability = detail::read_matrix(doc.at("availability"), "availability",
                                            inst.slots_per_day);
    if (static_cast<int>(inst.availability.size()) != inst.days)
      throw ParseError("field \"availability\" has " +
                       std::to_string(inst.availability.size()) + " rows, expected days=" +
                       std::to_string(inst.days));
    week_length = inst.days;
  } else {
    const int weeks = detail::require_int(doc, "weeks", "");
    if (weeks < 1) throw ParseError("field \"weeks\" must be >= 1");
    auto pattern = detail::read_matrix(doc.at("weekly_pattern"), "weekly_pattern",
                                       inst.slots_per_day);
    week_length = static_cast<int>(pattern.size());
    inst.availability = tile_availability(pattern, weeks);
    inst.days = static_cast<int>(inst.availability.size());
    if (doc.contains("days")) {
      const int declared = detail::require_int(doc, "days", "");
      if (declared != inst.days)
        throw ParseError("field \"days\" is " + std::to_string(declared) +
                         " but weekly_pattern x weeks expands to " + std::to_string(inst.days));
    }
  }

  if (!doc.contains("cohorts")) throw ParseError("missing required field \"cohorts\"");
  const Json& cohorts = doc.at("cohorts");
  if (!cohorts.is_array()) throw ParseError("field \"cohorts\" must be an array");
  std::set<std::string> labels;
  for (size_t c = 0; c < cohorts.size(); ++c) {
    const Json& entry = cohorts[c];
    const std::string where = "cohorts[" + std::to_string(c + 1) + "].";
    if (!entry.is_object()) throw ParseError("cohort " + std::to_string(c + 1) + " must be an object");
    static const std::set<std::string> cohort_fields = {"label", "population", "visits",
                                                        "slot_length", "gap"};
    for (const auto& item : entry.items())
      if (!cohort_fields.count(item.key()))
        throw ParseError("unknown field \"" + where + item.key() + "\"");
    CohortSpec spec;
    if (!entry.contains("label") || !entry.at("label").is_string())
      throw ParseError("field \"" + where + "label\" must be a string");
    spec.label = entry.at("label").get<std::string>();
    spec.population = detail::require_int(entry, "population", where);
    spec.visits = detail::require_int(entry, "visits", where);
    spec.slot_length = detail::require_int(entry, "slot_length", where);
    spec.gap = detail::require_int(entry, "gap", where);
    if (spec.population < 0) throw ParseError("field \"" + where + "population\" must be >= 0");
    if (spec.visits < 0) throw ParseError("field \"" + where + "visits\" must be >= 0");
    if (spec.gap < 0) throw ParseError("field \"" + where + "gap\" must be >= 0");
    if (spec.slot_length < 1) throw ParseError("field \"" + where + "slot_length\" must be >= 1");
    if (spec.slot_length > inst.slots_per_day)
      throw ParseError("field \"" + where + "slot_length\" exceeds slots_per_day");
    if (!labels.insert(spec.label).second)
      throw ParseError("duplicate cohort label \"" + spec.label + "\"");
    inst.cohorts.push_back(std::move(spec));
  }

  return {std::move(inst), week_length};
}

/// Parses a JSON config document into a validated instance.
inline ProblemInstance parse_instance(const std::string& config_text) {
  return parse_config(config_text).instance;
}

/// Canonical JSON form; parse_instance(serialize_instance(x)) == x.
inline std::string serialize_instance(const ProblemInstance& inst) {
  Json doc;
  doc["days"] = inst.days;
  doc["slots_per_day"] = inst.slots_per_day;
  doc["emergency_quota"] = inst.emergency_quota;
  Json rows = Json::array();
  for (const auto& row : inst.availability) {
    Json r = Json::array();
    for (auto v : row) r.push_back(static_cast<int>(v));
    rows.push_back(std::move(r));
  }
  doc["availability"] = std::move(rows);
  Json cohorts = Json::array();
  for (const auto& c : inst.cohorts) {
    Json entry;
    entry["label"] = c.label;
    entry["population"] = c.population;
    entry["visits"] = c.visits;
    entry["slot_length"] = c.slot_length;
    entry["gap"] = c.gap;
    cohorts.push_back(std::move(entry));
  }
  doc["cohorts"] = std::move(cohorts);
  return doc.dump(2);
}

}  // namespace psched
