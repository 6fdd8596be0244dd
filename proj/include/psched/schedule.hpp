#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psched/instance.hpp"

namespace psched {

/// One meeting: a run of `length` consecutive slots on one day.
struct Placement {
  StudentId student;
  int day = 1;
  int start_slot = 1;
  int length = 1;

  auto operator<=>(const Placement&) const = default;

  int end_slot() const { return start_slot + length - 1; }
  bool covers(int slot) const { return slot >= start_slot && slot <= end_slot(); }
};

/// A (possibly partial) timetable: placed visits plus per-day emergency slots.
struct Schedule {
  std::vector<Placement> placements;
  std::map<int, std::set<int>> emergency;  ///< day -> reserved slot set

  bool operator==(const Schedule&) const = default;

  const std::set<int>& emergency_on(int day) const {
    static const std::set<int> empty;
    auto it = emergency.find(day);
    return it == emergency.end() ? empty : it->second;
  }

  /// Copy with placements in canonical (cohort, member, day, slot) order.
  Schedule normalized() const {
    Schedule out = *this;
    std::sort(out.placements.begin(), out.placements.end());
    for (auto it = out.emergency.begin(); it != out.emergency.end();)
      it = it->second.empty() ? out.emergency.erase(it) : std::next(it);
    return out;
  }
};

inline int find_cohort(const ProblemInstance& inst, const std::string& label) {
  for (size_t c = 0; c < inst.cohorts.size(); ++c)
    if (inst.cohorts[c].label == label) return static_cast<int>(c);
  return -1;
}

inline Json schedule_to_json(const ProblemInstance& inst, const Schedule& sched) {
  Json doc;
  Json placements = Json::array();
  for (const auto& p : sched.placements) {
    Json entry;
    entry["cohort"] = inst.cohorts.at(static_cast<size_t>(p.student.cohort)).label;
    entry["member"] = p.student.member;
    entry["day"] = p.day;
    entry["start_slot"] = p.start_slot;
    entry["length"] = p.length;
    placements.push_back(std::move(entry));
  }
  doc["placements"] = std::move(placements);
  Json emergency = Json::object();
  for (const auto& [day, slots] : sched.emergency) {
    if (slots.empty()) continue;
    Json arr = Json::array();
    for (int k : slots) arr.push_back(k);
    emergency[std::to_string(day)] = std::move(arr);
  }
  doc["emergency"] = std::move(emergency);
  return doc;
}

inline std::string serialize_schedule(const ProblemInstance& inst, const Schedule& sched) {
  return schedule_to_json(inst, sched).dump(2);
}

/// Parses the schedule JSON format. Cohort labels must resolve against the
/// instance; out-of-range days, slots or members parse fine and are reported
/// later by check_schedule as structural violations.
inline Schedule parse_schedule(const ProblemInstance& inst, const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("schedule root must be a JSON object");
  static const std::set<std::string> known = {"placements", "emergency", "description"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) throw ParseError("unknown field \"" + item.key() + "\"");

  Schedule out;
  if (!doc.contains("placements") || !doc.at("placements").is_array())
    throw ParseError("field \"placements\" must be an array");
  for (size_t idx = 0; idx < doc.at("placements").size(); ++idx) {
    const Json& entry = doc.at("placements")[idx];
    const std::string where = "placements[" + std::to_string(idx + 1) + "].";
    if (!entry.is_object()) throw ParseError("placement " + std::to_string(idx + 1) + " must be an object");
    static const std::set<std::string> fields = {"cohort", "member", "day", "start_slot",
                                                 "length"};
    for (const auto& item : entry.items())
      if (!fields.count(item.key())) throw ParseError("unknown field \"" + where + item.key() + "\"");
    if (!entry.contains("cohort") || !entry.at("cohort").is_string())
      throw ParseError("field \"" + where + "cohort\" must be a string");
    const std::string label = entry.at("cohort").get<std::string>();
    const int cohort = find_cohort(inst, label);
    if (cohort < 0) throw ParseError("field \"" + where + "cohort\": unknown cohort \"" + label + "\"");
    Placement p;
    p.student.cohort = cohort;
    p.student.member = detail::require_int(entry, "member", where);
    p.day = detail::require_int(entry, "day", where);
    p.start_slot = detail::require_int(entry, "start_slot", where);
    p.length = detail::require_int(entry, "length", where);
    out.placements.push_back(p);
  }

  if (doc.contains("emergency")) {
    const Json& em = doc.at("emergency");
    if (!em.is_object()) throw ParseError("field \"emergency\" must be an object");
    for (const auto& item : em.items()) {
      int day = 0;
      try {
        size_t used = 0;
        day = std::stoi(item.key(), &used);
        if (used != item.key().size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("field \"emergency\": key \"" + item.key() + "\" is not a day index");
      }
      if (!item.value().is_array())
        throw ParseError("field \"emergency." + item.key() + "\" must be an array of slots");
      std::set<int>& slots = out.emergency[day];
      for (const Json& v : item.value()) {
        if (!v.is_number_integer())
          throw ParseError("field \"emergency." + item.key() + "\" entries must be integers");
        if (!slots.insert(v.get<int>()).second)
          throw ParseError("field \"emergency." + item.key() + "\" lists slot " +
                           std::to_string(v.get<int>()) + " twice");
      }
    }
  }
  return out;
}

}  // namespace psched
