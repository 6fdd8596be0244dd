#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "psched/schedule.hpp"

namespace psched {

/// One failed constraint instantiation. `constraint` is the row-family tag
/// (eq1..eq14 or "structural"); `bindings` spells out the quantifier values
/// using the same encoding the model builder puts in row ids, so
/// `constraint + "_" + bindings` matches the offending row id exactly.
struct Violation {
  std::string constraint;
  std::string bindings;
  std::string detail;

  bool operator==(const Violation&) const = default;
  auto operator<=>(const Violation&) const = default;
};

/// Row-family tags per cohort position. The first three cohorts get the
/// classic x/y/z numbering; further cohorts reuse the third family and stay
/// unique through the cohort index carried in the bindings.
inline const char* linking_tag(int cohort) { return cohort == 0 ? "eq3" : cohort == 1 ? "eq5" : "eq7"; }
inline const char* pairwise_tag(int cohort) { return cohort == 0 ? "eq4" : cohort == 1 ? "eq6" : "eq8"; }
inline const char* total_tag(int cohort) { return cohort == 0 ? "eq9" : cohort == 1 ? "eq10" : "eq11"; }
inline const char* gap_tag(int cohort) { return cohort == 0 ? "eq12" : cohort == 1 ? "eq13" : "eq14"; }

namespace detail {

inline std::string bind_si(int cohort, int member) {
  return "s" + std::to_string(cohort + 1) + "_i" + std::to_string(member);
}

}  // namespace detail

/// Checks a schedule against every constraint of the model, directly from the
/// constraint definitions (independent of the ILP builder). Violations are
/// collected exhaustively; an empty result means the schedule is feasible.
inline std::vector<Violation> check_schedule(const ProblemInstance& inst,
                                             const Schedule& sched) {
  std::vector<Violation> out;
  const int D = inst.days, P = inst.slots_per_day, L = inst.emergency_quota;

  // Structural pass: anything that does not reference a valid student, day or
  // slot range is reported here and excluded from the constraint checks.
  std::vector<const Placement*> valid;
  for (const auto& p : sched.placements) {
    const std::string where = "cohort " + std::to_string(p.student.cohort + 1) + " member " +
                              std::to_string(p.student.member);
    if (p.student.cohort < 0 || p.student.cohort >= static_cast<int>(inst.cohorts.size())) {
      out.push_back({"structural", detail::bind_si(p.student.cohort, p.student.member),
                     "placement references unknown cohort index " +
                         std::to_string(p.student.cohort + 1)});
      continue;
    }
    const CohortSpec& cohort = inst.cohorts[static_cast<size_t>(p.student.cohort)];
    if (p.student.member < 1 || p.student.member > cohort.population) {
      out.push_back({"structural", detail::bind_si(p.student.cohort, p.student.member),
                     "placement references unknown member " + std::to_string(p.student.member) +
                         " of cohort \"" + cohort.label + "\""});
      continue;
    }
    if (p.day < 1 || p.day > D) {
      out.push_back({"structural", detail::bind_si(p.student.cohort, p.student.member),
                     "placement day " + std::to_string(p.day) + " outside horizon for " + where});
      continue;
    }
    if (p.length != cohort.slot_length) {
      out.push_back({"structural", detail::bind_si(p.student.cohort, p.student.member),
                     "placement length " + std::to_string(p.length) + " does not match cohort \"" +
                         cohort.label + "\" slot_length " + std::to_string(cohort.slot_length)});
      continue;
    }
    if (p.start_slot < 1 || p.end_slot() > P) {
      out.push_back({"structural", detail::bind_si(p.student.cohort, p.student.member),
                     "placement slots " + std::to_string(p.start_slot) + ".." +
                         std::to_string(p.end_slot()) + " outside the day for " + where});
      continue;
    }
    valid.push_back(&p);
  }

  std::map<int, std::set<int>> emergency;
  for (const auto& [day, slots] : sched.emergency) {
    if (day < 1 || day > D) {
      if (!slots.empty())
        out.push_back({"structural", "d" + std::to_string(day),
                       "emergency day " + std::to_string(day) + " outside horizon"});
      continue;
    }
    for (int k : slots) {
      if (k < 1 || k > P) {
        out.push_back({"structural", "d" + std::to_string(day) + "_k" + std::to_string(k),
                       "emergency slot " + std::to_string(k) + " on day " + std::to_string(day) +
                           " outside the day"});
        continue;
      }
      emergency[day].insert(k);
    }
  }

  // Binary encoding of the schedule: per-student-per-day covered slot sets.
  std::map<std::pair<StudentId, int>, std::set<int>> covered;
  for (const Placement* p : valid) {
    auto& slots = covered[{p->student, p->day}];
    for (int k = p->start_slot; k <= p->end_slot(); ++k) slots.insert(k);
  }

  // eq1: exactly L emergency slots per day.
  for (int d = 1; d <= D; ++d) {
    const auto it = emergency.find(d);
    const int count = it == emergency.end() ? 0 : static_cast<int>(it->second.size());
    if (count != L)
      out.push_back({"eq1", "d" + std::to_string(d),
                     "day " + std::to_string(d) + " reserves " + std::to_string(count) +
                         " emergency slots, required exactly " + std::to_string(L)});
  }

  // eq2: per-slot occupancy may not exceed availability.
  std::map<std::pair<int, int>, int> occupancy;
  for (const Placement* p : valid)
    for (int k = p->start_slot; k <= p->end_slot(); ++k) occupancy[{p->day, k}] += 1;
  for (const auto& [day, slots] : emergency)
    for (int k : slots) occupancy[{day, k}] += 1;
  for (const auto& [cell, count] : occupancy) {
    const auto [d, k] = cell;
    const int cap = inst.available(d, k) ? 1 : 0;
    if (count > cap)
      out.push_back({"eq2", "d" + std::to_string(d) + "_k" + std::to_string(k),
                     "day " + std::to_string(d) + " slot " + std::to_string(k) + " hosts " +
                         std::to_string(count) + " assignments but availability allows " +
                         std::to_string(cap)});
  }

  // Linking and consecutiveness per student-day: the covered set must be empty
  // or exactly one run of slot_length consecutive slots.
  for (const auto& [key, slots] : covered) {
    const auto& [student, day] = key;
    const CohortSpec& cohort = inst.cohorts[static_cast<size_t>(student.cohort)];
    const std::string si_d =
        detail::bind_si(student.cohort, student.member) + "_d" + std::to_string(day);
    if (static_cast<int>(slots.size()) != cohort.slot_length)
      out.push_back({linking_tag(student.cohort), si_d,
                     "member " + std::to_string(student.member) + " of \"" + cohort.label +
                         "\" covers " + std::to_string(slots.size()) + " slots on day " +
                         std::to_string(day) + ", must be 0 or " +
                         std::to_string(cohort.slot_length)});
    for (auto it = slots.begin(); it != slots.end(); ++it)
      for (auto jt = std::next(it); jt != slots.end(); ++jt)
        if (*jt >= *it + cohort.slot_length)
          out.push_back({pairwise_tag(student.cohort),
                         si_d + "_k" + std::to_string(*it) + "_h" + std::to_string(*jt),
                         "slots " + std::to_string(*it) + " and " + std::to_string(*jt) +
                             " on day " + std::to_string(day) + " are not consecutive for member " +
                             std::to_string(student.member) + " of \"" + cohort.label + "\""});
  }

  // Per-student totals and gap windows.
  for (size_t c = 0; c < inst.cohorts.size(); ++c) {
    const CohortSpec& cohort = inst.cohorts[c];
    for (int i = 1; i <= cohort.population; ++i) {
      const StudentId student{static_cast<int>(c), i};
      std::vector<int> per_day(static_cast<size_t>(D) + 1, 0);
      int total = 0;
      for (const auto& [key, slots] : covered)
        if (key.first == student) {
          per_day[static_cast<size_t>(key.second)] = static_cast<int>(slots.size());
          total += static_cast<int>(slots.size());
        }
      const int required = cohort.visits * cohort.slot_length;
      if (total != required)
        out.push_back({total_tag(static_cast<int>(c)), detail::bind_si(static_cast<int>(c), i),
                       "member " + std::to_string(i) + " of \"" + cohort.label + "\" covers " +
                           std::to_string(total) + " slots over the horizon, required " +
                           std::to_string(required)});
      for (int t = 1; t + cohort.gap <= D; ++t) {
        int window = 0;
        for (int d = t; d <= t + cohort.gap; ++d) window += per_day[static_cast<size_t>(d)];
        if (window > cohort.slot_length)
          out.push_back({gap_tag(static_cast<int>(c)),
                         detail::bind_si(static_cast<int>(c), i) + "_t" + std::to_string(t),
                         "member " + std::to_string(i) + " of \"" + cohort.label + "\" covers " +
                             std::to_string(window) + " slots in days " + std::to_string(t) +
                             ".." + std::to_string(t + cohort.gap) + ", limit " +
                             std::to_string(cohort.slot_length)});
      }
    }
  }
  return out;
}

/// Objective value of a schedule: visit slots weigh twice their slot index,
/// emergency slots weigh the slot index. Feasibility is not required.
inline std::int64_t evaluate_objective(const ProblemInstance& /*inst*/, const Schedule& sched) {
  std::int64_t visit_term = 0;
  for (const auto& p : sched.placements)
    for (int k = p.start_slot; k <= p.end_slot(); ++k) visit_term += k;
  std::int64_t emergency_term = 0;
  for (const auto& [day, slots] : sched.emergency) {
    (void)day;
    for (int k : slots) emergency_term += k;
  }
  return 2 * visit_term + emergency_term;
}

}  // namespace psched
