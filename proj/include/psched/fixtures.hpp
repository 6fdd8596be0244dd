#pragma once

#include "psched/instance.hpp"
#include "psched/schedule.hpp"

namespace psched {

/// The 7-day sample instance bundled with the repo (fixtures/small.json).
inline ProblemInstance small_example_instance() {
  ProblemInstance inst;
  inst.days = 7;
  inst.slots_per_day = 6;
  inst.emergency_quota = 1;
  inst.availability.assign(7, std::vector<std::uint8_t>(6, 1));
  inst.cohorts = {
      {"undergraduate", 2, 3, 1, 1},
      {"master", 3, 2, 2, 2},
      {"phd", 2, 1, 3, 3},
  };
  return inst;
}

/// One week of provider availability for the semester case study, 5 workdays
/// of 22 half-hour slots each.
inline std::vector<std::vector<std::uint8_t>> case_study_weekly_pattern() {
  const auto row = [](std::initializer_list<std::pair<int, int>> on) {
    std::vector<std::uint8_t> r(22, 0);
    for (auto [lo, hi] : on)
      for (int k = lo; k <= hi; ++k) r[static_cast<size_t>(k - 1)] = 1;
    return r;
  };
  return {
      row({{1, 22}}),           // Monday
      row({{1, 4}, {16, 22}}),  // Tuesday
      row({{16, 22}}),          // Wednesday
      row({{16, 22}}),          // Thursday
      row({{1, 7}}),            // Friday
  };
}

inline std::vector<CohortSpec> case_study_cohorts() {
  return {
      {"undergraduate", 8, 10, 1, 1},
      {"master", 6, 12, 2, 2},
      {"phd", 5, 6, 3, 3},
  };
}

/// The 16-week semester instance (fixtures/case_study.json): the weekly
/// pattern tiled over 16 weeks, 80 day indices total.
inline ProblemInstance case_study_instance() {
  ProblemInstance inst;
  inst.slots_per_day = 22;
  inst.emergency_quota = 1;
  inst.availability = tile_availability(case_study_weekly_pattern(), 16);
  inst.days = static_cast<int>(inst.availability.size());
  inst.cohorts = case_study_cohorts();
  return inst;
}

/// A single week of the case study, used to check the published week-4
/// timetable against the constraints that are local to one week.
inline ProblemInstance case_study_week_instance() {
  ProblemInstance inst;
  inst.slots_per_day = 22;
  inst.emergency_quota = 1;
  inst.availability = case_study_weekly_pattern();
  inst.days = 5;
  inst.cohorts = case_study_cohorts();
  return inst;
}

enum class FixtureName { table5, table9_week4 };

/// Reference timetables shipped with the repo, as in-memory schedules.
/// `table5` is the optimal solution of the small instance; `table9_week4` is
/// week 4 of the case-study solution with week-local day indices 1..5.
inline Schedule decode_fixture(FixtureName name) {
  constexpr int kUndergrad = 0, kMaster = 1, kPhd = 2;
  Schedule s;
  switch (name) {
    case FixtureName::table5:
      s.placements = {
          {{kMaster, 1}, 1, 1, 2},    {{kMaster, 3}, 1, 3, 2},
          {{kMaster, 2}, 2, 1, 2},    {{kUndergrad, 1}, 2, 3, 1},
          {{kUndergrad, 2}, 2, 4, 1}, {{kPhd, 2}, 3, 1, 3},
          {{kPhd, 1}, 4, 1, 3},       {{kUndergrad, 1}, 4, 4, 1},
          {{kUndergrad, 2}, 5, 1, 1}, {{kMaster, 1}, 5, 2, 2},
          {{kMaster, 2}, 6, 1, 2},    {{kUndergrad, 1}, 6, 3, 1},
          {{kUndergrad, 2}, 7, 1, 1}, {{kMaster, 3}, 7, 2, 2},
      };
      s.emergency = {{1, {5}}, {2, {5}}, {3, {4}}, {4, {5}}, {5, {4}}, {6, {4}}, {7, {4}}};
      return s;
    case FixtureName::table9_week4:
      s.placements = {
          {{kPhd, 3}, 1, 1, 3},       {{kUndergrad, 4}, 1, 4, 1},
          {{kUndergrad, 2}, 1, 5, 1}, {{kUndergrad, 7}, 1, 6, 1},
          {{kUndergrad, 3}, 1, 7, 1}, {{kUndergrad, 1}, 1, 8, 1},
          {{kMaster, 6}, 1, 9, 2},    {{kMaster, 2}, 2, 1, 2},
          {{kUndergrad, 8}, 2, 3, 1}, {{kUndergrad, 6}, 2, 4, 1},
          {{kMaster, 3}, 5, 1, 2},    {{kUndergrad, 3}, 5, 3, 1},
          {{kUndergrad, 4}, 5, 4, 1}, {{kUndergrad, 6}, 5, 5, 1},
          {{kUndergrad, 1}, 5, 6, 1},
      };
      s.emergency = {{1, {11}}, {2, {16}}, {3, {16}}, {4, {16}}, {5, {7}}};
      return s;
  }
  throw std::invalid_argument("unknown fixture");
}

}  // namespace psched
