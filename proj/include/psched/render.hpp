#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "psched/instance.hpp"
#include "psched/schedule.hpp"

namespace psched {

/// What to render and how. `week_length` is the day count of one week row
/// group (the weekly-pattern length for tiled instances); 0 treats the whole
/// horizon as a single week.
struct RenderOptions {
  enum class Style { grid, itinerary };
  Style style = Style::grid;
  int week = 0;  ///< 1-based week to show; 0 = full horizon
  std::optional<StudentId> student;
  int week_length = 0;
};

namespace detail {

inline std::string day_label(int day, int week_length, int days) {
  static const char* names[5] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};
  if (week_length == 5 || week_length == days)
    return names[(day - 1) % 5];
  return "Day " + std::to_string(day);
}

inline std::string cohort_initial(const std::string& label) {
  if (label.empty()) return "?";
  return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(label[0]))));
}

inline std::string pad(const std::string& s, size_t width) {
  std::string out = s;
  out.resize(std::max(width, s.size()), ' ');
  return out;
}

inline std::string join_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += " | ";
      out += pad(row[c], widths[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

}  // namespace detail

/// Timetable grid, one row per day: cohort initial + member index per visit
/// slot, E for emergency reservations, * where the provider is unavailable.
inline std::string render_grid(const ProblemInstance& inst, const Schedule& sched,
                               const RenderOptions& opts) {
  const int wlen = opts.week_length > 0 ? opts.week_length : inst.days;
  int first = 1, last = inst.days;
  if (opts.week > 0) {
    const int week_count = (inst.days + wlen - 1) / wlen;
    if (opts.week > week_count)
      throw std::invalid_argument("week " + std::to_string(opts.week) +
                                  " out of range (horizon has " + std::to_string(week_count) +
                                  " weeks)");
    first = (opts.week - 1) * wlen + 1;
    last = std::min(opts.week * wlen, inst.days);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Day"};
  for (int k = 1; k <= inst.slots_per_day; ++k) header.push_back(std::to_string(k));
  rows.push_back(std::move(header));

  for (int d = first; d <= last; ++d) {
    std::vector<std::string> row{detail::day_label(d, wlen, inst.days)};
    for (int k = 1; k <= inst.slots_per_day; ++k) {
      std::string cell;
      if (!inst.available(d, k)) {
        cell = "*";
      } else {
        for (const auto& p : sched.placements) {
          if (opts.student && p.student != *opts.student) continue;
          if (p.day == d && p.covers(k)) {
            cell = detail::cohort_initial(inst.cohorts[static_cast<size_t>(p.student.cohort)].label) +
                   std::to_string(p.student.member);
            break;
          }
        }
        if (cell.empty() && !opts.student && sched.emergency_on(d).count(k)) cell = "E";
      }
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  return detail::join_table(rows);
}

/// Per-student visit list in week/day/slot rows, one column per visit.
inline std::string render_itinerary(const ProblemInstance& inst, const Schedule& sched,
                                    const RenderOptions& opts) {
  if (!opts.student) throw std::invalid_argument("itinerary rendering needs a student");
  const StudentId student = *opts.student;
  if (student.cohort < 0 || student.cohort >= static_cast<int>(inst.cohorts.size()) ||
      student.member < 1 ||
      student.member > inst.cohorts[static_cast<size_t>(student.cohort)].population)
    throw std::invalid_argument("student does not exist in this instance");
  const int wlen = opts.week_length > 0 ? opts.week_length : inst.days;

  std::vector<Placement> visits;
  for (const auto& p : sched.placements)
    if (p.student == student) visits.push_back(p);
  std::sort(visits.begin(), visits.end(),
            [](const Placement& a, const Placement& b) { return a.day < b.day; });

  std::vector<std::string> weeks{"Week"}, days{"Day"}, slots{"Slot"};
  for (const auto& p : visits) {
    weeks.push_back(std::to_string((p.day - 1) / wlen + 1));
    days.push_back(std::to_string((p.day - 1) % wlen + 1));
    std::string run;
    for (int k = p.start_slot; k <= p.end_slot(); ++k) {
      if (!run.empty()) run += ",";
      run += std::to_string(k);
    }
    slots.push_back(std::move(run));
  }
  return detail::join_table({weeks, days, slots});
}

inline std::string render(const ProblemInstance& inst, const Schedule& sched,
                          const RenderOptions& opts) {
  return opts.style == RenderOptions::Style::itinerary ? render_itinerary(inst, sched, opts)
                                                       : render_grid(inst, sched, opts);
}

}  // namespace psched
