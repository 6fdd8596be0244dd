#pragma once

// Test-side helpers, kept deliberately independent of the solver and oracle
// internals: a naive schedule enumerator, binary-point encoders/decoders for
// the built ILP, a grid parser, and the randomized tiny-instance generator.

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "psched/instance.hpp"
#include "psched/model.hpp"
#include "psched/render.hpp"
#include "psched/schedule.hpp"
#include "psched/validate.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(PSCHED_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture: " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Randomized tiny instances (deterministic per seed).

inline psched::ProblemInstance random_tiny_instance(unsigned seed) {
  std::mt19937 rng(seed);
  const auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  psched::ProblemInstance inst;
  inst.days = pick(1, 4);
  inst.slots_per_day = pick(1, 5);
  inst.emergency_quota = pick(0, std::min(2, inst.slots_per_day));
  const bool sparse = pick(0, 3) == 0;
  inst.availability.assign(static_cast<size_t>(inst.days),
                           std::vector<std::uint8_t>(static_cast<size_t>(inst.slots_per_day), 1));
  if (sparse)
    for (auto& row : inst.availability)
      for (auto& cell : row)
        if (pick(0, 4) == 0) cell = 0;

  static const char* labels[3] = {"alpha", "beta", "gamma"};
  const int ncohorts = pick(1, 3);
  int total_visits = 0;
  for (int c = 0; c < ncohorts; ++c) {
    psched::CohortSpec spec;
    spec.label = labels[c];
    spec.population = pick(0, 2);
    spec.visits = pick(0, 2);
    spec.slot_length = pick(1, std::min(3, inst.slots_per_day));
    spec.gap = pick(0, 3);
    while (total_visits + spec.population * spec.visits > 5 && spec.visits > 0) --spec.visits;
    total_visits += spec.population * spec.visits;
    inst.cohorts.push_back(std::move(spec));
  }
  return inst;
}

/// Bigger instances for exercising the search itself; too big for the
/// exhaustive oracle, sized so a solve takes hundreds to millions of nodes.
inline psched::ProblemInstance random_medium_instance(unsigned seed) {
  std::mt19937 rng(seed);
  const auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  psched::ProblemInstance inst;
  inst.days = pick(5, 8);
  inst.slots_per_day = pick(4, 6);
  inst.emergency_quota = pick(0, 1);
  inst.availability.assign(static_cast<size_t>(inst.days),
                           std::vector<std::uint8_t>(static_cast<size_t>(inst.slots_per_day), 1));
  for (auto& row : inst.availability)
    for (auto& cell : row)
      if (pick(0, 9) == 0) cell = 0;
  static const char* labels[3] = {"alpha", "beta", "gamma"};
  const int ncohorts = pick(2, 3);
  int total_visits = 0;
  for (int c = 0; c < ncohorts; ++c) {
    psched::CohortSpec spec;
    spec.label = labels[c];
    spec.population = pick(1, 3);
    spec.visits = pick(1, 3);
    spec.slot_length = pick(1, std::min(3, inst.slots_per_day));
    spec.gap = pick(0, 2);
    while (total_visits + spec.population * spec.visits > 14 && spec.visits > 0) --spec.visits;
    total_visits += spec.population * spec.visits;
    inst.cohorts.push_back(std::move(spec));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Naive enumeration of every complete candidate schedule: per student all
// increasing-day placement sets on available, non-overlapping slots; per day
// every emergency subset of exactly quota free available slots. Gap and total
// constraints are NOT filtered here; callers classify with check_schedule.

class ScheduleEnumerator {
 public:
  using Callback = std::function<void(const psched::Schedule&)>;

  ScheduleEnumerator(const psched::ProblemInstance& inst, long long budget)
      : inst_(inst), budget_(budget),
        occupied_(static_cast<size_t>(inst.days * inst.slots_per_day), 0) {
    for (size_t c = 0; c < inst_.cohorts.size(); ++c)
      for (int i = 1; i <= inst_.cohorts[c].population; ++i)
        if (inst_.cohorts[c].visits > 0)
          members_.push_back({static_cast<int>(c), i});
  }

  /// Returns false when the budget was exhausted (enumeration incomplete).
  bool run(const Callback& cb) {
    cb_ = &cb;
    visits(0, 0, 1);
    return !exhausted_;
  }

 private:
  bool usable(int d, int k) const {
    return inst_.available(d, k) &&
           occupied_[static_cast<size_t>((d - 1) * inst_.slots_per_day + (k - 1))] == 0;
  }

  bool charge() {
    if (budget_ > 0 && ++work_ > budget_) exhausted_ = true;
    return !exhausted_;
  }

  void visits(size_t member, int placed, int min_day) {
    if (exhausted_) return;
    if (member == members_.size()) {
      emergencies(1);
      return;
    }
    const auto [c, i] = members_[member];
    const psched::CohortSpec& cohort = inst_.cohorts[static_cast<size_t>(c)];
    if (placed == cohort.visits) {
      visits(member + 1, 0, 1);
      return;
    }
    for (int d = min_day; d <= inst_.days; ++d)
      for (int k = 1; k + cohort.slot_length - 1 <= inst_.slots_per_day; ++k) {
        bool fits = true;
        for (int j = k; j < k + cohort.slot_length; ++j)
          if (!usable(d, j)) { fits = false; break; }
        if (!fits) continue;
        if (!charge()) return;
        mark(d, k, cohort.slot_length, 1);
        trail_.placements.push_back({{c, i}, d, k, cohort.slot_length});
        visits(member, placed + 1, d + 1);
        trail_.placements.pop_back();
        mark(d, k, cohort.slot_length, 0);
        if (exhausted_) return;
      }
  }

  void emergencies(int day) {
    if (exhausted_) return;
    if (day > inst_.days) {
      if (!charge()) return;
      (*cb_)(trail_);
      return;
    }
    std::vector<int> free_slots;
    for (int k = 1; k <= inst_.slots_per_day; ++k)
      if (usable(day, k)) free_slots.push_back(k);
    combo(day, free_slots, 0, inst_.emergency_quota);
  }

  void combo(int day, const std::vector<int>& free_slots, size_t from, int need) {
    if (exhausted_) return;
    if (need == 0) {
      emergencies(day + 1);
      return;
    }
    for (size_t idx = from; idx + static_cast<size_t>(need) <= free_slots.size(); ++idx) {
      if (!charge()) return;
      trail_.emergency[day].insert(free_slots[idx]);
      combo(day, free_slots, idx + 1, need - 1);
      trail_.emergency[day].erase(free_slots[idx]);
      if (trail_.emergency[day].empty()) trail_.emergency.erase(day);
      if (exhausted_) return;
    }
  }

  void mark(int d, int k, int len, std::uint8_t v) {
    for (int j = k; j < k + len; ++j)
      occupied_[static_cast<size_t>((d - 1) * inst_.slots_per_day + (j - 1))] = v;
  }

  const psched::ProblemInstance& inst_;
  long long budget_ = 0;
  long long work_ = 0;
  bool exhausted_ = false;
  std::vector<std::pair<int, int>> members_;
  std::vector<std::uint8_t> occupied_;
  psched::Schedule trail_;
  const Callback* cb_ = nullptr;
};

inline std::string schedule_key(const psched::Schedule& sched) {
  const psched::Schedule n = sched.normalized();
  std::string key;
  for (const auto& p : n.placements)
    key += std::to_string(p.student.cohort) + "." + std::to_string(p.student.member) + "." +
           std::to_string(p.day) + "." + std::to_string(p.start_slot) + "." +
           std::to_string(p.length) + ";";
  key += "|";
  for (const auto& [d, slots] : n.emergency) {
    key += std::to_string(d) + ":";
    for (int k : slots) key += std::to_string(k) + ",";
    key += ";";
  }
  return key;
}

// ---------------------------------------------------------------------------
// Binary-point helpers for the built ILP.

inline std::map<std::string, int> variable_index(const psched::IlpModel& model) {
  std::map<std::string, int> index;
  for (size_t vi = 0; vi < model.variables.size(); ++vi)
    index[model.variables[vi].name] = static_cast<int>(vi);
  return index;
}

/// Encodes a schedule as a 0/1 assignment of the model's variables. Day
/// markers are set wherever the student has a placement that day.
inline std::vector<std::uint8_t> encode_point(const psched::IlpModel& model,
                                              const psched::Schedule& sched) {
  const auto index = variable_index(model);
  std::vector<std::uint8_t> point(model.variables.size(), 0);
  const auto set = [&](const std::string& name) {
    point[static_cast<size_t>(index.at(name))] = 1;
  };
  for (const auto& p : sched.placements) {
    const std::string si =
        std::to_string(p.student.cohort + 1) + "_" + std::to_string(p.student.member);
    for (int k = p.start_slot; k <= p.end_slot(); ++k)
      set("X_" + si + "_" + std::to_string(p.day) + "_" + std::to_string(k));
    set("W_" + si + "_" + std::to_string(p.day));
  }
  for (const auto& [d, slots] : sched.emergency)
    for (int k : slots) set("E_" + std::to_string(d) + "_" + std::to_string(k));
  return point;
}

inline bool row_satisfied(const psched::ConstraintRow& row,
                          const std::vector<std::uint8_t>& point) {
  long long lhs = 0;
  for (const auto& [vi, coeff] : row.terms) lhs += coeff * point[static_cast<size_t>(vi)];
  switch (row.sense) {
    case psched::Sense::le: return lhs <= row.rhs;
    case psched::Sense::eq: return lhs == row.rhs;
    case psched::Sense::ge: return lhs >= row.rhs;
  }
  return false;
}

inline bool point_feasible(const psched::IlpModel& model, const std::vector<std::uint8_t>& point) {
  for (const auto& row : model.constraints)
    if (!row_satisfied(row, point)) return false;
  return true;
}

inline std::int64_t point_objective(const psched::IlpModel& model,
                                    const std::vector<std::uint8_t>& point) {
  std::int64_t total = 0;
  for (const auto& [vi, coeff] : model.objective)
    total += std::int64_t(coeff) * point[static_cast<size_t>(vi)];
  return total;
}

/// Interprets a 0/1 point as a schedule. Fails (nullopt) when some student-day
/// slot pattern is not a single run matching the cohort length, or a day
/// marker disagrees with the visit variables.
inline std::optional<psched::Schedule> decode_point(const psched::IlpModel& model,
                                                    const psched::ProblemInstance& inst,
                                                    const std::vector<std::uint8_t>& point) {
  psched::Schedule out;
  std::map<std::pair<psched::StudentId, int>, std::vector<int>> covered;
  std::map<std::pair<psched::StudentId, int>, bool> marker;
  for (size_t vi = 0; vi < model.variables.size(); ++vi) {
    const psched::Variable& v = model.variables[vi];
    if (v.kind == psched::VarKind::emergency) {
      if (point[vi]) out.emergency[v.day].insert(v.slot);
    } else if (v.kind == psched::VarKind::visit) {
      if (point[vi]) covered[{{v.cohort, v.member}, v.day}].push_back(v.slot);
    } else {
      marker[{{v.cohort, v.member}, v.day}] = point[vi] != 0;
    }
  }
  for (const auto& [key, slots] : covered) {
    const auto& [student, day] = key;
    const int length = inst.cohorts[static_cast<size_t>(student.cohort)].slot_length;
    if (static_cast<int>(slots.size()) != length) return std::nullopt;
    for (size_t j = 1; j < slots.size(); ++j)
      if (slots[j] != slots[j - 1] + 1) return std::nullopt;
    if (!marker[{student, day}]) return std::nullopt;
    out.placements.push_back({student, day, slots.front(), length});
  }
  for (const auto& [key, on] : marker)
    if (on && !covered.count(key)) return std::nullopt;
  return out.normalized();
}

// ---------------------------------------------------------------------------
// Grid parser (inverse of render_grid for valid schedules).

inline psched::Schedule parse_grid(const psched::ProblemInstance& inst, const std::string& text,
                                   int first_day) {
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(' ');
    if (begin == std::string::npos) return std::string();
    return s.substr(begin, s.find_last_not_of(' ') - begin + 1);
  };
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t start = 0;
    for (;;) {
      const size_t bar = line.find('|', start);
      if (bar == std::string::npos) {
        cells.push_back(trim(line.substr(start)));
        break;
      }
      cells.push_back(trim(line.substr(start, bar - start)));
      start = bar + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw std::runtime_error("empty grid");

  psched::Schedule out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const int day = first_day + static_cast<int>(r) - 1;
    const auto& cells = rows[r];
    std::string run_label;
    int run_start = 0, run_len = 0;
    const auto flush = [&](int end_exclusive) {
      if (run_label.empty() || run_label == "*" || run_label == "E") {
        run_label.clear();
        return;
      }
      int cohort = -1;
      for (size_t c = 0; c < inst.cohorts.size(); ++c)
        if (psched::detail::cohort_initial(inst.cohorts[c].label)[0] == run_label[0])
          cohort = static_cast<int>(c);
      if (cohort < 0) throw std::runtime_error("grid cell with unknown cohort: " + run_label);
      out.placements.push_back(
          {{cohort, std::stoi(run_label.substr(1))}, day, run_start, end_exclusive - run_start});
      run_label.clear();
      (void)run_len;
    };
    for (size_t c = 1; c < cells.size(); ++c) {
      const int k = static_cast<int>(c);
      const std::string& cell = cells[c];
      if (cell == "E") out.emergency[day].insert(k);
      if (cell != run_label) {
        flush(k);
        run_label = cell;
        run_start = k;
      }
    }
    flush(static_cast<int>(cells.size()));
  }
  return out.normalized();
}

}  // namespace testutil
