#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "psched/result.hpp"
#include "psched/schedule.hpp"
#include "psched/validate.hpp"

namespace psched {

namespace detail {

struct OracleMember {
  int cohort = 0;
  int member = 1;
  int visits = 0;
  int length = 1;
  int min_gap = 0;  ///< effective day distance minus one
};

/// Plain exhaustive enumerator over visit placements and emergency slot
/// combinations. Shares no search machinery with the branch-and-bound solver;
/// the only filtering is feasibility itself.
class OracleEnumeration {
 public:
  OracleEnumeration(const ProblemInstance& inst, long long budget)
      : inst_(inst),
        budget_(budget),
        occupied_(static_cast<size_t>(inst.days * inst.slots_per_day), 0),
        free_count_(static_cast<size_t>(inst.days) + 1, 0) {
    for (size_t c = 0; c < inst.cohorts.size(); ++c) {
      const CohortSpec& cohort = inst.cohorts[c];
      for (int i = 1; i <= cohort.population; ++i)
        members_.push_back({static_cast<int>(c), i, cohort.visits, cohort.slot_length,
                            effective_gap(cohort, inst.days)});
    }
    for (int d = 1; d <= inst.days; ++d)
      for (int k = 1; k <= inst.slots_per_day; ++k)
        if (inst.available(d, k)) ++free_count_[static_cast<size_t>(d)];
  }

  SolveResult run() {
    place_member(0, 0, 1);
    SolveResult result;
    result.stats.nodes = nodes_;
    if (exhausted_) {
      result.status = SolveStatus::budget_exceeded;
      return result;
    }
    if (best_objective_ == std::numeric_limits<std::int64_t>::max()) {
      result.status = SolveStatus::infeasible;
      return result;
    }
    result.status = SolveStatus::optimal;
    result.objective = best_objective_;
    result.lower_bound = best_objective_;
    result.schedule = best_schedule_.normalized();
    return result;
  }

 private:
  bool slot_usable(int d, int k) const {
    return inst_.available(d, k) &&
           occupied_[static_cast<size_t>((d - 1) * inst_.slots_per_day + (k - 1))] == 0;
  }

  bool charge_node() {
    ++nodes_;
    if (budget_ > 0 && nodes_ > budget_) exhausted_ = true;
    return !exhausted_;
  }

  void place_member(size_t member_idx, int placed_visits, int min_day) {
    if (exhausted_) return;
    if (member_idx == members_.size()) {
      complete_with_emergency();
      return;
    }
    const OracleMember& m = members_[member_idx];
    if (placed_visits == m.visits) {
      place_member(member_idx + 1, 0, 1);
      return;
    }
    // Visit days of one member are enumerated in increasing order; that walks
    // every set of visit days exactly once.
    for (int d = min_day; d <= inst_.days; ++d) {
      if (free_count_[static_cast<size_t>(d)] - m.length < inst_.emergency_quota) continue;
      for (int k = 1; k + m.length - 1 <= inst_.slots_per_day; ++k) {
        bool fits = true;
        for (int j = k; j < k + m.length; ++j)
          if (!slot_usable(d, j)) {
            fits = false;
            break;
          }
        if (!fits) continue;
        if (!charge_node()) return;
        set_run(d, k, m.length, 1);
        trail_.push_back({{m.cohort, m.member}, d, k, m.length});
        place_member(member_idx, placed_visits + 1, d + m.min_gap + 1);
        trail_.pop_back();
        set_run(d, k, m.length, 0);
        if (exhausted_) return;
      }
    }
  }

  void set_run(int d, int k, int length, std::uint8_t value) {
    for (int j = k; j < k + length; ++j)
      occupied_[static_cast<size_t>((d - 1) * inst_.slots_per_day + (j - 1))] = value;
    free_count_[static_cast<size_t>(d)] += value ? -length : length;
  }

  // All visits are down; enumerate every emergency combination day by day.
  // The objective is separable across days, so the per-day minima add up.
  void complete_with_emergency() {
    std::int64_t visit_cost = 0;
    for (const auto& p : trail_)
      for (int k = p.start_slot; k <= p.end_slot(); ++k) visit_cost += 2 * k;

    std::int64_t emergency_cost = 0;
    std::vector<std::set<int>> chosen(static_cast<size_t>(inst_.days) + 1);
    for (int d = 1; d <= inst_.days; ++d) {
      std::vector<int> free_slots;
      for (int k = 1; k <= inst_.slots_per_day; ++k)
        if (slot_usable(d, k)) free_slots.push_back(k);
      if (static_cast<int>(free_slots.size()) < inst_.emergency_quota) return;
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      std::vector<int> combo, best_combo;
      if (!enumerate_combos(free_slots, 0, inst_.emergency_quota, 0, combo, best, best_combo))
        return;
      emergency_cost += best;
      chosen[static_cast<size_t>(d)] = std::set<int>(best_combo.begin(), best_combo.end());
    }

    const std::int64_t total = visit_cost + emergency_cost;
    if (total < best_objective_) {
      best_objective_ = total;
      best_schedule_.placements = trail_;
      best_schedule_.emergency.clear();
      for (int d = 1; d <= inst_.days; ++d)
        if (!chosen[static_cast<size_t>(d)].empty())
          best_schedule_.emergency[d] = chosen[static_cast<size_t>(d)];
    }
  }

  bool enumerate_combos(const std::vector<int>& slots, size_t from, int need, std::int64_t acc,
                        std::vector<int>& combo, std::int64_t& best,
                        std::vector<int>& best_combo) {
    if (need == 0) {
      if (!charge_node()) return false;
      if (acc < best) {
        best = acc;
        best_combo = combo;
      }
      return true;
    }
    for (size_t idx = from; idx + static_cast<size_t>(need) <= slots.size(); ++idx) {
      combo.push_back(slots[idx]);
      const bool ok =
          enumerate_combos(slots, idx + 1, need - 1, acc + slots[idx], combo, best, best_combo);
      combo.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  const ProblemInstance& inst_;
  long long budget_ = 0;
  long long nodes_ = 0;
  bool exhausted_ = false;
  std::vector<OracleMember> members_;
  std::vector<std::uint8_t> occupied_;
  std::vector<int> free_count_;
  std::vector<Placement> trail_;
  std::int64_t best_objective_ = std::numeric_limits<std::int64_t>::max();
  Schedule best_schedule_;
};

}  // namespace detail

/// Exhaustive reference optimum for tiny instances. `node_budget` caps the
/// enumeration (0 = unlimited); exceeding it yields SolveStatus::budget_exceeded.
inline SolveResult brute_force_optimum(const ProblemInstance& inst, long long node_budget) {
  return detail::OracleEnumeration(inst, node_budget).run();
}

}  // namespace psched
