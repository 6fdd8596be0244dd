#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "psched/instance.hpp"
#include "psched/result.hpp"
#include "psched/schedule.hpp"

namespace psched {

struct SolveParams {
  double time_limit = 0;       ///< wall-clock seconds; 0 = unlimited
  int thread_count = 1;
  bool deterministic = false;  ///< byte-identical output across runs (single-threaded traversal)
  long long log_interval = 0;  ///< nodes between progress lines; 0 = silent
  std::function<void(const std::string&)> progress;  ///< defaults to standard error
};

/// Remaining options for one student under a partial assignment.
struct StudentDomain {
  StudentId student;
  int remaining = 0;
  std::vector<Placement> candidates;
};

struct PropagationResult {
  bool contradiction = false;
  std::vector<StudentDomain> domains;
};

namespace detail {

constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();

/// Exact optimum of the per-day packing relaxation: each day's remaining
/// emergency demand plus `visit_slots` anonymous visit slots go into the
/// cheapest still-free available slots, visits weighted 2k and emergencies k.
/// Day costs are convex in the visit count, so a greedy marginal merge is
/// optimal. Returns kInfinite when the demand cannot be packed at all.
inline std::int64_t packing_cost(const std::vector<int>& free_slots,
                                 const std::vector<std::pair<int, int>>& day_ranges,
                                 const std::vector<int>& e_need, std::int64_t visit_slots,
                                 std::vector<int>* taken_out = nullptr) {
  std::int64_t total = 0;
  using Marginal = std::pair<std::int64_t, size_t>;  // (cost of next visit slot, day)
  std::priority_queue<Marginal, std::vector<Marginal>, std::greater<Marginal>> heap;
  std::vector<int> taken(day_ranges.size(), 0);
  for (size_t d = 0; d < day_ranges.size(); ++d) {
    const auto [begin, end] = day_ranges[d];
    const int count = end - begin;
    if (count < e_need[d]) return kInfinite;
    for (int t = 0; t < e_need[d]; ++t) total += free_slots[static_cast<size_t>(begin + t)];
    if (e_need[d] < count)
      heap.push({std::int64_t(free_slots[static_cast<size_t>(begin + e_need[d])]) +
                     free_slots[static_cast<size_t>(begin)],
                 d});
  }
  for (std::int64_t placed = 0; placed < visit_slots; ++placed) {
    if (heap.empty()) return kInfinite;
    auto [cost, d] = heap.top();
    heap.pop();
    total += cost;
    const int v = ++taken[d];
    const auto [begin, end] = day_ranges[d];
    if (e_need[d] + v < end - begin)
      heap.push({std::int64_t(free_slots[static_cast<size_t>(begin + e_need[d] + v)]) +
                     free_slots[static_cast<size_t>(begin + v)],
                 d});
  }
  if (taken_out) *taken_out = std::move(taken);
  return total;
}

struct SearchStudent {
  int cohort = 0;
  int member = 1;
  int visits = 0;
  int length = 1;
  int min_gap = 0;
};

struct SearchContext {
  const ProblemInstance* inst = nullptr;
  int days = 0, slots = 0, quota = 0;
  std::vector<SearchStudent> students;
  std::vector<int> student_base;  ///< per cohort: index of member 1, or -1
  int total_visits = 0;
};

inline SearchContext make_context(const ProblemInstance& inst) {
  SearchContext ctx;
  ctx.inst = &inst;
  ctx.days = inst.days;
  ctx.slots = inst.slots_per_day;
  ctx.quota = inst.emergency_quota;
  ctx.student_base.assign(inst.cohorts.size(), -1);
  for (size_t c = 0; c < inst.cohorts.size(); ++c) {
    const CohortSpec& cohort = inst.cohorts[c];
    if (cohort.visits == 0 || cohort.population == 0) continue;
    ctx.student_base[c] = static_cast<int>(ctx.students.size());
    for (int i = 1; i <= cohort.population; ++i) {
      ctx.students.push_back({static_cast<int>(c), i, cohort.visits, cohort.slot_length,
                              effective_gap(cohort, inst.days)});
      ctx.total_visits += cohort.visits;
    }
  }
  return ctx;
}

struct SearchShared {
  std::mutex mu;
  std::atomic<std::int64_t> incumbent_objective{kInfinite};
  Schedule incumbent;  // guarded by mu
  std::atomic<long long> nodes{0};
  std::atomic<long long> prop_prunes{0};
  std::atomic<long long> bound_cuts{0};
  std::atomic<bool> stop{false};
  bool use_deadline = false;
  std::chrono::steady_clock::time_point deadline;

  struct Job {
    std::vector<Placement> prefix;
    std::int64_t bound = 0;
  };
  std::vector<Job> jobs;
  std::atomic<size_t> next_job{0};
  std::vector<char> job_open;  // guarded by mu

  long long log_interval = 0;
  std::atomic<long long> next_log{0};
  std::function<void(const std::string&)> progress;

  // Proven bound on the optimum: the best closed value is the incumbent and
  // every open subtree is no better than its root bound.
  std::int64_t proven_bound_locked() const {
    std::int64_t b = kInfinite;
    for (size_t i = 0; i < jobs.size(); ++i)
      if (job_open[i]) b = std::min(b, jobs[i].bound);
    return std::min(b, incumbent_objective.load(std::memory_order_relaxed));
  }

  void emit_progress_locked(long long node_count) {
    const std::int64_t inc = incumbent_objective.load(std::memory_order_relaxed);
    const std::int64_t bound = proven_bound_locked();
    std::string line = "nodes=" + std::to_string(node_count) + " incumbent=";
    line += inc == kInfinite ? "-" : std::to_string(inc);
    line += " bound=" + std::to_string(bound == kInfinite ? 0 : bound) + " gap=";
    if (inc == kInfinite) {
      line += "inf";
    } else {
      const double gap = inc > 0 ? 100.0 * double(inc - std::min(bound, inc)) / double(inc) : 0.0;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", gap);
      line += buf;
    }
    if (progress) progress(line);
  }
};

/// Depth-first worker over one subtree. Keeps all mutable state local; only
/// the incumbent, counters and the stop flag are shared.
class SearchWorker {
 public:
  SearchWorker(const SearchContext& ctx, SearchShared& shared)
      : ctx_(ctx),
        shared_(shared),
        occupied_(static_cast<size_t>(ctx.days * ctx.slots), 0),
        free_count_(static_cast<size_t>(ctx.days) + 1, 0),
        placed_(ctx.students.size(), 0),
        last_day_(ctx.students.size(), 0) {
    for (int d = 1; d <= ctx_.days; ++d)
      for (int k = 1; k <= ctx_.slots; ++k)
        if (ctx_.inst->available(d, k)) ++free_count_[static_cast<size_t>(d)];
    for (const auto& st : ctx_.students)
      remaining_slots_ += std::int64_t(st.visits) * st.length;
  }

  void run_jobs() {
    for (;;) {
      const size_t idx = shared_.next_job.fetch_add(1);
      if (idx >= shared_.jobs.size()) return;
      if (shared_.stop.load(std::memory_order_relaxed)) return;
      const auto& job = shared_.jobs[idx];
      if (job.bound >= shared_.incumbent_objective.load(std::memory_order_relaxed)) {
        ++shared_.bound_cuts;
        close_job(idx);
        continue;
      }
      aborted_ = false;
      for (const auto& p : job.prefix) apply(p);
      dfs();
      for (auto it = job.prefix.rbegin(); it != job.prefix.rend(); ++it) undo(*it);
      if (!aborted_) close_job(idx);
    }
  }

  // -- state manipulation shared with the frontier builder --

  void apply(const Placement& p) {
    set_run(p.day, p.start_slot, p.length, 1);
    const size_t st = student_index(p.student);
    ++placed_[st];
    saved_last_day_.push_back(last_day_[st]);
    last_day_[st] = p.day;
    remaining_slots_ -= p.length;
    visit_cost_ += 2 * run_sum(p);
    trail_.push_back(p);
  }

  void undo(const Placement& p) {
    set_run(p.day, p.start_slot, p.length, 0);
    const size_t st = student_index(p.student);
    --placed_[st];
    last_day_[st] = saved_last_day_.back();
    saved_last_day_.pop_back();
    remaining_slots_ += p.length;
    visit_cost_ -= 2 * run_sum(p);
    trail_.pop_back();
  }

  bool complete() const { return static_cast<int>(trail_.size()) == ctx_.total_visits; }

  /// Fail-first selection: the student whose next visit has the fewest valid
  /// positions, ties broken by cohort then member order. Returns false on a
  /// contradiction (some student has no position left).
  bool select_student(size_t& chosen, int& chosen_count) {
    chosen = ctx_.students.size();
    chosen_count = std::numeric_limits<int>::max();
    for (size_t st = 0; st < ctx_.students.size(); ++st) {
      if (placed_[st] == ctx_.students[st].visits) continue;
      const int count = count_candidates(st, nullptr);
      if (count == 0) return false;
      if (count < chosen_count) {
        chosen_count = count;
        chosen = st;
      }
    }
    return true;
  }

  /// Valid (day, start) pairs for the next visit of student `st`, in ascending
  /// order. Visits of one student are placed in increasing-day order, so
  /// candidate days start after the student's last fixed day plus the gap and
  /// leave room for the visits still to come.
  int count_candidates(size_t st, std::vector<Placement>* collect) const {
    const SearchStudent& s = ctx_.students[st];
    const int rem = s.visits - placed_[st];
    const int step = s.min_gap + 1;
    const int d_lo = last_day_[st] == 0 ? 1 : last_day_[st] + step;
    const int d_hi = ctx_.days - (rem - 1) * step;
    int count = 0;
    for (int d = d_lo; d <= d_hi; ++d) {
      if (free_count_[static_cast<size_t>(d)] - s.length < ctx_.quota) continue;
      int run = 0;
      const size_t row = static_cast<size_t>((d - 1) * ctx_.slots);
      for (int k = 1; k <= ctx_.slots; ++k) {
        const bool usable =
            ctx_.inst->available(d, k) && occupied_[row + static_cast<size_t>(k - 1)] == 0;
        run = usable ? run + 1 : 0;
        if (run >= s.length) {
          ++count;
          if (collect)
            collect->push_back({{s.cohort, s.member}, d, k - s.length + 1, s.length});
        }
      }
    }
    return count;
  }

  /// Lower bound for the current partial assignment. As a side effect records
  /// the relaxation's per-day visit-slot support, used to order candidates.
  std::int64_t node_bound() {
    free_scratch_.clear();
    ranges_scratch_.clear();
    e_need_scratch_.assign(static_cast<size_t>(ctx_.days), ctx_.quota);
    for (int d = 1; d <= ctx_.days; ++d) {
      const int begin = static_cast<int>(free_scratch_.size());
      const size_t row = static_cast<size_t>((d - 1) * ctx_.slots);
      for (int k = 1; k <= ctx_.slots; ++k)
        if (ctx_.inst->available(d, k) && occupied_[row + static_cast<size_t>(k - 1)] == 0)
          free_scratch_.push_back(k);
      ranges_scratch_.emplace_back(begin, static_cast<int>(free_scratch_.size()));
    }
    const std::int64_t rest = packing_cost(free_scratch_, ranges_scratch_, e_need_scratch_,
                                           remaining_slots_, &taken_scratch_);
    if (rest == kInfinite) return kInfinite;
    // The relaxation puts a day's visit slots on its `taken` lowest free
    // slots; remember the highest such slot per day.
    support_limit_.assign(static_cast<size_t>(ctx_.days) + 1, 0);
    for (int d = 1; d <= ctx_.days; ++d) {
      const int taken = taken_scratch_[static_cast<size_t>(d - 1)];
      const auto [begin, end] = ranges_scratch_[static_cast<size_t>(d - 1)];
      (void)end;
      if (taken > 0)
        support_limit_[static_cast<size_t>(d)] =
            free_scratch_[static_cast<size_t>(begin + taken - 1)];
    }
    return visit_cost_ + rest;
  }

  /// Candidates whose slots sit inside the relaxation support come first:
  /// following the relaxation is how the search finds bound-matching
  /// schedules quickly. Order stays deterministic (day, start within groups).
  void order_candidates(std::vector<Placement>& candidates) const {
    std::stable_partition(candidates.begin(), candidates.end(), [&](const Placement& p) {
      return p.end_slot() <= support_limit_[static_cast<size_t>(p.day)];
    });
  }

  /// First candidate of student `st` in (day, start) order, preferring the
  /// first support-consistent one. Requires a prior node_bound() call.
  bool first_candidate(size_t st, Placement* out) const {
    const SearchStudent& s = ctx_.students[st];
    const int rem = s.visits - placed_[st];
    const int step = s.min_gap + 1;
    const int d_lo = last_day_[st] == 0 ? 1 : last_day_[st] + step;
    const int d_hi = ctx_.days - (rem - 1) * step;
    bool have_any = false;
    Placement fallback;
    for (int d = d_lo; d <= d_hi; ++d) {
      if (free_count_[static_cast<size_t>(d)] - s.length < ctx_.quota) continue;
      int run = 0;
      const size_t row = static_cast<size_t>((d - 1) * ctx_.slots);
      for (int k = 1; k <= ctx_.slots; ++k) {
        const bool usable =
            ctx_.inst->available(d, k) && occupied_[row + static_cast<size_t>(k - 1)] == 0;
        run = usable ? run + 1 : 0;
        if (run < s.length) continue;
        const Placement p{{s.cohort, s.member}, d, k - s.length + 1, s.length};
        if (p.end_slot() <= support_limit_[static_cast<size_t>(d)]) {
          *out = p;
          return true;
        }
        if (!have_any) {
          fallback = p;
          have_any = true;
        }
      }
    }
    if (have_any) *out = fallback;
    return have_any;
  }

  const SearchStudent& student(size_t st) const { return ctx_.students[st]; }
  int placed_count(size_t st) const { return placed_[st]; }
  size_t student_count() const { return ctx_.students.size(); }

  /// Cheapest emergency completion: per day the quota lands on the lowest
  /// still-free available slots. Valid because nothing couples emergency
  /// choices across days once the visits are fixed.
  std::int64_t emergency_completion(std::map<int, std::set<int>>* out) const {
    std::int64_t cost = 0;
    for (int d = 1; d <= ctx_.days; ++d) {
      int need = ctx_.quota;
      const size_t row = static_cast<size_t>((d - 1) * ctx_.slots);
      for (int k = 1; k <= ctx_.slots && need > 0; ++k) {
        if (!ctx_.inst->available(d, k) || occupied_[row + static_cast<size_t>(k - 1)] != 0)
          continue;
        cost += k;
        --need;
        if (out) (*out)[d].insert(k);
      }
      if (need > 0) return kInfinite;
    }
    return cost;
  }

  void dfs() {
    if (shared_.stop.load(std::memory_order_relaxed)) {
      aborted_ = true;
      return;
    }
    const long long node = shared_.nodes.fetch_add(1, std::memory_order_relaxed) + 1;
    if ((node & 255) == 0 && shared_.use_deadline &&
        std::chrono::steady_clock::now() >= shared_.deadline)
      shared_.stop.store(true, std::memory_order_relaxed);
    if (shared_.log_interval > 0 && node >= shared_.next_log.load(std::memory_order_relaxed)) {
      std::lock_guard<std::mutex> lock(shared_.mu);
      if (node >= shared_.next_log.load(std::memory_order_relaxed)) {
        shared_.next_log.store(node + shared_.log_interval, std::memory_order_relaxed);
        shared_.emit_progress_locked(node);
      }
    }

    if (complete()) {
      std::map<int, std::set<int>> emergency;
      const std::int64_t cost = emergency_completion(&emergency);
      if (cost == kInfinite) return;
      offer_incumbent(visit_cost_ + cost, emergency);
      return;
    }

    const std::int64_t bound = node_bound();
    if (bound >= shared_.incumbent_objective.load(std::memory_order_relaxed)) {
      ++shared_.bound_cuts;
      return;
    }

    size_t st = 0;
    int count = 0;
    if (!select_student(st, count)) {
      ++shared_.prop_prunes;
      return;
    }
    std::vector<Placement> candidates;
    candidates.reserve(static_cast<size_t>(count));
    count_candidates(st, &candidates);
    order_candidates(candidates);
    for (const auto& p : candidates) {
      apply(p);
      dfs();
      undo(p);
      if (shared_.stop.load(std::memory_order_relaxed)) {
        aborted_ = true;
        return;
      }
    }
  }

  void offer_incumbent(std::int64_t objective, const std::map<int, std::set<int>>& emergency) {
    if (objective >= shared_.incumbent_objective.load(std::memory_order_relaxed)) return;
    std::lock_guard<std::mutex> lock(shared_.mu);
    if (objective >= shared_.incumbent_objective.load(std::memory_order_relaxed)) return;
    shared_.incumbent_objective.store(objective, std::memory_order_relaxed);
    shared_.incumbent.placements = trail_;
    shared_.incumbent.emergency.clear();
    for (const auto& [day, slots] : emergency)
      if (!slots.empty()) shared_.incumbent.emergency[day] = slots;
  }

  std::int64_t visit_cost() const { return visit_cost_; }
  const std::vector<Placement>& trail() const { return trail_; }

 private:
  size_t student_index(const StudentId& id) const {
    const int base = ctx_.student_base[static_cast<size_t>(id.cohort)];
    return static_cast<size_t>(base + id.member - 1);
  }

  void set_run(int d, int k, int length, std::uint8_t value) {
    const size_t row = static_cast<size_t>((d - 1) * ctx_.slots);
    for (int j = k; j < k + length; ++j) occupied_[row + static_cast<size_t>(j - 1)] = value;
    free_count_[static_cast<size_t>(d)] += value ? -length : length;
  }

  static std::int64_t run_sum(const Placement& p) {
    return std::int64_t(p.length) * (2 * p.start_slot + p.length - 1) / 2;
  }

  void close_job(size_t idx) {
    std::lock_guard<std::mutex> lock(shared_.mu);
    shared_.job_open[idx] = 0;
  }

  const SearchContext& ctx_;
  SearchShared& shared_;
  std::vector<std::uint8_t> occupied_;
  std::vector<int> free_count_;
  std::vector<int> placed_;
  std::vector<int> last_day_;
  std::vector<int> saved_last_day_;
  std::vector<Placement> trail_;
  std::int64_t visit_cost_ = 0;
  std::int64_t remaining_slots_ = 0;
  bool aborted_ = false;

  std::vector<int> free_scratch_;
  std::vector<std::pair<int, int>> ranges_scratch_;
  std::vector<int> e_need_scratch_;
  std::vector<int> taken_scratch_;
  std::vector<int> support_limit_;
};

/// One day's placements repacked as far left as availability allows, longest
/// runs first. Returns the day cost (visit slots doubled plus the emergency
/// completion) and the packed layout; kInfinite when the runs or the
/// emergency quota cannot fit.
inline std::int64_t pack_day(const SearchContext& ctx, int day, std::vector<Placement>& runs) {
  const int P = ctx.slots;
  std::stable_sort(runs.begin(), runs.end(), [](const Placement& a, const Placement& b) {
    if (a.length != b.length) return a.length > b.length;
    if (a.start_slot != b.start_slot) return a.start_slot < b.start_slot;
    return a.student < b.student;
  });
  std::vector<std::uint8_t> used(static_cast<size_t>(P) + 1, 0);
  std::int64_t cost = 0;
  for (auto& run : runs) {
    int streak = 0, found = 0;
    for (int k = 1; k <= P; ++k) {
      streak = (ctx.inst->available(day, k) && !used[static_cast<size_t>(k)]) ? streak + 1 : 0;
      if (streak >= run.length) {
        found = k - run.length + 1;
        break;
      }
    }
    if (!found) return kInfinite;
    run.day = day;
    run.start_slot = found;
    for (int k = found; k < found + run.length; ++k) {
      used[static_cast<size_t>(k)] = 1;
      cost += 2 * k;
    }
  }
  int need = ctx.quota;
  for (int k = 1; k <= P && need > 0; ++k)
    if (ctx.inst->available(day, k) && !used[static_cast<size_t>(k)]) {
      cost += k;
      --need;
    }
  return need > 0 ? kInfinite : cost;
}

/// Local improvement on a complete visit assignment: first left-compact every
/// day, then repeatedly transfer single visits between days, repacking both
/// ends, as long as the combined day costs drop. Deterministic scan order.
inline void polish_placements(const SearchContext& ctx, std::vector<Placement>& placements) {
  const int D = ctx.days;
  std::vector<std::vector<size_t>> by_day(static_cast<size_t>(D) + 1);
  for (size_t i = 0; i < placements.size(); ++i)
    by_day[static_cast<size_t>(placements[i].day)].push_back(i);

  std::vector<std::int64_t> cost(static_cast<size_t>(D) + 1, 0);
  const auto repack = [&](int day) {
    std::vector<Placement> runs;
    for (size_t i : by_day[static_cast<size_t>(day)]) runs.push_back(placements[i]);
    const std::int64_t packed = pack_day(ctx, day, runs);
    if (packed == kInfinite) return false;
    if (packed <= cost[static_cast<size_t>(day)] || cost[static_cast<size_t>(day)] == 0) {
      size_t next = 0;
      for (size_t i : by_day[static_cast<size_t>(day)]) placements[i] = runs[next++];
      cost[static_cast<size_t>(day)] = packed;
    }
    return true;
  };
  for (int d = 1; d <= D; ++d) {
    std::vector<Placement> runs;
    for (size_t i : by_day[static_cast<size_t>(d)]) runs.push_back(placements[i]);
    std::int64_t as_is = 0;
    {  // cost of the current layout
      std::vector<std::uint8_t> used(static_cast<size_t>(ctx.slots) + 1, 0);
      for (const auto& r : runs)
        for (int k = r.start_slot; k <= r.end_slot(); ++k) {
          as_is += 2 * k;
          used[static_cast<size_t>(k)] = 1;
        }
      int need = ctx.quota;
      for (int k = 1; k <= ctx.slots && need > 0; ++k)
        if (ctx.inst->available(d, k) && !used[static_cast<size_t>(k)]) {
          as_is += k;
          --need;
        }
      if (need > 0) as_is = kInfinite;
    }
    cost[static_cast<size_t>(d)] = as_is;
    repack(d);
  }

  for (int round = 0; round < 64; ++round) {
    bool improved = false;
    for (size_t i = 0; i < placements.size(); ++i) {
      const Placement p = placements[i];
      const SearchStudent* stu = nullptr;
      for (const auto& s : ctx.students)
        if (s.cohort == p.student.cohort && s.member == p.student.member) stu = &s;
      if (!stu) continue;
      const int step = stu->min_gap + 1;
      for (int d2 = 1; d2 <= D; ++d2) {
        if (d2 == p.day) continue;
        bool blocked = false;
        for (size_t j = 0; j < placements.size() && !blocked; ++j)
          if (j != i && placements[j].student == p.student &&
              std::abs(d2 - placements[j].day) < step)
            blocked = true;
        if (blocked) continue;

        std::vector<Placement> src_runs, tgt_runs;
        for (size_t j : by_day[static_cast<size_t>(p.day)])
          if (j != i) src_runs.push_back(placements[j]);
        for (size_t j : by_day[static_cast<size_t>(d2)]) tgt_runs.push_back(placements[j]);
        tgt_runs.push_back(p);
        const std::int64_t src_cost = pack_day(ctx, p.day, src_runs);
        const std::int64_t tgt_cost = pack_day(ctx, d2, tgt_runs);
        if (src_cost == kInfinite || tgt_cost == kInfinite) continue;
        if (src_cost + tgt_cost >=
            cost[static_cast<size_t>(p.day)] + cost[static_cast<size_t>(d2)])
          continue;

        // Commit: rewrite both days with the packed layouts.
        const int d1 = p.day;
        size_t next = 0;
        std::vector<size_t> new_src;
        for (size_t j : by_day[static_cast<size_t>(d1)])
          if (j != i) {
            placements[j] = src_runs[next++];
            new_src.push_back(j);
          }
        next = 0;
        for (size_t j : by_day[static_cast<size_t>(d2)]) placements[j] = tgt_runs[next++];
        placements[i] = tgt_runs.back();
        by_day[static_cast<size_t>(d1)] = std::move(new_src);
        by_day[static_cast<size_t>(d2)].push_back(i);
        cost[static_cast<size_t>(d1)] = src_cost;
        cost[static_cast<size_t>(d2)] = tgt_cost;
        improved = true;
        break;
      }
    }
    if (!improved) return;
  }
}

/// Greedy primal pass: build the timetable chronologically, every step placing
/// the earliest support-consistent candidate and breaking ties toward the
/// student with the least day slack. When the relaxation is tight this lands
/// on or near a bound-matching schedule, which the search then only has to
/// certify. Gives up silently at the first dead end.
inline void offer_placements(const SearchContext& ctx, SearchShared& shared,
                             const std::vector<Placement>& placements) {
  const int D = ctx.days, P = ctx.slots, L = ctx.quota;
  std::vector<std::uint8_t> occupied(static_cast<size_t>(D * P), 0);
  std::int64_t objective = 0;
  for (const auto& p : placements)
    for (int k = p.start_slot; k <= p.end_slot(); ++k) {
      occupied[static_cast<size_t>((p.day - 1) * P + (k - 1))] = 1;
      objective += 2 * k;
    }
  std::map<int, std::set<int>> emergency;
  for (int d = 1; d <= D; ++d) {
    int need = L;
    for (int k = 1; k <= P && need > 0; ++k) {
      if (!ctx.inst->available(d, k) || occupied[static_cast<size_t>((d - 1) * P + (k - 1))])
        continue;
      objective += k;
      emergency[d].insert(k);
      --need;
    }
    if (need > 0) return;
  }
  if (objective >= shared.incumbent_objective.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(shared.mu);
  if (objective >= shared.incumbent_objective.load(std::memory_order_relaxed)) return;
  shared.incumbent_objective.store(objective, std::memory_order_relaxed);
  shared.incumbent.placements = placements;
  shared.incumbent.emergency = std::move(emergency);
}

inline void seed_incumbent(const SearchContext& ctx, SearchShared& shared) {
  SearchWorker worker(ctx, shared);
  for (;;) {
    if (worker.complete()) {
      std::map<int, std::set<int>> emergency;
      const std::int64_t cost = worker.emergency_completion(&emergency);
      if (cost != kInfinite) worker.offer_incumbent(worker.visit_cost() + cost, emergency);
      std::vector<Placement> polished = worker.trail();
      polish_placements(ctx, polished);
      offer_placements(ctx, shared, polished);
      return;
    }
    if (worker.node_bound() == kInfinite) return;
    bool have = false;
    Placement best_placement;
    long long best_key[3] = {0, 0, 0};  // (day, slack, start)
    for (size_t st = 0; st < worker.student_count(); ++st) {
      const SearchStudent& s = worker.student(st);
      if (worker.placed_count(st) == s.visits) continue;
      Placement p;
      if (!worker.first_candidate(st, &p)) return;  // stuck; let the search handle it
      const int rem = s.visits - worker.placed_count(st);
      const long long slack = (ctx.days - p.day) - static_cast<long long>(rem - 1) * (s.min_gap + 1);
      const long long key[3] = {p.day, slack, p.start_slot};
      if (!have || std::lexicographical_compare(key, key + 3, best_key, best_key + 3)) {
        have = true;
        best_placement = p;
        best_key[0] = key[0];
        best_key[1] = key[1];
        best_key[2] = key[2];
      }
    }
    if (!have) return;
    worker.apply(best_placement);
  }
}

}  // namespace detail

/// Filters every student's remaining visit options against the fixed part of
/// a schedule: positions overlapping fixed placements or unavailable slots go,
/// positions inside a fixed visit's gap window for the same student go, and
/// positions that would leave a day unable to host its emergency quota go.
/// Contradiction when a student still owes visits but has no position left.
/// Sound but deliberately incomplete.
inline PropagationResult propagate(const ProblemInstance& inst, const Schedule& partial) {
  PropagationResult result;
  const int D = inst.days, P = inst.slots_per_day, L = inst.emergency_quota;

  std::vector<std::uint8_t> occupied(static_cast<size_t>(D * P), 0);
  std::vector<int> free_count(static_cast<size_t>(D) + 1, 0);
  std::vector<int> e_fixed(static_cast<size_t>(D) + 1, 0);
  for (int d = 1; d <= D; ++d)
    for (int k = 1; k <= P; ++k)
      if (inst.available(d, k)) ++free_count[static_cast<size_t>(d)];
  const auto occupy = [&](int d, int k) {
    auto& cell = occupied[static_cast<size_t>((d - 1) * P + (k - 1))];
    if (!cell) {
      cell = 1;
      --free_count[static_cast<size_t>(d)];
    }
  };
  for (const auto& p : partial.placements)
    for (int k = p.start_slot; k <= p.end_slot(); ++k) occupy(p.day, k);
  for (const auto& [day, slots] : partial.emergency) {
    for (int k : slots) occupy(day, k);
    e_fixed[static_cast<size_t>(day)] = static_cast<int>(slots.size());
  }

  for (int d = 1; d <= D; ++d) {
    if (e_fixed[static_cast<size_t>(d)] > L) result.contradiction = true;
    if (free_count[static_cast<size_t>(d)] < L - e_fixed[static_cast<size_t>(d)])
      result.contradiction = true;
  }

  for (size_t c = 0; c < inst.cohorts.size(); ++c) {
    const CohortSpec& cohort = inst.cohorts[c];
    const int gap = effective_gap(cohort, D);
    for (int i = 1; i <= cohort.population; ++i) {
      const StudentId student{static_cast<int>(c), i};
      std::vector<int> fixed_days;
      for (const auto& p : partial.placements)
        if (p.student == student) fixed_days.push_back(p.day);
      const int remaining = cohort.visits - static_cast<int>(fixed_days.size());
      if (remaining < 0) {
        result.contradiction = true;
        continue;
      }
      if (remaining == 0) continue;
      StudentDomain domain{student, remaining, {}};
      for (int d = 1; d <= D; ++d) {
        bool blocked = false;
        for (int fd : fixed_days)
          if (std::abs(d - fd) <= gap || d == fd) {
            blocked = true;
            break;
          }
        if (blocked) continue;
        if (free_count[static_cast<size_t>(d)] - cohort.slot_length <
            L - e_fixed[static_cast<size_t>(d)])
          continue;
        int run = 0;
        for (int k = 1; k <= P; ++k) {
          const bool usable = inst.available(d, k) &&
                              occupied[static_cast<size_t>((d - 1) * P + (k - 1))] == 0;
          run = usable ? run + 1 : 0;
          if (run >= cohort.slot_length)
            domain.candidates.push_back({student, d, k - cohort.slot_length + 1,
                                         cohort.slot_length});
        }
      }
      if (domain.candidates.empty()) result.contradiction = true;
      result.domains.push_back(std::move(domain));
    }
  }
  return result;
}

/// Admissible bound: cost of the fixed assignments plus the packing relaxation
/// over everything still unfixed. Equals the objective on complete
/// assignments; returns INT64_MAX when no completion can exist.
inline std::int64_t lower_bound(const ProblemInstance& inst, const Schedule& partial) {
  const int D = inst.days, P = inst.slots_per_day, L = inst.emergency_quota;
  std::vector<std::uint8_t> occupied(static_cast<size_t>(D * P), 0);
  std::int64_t fixed_cost = 0;
  for (const auto& p : partial.placements)
    for (int k = p.start_slot; k <= p.end_slot(); ++k) {
      occupied[static_cast<size_t>((p.day - 1) * P + (k - 1))] = 1;
      fixed_cost += 2 * k;
    }
  std::vector<int> e_need(static_cast<size_t>(D), L);
  for (const auto& [day, slots] : partial.emergency) {
    for (int k : slots) {
      occupied[static_cast<size_t>((day - 1) * P + (k - 1))] = 1;
      fixed_cost += k;
    }
    e_need[static_cast<size_t>(day - 1)] -= static_cast<int>(slots.size());
    if (e_need[static_cast<size_t>(day - 1)] < 0) return detail::kInfinite;
  }

  std::map<StudentId, int> placed;
  for (const auto& p : partial.placements) ++placed[p.student];
  std::int64_t visit_slots = 0;
  for (size_t c = 0; c < inst.cohorts.size(); ++c) {
    const CohortSpec& cohort = inst.cohorts[c];
    for (int i = 1; i <= cohort.population; ++i) {
      const auto it = placed.find({static_cast<int>(c), i});
      const int done = it == placed.end() ? 0 : it->second;
      visit_slots += std::int64_t(std::max(0, cohort.visits - done)) * cohort.slot_length;
    }
  }

  std::vector<int> free_slots;
  std::vector<std::pair<int, int>> ranges;
  for (int d = 1; d <= D; ++d) {
    const int begin = static_cast<int>(free_slots.size());
    for (int k = 1; k <= P; ++k)
      if (inst.available(d, k) && occupied[static_cast<size_t>((d - 1) * P + (k - 1))] == 0)
        free_slots.push_back(k);
    ranges.emplace_back(begin, static_cast<int>(free_slots.size()));
  }
  const std::int64_t rest = detail::packing_cost(free_slots, ranges, e_need, visit_slots);
  return rest == detail::kInfinite ? detail::kInfinite : fixed_cost + rest;
}

/// Exact branch-and-bound over visit placements. Emergency slots are never
/// branched on: for fixed visits each day's optimal reservation is the quota's
/// worth of lowest-index free slots, computed at the leaves.
inline SolveResult solve(const ProblemInstance& inst, const SolveParams& params) {
  if (params.thread_count < 1) throw std::invalid_argument("thread_count must be >= 1");
  if (params.time_limit < 0) throw std::invalid_argument("time_limit must be >= 0");

  const auto start = std::chrono::steady_clock::now();
  detail::SearchContext ctx = detail::make_context(inst);
  detail::SearchShared shared;
  shared.log_interval = params.log_interval;
  shared.next_log.store(params.log_interval);
  shared.progress = params.progress ? params.progress : [](const std::string& line) {
    std::fprintf(stderr, "%s\n", line.c_str());
  };
  if (params.time_limit > 0) {
    shared.use_deadline = true;
    shared.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(params.time_limit));
  }

  SolveResult result;
  const auto finish_stats = [&]() {
    result.stats.nodes = shared.nodes.load();
    result.stats.prunings = shared.prop_prunes.load();
    result.stats.bound_cuts = shared.bound_cuts.load();
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // A day that cannot host the emergency quota sinks the whole instance.
  for (int d = 1; d <= inst.days; ++d) {
    int avail = 0;
    for (int k = 1; k <= inst.slots_per_day; ++k) avail += inst.available(d, k);
    if (avail < inst.emergency_quota) {
      result.status = SolveStatus::infeasible;
      finish_stats();
      return result;
    }
  }

  const int workers = params.deterministic ? 1 : params.thread_count;

  detail::seed_incumbent(ctx, shared);

  // Frontier generation: breadth-first expansion of the root until there are
  // enough disjoint subtrees to keep every worker busy.
  {
    detail::SearchWorker scout(ctx, shared);
    const size_t target = workers == 1 ? 1 : static_cast<size_t>(workers) * 8;
    std::deque<std::vector<Placement>> frontier;
    frontier.push_back({});
    int expansions = 0;
    while (!frontier.empty() && frontier.size() < target && expansions < 10000) {
      std::vector<Placement> prefix = std::move(frontier.front());
      frontier.pop_front();
      ++expansions;
      shared.nodes.fetch_add(1, std::memory_order_relaxed);
      for (const auto& p : prefix) scout.apply(p);
      if (scout.complete()) {
        std::map<int, std::set<int>> emergency;
        const std::int64_t cost = scout.emergency_completion(&emergency);
        if (cost != detail::kInfinite) scout.offer_incumbent(scout.visit_cost() + cost, emergency);
      } else {
        const std::int64_t bound = scout.node_bound();
        size_t st = 0;
        int count = 0;
        if (bound < shared.incumbent_objective.load() && scout.select_student(st, count)) {
          std::vector<Placement> candidates;
          scout.count_candidates(st, &candidates);
          scout.order_candidates(candidates);
          for (const auto& p : candidates) {
            auto child = prefix;
            child.push_back(p);
            frontier.push_back(std::move(child));
          }
        }
      }
      for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) scout.undo(*it);
    }
    shared.jobs.reserve(frontier.size());
    for (auto& prefix : frontier) {
      for (const auto& p : prefix) scout.apply(p);
      detail::SearchShared::Job job;
      job.bound = scout.node_bound();
      for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) scout.undo(*it);
      job.prefix = std::move(prefix);
      shared.jobs.push_back(std::move(job));
    }
    shared.job_open.assign(shared.jobs.size(), 1);
  }

  if (workers == 1) {
    detail::SearchWorker worker(ctx, shared);
    worker.run_jobs();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&ctx, &shared] {
        detail::SearchWorker worker(ctx, shared);
        worker.run_jobs();
      });
    for (auto& t : pool) t.join();
  }

  bool all_closed = true;
  std::int64_t open_bound = detail::kInfinite;
  {
    std::lock_guard<std::mutex> lock(shared.mu);
    for (size_t i = 0; i < shared.jobs.size(); ++i)
      if (shared.job_open[i]) {
        all_closed = false;
        open_bound = std::min(open_bound, shared.jobs[i].bound);
      }
  }
  const std::int64_t inc = shared.incumbent_objective.load();

  if (all_closed) {
    if (inc == detail::kInfinite) {
      result.status = SolveStatus::infeasible;
      result.lower_bound = 0;
    } else {
      result.status = SolveStatus::optimal;
      result.objective = inc;
      result.lower_bound = inc;
      result.schedule = shared.incumbent.normalized();
    }
  } else if (inc != detail::kInfinite) {
    result.status = SolveStatus::feasible;
    result.objective = inc;
    result.lower_bound = std::min(open_bound, inc);
    result.schedule = shared.incumbent.normalized();
  } else {
    result.status = SolveStatus::timeout_no_solution;
    result.lower_bound = open_bound == detail::kInfinite ? 0 : open_bound;
  }
  finish_stats();
  return result;
}

}  // namespace psched
