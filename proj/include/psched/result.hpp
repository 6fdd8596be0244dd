#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "psched/schedule.hpp"

namespace psched {

enum class SolveStatus {
  optimal,             ///< objective proven equal to the lower bound
  feasible,            ///< a schedule was found but optimality is unproven
  infeasible,          ///< no schedule exists
  timeout_no_solution, ///< time limit hit before any schedule was found
  budget_exceeded,     ///< enumeration budget exhausted (brute-force oracle)
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout_no_solution: return "timeout_no_solution";
    case SolveStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

struct SolveStats {
  long long nodes = 0;      ///< search tree nodes explored
  long long prunings = 0;   ///< subtrees cut by propagation
  long long bound_cuts = 0; ///< subtrees cut by the objective bound
  double wall_seconds = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<std::int64_t> objective;
  std::int64_t lower_bound = 0;  ///< best proven bound on the optimum
  std::optional<Schedule> schedule;
  SolveStats stats;
};

}  // namespace psched
