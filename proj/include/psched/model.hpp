#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "psched/instance.hpp"
#include "psched/validate.hpp"

namespace psched {

enum class VarKind { visit, emergency, day_marker };

/// A named binary variable. Unused coordinates stay at -1.
struct Variable {
  std::string name;
  VarKind kind = VarKind::visit;
  int cohort = -1;
  int member = -1;  ///< 1-based
  int day = -1;     ///< 1-based
  int slot = -1;    ///< 1-based
};

enum class Sense { le, eq, ge };

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::eq: return "=";
    case Sense::ge: return ">=";
  }
  return "?";
}

/// Sparse row: id carries the source family tag plus its quantifier bindings,
/// e.g. "eq12_s1_i2_t3". Terms reference variables by model index.
struct ConstraintRow {
  std::string id;
  std::vector<std::pair<int, int>> terms;  ///< (variable index, coefficient)
  Sense sense = Sense::le;
  int rhs = 0;
};

/// The expanded binary program: all variables are binary, the objective is
/// minimized.
struct IlpModel {
  std::vector<Variable> variables;
  std::vector<ConstraintRow> constraints;
  std::vector<std::pair<int, int>> objective;  ///< (variable index, coefficient)
};

struct ModelStats {
  std::int64_t variable_count = 0;
  std::int64_t constraint_count = 0;
  std::int64_t nonzero_count = 0;  ///< constraint-matrix nonzeros
};

/// Expands an instance into the explicit row-by-row binary program. Rows are
/// emitted in id order: eq1, eq2, then per cohort the linking and
/// consecutiveness families, then the totals, then the gap windows.
inline IlpModel build_model(const ProblemInstance& inst) {
  IlpModel model;
  const int D = inst.days, P = inst.slots_per_day, L = inst.emergency_quota;
  const int ncohorts = static_cast<int>(inst.cohorts.size());

  // Variable layout: visit vars by (cohort, member, day, slot), then the
  // emergency vars by (day, slot), then the day markers by (cohort, member, day).
  std::vector<int> visit_base(static_cast<size_t>(ncohorts), 0);
  int next = 0;
  for (int c = 0; c < ncohorts; ++c) {
    visit_base[static_cast<size_t>(c)] = next;
    next += inst.cohorts[static_cast<size_t>(c)].population * D * P;
  }
  const int emergency_base = next;
  next += D * P;
  std::vector<int> marker_base(static_cast<size_t>(ncohorts), 0);
  for (int c = 0; c < ncohorts; ++c) {
    marker_base[static_cast<size_t>(c)] = next;
    next += inst.cohorts[static_cast<size_t>(c)].population * D;
  }
  model.variables.reserve(static_cast<size_t>(next));

  const auto visit_index = [&](int c, int i, int d, int k) {
    return visit_base[static_cast<size_t>(c)] + ((i - 1) * D + (d - 1)) * P + (k - 1);
  };
  const auto emergency_index = [&](int d, int k) {
    return emergency_base + (d - 1) * P + (k - 1);
  };
  const auto marker_index = [&](int c, int i, int d) {
    return marker_base[static_cast<size_t>(c)] + (i - 1) * D + (d - 1);
  };

  for (int c = 0; c < ncohorts; ++c)
    for (int i = 1; i <= inst.cohorts[static_cast<size_t>(c)].population; ++i)
      for (int d = 1; d <= D; ++d)
        for (int k = 1; k <= P; ++k)
          model.variables.push_back({"X_" + std::to_string(c + 1) + "_" + std::to_string(i) +
                                         "_" + std::to_string(d) + "_" + std::to_string(k),
                                     VarKind::visit, c, i, d, k});
  for (int d = 1; d <= D; ++d)
    for (int k = 1; k <= P; ++k)
      model.variables.push_back({"E_" + std::to_string(d) + "_" + std::to_string(k),
                                 VarKind::emergency, -1, -1, d, k});
  for (int c = 0; c < ncohorts; ++c)
    for (int i = 1; i <= inst.cohorts[static_cast<size_t>(c)].population; ++i)
      for (int d = 1; d <= D; ++d)
        model.variables.push_back({"W_" + std::to_string(c + 1) + "_" + std::to_string(i) + "_" +
                                       std::to_string(d),
                                   VarKind::day_marker, c, i, d, -1});

  // eq1: exactly L emergency slots reserved per day.
  for (int d = 1; d <= D; ++d) {
    ConstraintRow row;
    row.id = "eq1_d" + std::to_string(d);
    for (int k = 1; k <= P; ++k) row.terms.emplace_back(emergency_index(d, k), 1);
    row.sense = Sense::eq;
    row.rhs = L;
    model.constraints.push_back(std::move(row));
  }

  // eq2: per-slot occupancy bounded by availability; rows with F=0 keep their
  // full term list and force everything to zero.
  for (int d = 1; d <= D; ++d)
    for (int k = 1; k <= P; ++k) {
      ConstraintRow row;
      row.id = "eq2_d" + std::to_string(d) + "_k" + std::to_string(k);
      for (int c = 0; c < ncohorts; ++c)
        for (int i = 1; i <= inst.cohorts[static_cast<size_t>(c)].population; ++i)
          row.terms.emplace_back(visit_index(c, i, d, k), 1);
      row.terms.emplace_back(emergency_index(d, k), 1);
      row.sense = Sense::le;
      row.rhs = inst.available(d, k) ? 1 : 0;
      model.constraints.push_back(std::move(row));
    }

  for (int c = 0; c < ncohorts; ++c) {
    const CohortSpec& cohort = inst.cohorts[static_cast<size_t>(c)];
    const std::string s = "s" + std::to_string(c + 1);
    // Linking: a member's slots on a day total 0 or slot_length.
    for (int i = 1; i <= cohort.population; ++i)
      for (int d = 1; d <= D; ++d) {
        ConstraintRow row;
        row.id = std::string(linking_tag(c)) + "_" + s + "_i" + std::to_string(i) + "_d" +
                 std::to_string(d);
        for (int k = 1; k <= P; ++k) row.terms.emplace_back(visit_index(c, i, d, k), 1);
        row.terms.emplace_back(marker_index(c, i, d), -cohort.slot_length);
        row.sense = Sense::eq;
        row.rhs = 0;
        model.constraints.push_back(std::move(row));
      }
    // Pairwise consecutiveness: no two covered slots slot_length or more apart.
    for (int i = 1; i <= cohort.population; ++i)
      for (int d = 1; d <= D; ++d)
        for (int k = 1; k <= P; ++k)
          for (int h = k + cohort.slot_length; h <= P; ++h) {
            ConstraintRow row;
            row.id = std::string(pairwise_tag(c)) + "_" + s + "_i" + std::to_string(i) + "_d" +
                     std::to_string(d) + "_k" + std::to_string(k) + "_h" + std::to_string(h);
            row.terms.emplace_back(visit_index(c, i, d, k), 1);
            row.terms.emplace_back(visit_index(c, i, d, h), 1);
            row.sense = Sense::le;
            row.rhs = 1;
            model.constraints.push_back(std::move(row));
          }
  }

  // Totals: every member covers visits * slot_length slots over the horizon.
  for (int c = 0; c < ncohorts; ++c) {
    const CohortSpec& cohort = inst.cohorts[static_cast<size_t>(c)];
    for (int i = 1; i <= cohort.population; ++i) {
      ConstraintRow row;
      row.id = std::string(total_tag(c)) + "_s" + std::to_string(c + 1) + "_i" +
               std::to_string(i);
      for (int d = 1; d <= D; ++d)
        for (int k = 1; k <= P; ++k) row.terms.emplace_back(visit_index(c, i, d, k), 1);
      row.sense = Sense::eq;
      row.rhs = cohort.visits * cohort.slot_length;
      model.constraints.push_back(std::move(row));
    }
  }

  // Gap windows: at most one visit per member in any gap+1 consecutive days.
  for (int c = 0; c < ncohorts; ++c) {
    const CohortSpec& cohort = inst.cohorts[static_cast<size_t>(c)];
    for (int i = 1; i <= cohort.population; ++i)
      for (int t = 1; t + cohort.gap <= D; ++t) {
        ConstraintRow row;
        row.id = std::string(gap_tag(c)) + "_s" + std::to_string(c + 1) + "_i" +
                 std::to_string(i) + "_t" + std::to_string(t);
        for (int d = t; d <= t + cohort.gap; ++d)
          for (int k = 1; k <= P; ++k) row.terms.emplace_back(visit_index(c, i, d, k), 1);
        row.sense = Sense::le;
        row.rhs = cohort.slot_length;
        model.constraints.push_back(std::move(row));
      }
  }

  // Objective: visit slots cost twice their slot index, emergency slots cost
  // the slot index, day markers are free.
  for (int vi = 0; vi < static_cast<int>(model.variables.size()); ++vi) {
    const Variable& v = model.variables[static_cast<size_t>(vi)];
    if (v.kind == VarKind::visit)
      model.objective.emplace_back(vi, 2 * v.slot);
    else if (v.kind == VarKind::emergency)
      model.objective.emplace_back(vi, v.slot);
  }
  return model;
}

inline ModelStats model_stats(const IlpModel& model) {
  ModelStats stats;
  stats.variable_count = static_cast<std::int64_t>(model.variables.size());
  stats.constraint_count = static_cast<std::int64_t>(model.constraints.size());
  for (const auto& row : model.constraints)
    stats.nonzero_count += static_cast<std::int64_t>(row.terms.size());
  return stats;
}

namespace detail {

// Appends one linear term, wrapping lines around 200 columns. Objective terms
// always spell out the coefficient; constraint terms omit a unit coefficient.
inline void append_term(std::string& out, std::string& line, bool first, int coeff,
                        const std::string& name, bool always_coeff) {
  std::string term;
  if (!first) term += coeff < 0 ? " - " : " + ";
  else if (coeff < 0) term += "-";
  const int magnitude = std::abs(coeff);
  if (always_coeff || magnitude != 1) term += std::to_string(magnitude) + " ";
  term += name;
  if (!first && line.size() + term.size() > 200) {
    out += line;
    out += "\n";
    line = " ";
    if (coeff < 0) term = "- " + term.substr(3);
    else term = term.substr(3);
  }
  line += term;
}

}  // namespace detail

/// Writes the model in LP text format (Minimize / Subject To / Binary / End).
/// Deterministic: equal models produce identical bytes.
inline std::string export_lp(const IlpModel& model) {
  std::string out;
  out.reserve(1024);
  out += "Minimize\n";
  std::string line = " ";
  bool first = true;
  for (const auto& [vi, coeff] : model.objective) {
    detail::append_term(out, line, first, coeff, model.variables[static_cast<size_t>(vi)].name,
                        /*always_coeff=*/true);
    first = false;
  }
  if (!first) {
    out += line;
    out += "\n";
  }
  out += "Subject To\n";
  for (const auto& row : model.constraints) {
    line = " " + row.id + ": ";
    first = true;
    for (const auto& [vi, coeff] : row.terms) {
      detail::append_term(out, line, first, coeff, model.variables[static_cast<size_t>(vi)].name,
                          /*always_coeff=*/false);
      first = false;
    }
    line += std::string(" ") + to_string(row.sense) + " " + std::to_string(row.rhs);
    out += line;
    out += "\n";
  }
  out += "Binary\n";
  for (const auto& v : model.variables) {
    out += " ";
    out += v.name;
    out += "\n";
  }
  out += "End\n";
  return out;
}

}  // namespace psched
