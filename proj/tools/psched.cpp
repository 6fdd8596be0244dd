// Command-line front end: solve instances, validate and render schedules,
// export LP files and run feasibility prechecks.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "psched/instance.hpp"
#include "psched/model.hpp"
#include "psched/render.hpp"
#include "psched/schedule.hpp"
#include "psched/solver.hpp"
#include "psched/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitViolations = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + out_path);
  out << text;
}

int run_solve(const std::string& config_path, double time_limit, int threads, bool deterministic,
              long long log_interval, const std::string& out_path) {
  const psched::ProblemInstance inst = psched::parse_instance(read_file(config_path));
  psched::SolveParams params;
  params.time_limit = time_limit;
  params.thread_count = threads;
  params.deterministic = deterministic;
  params.log_interval = log_interval;
  const psched::SolveResult result = psched::solve(inst, params);

  std::cout << "status=" << psched::to_string(result.status);
  if (result.objective) std::cout << " objective=" << *result.objective;
  std::cout << " bound=" << result.lower_bound << " nodes=" << result.stats.nodes
            << " time=" << result.stats.wall_seconds << "s\n";

  if (result.schedule) {
    const std::string text = psched::serialize_schedule(inst, *result.schedule) + "\n";
    write_output(out_path, text);
  }
  switch (result.status) {
    case psched::SolveStatus::optimal:
    case psched::SolveStatus::feasible: return kExitOk;
    case psched::SolveStatus::infeasible: return kExitInfeasible;
    default: return kExitTimeout;
  }
}

int run_validate(const std::string& config_path, const std::string& schedule_path) {
  const psched::ProblemInstance inst = psched::parse_instance(read_file(config_path));
  const psched::Schedule sched = psched::parse_schedule(inst, read_file(schedule_path));
  const auto violations = psched::check_schedule(inst, sched);
  for (const auto& v : violations)
    std::cout << v.constraint << " " << v.bindings << ": " << v.detail << "\n";
  std::cout << violations.size() << " violations\n";
  std::cout << "objective=" << psched::evaluate_objective(inst, sched) << "\n";
  return violations.empty() ? kExitOk : kExitViolations;
}

int run_export_lp(const std::string& config_path, const std::string& out_path) {
  const psched::ProblemInstance inst = psched::parse_instance(read_file(config_path));
  write_output(out_path, psched::export_lp(psched::build_model(inst)));
  return kExitOk;
}

int run_precheck(const std::string& config_path) {
  const psched::ProblemInstance inst = psched::parse_instance(read_file(config_path));
  const auto diagnostics = psched::precheck(inst);
  for (const auto& d : diagnostics)
    std::cout << (d.severity == psched::Severity::fatal ? "fatal" : "warning") << " " << d.code
              << ": " << d.message << "\n";
  bool fatal = false;
  for (const auto& d : diagnostics) fatal |= d.severity == psched::Severity::fatal;
  if (diagnostics.empty()) std::cout << "no issues detected\n";
  return fatal ? kExitInfeasible : kExitOk;
}

int run_render(const std::string& config_path, const std::string& schedule_path, int week,
               const std::string& student_arg, const std::string& style) {
  const psched::LoadedConfig config = psched::parse_config(read_file(config_path));
  const psched::ProblemInstance& inst = config.instance;
  const psched::Schedule sched = psched::parse_schedule(inst, read_file(schedule_path));

  psched::RenderOptions opts;
  opts.week_length = config.week_length;
  opts.week = week;
  if (style == "itinerary") opts.style = psched::RenderOptions::Style::itinerary;
  else if (style != "grid") throw std::invalid_argument("style must be grid or itinerary");
  if (!student_arg.empty()) {
    const auto colon = student_arg.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--student expects <cohort-label>:<member-index>");
    const std::string label = student_arg.substr(0, colon);
    const int cohort = psched::find_cohort(inst, label);
    if (cohort < 0) throw std::invalid_argument("unknown cohort \"" + label + "\"");
    int member = 0;
    try {
      member = std::stoi(student_arg.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("--student expects <cohort-label>:<member-index>");
    }
    if (member < 1 || member > inst.cohorts[static_cast<size_t>(cohort)].population)
      throw std::invalid_argument("cohort \"" + label + "\" has no member " +
                                  std::to_string(member));
    opts.student = psched::StudentId{cohort, member};
  }
  std::cout << psched::render(inst, sched, opts);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic provider-client meeting scheduler"};
  app.require_subcommand(1);

  std::string config_path, schedule_path, out_path, student_arg, style = "grid";
  double time_limit = 0;
  int threads = 1, week = 0;
  bool deterministic = false;
  long long log_interval = 1000000;

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance to proven optimality");
  solve_cmd->add_option("config", config_path, "instance config JSON")->required();
  solve_cmd->add_option("--time-limit", time_limit, "wall-clock limit in seconds (0 = none)");
  solve_cmd->add_option("--threads", threads, "worker thread count");
  solve_cmd->add_flag("--deterministic", deterministic, "reproducible single-threaded search");
  solve_cmd->add_option("--log-interval", log_interval,
                        "nodes between progress lines on stderr (0 = silent)");
  solve_cmd->add_option("--out", out_path, "write the schedule JSON here instead of stdout");

  auto* validate_cmd = app.add_subcommand("validate", "check a schedule against an instance");
  validate_cmd->add_option("config", config_path, "instance config JSON")->required();
  validate_cmd->add_option("schedule", schedule_path, "schedule JSON")->required();

  auto* export_cmd = app.add_subcommand("export-lp", "write the instance's LP model");
  export_cmd->add_option("config", config_path, "instance config JSON")->required();
  export_cmd->add_option("--out", out_path, "write the LP text here instead of stdout");

  auto* render_cmd = app.add_subcommand("render", "print a schedule as a timetable");
  render_cmd->add_option("config", config_path, "instance config JSON")->required();
  render_cmd->add_option("schedule", schedule_path, "schedule JSON")->required();
  render_cmd->add_option("--week", week, "render only this week (1-based)");
  render_cmd->add_option("--student", student_arg, "render one student: <cohort-label>:<member>");
  render_cmd->add_option("--style", style, "grid or itinerary");

  auto* precheck_cmd = app.add_subcommand("precheck", "run feasibility prechecks");
  precheck_cmd->add_option("config", config_path, "instance config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve_cmd->parsed())
      return run_solve(config_path, time_limit, threads, deterministic, log_interval, out_path);
    if (validate_cmd->parsed()) return run_validate(config_path, schedule_path);
    if (export_cmd->parsed()) return run_export_lp(config_path, out_path);
    if (render_cmd->parsed())
      return run_render(config_path, schedule_path, week, student_arg, style);
    if (precheck_cmd->parsed()) return run_precheck(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
