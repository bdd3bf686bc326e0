// Copyright 2026 The kopkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kopkit/cli.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kopkit/dubins.h"
#include "kopkit/error.h"
#include "kopkit/lns.h"
#include "kopkit/orienteering.h"
#include "kopkit/parallel.h"

namespace kopkit {
namespace {

using Json = nlohmann::ordered_json;

struct ModelFlags {
  std::string instance;
  double cmax = 0.0;
  double vmax = 3.0;
  double amax = 1.5;
  int headings = 8;
  int velocities = 6;
  std::optional<double> speed;
  std::string policy = "scaled";
  std::string start_state = "free";
};

struct SearchFlags {
  std::uint64_t seed = 0;
  int seeds = 1;
  LnsConfig lns;
  std::string endpoint_opt = "neighbors";
  std::string sweep;
  std::string out;
  std::string traj;
  double dt = 0.02;
};

void AddModelFlags(CLI::App* cmd, ModelFlags& f, bool need_budget) {
  cmd->add_option("--instance", f.instance, "instance file (x y score)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* cmax = cmd->add_option("--cmax", f.cmax, "flight-time budget C_max (s)")
                   ->check(CLI::NonNegativeNumber);
  if (need_budget) cmax->required();
  cmd->add_option("--vmax", f.vmax, "speed bound (m/s)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--amax", f.amax, "acceleration bound (m/s^2)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--headings", f.headings, "heading levels H")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--velocities", f.velocities, "speed levels V")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--speed", f.speed,
                  "single traversal speed (m/s); implies V = 1")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--policy", f.policy, "per-axis limits: scaled or box")
      ->capture_default_str()
      ->check(CLI::IsMember({"scaled", "box"}));
  cmd->add_option("--start-state", f.start_state, "start depot: free or rest")
      ->capture_default_str()
      ->check(CLI::IsMember({"free", "rest"}));
}

void AddSearchFlags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--seed", f.seed, "first LNS seed")->capture_default_str();
  cmd->add_option("--seeds", f.seeds, "number of consecutive seeds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--phase1-iters", f.lns.phase1_iters)->capture_default_str();
  cmd->add_option("--phase1-destroy", f.lns.phase1_destroy)
      ->capture_default_str();
  cmd->add_option("--phase2-iters", f.lns.phase2_iters)->capture_default_str();
  cmd->add_option("--phase2-destroy", f.lns.phase2_destroy)
      ->capture_default_str();
  cmd->add_option("--endpoint-opt", f.endpoint_opt,
                  "post-insertion re-optimization: neighbors, depots or off")
      ->capture_default_str()
      ->check(CLI::IsMember({"neighbors", "depots", "off"}));
  cmd->add_option("--out", f.out, "solution JSON path");
  cmd->add_option("--traj", f.traj, "trajectory CSV path");
  cmd->add_option("--dt", f.dt, "trajectory sample period (s)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path);
  file << content;
  if (!file) throw Error(ErrorCode::kIo, "failed writing " + path);
}

Instance LoadWithBudget(const ModelFlags& f, std::ostream& err) {
  std::vector<std::string> warnings;
  Instance inst = LoadInstance(f.instance, &warnings);
  for (const auto& w : warnings) err << "warning: " << f.instance << ": " << w << "\n";
  inst.budget = f.cmax;
  return inst;
}

KinematicLimits AxisLimits(const ModelFlags& f) {
  return PerAxisLimits(ParseAxisLimitPolicy(f.policy), f.vmax, f.amax);
}

// Speed grid: an explicit speed, or V levels on [0, per-axis v_max].
Discretization GridFor(const ModelFlags& f, std::optional<double> speed) {
  if (speed) return Discretization::WithSpeeds(f.headings, {*speed});
  if (f.velocities == 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "V = 1 needs --speed or --sweep to fix the traversal speed");
  }
  return Discretization::Uniform(f.headings, f.velocities,
                                 AxisLimits(f).v_max());
}

double Round12(double v) { return std::round(v * 1e12) / 1e12; }

struct Run {
  std::size_t model = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  Solution solution;
};

// One cost matrix per swept speed, then every (matrix, seed) pair.
struct Batch {
  std::vector<Discretization> grids;
  std::vector<CostMatrix> matrices;
  std::vector<double> labels;  // speed or v_const per matrix
  std::vector<Run> runs;
};

// Exact search runs once per matrix, LNS once per (matrix, seed).
void RunBatch(Batch& batch, const Instance& inst, const SearchFlags& s,
              const std::optional<ExactOptions>& exact,
              const std::vector<std::vector<int>>& start_states) {
  for (std::size_t m = 0; m < batch.matrices.size(); ++m) {
    const int count = exact ? 1 : s.seeds;
    for (int k = 0; k < count; ++k) {
      batch.runs.push_back({m, s.seed + static_cast<std::uint64_t>(k), false, {}});
    }
  }
  const EndpointOpt endpoint_opt = ParseEndpointOpt(s.endpoint_opt);
  ParallelFor(batch.runs.size(), [&](std::size_t i) {
    Run& run = batch.runs[i];
    try {
      if (exact) {
        ExactOptions options = *exact;
        options.start_states = start_states[run.model];
        run.solution = SolveExact(inst, batch.matrices[run.model], options);
      } else {
        LnsConfig config = s.lns;
        config.seed = run.seed;
        config.endpoint_opt = endpoint_opt;
        config.start_states = start_states[run.model];
        run.solution = SolveLns(inst, batch.matrices[run.model], config);
      }
      run.feasible = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasibleBudget) throw;
    }
  });
}

// Highest objective; earlier runs win ties so thread timing cannot matter.
const Run* BestRun(const Batch& batch) {
  const Run* best = nullptr;
  for (const Run& r : batch.runs) {
    if (!r.feasible) continue;
    if (!best || r.solution.objective > best->solution.objective) best = &r;
  }
  if (!best) {
    throw Error(ErrorCode::kInfeasibleBudget,
                "no run found a tour within the budget");
  }
  return best;
}

Json RunsJson(const Batch& batch, const char* label) {
  Json runs = Json::array();
  for (const Run& r : batch.runs) {
    Json j;
    j[label] = batch.labels[r.model];
    j["seed"] = r.seed;
    if (r.feasible) {
      j["objective"] = r.solution.objective;
      j["total_time"] = r.solution.total_time;
    } else {
      j["objective"] = nullptr;
    }
    runs.push_back(std::move(j));
  }
  return runs;
}

SolutionMetadata MetadataFor(const Instance& inst, const ModelFlags& f,
                             const Discretization& grid, std::uint64_t seed,
                             const std::string& policy) {
  SolutionMetadata meta;
  meta.instance = inst.name;
  meta.seed = seed;
  meta.cmax = f.cmax;
  meta.vmax = f.vmax;
  meta.amax = f.amax;
  meta.headings = grid.headings();
  meta.speeds = grid.speeds();
  meta.policy = policy;
  meta.speed_values = grid.speed_values();
  meta.start_state = f.start_state;
  return meta;
}

void WriteTrajectory(const std::string& path, const Solution& sol,
                     const Instance& inst, const Discretization& grid,
                     const KinematicLimits& limits, double dt) {
  const auto samples =
      SampleTour(sol.tour, inst.locations, grid, {limits, limits}, dt);
  std::ostringstream csv;
  WriteTrajectoryCsv(samples, csv);
  WriteFile(path, csv.str());
}

std::vector<std::vector<int>> StartStatesFor(const Batch& batch,
                                             const std::string& policy) {
  std::vector<std::vector<int>> out;
  for (const auto& g : batch.grids) {
    out.push_back(AllowedStartStates(ParseStartStatePolicy(policy), g));
  }
  return out;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

int CmdSolve(const ModelFlags& f, const SearchFlags& s, bool exact,
             const ExactOptions& guard, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = LoadWithBudget(f, err);
  const KinematicLimits limits = AxisLimits(f);
  const AxisLimitPolicy policy = ParseAxisLimitPolicy(f.policy);
  Batch batch;
  if (!s.sweep.empty()) {
    for (const double m : ParseSweep(s.sweep)) {
      const double speed = Round12(m * limits.v_max());
      batch.grids.push_back(GridFor(f, speed));
      batch.labels.push_back(speed);
    }
  } else {
    batch.grids.push_back(GridFor(f, f.speed));
    batch.labels.push_back(f.speed.value_or(0.0));
  }
  if (exact) {
    // Fail before paying for the matrices.
    const int states = batch.grids.front().states();
    if (inst.size() > guard.max_locations || states > guard.max_states) {
      std::ostringstream msg;
      msg << "N = " << inst.size() << ", H*V = " << states
          << " exceeds the guard N <= " << guard.max_locations
          << ", H*V <= " << guard.max_states;
      throw Error(ErrorCode::kSearchSpaceTooLarge, msg.str());
    }
  }
  for (const auto& g : batch.grids) {
    batch.matrices.push_back(
        BuildCostMatrix(inst.locations, g, policy, f.vmax, f.amax));
  }
  RunBatch(batch, inst, s, exact ? std::optional<ExactOptions>(guard) : std::nullopt,
           StartStatesFor(batch, f.start_state));
  const Run* best = BestRun(batch);
  const Discretization& grid = batch.grids[best->model];
  if (!s.out.empty()) {
    WriteFile(s.out, SolutionToJson(best->solution,
                                    MetadataFor(inst, f, grid, best->seed,
                                                f.policy)));
  }
  if (!s.traj.empty()) {
    WriteTrajectory(s.traj, best->solution, inst, grid, limits, s.dt);
  }
  Json summary;
  summary["command"] = "solve";
  summary["solver"] = exact ? "exact" : "lns";
  summary["instance"] = inst.name;
  summary["cmax"] = f.cmax;
  summary["objective"] = best->solution.objective;
  summary["total_time"] = best->solution.total_time;
  summary["seed"] = best->seed;
  if (!s.sweep.empty()) {
    summary["speed"] = batch.labels[best->model];
    summary["runs"] = RunsJson(batch, "speed");
  } else if (s.seeds > 1 && !exact) {
    summary["runs"] = RunsJson(batch, "speed");
  }
  summary["visits"] = best->solution.tour.size();
  summary["runtime_s"] = Seconds(t0);
  out << summary.dump() << "\n";
  return kExitOk;
}

int CmdDop(const ModelFlags& f, const SearchFlags& s,
           std::optional<double> vconst, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = LoadWithBudget(f, err);
  Batch batch;
  std::vector<double> speeds;
  if (!s.sweep.empty()) {
    for (const double m : ParseSweep(s.sweep)) speeds.push_back(Round12(m * f.vmax));
  } else if (vconst) {
    speeds.push_back(*vconst);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "dop needs --vconst or --sweep");
  }
  for (const double v : speeds) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "v_const must be positive");
    }
    batch.grids.push_back(Discretization::WithSpeeds(f.headings, {v}));
    batch.labels.push_back(v);
    batch.matrices.push_back(
        BuildDubinsCostMatrix(inst.locations, f.headings, v, f.amax));
  }
  RunBatch(batch, inst, s, std::nullopt, StartStatesFor(batch, f.start_state));
  const Run* best = BestRun(batch);
  if (!s.out.empty()) {
    WriteFile(s.out,
              SolutionToJson(best->solution,
                             MetadataFor(inst, f, batch.grids[best->model],
                                         best->seed, "dubins")));
  }
  Json runs = RunsJson(batch, "v_const");
  for (auto& r : runs) {
    r["r"] = TurningRadius(r["v_const"].get<double>(), f.amax);
  }
  Json summary;
  summary["command"] = "dop";
  summary["instance"] = inst.name;
  summary["cmax"] = f.cmax;
  summary["objective"] = best->solution.objective;
  summary["total_time"] = best->solution.total_time;
  summary["v_const"] = batch.labels[best->model];
  summary["r"] = TurningRadius(batch.labels[best->model], f.amax);
  summary["seed"] = best->seed;
  summary["runs"] = std::move(runs);
  summary["runtime_s"] = Seconds(t0);
  out << summary.dump() << "\n";
  return kExitOk;
}

int CmdExportMilp(const ModelFlags& f, const std::string& path,
                  std::ostream& out, std::ostream& err) {
  const Instance inst = LoadWithBudget(f, err);
  const CostMatrix m =
      BuildCostMatrix(inst.locations, GridFor(f, f.speed),
                      ParseAxisLimitPolicy(f.policy), f.vmax, f.amax);
  const std::string lp = ExportMilp(inst, m);
  if (path.empty()) {
    out << lp;
    return kExitOk;
  }
  WriteFile(path, lp);
  Json summary;
  summary["command"] = "export-milp";
  summary["instance"] = inst.name;
  summary["path"] = path;
  summary["bytes"] = lp.size();
  out << summary.dump() << "\n";
  return kExitOk;
}

int CmdCostMatrix(const ModelFlags& f, const std::string& path,
                  const std::string& format, std::ostream& out,
                  std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst = LoadWithBudget(f, err);
  const CostMatrix m =
      BuildCostMatrix(inst.locations, GridFor(f, f.speed),
                      ParseAxisLimitPolicy(f.policy), f.vmax, f.amax);
  const double build_s = Seconds(t0);
  if (format == "json") {
    if (path.empty()) {
      out << CostMatrixToJson(m) << "\n";
      return kExitOk;
    }
    WriteFile(path, CostMatrixToJson(m) + "\n");
  } else {
    if (path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "binary output needs --out");
    }
    std::ostringstream bytes;
    WriteCostMatrixBinary(m, bytes);
    WriteFile(path, bytes.str());
  }
  Json summary;
  summary["command"] = "cost-matrix";
  summary["instance"] = inst.name;
  summary["dims"] = m.dims();
  summary["entries"] = m.data().size();
  summary["build_s"] = build_s;
  summary["mean_leg_us"] = build_s * 1e6 / static_cast<double>(m.data().size());
  out << summary.dump() << "\n";
  return kExitOk;
}

int CmdTraj(const std::string& instance_path, const std::string& solution_path,
            const std::string& path, double dt, std::ostream& out,
            std::ostream& err) {
  std::vector<std::string> warnings;
  const Instance inst = LoadInstance(instance_path, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  std::ifstream file(solution_path);
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + solution_path);
  std::ostringstream text;
  text << file.rdbuf();
  SolutionMetadata meta;
  const Solution sol = SolutionFromJson(text.str(), &meta);
  if (meta.policy == "dubins") {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory export needs a kinematic solution, not a Dubins one");
  }
  if (static_cast<int>(meta.speed_values.size()) != meta.speeds) {
    throw Error(ErrorCode::kIo, "solution lacks its speed grid");
  }
  const Discretization grid =
      Discretization::WithSpeeds(meta.headings, meta.speed_values);
  for (const PoseState& p : sol.tour) {
    if (p.location < 0 || p.location >= inst.size() || p.heading < 0 ||
        p.heading >= grid.headings() || p.speed < 0 ||
        p.speed >= grid.speeds()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "solution does not match the instance or grid");
    }
  }
  const KinematicLimits limits =
      PerAxisLimits(ParseAxisLimitPolicy(meta.policy), meta.vmax, meta.amax);
  const auto samples =
      SampleTour(sol.tour, inst.locations, grid, {limits, limits}, dt);
  std::ostringstream csv;
  WriteTrajectoryCsv(samples, csv);
  if (path.empty()) {
    out << csv.str();
    return kExitOk;
  }
  WriteFile(path, csv.str());
  Json summary;
  summary["command"] = "traj";
  summary["samples"] = samples.size();
  summary["duration"] = samples.empty() ? 0.0 : samples.back().t;
  summary["path"] = path;
  out << summary.dump() << "\n";
  return kExitOk;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleBudget:
      return kExitInfeasibleBudget;
    case ErrorCode::kSearchSpaceTooLarge:
      return kExitSearchSpace;
    default:
      return kExitError;
  }
}

}  // namespace

std::vector<double> ParseSweep(const std::string& spec) {
  double a, b, c;
  char colon1 = 0, colon2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> colon1 >> b >> colon2 >> c) || colon1 != ':' ||
      colon2 != ':' || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sweep must look like start:stop:step, got '" + spec + "'");
  }
  if (!(c > 0.0) || !(a > 0.0) || b < a) {
    throw Error(ErrorCode::kInvalidArgument,
                "sweep needs 0 < start <= stop and a positive step");
  }
  const int count = static_cast<int>(std::floor((b - a) / c + 1e-9)) + 1;
  std::vector<double> values;
  for (int i = 0; i < count; ++i) values.push_back(Round12(a + i * c));
  return values;
}

void WriteTrajectoryCsv(std::span<const TrajectorySample> samples,
                        std::ostream& out) {
  out << "t,x,y,vx,vy,ax,ay\n";
  char line[256];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  s.t, s.position[0], s.position[1], s.velocity[0],
                  s.velocity[1], s.acceleration[0], s.acceleration[1]);
    out << line;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Kinematic orienteering toolkit", "kopkit"};
  app.require_subcommand(1);

  ModelFlags solve_model;
  SearchFlags solve_search;
  bool exact = false;
  ExactOptions guard;
  auto* solve = app.add_subcommand("solve", "LNS or exact solve over the KOP cost matrix");
  AddModelFlags(solve, solve_model, true);
  AddSearchFlags(solve, solve_search);
  solve->add_flag("--exact", exact, "exhaustive search (small instances)");
  solve->add_option("--max-locations", guard.max_locations, "exact-search guard on N")
      ->capture_default_str();
  solve->add_option("--max-states", guard.max_states, "exact-search guard on H*V")
      ->capture_default_str();
  solve->add_option("--sweep", solve_search.sweep,
                    "traversal speeds as multiples of the per-axis bound, "
                    "start:stop:step (V = 1)");

  ModelFlags dop_model;
  SearchFlags dop_search;
  std::optional<double> vconst;
  auto* dop = app.add_subcommand("dop", "LNS over Dubins leg costs at constant speed");
  AddModelFlags(dop, dop_model, true);
  AddSearchFlags(dop, dop_search);
  dop->add_option("--vconst", vconst, "constant speed (m/s)");
  dop->add_option("--sweep", dop_search.sweep,
                  "v_const as multiples of vmax, start:stop:step");

  ModelFlags milp_model;
  std::string milp_out;
  auto* milp = app.add_subcommand("export-milp", "write the binary program in LP format");
  AddModelFlags(milp, milp_model, true);
  milp->add_option("--out", milp_out, "LP file path (default: stdout)");

  ModelFlags matrix_model;
  std::string matrix_out;
  std::string matrix_format = "binary";
  auto* matrix = app.add_subcommand("cost-matrix", "build and dump the flight-time tensor");
  AddModelFlags(matrix, matrix_model, false);
  matrix->add_option("--out", matrix_out, "output path");
  matrix->add_option("--format", matrix_format, "binary or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"binary", "json"}));

  std::string traj_instance, traj_solution, traj_out;
  double traj_dt = 0.02;
  auto* traj = app.add_subcommand("traj", "sample the trajectory of a stored solution");
  traj->add_option("--instance", traj_instance, "instance file")
      ->required()
      ->check(CLI::ExistingFile);
  traj->add_option("--solution", traj_solution, "solution JSON")
      ->required()
      ->check(CLI::ExistingFile);
  traj->add_option("--out", traj_out, "CSV path (default: stdout)");
  traj->add_option("--dt", traj_dt, "sample period (s)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*solve) {
      return CmdSolve(solve_model, solve_search, exact, guard, out, err);
    }
    if (*dop) return CmdDop(dop_model, dop_search, vconst, out, err);
    if (*milp) return CmdExportMilp(milp_model, milp_out, out, err);
    if (*matrix) {
      return CmdCostMatrix(matrix_model, matrix_out, matrix_format, out, err);
    }
    if (*traj) {
      return CmdTraj(traj_instance, traj_solution, traj_out, traj_dt, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace kopkit
