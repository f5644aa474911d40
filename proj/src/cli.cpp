#include "chronos/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "chronos/error.hpp"
#include "chronos/io.hpp"
#include "chronos/reach.hpp"
#include "chronos/system.hpp"
#include "chronos/tsexp.hpp"

namespace chronos::cli {
namespace {

using nlohmann::json;

struct Request {
  std::string system_path;
  std::string example;
  std::optional<double> t0;
  std::optional<double> t1;
  std::optional<double> tol;
  std::string format = "json";
  // simulate
  std::string control_path;
  std::string x0;
  std::optional<std::uint64_t> seed;
  std::size_t dense_samples = 32;
  // gram
  std::string columns;
  std::string sets;
  // reach
  std::string target;
  std::string out_dir;
};

double default_tolerance() {
  if (const char* env = std::getenv("CHRONOS_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    throw Error(ErrorKind::ParseError, "CHRONOS_TOL must be a positive number");
  }
  return kDefaultTol;
}

LinearSystem load_system(const Request& req) {
  if (!req.example.empty()) {
    for (const auto& ex : builtin_examples()) {
      if (ex.name == req.example) return io::system_from_json(ex.descriptor);
    }
    throw Error(ErrorKind::ParseError, "unknown example '" + req.example + "'");
  }
  if (req.system_path.empty()) throw Error(ErrorKind::ParseError, "either --system or --example is required");
  return io::system_from_json(io::read_json_file(req.system_path));
}

struct Window {
  double t0;
  double t1;
};

Window window_of(const Request& req, const LinearSystem& sys) {
  const TimeScale& ts = sys.scale();
  return {ts.snap(req.t0.value_or(ts.min())), ts.snap(req.t1.value_or(ts.max()))};
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int cmd_analyze(const Request& req, double tol, std::ostream& out) {
  const LinearSystem sys = load_system(req);
  const Window w = window_of(req, sys);
  const auto pos = is_positive(sys, tol);

  json positivity{{"positive", pos.positive}, {"A_T", io::to_json(pos.a_t)}, {"detail", pos.describe()}};
  json accessibility{{"kalman_rank", rank(kalman_matrix(sys), tol)}};
  try {
    accessibility["accessible"] = is_positively_accessible(sys, w.t0, w.t1, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::WindowTooSmall) throw;
    accessibility["accessible"] = nullptr;
  }

  json reachability;
  bool reachable = false;
  if (pos.positive) {
    ReachOptions opts;
    opts.tol = tol;
    const auto report = decide_positive_reachability(sys, w.t0, w.t1, opts);
    reachable = report.reachable();
    reachability = io::to_json(report);
  } else {
    reachability = {{"decision", nullptr}, {"reachable", false}, {"detail", "system is not positive"}};
  }
  write_json(out, {{"command", "analyze"},
                   {"system", io::to_json(sys)},
                   {"window", {w.t0, w.t1}},
                   {"tolerance", tol},
                   {"positivity", std::move(positivity)},
                   {"accessibility", std::move(accessibility)},
                   {"reachability", std::move(reachability)}});
  return reachable ? 0 : 1;
}

int cmd_simulate(const Request& req, std::ostream& out) {
  const LinearSystem sys = load_system(req);
  const TimeScale& ts = sys.scale();
  std::optional<ControlSignal> control;
  if (!req.control_path.empty()) {
    control = io::control_from_json(io::read_json_file(req.control_path), ts);
  } else {
    const Window w = window_of(req, sys);
    control = req.seed ? random_nonneg_control(sys, w.t0, w.t1, *req.seed, 0)
                       : ControlSignal::zero(ts, w.t0, w.t1, sys.inputs());
  }
  const Vec x0 = req.x0.empty() ? Vec::Zero(sys.states()) : io::parse_target(req.x0, sys.states());
  const double t_end = req.t1 && !req.control_path.empty() ? *req.t1 : control->t1();
  SimulationOptions opts;
  opts.dense_samples = req.dense_samples;
  const Trajectory traj = simulate(sys, x0, *control, t_end, opts);

  if (req.format == "csv") {
    out << io::trajectory_csv(traj);
    return 0;
  }
  json xs = json::array();
  for (const auto& x : traj.x) xs.push_back(io::vector_to_json(x));
  write_json(out, {{"command", "simulate"},
                   {"system", io::to_json(sys)},
                   {"control", io::to_json(*control)},
                   {"x0", io::vector_to_json(x0)},
                   {"trajectory", {{"t", traj.t}, {"x", std::move(xs)}}},
                   {"final", {{"t", traj.t.back()}, {"x", io::vector_to_json(traj.final_state())}}}});
  return 0;
}

int cmd_exp(const Request& req, std::ostream& out) {
  const LinearSystem sys = load_system(req);
  const Window w = window_of(req, sys);
  const auto path = exp_path(sys.A(), sys.scale(), w.t1, w.t0);
  json j = io::to_json(path);
  j["command"] = "exp";
  j["system"] = io::to_json(sys);
  write_json(out, j);
  return 0;
}

int cmd_gram(const Request& req, double tol, std::ostream& out) {
  const LinearSystem sys = load_system(req);
  const Window w = window_of(req, sys);
  GramSpec spec;
  std::string kind = "full";
  if (!req.sets.empty()) {
    spec = io::parse_spec(sys, w.t0, w.t1, req.sets);
    if (!req.columns.empty()) {
      const auto cols = io::parse_columns(req.columns, sys.inputs());
      if (cols != spec.columns()) {
        throw Error(ErrorKind::SpecOutsideWindow, "--M does not match the columns given in --S");
      }
    }
    kind = "custom";
  } else {
    std::vector<Index> cols;
    if (!req.columns.empty()) {
      cols = io::parse_columns(req.columns, sys.inputs());
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    } else {
      for (Index k = 0; k < sys.inputs(); ++k) cols.push_back(k);
    }
    if (static_cast<Index>(cols.size()) != sys.inputs()) kind = "columns";
    spec = window_spec(sys, w.t0, w.t1, cols);
  }
  const Mat W = gram(sys, spec);
  const bool monomial = is_monomial(W, tol);
  write_json(out, {{"command", "gram"},
                   {"system", io::to_json(sys)},
                   {"instantiates", kind},
                   {"spec", io::to_json(spec)},
                   {"W", io::to_json(W)},
                   {"monomial", monomial}});
  return monomial ? 0 : 1;
}

void write_control_file(const std::filesystem::path& dir, const std::string& name, const SynthesizedControl& c) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw Error(ErrorKind::ParseError, "cannot write " + (dir / name).string());
  f << io::to_json(c.control).dump(2) << "\n";
}

int cmd_reach(const Request& req, double tol, std::ostream& out) {
  const LinearSystem sys = load_system(req);
  const Window w = window_of(req, sys);
  ReachOptions opts;
  opts.tol = tol;
  const auto report = decide_positive_reachability(sys, w.t0, w.t1, opts);
  json j = io::to_json(report);
  j["command"] = "reach";
  j["system"] = io::to_json(sys);

  if (report.certificate && !req.target.empty()) {
    const Vec target = io::parse_target(req.target, sys.states());
    SynthesisOptions synth = opts.synthesis;
    synth.tol = tol;
    const auto c = synthesize_control(sys, report.certificate->spec, report.certificate->W, target, synth);
    j["requested_control"] = io::to_json(c);
    if (!req.out_dir.empty()) write_control_file(req.out_dir, "control_target.json", c);
  }
  if (report.certificate && !req.out_dir.empty()) {
    const auto& controls = report.certificate->controls;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      write_control_file(req.out_dir, "control_e" + std::to_string(i + 1) + ".json", controls[i]);
    }
  }
  write_json(out, j);
  return report.reachable() ? 0 : 1;
}

void add_common(CLI::App* sub, Request& req) {
  sub->add_option("--system", req.system_path, "System descriptor (JSON)");
  sub->add_option("--example", req.example, "Use a built-in system instead of --system");
  sub->add_option("--t0", req.t0, "Window start (default: first point of the scale)");
  sub->add_option("--t1", req.t1, "Window end (default: last point of the scale)");
  sub->add_option("--tol", req.tol, "Tolerance (overrides CHRONOS_TOL)");
  sub->add_option("--format", req.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

const std::vector<BuiltinExample>& builtin_examples() {
  static const std::vector<BuiltinExample> examples{
      {"integer-two-input",
       "two inputs on the integers, window [0,2]: reachable with a monomial Gram over column 1 only",
       json{{"timescale", {{"tag", "h_grid"}, {"h", 1.0}, {"components", {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}}}},
            {"A", {{-1.0, 1.0}, {1.0, 0.0}}},
            {"B", {{1.0, 1.0}, {0.0, 1.0}}}}},
      {"mixed-scale", "single input on {0} u [1,2] u {3}: reachable through the two scattered points",
       json{{"timescale", {{"tag", "custom"}, {"components", {{0.0, 0.0}, {1.0, 2.0}, {3.0, 3.0}}}}},
            {"A", {{-1.0, 0.0}, {1.0, -1.0}}},
            {"B", {{1.0}, {0.0}}}}},
      {"nonhomogeneous-grid", "single input on {0,1,2,4}: needs three jumps to reach the orthant",
       json{{"timescale", {{"tag", "custom"}, {"components", {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {4.0, 4.0}}}}},
            {"A", {{-0.5, 0.0}, {1.0, -0.5}}},
            {"B", {{1.0}, {0.0}}}}},
  };
  return examples;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear positive control systems on time scales"};
  app.name("chronos");
  Request req;
  bool list_examples = false;
  app.add_flag("--examples", list_examples, "Print the built-in example descriptors");

  auto* analyze = app.add_subcommand("analyze", "Positivity, accessibility and positive reachability report");
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate under a piecewise-constant control");
  auto* exp_cmd = app.add_subcommand("exp", "Time-scale matrix exponential e_A(t1, t0) and its factors");
  auto* gram_cmd = app.add_subcommand("gram", "Modified Gram matrix and its monomiality");
  auto* reach_cmd = app.add_subcommand("reach", "Decide positive reachability and synthesize controls");
  for (auto* sub : {analyze, simulate_cmd, exp_cmd, gram_cmd, reach_cmd}) add_common(sub, req);
  simulate_cmd->add_option("--control", req.control_path, "Control descriptor (JSON)");
  simulate_cmd->add_option("--x0", req.x0, "Initial state, e.g. \"1,0\" or \"e2\"");
  simulate_cmd->add_option("--seed", req.seed, "Use a random nonnegative control with this seed");
  simulate_cmd->add_option("--samples", req.dense_samples, "Samples per continuous segment");
  gram_cmd->add_option("--M", req.columns, "Selected input columns, e.g. \"1,3\"");
  gram_cmd->add_option("--S", req.sets, "Delta-sets, e.g. \"1:[0,1)|[2,3);2:[0,3)\"");
  reach_cmd->add_option("--target", req.target, "Extra target state, e.g. \"e1\" or \"0.5,1\"");
  reach_cmd->add_option("--out-dir", req.out_dir, "Directory for per-target control files");
  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (list_examples) {
      json list = json::array();
      for (const auto& ex : builtin_examples()) {
        list.push_back({{"name", ex.name}, {"summary", ex.summary}, {"descriptor", ex.descriptor}});
      }
      write_json(out, list);
      return 0;
    }
    const double tol = req.tol.value_or(default_tolerance());
    if (*analyze) return cmd_analyze(req, tol, out);
    if (*simulate_cmd) return cmd_simulate(req, out);
    if (*exp_cmd) return cmd_exp(req, out);
    if (*gram_cmd) return cmd_gram(req, tol, out);
    if (*reach_cmd) return cmd_reach(req, tol, out);
    out << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chronos::cli
