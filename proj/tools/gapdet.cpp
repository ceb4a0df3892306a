// gapdet command-line front end.
//
//   gapdet run <config.json> [--m N] [--radius R] [--deform BOOL] [--workers K] [--out FILE]
//   gapdet check equivalence|derivatives|pde --preset NAME [...]
//   gapdet tw-oracle --s S [...]
//
// Exit status: 0 when every requested tolerance is met, 1 otherwise, 2 on
// configuration errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "gapdet/job.hpp"

namespace {

using gapdet::JobConfig;
using gapdet::Process;

struct Overrides {
  std::optional<int> m;
  std::optional<double> radius;
  std::optional<bool> deform;
  int workers = 1;
  std::string out;
  std::string csv;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--m", o.m, "quadrature nodes per contour component")->check(CLI::Range(4, 100000));
  cmd->add_option("--radius", o.radius, "fixed truncation radius for every contour")->check(CLI::PositiveNumber);
  cmd->add_option("--deform", o.deform, "Airy: deform iR + tau_j to gamma_L + tau_j (true/false)");
  cmd->add_option("--workers", o.workers, "worker threads for sweeps and PDE grids")->check(CLI::Range(1, 1024));
  cmd->add_option("--out", o.out, "write the JSON record here instead of stdout");
  cmd->add_option("--csv", o.csv, "also write sweep rows as CSV");
}

void apply(const Overrides& o, JobConfig& c) {
  if (o.m) c.quadrature.m = *o.m;
  if (o.radius) c.quadrature.truncation_radius = *o.radius;
  if (o.deform) c.quadrature.deform = *o.deform;
  if (!o.out.empty()) c.output = o.out;
  if (!o.csv.empty()) c.csv = o.csv;
}

JobConfig make(Process p, std::vector<double> times, std::vector<std::vector<double>> ends, std::string task) {
  JobConfig c;
  c.process = p;
  c.times = std::move(times);
  c.intervals = std::move(ends);
  c.task = std::move(task);
  return c;
}

std::map<std::string, JobConfig> presets(const std::string& kind) {
  std::map<std::string, JobConfig> m;
  if (kind == "equivalence") {
    m["airy-one-time"] = make(Process::airy, {0.0}, {{0.0}}, kind);
    m["airy-two-time"] = make(Process::airy, {0.0, 1.0}, {{0.0}, {0.5}}, kind);
    m["pearcey-one-time"] = make(Process::pearcey, {0.0}, {{-1.0, 1.0}}, kind);
    m["pearcey-two-time"] = make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-1.0, 1.0}}, kind);
  } else if (kind == "derivatives") {
    m["airy-one-time"] = make(Process::airy, {0.0}, {{-1.0}}, kind);
    m["airy-two-time"] = make(Process::airy, {0.0, 1.0}, {{0.0}, {0.0}}, kind);
    m["pearcey-one-time"] = make(Process::pearcey, {0.0}, {{-1.0, 1.0}}, kind);
    m["pearcey-two-time"] = make(Process::pearcey, {0.0, 1.0}, {{-1.0, 1.0}, {-0.5, 1.5}}, kind);
  } else if (kind == "pde") {
    JobConfig c = make(Process::airy, {0.0, 1.0}, {{0.3}, {0.1}}, kind);
    c.pde.center = {1.0, 0.2, 0.1};
    c.pde.steps = {0.1, 0.05, 0.025};
    m["avm-default"] = c;
  }
  return m;
}

int emit(const JobConfig& c, int workers) {
  const auto records = gapdet::run(c, workers);
  const gapdet::Json out = gapdet::records_to_json(records);
  if (c.output.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    std::ofstream f(c.output);
    if (!f) throw gapdet::ConfigError("cannot write " + c.output);
    f << out.dump(2) << '\n';
  }
  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    if (!f) throw gapdet::ConfigError("cannot write " + c.csv);
    gapdet::write_csv(f, records);
  }
  bool passed = true;
  for (const auto& r : records) passed = passed && r.ok && r.passed;
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap probabilities of the multi-time Airy and Pearcey processes"};
  app.require_subcommand(1);

  Overrides run_o, check_o, tw_o;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "execute a JSON job file");
  run_cmd->add_option("config", config_path, "job configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_common(run_cmd, run_o);

  std::string check_kind, preset;
  auto* check_cmd = app.add_subcommand("check", "run a built-in verification preset");
  check_cmd->add_option("kind", check_kind, "equivalence, derivatives or pde")
      ->required()
      ->check(CLI::IsMember({"equivalence", "derivatives", "pde"}));
  check_cmd->add_option("--preset", preset, "preset name")->required();
  add_common(check_cmd, check_o);

  double s = 0.0;
  auto* tw_cmd = app.add_subcommand("tw-oracle", "classical Tracy-Widom F2(s) vs the contour determinant");
  tw_cmd->add_option("--s", s, "left endpoint of [s, inf)")->required();
  add_common(tw_cmd, tw_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      JobConfig c = gapdet::load_job(config_path);
      apply(run_o, c);
      return emit(c, run_o.workers);
    }
    if (*check_cmd) {
      const auto table = presets(check_kind);
      const auto it = table.find(preset);
      if (it == table.end()) {
        std::cerr << "unknown preset \"" << preset << "\" for " << check_kind << "; available:";
        for (const auto& [name, cfg] : table) std::cerr << ' ' << name;
        std::cerr << '\n';
        return 2;
      }
      JobConfig c = it->second;
      apply(check_o, c);
      return emit(c, check_o.workers);
    }
    JobConfig c = make(Process::airy, {0.0}, {{s}}, "tw-oracle");
    c.tw_s = {s};
    apply(tw_o, c);
    return emit(c, tw_o.workers);
  } catch (const gapdet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
