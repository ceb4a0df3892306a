#pragma once

// Batch jobs: JSON configuration, task dispatch, result records, CSV output
// and a small worker pool for sweeps and PDE grids.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gapdet/gap.hpp"
#include "gapdet/isomono.hpp"
#include "gapdet/pdecheck.hpp"
#include "gapdet/tracy_widom.hpp"

namespace gapdet {

using Json = nlohmann::json;

/// Runs fn(0..count-1) on up to `workers` threads. Exceptions are rethrown
/// after all workers stop (the first one wins).
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t nthreads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline bool log_enabled() {
  const char* v = std::getenv("GAPDET_LOG");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "quiet";
}

inline void log_line(const std::string& msg) {
  static std::mutex mu;
  if (!log_enabled()) return;
  std::lock_guard lock(mu);
  std::cerr << "[gapdet] " << msg << '\n';
}

struct Tolerances {
  double equivalence = 1e-6;
  double derivative = 1e-4;
  double pde = 1e-3;
  double pde_ratio = 3.5;
  double tw = 1e-8;
  double imag = 1e-8;
};

struct SweepSpec {
  std::string axis;  // "a[i][l]", "tau[i]" or "s" (shift every endpoint)
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
    return v;
  }
};

struct PdeSpec {
  PdePoint center{1.0, 0.2, 0.1};
  std::vector<double> steps{0.1, 0.05, 0.025};
  int radius = 2;
};

struct JobConfig {
  Process process = Process::airy;
  std::vector<double> times{0.0};
  std::vector<std::vector<double>> intervals{{0.0}};
  QuadratureOptions quadrature;
  Representation representation = Representation::physical;
  std::string task = "det";
  std::optional<SweepSpec> sweep;
  PdeSpec pde;
  std::vector<double> fd_steps = default_fd_steps();
  std::vector<double> tw_s{0.0};
  Tolerances tolerances;
  std::string output;
  std::string csv;

  GapProblem problem() const { return GapProblem::make(process, times, intervals, quadrature); }
};

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t{"det", "equivalence", "derivatives", "pde", "tw-oracle", "sweep"};
  return t;
}

namespace detail {

template <class T>
T field(const Json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(path + key + ": " + e.what());
  }
}

inline void require_positive(const std::string& name, double v) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

}  // namespace detail

inline Json to_json(const QuadratureOptions& q) {
  Json j{{"m", q.m},         {"deform", q.deform},       {"delta", q.delta},
         {"t_cut", q.t_cut}, {"interval_nodes", q.interval_nodes}, {"gauge", q.gauge},
         {"tail_eps", q.tail_eps}, {"panels", q.panels.panels}, {"panel_ratio", q.panels.ratio}};
  j["truncation_radius"] = q.truncation_radius ? Json(*q.truncation_radius) : Json(nullptr);
  j["apex"] = q.apex ? Json(*q.apex) : Json(nullptr);
  return j;
}

inline QuadratureOptions quadrature_from_json(const Json& j) {
  QuadratureOptions q;
  if (j.is_null()) return q;
  if (!j.is_object()) throw ConfigError("quadrature: expected an object");
  const std::string p = "quadrature.";
  q.m = detail::field(j, p, "m", q.m);
  if (j.contains("truncation_radius") && !j.at("truncation_radius").is_null())
    q.truncation_radius = detail::field(j, p, "truncation_radius", 0.0);
  q.deform = detail::field(j, p, "deform", q.deform);
  q.delta = detail::field(j, p, "delta", q.delta);
  q.t_cut = detail::field(j, p, "t_cut", q.t_cut);
  q.interval_nodes = detail::field(j, p, "interval_nodes", q.interval_nodes);
  q.gauge = detail::field(j, p, "gauge", q.gauge);
  q.tail_eps = detail::field(j, p, "tail_eps", q.tail_eps);
  q.panels.panels = detail::field(j, p, "panels", q.panels.panels);
  q.panels.ratio = detail::field(j, p, "panel_ratio", q.panels.ratio);
  if (j.contains("apex") && !j.at("apex").is_null()) q.apex = detail::field(j, p, "apex", 0.0);
  if (q.m < 4) throw ConfigError("quadrature.m must be at least 4");
  if (q.truncation_radius) detail::require_positive("quadrature.truncation_radius", *q.truncation_radius);
  detail::require_positive("quadrature.delta", q.delta);
  detail::require_positive("quadrature.t_cut", q.t_cut);
  detail::require_positive("quadrature.tail_eps", q.tail_eps);
  if (q.interval_nodes < 1) throw ConfigError("quadrature.interval_nodes must be positive");
  if (q.panels.panels < 1) throw ConfigError("quadrature.panels must be positive");
  return q;
}

inline Json to_json(const JobConfig& c) {
  Json j;
  j["process"] = to_string(c.process);
  j["times"] = c.times;
  j["intervals"] = c.intervals;
  j["quadrature"] = to_json(c.quadrature);
  j["representation"] = to_string(c.representation);
  j["task"] = c.task;
  if (c.sweep) {
    j["sweep"] = {{"axis", c.sweep->axis}, {"start", c.sweep->start}, {"stop", c.sweep->stop},
                  {"count", c.sweep->count}};
  }
  j["pde"] = {{"center", {c.pde.center.tau, c.pde.center.E, c.pde.center.W}},
              {"steps", c.pde.steps},
              {"radius", c.pde.radius}};
  j["fd_steps"] = c.fd_steps;
  j["s"] = c.tw_s;
  j["tolerances"] = {{"equivalence", c.tolerances.equivalence}, {"derivative", c.tolerances.derivative},
                     {"pde", c.tolerances.pde},                 {"pde_ratio", c.tolerances.pde_ratio},
                     {"tw", c.tolerances.tw},                   {"imag", c.tolerances.imag}};
  j["output"] = c.output;
  j["csv"] = c.csv;
  return j;
}

/// Parses and validates a job; errors name the offending field.
inline JobConfig job_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  JobConfig c;
  const std::string root;
  c.process = parse_process(detail::field<std::string>(j, root, "process", "airy"));
  c.task = detail::field<std::string>(j, root, "task", c.task);
  if (std::find(known_tasks().begin(), known_tasks().end(), c.task) == known_tasks().end())
    throw ConfigError("task: unknown task \"" + c.task + "\"");
  c.times = detail::field(j, root, "times", c.times);
  c.intervals = detail::field(j, root, "intervals", c.intervals);
  c.quadrature = quadrature_from_json(j.value("quadrature", Json(nullptr)));
  const std::string rep = detail::field<std::string>(j, root, "representation", "physical");
  if (rep != "physical" && rep != "iiks") throw ConfigError("representation: expected \"physical\" or \"iiks\"");
  c.representation = rep == "iiks" ? Representation::iiks : Representation::physical;
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const Json& s = j.at("sweep");
    SweepSpec sw;
    sw.axis = detail::field<std::string>(s, "sweep.", "axis", "");
    sw.start = detail::field(s, "sweep.", "start", 0.0);
    sw.stop = detail::field(s, "sweep.", "stop", 0.0);
    sw.count = detail::field(s, "sweep.", "count", 0);
    if (sw.count < 1) throw ConfigError("sweep.count must be at least 1");
    c.sweep = sw;
  }
  if (c.task == "sweep" && !c.sweep) throw ConfigError("sweep: required for task \"sweep\"");
  if (j.contains("pde")) {
    const Json& p = j.at("pde");
    const auto center = detail::field(p, "pde.", "center", std::vector<double>{1.0, 0.2, 0.1});
    if (center.size() != 3) throw ConfigError("pde.center: expected [tau, E, W]");
    c.pde.center = {center[0], center[1], center[2]};
    c.pde.steps = detail::field(p, "pde.", "steps", c.pde.steps);
    c.pde.radius = detail::field(p, "pde.", "radius", c.pde.radius);
    if (c.pde.radius < 2) throw ConfigError("pde.radius must be at least 2 for third-order stencils");
    for (double h : c.pde.steps) detail::require_positive("pde.steps", h);
  }
  c.fd_steps = detail::field(j, root, "fd_steps", c.fd_steps);
  for (double h : c.fd_steps) detail::require_positive("fd_steps", h);
  c.tw_s = detail::field(j, root, "s", c.tw_s);
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    const std::string p = "tolerances.";
    c.tolerances.equivalence = detail::field(t, p, "equivalence", c.tolerances.equivalence);
    c.tolerances.derivative = detail::field(t, p, "derivative", c.tolerances.derivative);
    c.tolerances.pde = detail::field(t, p, "pde", c.tolerances.pde);
    c.tolerances.pde_ratio = detail::field(t, p, "pde_ratio", c.tolerances.pde_ratio);
    c.tolerances.tw = detail::field(t, p, "tw", c.tolerances.tw);
    c.tolerances.imag = detail::field(t, p, "imag", c.tolerances.imag);
  }
  c.output = detail::field<std::string>(j, root, "output", "");
  c.csv = detail::field<std::string>(j, root, "csv", "");
  if (c.task != "tw-oracle" && c.task != "pde") (void)c.problem();  // validates times and intervals
  return c;
}

inline JobConfig load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return job_from_json(j);
}

struct ResultRecord {
  Json config;
  std::string task;
  bool ok = true;       // computation finished
  bool passed = true;   // requested tolerances met
  Json data = Json::object();
  std::string error;
  double wall_seconds = 0.0;
};

inline Json to_json(const ResultRecord& r) {
  return Json{{"config", r.config}, {"task", r.task},   {"ok", r.ok},
              {"passed", r.passed}, {"data", r.data},   {"error", r.error},
              {"wall_seconds", r.wall_seconds}};
}

inline ResultRecord record_from_json(const Json& j) {
  ResultRecord r;
  r.config = j.at("config");
  r.task = j.at("task").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  r.passed = j.at("passed").get<bool>();
  r.data = j.at("data");
  r.error = j.at("error").get<std::string>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

inline Json to_json(const DetResult& d) {
  return Json{{"re", d.value.real()},
              {"im", d.value.imag()},
              {"log_re", d.log_value.real()},
              {"log_im", d.log_value.imag()},
              {"condition", d.diagnostics.condition},
              {"truncation_radius", d.diagnostics.truncation_radius},
              {"m", d.diagnostics.m},
              {"max_imag", d.diagnostics.max_imag}};
}

inline Json to_json(const DerivativeReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"parameter", c.parameter}, {"formula", c.formula}, {"steps", c.steps},
                      {"fd", c.fd},               {"rel_error", c.rel_error}, {"ratios", c.ratios},
                      {"significant", c.significant}});
  }
  return Json{{"log_det", r.log_det}, {"max_rel_error", r.max_error()}, {"checks", checks}};
}

namespace detail {

inline bool probability_ok(const DetResult& d, double imag_tol) {
  return std::abs(d.value.imag()) < imag_tol && d.value.real() > 0.0 && d.value.real() <= 1.0 + imag_tol;
}

/// Applies a sweep coordinate to a copy of the config.
inline JobConfig sweep_point(const JobConfig& c, const std::string& axis, double v) {
  JobConfig out = c;
  out.task = "det";
  out.sweep.reset();
  int i = -1, l = -1;
  if (axis == "s") {
    for (auto& e : out.intervals)
      for (double& a : e) a += v;
  } else if (std::sscanf(axis.c_str(), "a[%d][%d]", &i, &l) == 2) {
    if (i < 0 || l < 0 || static_cast<std::size_t>(i) >= out.intervals.size() ||
        static_cast<std::size_t>(l) >= out.intervals[i].size())
      throw ConfigError("sweep.axis: endpoint index out of range");
    out.intervals[i][l] = v;
  } else if (std::sscanf(axis.c_str(), "tau[%d]", &i) == 1) {
    if (i < 0 || static_cast<std::size_t>(i) >= out.times.size()) throw ConfigError("sweep.axis: time index out of range");
    out.times[i] = v;
  } else {
    throw ConfigError("sweep.axis: expected \"s\", \"a[i][l]\" or \"tau[i]\"");
  }
  return out;
}

}  // namespace detail

inline ResultRecord run_single(const JobConfig& c, int workers = 1);

/// Executes a job. Sweeps return one record per point; failures are recorded, not thrown.
inline std::vector<ResultRecord> run(const JobConfig& c, int workers = 1) {
  if (c.task != "sweep") return {run_single(c, workers)};
  const auto values = c.sweep->values();
  std::vector<ResultRecord> out(values.size());
  parallel_for(values.size(), workers, [&](std::size_t k) {
    try {
      out[k] = run_single(detail::sweep_point(c, c.sweep->axis, values[k]), 1);
    } catch (const std::exception& e) {
      out[k].config = to_json(c);
      out[k].task = "det";
      out[k].ok = out[k].passed = false;
      out[k].error = e.what();
    }
    out[k].data["sweep_axis"] = c.sweep->axis;
    out[k].data["sweep_value"] = values[k];
    log_line("sweep point " + std::to_string(k + 1) + "/" + std::to_string(values.size()));
  });
  return out;
}

inline ResultRecord run_single(const JobConfig& c, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRecord r;
  r.config = to_json(c);
  r.task = c.task;
  try {
    if (c.task == "det") {
      const DetResult d = determinant(c.problem(), c.representation);
      r.data["det"] = to_json(d);
      r.data["representation"] = to_string(c.representation);
      r.passed = detail::probability_ok(d, c.tolerances.imag);
    } else if (c.task == "equivalence") {
      const GapProblem pb = c.problem();
      const DetResult a = determinant(pb, Representation::physical);
      const DetResult b = determinant(pb, Representation::iiks);
      const double diff = std::abs(a.value - b.value);
      r.data["physical"] = to_json(a);
      r.data["iiks"] = to_json(b);
      r.data["abs_difference"] = diff;
      r.passed = diff < c.tolerances.equivalence;
    } else if (c.task == "derivatives") {
      const DerivativeReport rep = check_derivatives(c.problem(), c.fd_steps);
      r.data = to_json(rep);
      r.passed = rep.max_error() < c.tolerances.derivative;
    } else if (c.task == "pde") {
      if (c.process != Process::airy) throw ConfigError("process: the PDE check is defined for the Airy process");
      Json rows = Json::array();
      double last_rel = 0.0, prev_rel = 0.0, min_ratio = std::numeric_limits<double>::infinity();
      const auto runner = [&](std::size_t n, const std::function<void(std::size_t)>& fn) {
        parallel_for(n, workers, fn);
      };
      for (std::size_t k = 0; k < c.pde.steps.size(); ++k) {
        const double h = c.pde.steps[k];
        const LogDetGrid grid =
            build_grid(c.pde.center, {h, h, h}, c.pde.radius, c.quadrature, c.representation, runner);
        const AvmResidual res = avm_residual(grid);
        last_rel = res.relative();
        if (k > 0) min_ratio = std::min(min_ratio, prev_rel / last_rel);
        prev_rel = last_rel;
        rows.push_back({{"h", h},
                        {"lhs", res.lhs},
                        {"rhs", res.rhs},
                        {"residual", res.residual},
                        {"scale", res.scale},
                        {"term_scale", res.term_scale},
                        {"relative", res.relative()},
                        {"max_condition", grid.max_condition()}});
        log_line("pde step h=" + std::to_string(h) + " relative residual " + std::to_string(res.relative()));
      }
      r.data["center"] = {c.pde.center.tau, c.pde.center.E, c.pde.center.W};
      r.data["steps"] = rows;
      r.data["min_ratio"] = c.pde.steps.size() > 1 ? Json(min_ratio) : Json(nullptr);
      r.passed = last_rel < c.tolerances.pde && (c.pde.steps.size() < 2 || min_ratio >= c.tolerances.pde_ratio);
    } else if (c.task == "tw-oracle") {
      Json rows = Json::array();
      bool pass = true;
      for (double s : c.tw_s) {
        QuadratureOptions q = c.quadrature;
        const double oracle = tracy_widom_f2(s, q.interval_nodes, q.t_cut);
        const DetResult d = determinant(GapProblem::make(Process::airy, {0.0}, {{s}}, q), Representation::physical);
        const double diff = std::abs(d.value - oracle);
        pass = pass && diff < c.tolerances.tw;
        rows.push_back({{"s", s}, {"oracle", oracle}, {"contour", d.value.real()}, {"abs_difference", diff}});
      }
      r.data["values"] = rows;
      r.passed = pass;
    } else {
      throw ConfigError("task: unknown task \"" + c.task + "\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.ok = false;
    r.passed = false;
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline Json records_to_json(const std::vector<ResultRecord>& records) {
  if (records.size() == 1) return to_json(records.front());
  Json arr = Json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  return arr;
}

/// CSV rows for det/sweep records.
inline void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "axis,value,re_det,im_det,log_det,condition,ok,error\n";
  os << std::setprecision(17);
  for (const auto& r : records) {
    const Json& d = r.data;
    os << d.value("sweep_axis", std::string()) << ',';
    if (d.contains("sweep_value")) os << d.at("sweep_value").get<double>();
    os << ',';
    if (d.contains("det")) {
      const Json& v = d.at("det");
      os << v.at("re").get<double>() << ',' << v.at("im").get<double>() << ',' << v.at("log_re").get<double>() << ','
         << v.at("condition").get<double>();
    } else {
      os << ",,,";
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << (r.ok ? 1 : 0) << ',' << err << '\n';
  }
}

}  // namespace gapdet
