#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/hierarchy.hpp"
#include "pbsim/metrics.hpp"
#include "pbsim/trace.hpp"

namespace pbsim {

/// One simulation to execute. Exactly one of trace_path / synth is set.
struct RunSpec {
  std::string label;
  std::string config_path;            // empty: built-in defaults
  std::string trace_path;
  std::string synth;                  // inline generator parameters
  std::vector<std::string> overrides; // section.key=value, applied in order
  std::string sweep;                  // zipped value lists, expanded per run
};

struct PlanSpec {
  std::string baseline_label;  // empty: no normalized columns
  std::string output_dir = "out";
  unsigned parallelism = 1;
  std::vector<RunSpec> runs;
};

namespace detail {

// trim() comes from the config parser's detail namespace.

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Plan files reuse the config syntax: a [plan] section followed by one
/// [run] section per simulation. `override` repeats; `sweep` holds
/// semicolon-separated `key=v1,v2,...` lists of equal length that expand
/// the run into one labelled variant per index.
inline PlanSpec parse_plan(std::istream& in, const std::string& name) {
  PlanSpec plan;
  std::string line;
  std::string section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (size_t h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section == "run")
        plan.runs.emplace_back();
      else if (section != "plan")
        fail("unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (section == "plan") {
      if (key == "baseline") plan.baseline_label = value;
      else if (key == "output") plan.output_dir = value;
      else if (key == "parallelism") plan.parallelism =
          static_cast<unsigned>(std::stoul(value));
      else fail("unknown plan key '" + key + "'");
    } else if (section == "run") {
      RunSpec& r = plan.runs.back();
      if (key == "label") r.label = value;
      else if (key == "config") r.config_path = value;
      else if (key == "trace") r.trace_path = value;
      else if (key == "synth") r.synth = value;
      else if (key == "override") r.overrides.push_back(value);
      else if (key == "sweep") r.sweep = value;
      else fail("unknown run key '" + key + "'");
    } else {
      fail("key outside any section");
    }
  }
  for (const RunSpec& r : plan.runs) {
    if (r.label.empty()) throw ConfigError(name + ": run without label");
    if (r.trace_path.empty() == r.synth.empty())
      throw ConfigError(name + ": run '" + r.label +
                        "' needs exactly one of trace/synth");
  }
  if (plan.parallelism == 0) plan.parallelism = 1;
  return plan;
}

inline PlanSpec load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file: " + path);
  return parse_plan(in, path);
}

/// Expands `sweep = a.b=1,2; c.d=x,y` into per-index variants. The first
/// list's value becomes the label suffix, so it must be unique per index.
inline std::vector<RunSpec> expand_sweeps(const std::vector<RunSpec>& runs) {
  std::vector<RunSpec> out;
  for (const RunSpec& r : runs) {
    if (r.sweep.empty()) {
      out.push_back(r);
      continue;
    }
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> values;
    for (const std::string& part : detail::split(r.sweep, ';')) {
      if (part.empty()) continue;
      size_t eq = part.find('=');
      if (eq == std::string::npos)
        throw ConfigError("sweep entry needs key=v1,v2,...: " + part);
      keys.push_back(detail::trim(part.substr(0, eq)));
      values.push_back(detail::split(part.substr(eq + 1), ','));
      if (values.back().empty() ||
          values.back().size() != values.front().size())
        throw ConfigError("sweep lists must be nonempty and equal length: " +
                          r.label);
    }
    if (keys.empty()) throw ConfigError("empty sweep in run " + r.label);
    for (size_t i = 0; i < values.front().size(); ++i) {
      RunSpec v = r;
      v.sweep.clear();
      v.label = r.label + "-" + values.front()[i];
      for (size_t k = 0; k < keys.size(); ++k)
        v.overrides.push_back(keys[k] + "=" + values[k][i]);
      out.push_back(v);
    }
  }
  return out;
}

inline Report execute_run(const RunSpec& spec, SimOptions opt = {}) {
  SimConfig cfg;
  if (!spec.config_path.empty()) {
    std::ifstream in(spec.config_path);
    if (!in) throw ConfigError("cannot open config: " + spec.config_path);
    cfg = parse_config(in, spec.config_path);
  }
  for (const std::string& ov : spec.overrides)
    apply_config_override(cfg, ov, spec.label);
  cfg.validate();

  std::vector<TraceRecord> trace;
  std::string trace_name;
  if (!spec.trace_path.empty()) {
    trace = load_trace_file(spec.trace_path);
    trace_name = std::filesystem::path(spec.trace_path).filename().string();
  } else {
    trace = generate_trace(parse_synth_params(spec.synth));
    trace_name = "synth";
  }

  Simulation sim(cfg, opt);
  Report r = sim.run(trace);
  r.label = spec.label;
  r.trace = trace_name;
  return r;
}

/// Fills the normalized columns from the baseline row. Ratios follow the
/// "higher is better for speedup, lower is better for the others" shape.
inline void normalize_reports(std::vector<Report>& reports,
                              const std::string& baseline_label) {
  if (baseline_label.empty()) return;
  const Report* base = nullptr;
  for (const Report& r : reports)
    if (r.label == baseline_label) base = &r;
  if (!base)
    throw ConfigError("baseline label not among runs: " + baseline_label);
  double base_resp = base->m.l2_misses
                         ? static_cast<double>(base->m.l2_miss_response_cycles) /
                               base->m.l2_misses
                         : 0.0;
  for (Report& r : reports) {
    if (base->m.cycles && r.m.cycles)
      r.speedup = static_cast<double>(base->m.cycles) / r.m.cycles;
    double resp = r.m.l2_misses
                      ? static_cast<double>(r.m.l2_miss_response_cycles) /
                            r.m.l2_misses
                      : 0.0;
    if (base_resp > 0) r.norm_l2_miss_response = resp / base_resp;
    if (base->energy.ed2 > 0) r.norm_ed2 = r.energy.ed2 / base->energy.ed2;
  }
}

/// Runs every expanded spec; `parallelism` bounds worker threads. Results
/// land in spec order, so output is identical at any thread count.
inline std::vector<Report> run_plan(const PlanSpec& plan, SimOptions opt = {}) {
  std::vector<RunSpec> runs = expand_sweeps(plan.runs);
  std::vector<Report> reports(runs.size());
  std::vector<std::string> errors(runs.size());
  unsigned workers = std::min<size_t>(plan.parallelism, runs.size());
  if (workers <= 1) {
    for (size_t i = 0; i < runs.size(); ++i) reports[i] = execute_run(runs[i], opt);
  } else {
    std::atomic<size_t> next{0};
    auto body = [&] {
      for (size_t i; (i = next.fetch_add(1)) < runs.size();) {
        try {
          reports[i] = execute_run(runs[i], opt);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    for (size_t i = 0; i < runs.size(); ++i)
      if (!errors[i].empty())
        throw ConfigError("run '" + runs[i].label + "' failed: " + errors[i]);
  }
  normalize_reports(reports, plan.baseline_label);
  return reports;
}

inline std::string reports_to_csv(const std::vector<Report>& reports) {
  std::string s = report_csv_header();
  for (const Report& r : reports) s += report_csv_row(r);
  return s;
}

inline std::string histogram_to_csv(const Report& r) {
  std::string s = "population,ptrs\n";
  for (size_t p = 0; p < r.m.ptr_population_hist.size(); ++p)
    s += std::to_string(p) + "," + std::to_string(r.m.ptr_population_hist[p]) +
         "\n";
  return s;
}

/// Long-format table for plotting: one row per (label, metric).
inline std::string plot_data_csv(const std::vector<Report>& reports) {
  std::string s = "label,scheme,metric,value\n";
  auto row = [&](const Report& r, const char* metric, double v) {
    s += r.label + "," + r.scheme + "," + metric + "," + csvfmt::num(v) + "\n";
  };
  for (const Report& r : reports) {
    row(r, "ipc", r.ipc);
    row(r, "speedup", r.speedup);
    row(r, "llc_mpki", r.llc_mpki);
    row(r, "pb_hit_fraction", r.pb_hit_fraction);
    row(r, "ptr_eligibility", r.ptr_eligibility);
    row(r, "energy_j", r.energy.total_j);
    row(r, "norm_l2_miss_response", r.norm_l2_miss_response);
    row(r, "norm_ed2", r.norm_ed2);
  }
  return s;
}

/// PBSIM_OUT_DIR overrides the plan's output directory.
inline std::string resolve_output_dir(const PlanSpec& plan) {
  if (const char* env = std::getenv("PBSIM_OUT_DIR"); env && *env) return env;
  return plan.output_dir;
}

/// Executes a plan and writes results.csv, plot_data.csv, and one
/// <label>.hist.csv per run with a nonempty histogram.
inline std::filesystem::path write_plan_outputs(const PlanSpec& plan,
                                                SimOptions opt = {}) {
  std::vector<Report> reports = run_plan(plan, opt);
  std::filesystem::path dir = resolve_output_dir(plan);
  std::filesystem::create_directories(dir);
  auto spill = [&](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << body;
  };
  spill(dir / "results.csv", reports_to_csv(reports));
  spill(dir / "plot_data.csv", plot_data_csv(reports));
  for (const Report& r : reports)
    if (!r.m.ptr_population_hist.empty())
      spill(dir / (r.label + ".hist.csv"), histogram_to_csv(r));
  return dir / "results.csv";
}

}  // namespace pbsim
