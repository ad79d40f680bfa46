// Command-line front end: execute experiment plans, run single configs,
// generate synthetic traces, and summarize trace files.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbsim/config.hpp"
#include "pbsim/harness.hpp"
#include "pbsim/hierarchy.hpp"
#include "pbsim/metrics.hpp"
#include "pbsim/trace.hpp"

namespace {

int cmd_run(const std::string& plan_path, const std::string& config_path,
            const std::string& trace_path, const std::string& synth,
            const std::vector<std::string>& overrides, const std::string& out,
            unsigned parallelism, uint64_t audit) {
  pbsim::SimOptions opt;
  opt.audit_interval = audit;
  if (!plan_path.empty()) {
    pbsim::PlanSpec plan = pbsim::load_plan_file(plan_path);
    if (!out.empty()) plan.output_dir = out;
    if (parallelism) plan.parallelism = parallelism;
    std::filesystem::path csv = pbsim::write_plan_outputs(plan, opt);
    std::cout << "wrote " << csv.string() << "\n";
    return 0;
  }
  pbsim::RunSpec spec;
  spec.label = "run";
  spec.config_path = config_path;
  spec.trace_path = trace_path;
  spec.synth = synth;
  spec.overrides = overrides;
  pbsim::Report r = pbsim::execute_run(spec, opt);
  std::cout << pbsim::report_csv_header() << pbsim::report_csv_row(r);
  return 0;
}

int cmd_gen(const std::string& params, const std::string& out, bool binary) {
  pbsim::SynthParams p = pbsim::parse_synth_params(params);
  std::vector<pbsim::TraceRecord> trace = pbsim::generate_trace(p);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw pbsim::TraceError("cannot write " + out);
  if (binary)
    pbsim::write_trace_binary(os, trace);
  else
    pbsim::write_trace(os, trace);
  std::cout << "wrote " << trace.size() << " records to " << out << "\n";
  return 0;
}

int cmd_inspect(const std::string& trace_path) {
  std::vector<pbsim::TraceRecord> trace = pbsim::load_trace_file(trace_path);
  pbsim::TraceSummary s = pbsim::summarize_trace(trace);
  std::printf("records        %llu\n", (unsigned long long)s.records);
  std::printf("reads          %llu\n", (unsigned long long)s.reads);
  std::printf("writes         %llu\n", (unsigned long long)s.writes);
  std::printf("instructions   %llu\n", (unsigned long long)s.instructions);
  std::printf("distinct_pages %llu\n", (unsigned long long)s.distinct_pages);
  std::printf("distinct_lines %llu\n", (unsigned long long)s.distinct_lines);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"page-buffer cache hierarchy simulator"};
  app.require_subcommand(1);

  std::string plan_path, config_path, trace_path, synth, out;
  std::vector<std::string> overrides;
  unsigned parallelism = 0;
  uint64_t audit = 0;
  bool binary = false;
  std::string params;

  CLI::App* run = app.add_subcommand("run", "execute a plan or a single run");
  run->add_option("--plan", plan_path, "plan file (overrides single-run flags)");
  run->add_option("--config", config_path, "config file for a single run");
  run->add_option("--trace", trace_path, "trace file for a single run");
  run->add_option("--synth", synth, "inline generator params for a single run");
  run->add_option("--override", overrides, "section.key=value, repeatable");
  run->add_option("--out", out, "output directory for plan results");
  run->add_option("--parallelism", parallelism, "worker threads for plans");
  run->add_option("--audit", audit, "run consistency audits every N events");

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->add_option("--params", params, "generator parameters, key=value list")
      ->required();
  gen->add_option("--out", out, "output trace path")->required();
  gen->add_flag("--binary", binary, "write the packed binary format");

  CLI::App* inspect = app.add_subcommand("inspect", "summarize a trace file");
  inspect->add_option("--trace", trace_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (plan_path.empty() && trace_path.empty() && synth.empty())
        throw pbsim::ConfigError("run needs --plan, --trace, or --synth");
      return cmd_run(plan_path, config_path, trace_path, synth, overrides, out,
                     parallelism, audit);
    }
    if (gen->parsed()) return cmd_gen(params, out, binary);
    if (inspect->parsed()) return cmd_inspect(trace_path);
  } catch (const pbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pbsim::TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
