#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "pbsim/config.hpp"

namespace pbsim {

/// Raw event counters accumulated during a run. Every hierarchy event maps
/// to exactly one counter here; derived ratios live in Report.
struct RunMetrics {
  uint64_t instructions = 0;
  uint64_t cycles = 0;
  uint64_t loads = 0;
  uint64_t stores = 0;

  uint64_t l1_hits = 0;
  uint64_t l1_misses = 0;
  uint64_t l2_hits = 0;        // includes hits on in-flight fills
  uint64_t l2_fill_hits = 0;
  uint64_t l2_misses = 0;

  uint64_t llc_lookups = 0;
  uint64_t llc_hits = 0;
  uint64_t llc_misses = 0;
  uint64_t llc_hits_refilled_page = 0;

  // Read-service source of each load.
  uint64_t served_l1 = 0;
  uint64_t served_l2 = 0;
  uint64_t served_pb = 0;
  uint64_t served_llc_array = 0;
  uint64_t served_mem = 0;

  uint64_t l1_tlb_refills = 0;
  uint64_t eligible_refills = 0;
  uint64_t tlb_walks = 0;

  uint64_t ptr_sent = 0;          // delivered to the LLC controller
  uint64_t ptr_pb_resident = 0;   // region already held a PB: counter refresh
  uint64_t ptr_gated = 0;         // population below threshold
  uint64_t ptr_dropped_no_victim = 0;
  uint64_t ptr_promoted = 0;
  std::vector<uint64_t> ptr_population_hist;  // resident lines per PTR

  uint64_t pb_lines_installed = 0;
  uint64_t pb_lines_first_read = 0;

  uint64_t llc_installs = 0;
  uint64_t llc_evictions = 0;
  uint64_t llc_store_invalidations = 0;
  uint64_t mem_reads = 0;
  uint64_t mem_writes = 0;

  // Energy-bearing event counts.
  uint64_t llc_tag_lookups = 0;   // per-line tag checks (reads + installs)
  uint64_t ptr_tag_scans = 0;     // whole-row tag_high scans
  uint64_t llc_data_reads = 0;    // line reads + row reads of the LLC array
  uint64_t llc_row_reads = 0;
  uint64_t llc_data_writes = 0;
  uint64_t pb_tag_checks = 0;
  uint64_t pb_reads = 0;
  uint64_t pb_writes = 0;

  uint64_t audit_runs = 0;
  uint64_t audit_failures = 0;

  uint64_t l2_miss_response_cycles = 0;   // issue to response, summed
  uint64_t llc_read_service_cycles = 0;   // LLC share of each read service

  void record_ptr_population(unsigned population) {
    if (ptr_population_hist.size() <= population)
      ptr_population_hist.resize(population + 1, 0);
    ++ptr_population_hist[population];
  }
  uint64_t ptr_hist_total() const {
    uint64_t n = 0;
    for (uint64_t v : ptr_population_hist) n += v;
    return n;
  }
};

struct EnergyBreakdown {
  double llc_read_j = 0;
  double llc_write_j = 0;
  double llc_tag_j = 0;   // line lookups plus row scans
  double pb_j = 0;        // PB tag checks, reads, writes
  double mem_j = 0;
  double leak_j = 0;
  double total_j = 0;
  double delay_s = 0;
  double ed2 = 0;         // total_j * delay_s^2
};

/// Pure arithmetic over counters; no simulator state. `ptr_scan_ratio` is
/// the tag-bit cost of a row scan relative to one per-line lookup.
class EnergyModel {
 public:
  EnergyModel(const SimConfig::Energy& e, uint64_t freq_hz, bool pb_present,
              double ptr_scan_ratio)
      : e_(e), freq_(freq_hz), pb_present_(pb_present),
        ptr_scan_ratio_(ptr_scan_ratio) {}

  EnergyBreakdown compute(const RunMetrics& m) const {
    constexpr double nJ = 1e-9, pJ = 1e-12;
    EnergyBreakdown b;
    b.delay_s = static_cast<double>(m.cycles) / static_cast<double>(freq_);
    b.llc_read_j = m.llc_data_reads * e_.llc_read_nj * nJ;
    b.llc_write_j = m.llc_data_writes * e_.llc_write_nj * nJ;
    b.llc_tag_j = (m.llc_tag_lookups + m.ptr_tag_scans * ptr_scan_ratio_) *
                  e_.llc_tag_pj * pJ;
    b.pb_j = (m.pb_tag_checks * e_.pb_tag_pj + m.pb_reads * e_.pb_read_pj +
              m.pb_writes * e_.pb_write_pj) * pJ;
    b.mem_j = (m.mem_reads + m.mem_writes) * e_.mem_access_nj * nJ;
    b.leak_j = (e_.llc_leak_w + (pb_present_ ? e_.pb_leak_w : 0.0)) * b.delay_s;
    b.total_j = b.llc_read_j + b.llc_write_j + b.llc_tag_j + b.pb_j +
                b.mem_j + b.leak_j;
    b.ed2 = b.total_j * b.delay_s * b.delay_s;
    return b;
  }

 private:
  SimConfig::Energy e_;
  uint64_t freq_;
  bool pb_present_;
  double ptr_scan_ratio_;
};

/// Final per-run record: raw counters plus derived ratios and, once the
/// harness knows the baseline row, normalized columns.
struct Report {
  std::string label;
  std::string scheme;
  std::string trace;

  RunMetrics m;
  EnergyBreakdown energy;

  bool defined = false;  // instructions > 0
  double ipc = 0;
  double l2_mpki = 0;
  double llc_mpki = 0;
  double pb_hit_fraction = 0;        // of LLC hits
  double promoted_utilization = 0;   // first-read fraction of installed lines
  double ptr_eligibility = 0;        // eligible refills / L1 TLB refills
  double refilled_hit_fraction = 0;  // LLC hits from previously refilled pages

  // Ratios against the plan's designated baseline run (1.0 for the baseline).
  double speedup = std::nan("");
  double norm_l2_miss_response = std::nan("");
  double norm_ed2 = std::nan("");

  void finalize(const EnergyModel& em) {
    energy = em.compute(m);
    defined = m.instructions > 0;
    double ki = static_cast<double>(m.instructions) / 1000.0;
    if (defined) {
      ipc = m.cycles ? static_cast<double>(m.instructions) / m.cycles : 0.0;
      l2_mpki = m.l2_misses / ki;
      llc_mpki = m.llc_misses / ki;
    }
    pb_hit_fraction =
        m.llc_hits ? static_cast<double>(m.served_pb) / m.llc_hits : 0.0;
    promoted_utilization =
        m.pb_lines_installed
            ? static_cast<double>(m.pb_lines_first_read) / m.pb_lines_installed
            : 0.0;
    ptr_eligibility =
        m.l1_tlb_refills
            ? static_cast<double>(m.eligible_refills) / m.l1_tlb_refills
            : 0.0;
    refilled_hit_fraction =
        m.llc_hits ? static_cast<double>(m.llc_hits_refilled_page) / m.llc_hits
                   : 0.0;
  }
};

namespace csvfmt {

inline std::string num(double v) {
  if (std::isnan(v)) return "na";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
inline std::string num(uint64_t v) { return std::to_string(v); }

}  // namespace csvfmt

inline std::string report_csv_header() {
  return "label,scheme,trace,instructions,cycles,ipc,"
         "loads,stores,l1_hits,l1_misses,l2_hits,l2_misses,l2_mpki,"
         "llc_lookups,llc_hits,llc_misses,llc_mpki,"
         "served_l1,served_l2,served_pb,served_llc_array,served_mem,"
         "pb_hit_fraction,l1_tlb_refills,eligible_refills,ptr_eligibility,"
         "ptr_sent,ptr_pb_resident,ptr_gated,ptr_dropped_no_victim,"
         "ptr_promoted,pb_lines_installed,pb_lines_first_read,"
         "promoted_utilization,refilled_hit_fraction,"
         "llc_installs,llc_evictions,mem_reads,mem_writes,"
         "llc_data_reads,llc_row_reads,llc_data_writes,"
         "l2_miss_response_cycles,llc_read_service_cycles,"
         "energy_j,delay_s,ed2,speedup,norm_l2_miss_response,norm_ed2\n";
}

inline std::string report_csv_row(const Report& r) {
  using csvfmt::num;
  std::string s;
  s += r.label + "," + r.scheme + "," + r.trace + ",";
  s += num(r.m.instructions) + "," + num(r.m.cycles) + ",";
  s += (r.defined ? num(r.ipc) : "na") + ",";
  s += num(r.m.loads) + "," + num(r.m.stores) + ",";
  s += num(r.m.l1_hits) + "," + num(r.m.l1_misses) + ",";
  s += num(r.m.l2_hits) + "," + num(r.m.l2_misses) + ",";
  s += (r.defined ? num(r.l2_mpki) : "na") + ",";
  s += num(r.m.llc_lookups) + "," + num(r.m.llc_hits) + "," +
       num(r.m.llc_misses) + ",";
  s += (r.defined ? num(r.llc_mpki) : "na") + ",";
  s += num(r.m.served_l1) + "," + num(r.m.served_l2) + "," +
       num(r.m.served_pb) + "," + num(r.m.served_llc_array) + "," +
       num(r.m.served_mem) + ",";
  s += num(r.pb_hit_fraction) + ",";
  s += num(r.m.l1_tlb_refills) + "," + num(r.m.eligible_refills) + "," +
       num(r.ptr_eligibility) + ",";
  s += num(r.m.ptr_sent) + "," + num(r.m.ptr_pb_resident) + "," +
       num(r.m.ptr_gated) + "," + num(r.m.ptr_dropped_no_victim) + "," +
       num(r.m.ptr_promoted) + ",";
  s += num(r.m.pb_lines_installed) + "," + num(r.m.pb_lines_first_read) + ",";
  s += num(r.promoted_utilization) + "," + num(r.refilled_hit_fraction) + ",";
  s += num(r.m.llc_installs) + "," + num(r.m.llc_evictions) + "," +
       num(r.m.mem_reads) + "," + num(r.m.mem_writes) + ",";
  s += num(r.m.llc_data_reads) + "," + num(r.m.llc_row_reads) + "," +
       num(r.m.llc_data_writes) + ",";
  s += num(r.m.l2_miss_response_cycles) + "," +
       num(r.m.llc_read_service_cycles) + ",";
  s += num(r.energy.total_j) + "," + num(r.energy.delay_s) + "," +
       num(r.energy.ed2) + ",";
  s += num(r.speedup) + "," + num(r.norm_l2_miss_response) + "," +
       num(r.norm_ed2) + "\n";
  return s;
}

}  // namespace pbsim
