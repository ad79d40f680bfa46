#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "pbsim/geometry.hpp"

namespace pbsim {

enum class LlcArrayKind { kSram, kNvm };
enum class LlcIndexing { kConventional, kPageRow };
enum class PagePolicy { k4K, k2M, k1G };

inline uint64_t page_bytes(PagePolicy p) {
  switch (p) {
    case PagePolicy::k4K: return uint64_t{4} << 10;
    case PagePolicy::k2M: return uint64_t{2} << 20;
    case PagePolicy::k1G: return uint64_t{1} << 30;
  }
  return 0;
}

/// Full simulation configuration. Defaults model a 3.2GHz core with a
/// 16MB-per-slice non-pipelined NVM LLC in the page-row layout plus twenty
/// 2KB page buffers; see configs/ for the other array variants.
struct SimConfig {
  struct Core {
    uint64_t freq_hz = 3'200'000'000;
    unsigned mshr = 8;              // max outstanding loads
    uint64_t seed = 1;              // frame allocator seed
    unsigned l1_tlb_entries = 64;
    unsigned l1_tlb_ways = 4;
    unsigned l1_tlb_rt = 2;
    unsigned l2_tlb_entries = 1024;
    unsigned l2_tlb_ways = 12;
    unsigned l2_tlb_rt = 12;
  } core;

  struct L1 {
    uint64_t size_kb = 32;
    unsigned ways = 8;
    unsigned line = 64;
    unsigned rt = 2;
  } l1;

  struct L2 {
    uint64_t size_kb = 512;
    unsigned ways = 8;
    unsigned rt = 14;
  } l2;

  struct Llc {
    LlcArrayKind array = LlcArrayKind::kNvm;
    LlcIndexing indexing = LlcIndexing::kPageRow;
    unsigned slices = 1;
    uint64_t slice_kb = 16 * 1024;
    unsigned ways = 16;
    unsigned tag_lat = 2;
    unsigned read_rt = 63;       // hit round trip, core to core
    unsigned write_rt = 78;
    unsigned data_lat = 22;      // data-array access portion of the read RT
    unsigned occupancy_read = 10;   // non-pipelined array cycles per read
    unsigned occupancy_write = 25;  // derived: 8ns cell write at 3.2GHz
    unsigned write_queue = 16;
    bool fetch_to_l2 = false;    // promote rows into L2 instead of PBs
  } llc;

  struct Pb {
    bool enabled = true;
    unsigned count = 20;
    uint64_t size_b = 2048;
    unsigned threshold = 6;          // min resident lines to promote
    unsigned activation_period = 20; // counter cycles per resident line
    unsigned ptr_latency = 6;        // trigger signal delay to the LLC
    unsigned rt = 43;                // hit round trip before the region cycle
    unsigned repl_counter_bits = 10;
  } pb;

  struct Mem {
    uint64_t size_gb = 64;
    unsigned rt = 190;
    uint64_t page_b = 4096;
    PagePolicy page_policy = PagePolicy::k4K;
  } mem;

  struct Energy {
    double llc_read_nj = 0.95;
    double llc_write_nj = 6.3;
    double llc_tag_pj = 7.0;
    double pb_read_pj = 12.0;
    double pb_write_pj = 13.0;
    double pb_tag_pj = 12.0;
    double llc_leak_w = 0.829;
    double pb_leak_w = 0.0041;
    double mem_access_nj = 20.0;  // flat per transaction, not a datasheet value
  } energy;

  uint64_t slice_bytes() const { return llc.slice_kb * 1024; }
  uint64_t l1_bytes() const { return l1.size_kb * 1024; }
  uint64_t l2_bytes() const { return l2.size_kb * 1024; }
  uint64_t repl_counter_cap() const {
    return (uint64_t{1} << pb.repl_counter_bits) - 1;
  }
  bool page_row() const { return llc.indexing == LlcIndexing::kPageRow; }

  /// Short label of the array/indexing/PB combination, used in CSV rows.
  std::string scheme() const {
    std::string s = llc.array == LlcArrayKind::kSram ? "sram" : "nvm";
    s += page_row() ? "+pagerow" : "+conv";
    if (pb.enabled) s += "+pb";
    if (llc.fetch_to_l2) s += "+l2fetch";
    return s;
  }

  LayoutGeometry page_geometry() const {
    return derive_geometry(l1.line, mem.page_b, slice_bytes(), llc.ways,
                           pb.size_b, llc.slices);
  }
  ConvGeometry conv_geometry() const {
    return derive_conv_geometry(l1.line, slice_bytes(), llc.ways, llc.slices);
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (core.freq_hz == 0) fail("core.freq_hz must be nonzero");
    if (core.mshr == 0) fail("core.mshr must be nonzero");
    if (core.l1_tlb_ways == 0 || core.l2_tlb_ways == 0)
      fail("TLB associativity must be nonzero");
    if (core.l1_tlb_entries / core.l1_tlb_ways == 0 ||
        core.l2_tlb_entries / core.l2_tlb_ways == 0)
      fail("TLB has fewer entries than ways");
    if (!is_pow2(l1.line)) fail("l1.line must be a power of two");
    if (l1_bytes() % (uint64_t{l1.ways} * l1.line) != 0 ||
        !is_pow2(l1_bytes() / (uint64_t{l1.ways} * l1.line)))
      fail("l1 size/ways/line do not give a power-of-two set count");
    if (l2_bytes() % (uint64_t{l2.ways} * l1.line) != 0 ||
        !is_pow2(l2_bytes() / (uint64_t{l2.ways} * l1.line)))
      fail("l2 size/ways/line do not give a power-of-two set count");
    if (l2_bytes() < l1_bytes()) fail("l2 must not be smaller than l1");
    if (llc.write_queue == 0) fail("llc.write_queue must be nonzero");
    if (pb.enabled && llc.array == LlcArrayKind::kSram)
      fail("page buffers require the NVM data array");
    if (pb.enabled && !page_row())
      fail("page buffers require the page-row layout");
    if (llc.fetch_to_l2 && pb.enabled)
      fail("fetch-to-l2 mode and page buffers are mutually exclusive");
    if (llc.fetch_to_l2 && !page_row())
      fail("fetch-to-l2 mode requires the page-row layout");
    if (pb.enabled || llc.fetch_to_l2) {
      if (pb.threshold < 1 || pb.threshold > mem.page_b / l1.line)
        fail("pb.threshold must be within 1..lines_per_page");
      if (pb.activation_period == 0) fail("pb.activation_period must be nonzero");
      if (pb.repl_counter_bits == 0 || pb.repl_counter_bits > 32)
        fail("pb.repl_counter_bits out of range");
    }
    if (mem.size_gb == 0) fail("mem.size_gb must be nonzero");
    if (!is_pow2(mem.size_gb)) fail("mem.size_gb must be a power of two");
    if (mem.page_b != 4096)
      fail("mem.page_b must be 4096 (huge pages are a policy, not a base size)");
    if (page_row())
      (void)page_geometry();  // throws on inconsistent layout
    else
      (void)conv_geometry();
    if (energy.llc_read_nj < 0 || energy.llc_write_nj < 0 ||
        energy.llc_tag_pj < 0 || energy.mem_access_nj < 0 ||
        energy.llc_leak_w < 0 || energy.pb_leak_w < 0)
      fail("energy values must be non-negative");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline uint64_t parse_u64(const std::string& v, const std::string& where) {
  size_t pos = 0;
  uint64_t r = 0;
  try {
    r = std::stoull(v, &pos, 0);
  } catch (...) {
    throw ConfigError(where + ": expected integer, got '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError(where + ": trailing garbage in integer '" + v + "'");
  return r;
}

inline double parse_f64(const std::string& v, const std::string& where) {
  size_t pos = 0;
  double r = 0;
  try {
    r = std::stod(v, &pos);
  } catch (...) {
    throw ConfigError(where + ": expected number, got '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError(where + ": trailing garbage in number '" + v + "'");
  return r;
}

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(where + ": expected boolean, got '" + v + "'");
}

}  // namespace detail

/// Apply one "section.key = value" assignment. Unknown sections or keys are
/// errors; `where` is used in messages (file:line or the override source).
inline void apply_config_kv(SimConfig& c, const std::string& section,
                            const std::string& key, const std::string& value,
                            const std::string& where) {
  using detail::parse_bool;
  using detail::parse_f64;
  using detail::parse_u64;
  auto u = [&] { return parse_u64(value, where); };
  auto f = [&] { return parse_f64(value, where); };
  auto b = [&] { return parse_bool(value, where); };
  auto unknown = [&]() -> void {
    throw ConfigError(where + ": unknown key '" + key + "' in section [" +
                      section + "]");
  };

  if (section == "core") {
    if (key == "freq_hz") c.core.freq_hz = u();
    else if (key == "mshr") c.core.mshr = static_cast<unsigned>(u());
    else if (key == "seed") c.core.seed = u();
    else if (key == "l1_tlb_entries") c.core.l1_tlb_entries = static_cast<unsigned>(u());
    else if (key == "l1_tlb_ways") c.core.l1_tlb_ways = static_cast<unsigned>(u());
    else if (key == "l1_tlb_rt") c.core.l1_tlb_rt = static_cast<unsigned>(u());
    else if (key == "l2_tlb_entries") c.core.l2_tlb_entries = static_cast<unsigned>(u());
    else if (key == "l2_tlb_ways") c.core.l2_tlb_ways = static_cast<unsigned>(u());
    else if (key == "l2_tlb_rt") c.core.l2_tlb_rt = static_cast<unsigned>(u());
    else unknown();
  } else if (section == "l1") {
    if (key == "size_kb") c.l1.size_kb = u();
    else if (key == "ways") c.l1.ways = static_cast<unsigned>(u());
    else if (key == "line") c.l1.line = static_cast<unsigned>(u());
    else if (key == "rt") c.l1.rt = static_cast<unsigned>(u());
    else unknown();
  } else if (section == "l2") {
    if (key == "size_kb") c.l2.size_kb = u();
    else if (key == "ways") c.l2.ways = static_cast<unsigned>(u());
    else if (key == "rt") c.l2.rt = static_cast<unsigned>(u());
    else unknown();
  } else if (section == "llc") {
    if (key == "array") {
      if (value == "sram") c.llc.array = LlcArrayKind::kSram;
      else if (value == "nvm") c.llc.array = LlcArrayKind::kNvm;
      else throw ConfigError(where + ": llc.array must be sram or nvm");
    } else if (key == "indexing") {
      if (value == "conventional") c.llc.indexing = LlcIndexing::kConventional;
      else if (value == "page-row") c.llc.indexing = LlcIndexing::kPageRow;
      else throw ConfigError(where + ": llc.indexing must be conventional or page-row");
    }
    else if (key == "slices") c.llc.slices = static_cast<unsigned>(u());
    else if (key == "slice_kb") c.llc.slice_kb = u();
    else if (key == "ways") c.llc.ways = static_cast<unsigned>(u());
    else if (key == "tag_lat") c.llc.tag_lat = static_cast<unsigned>(u());
    else if (key == "read_rt") c.llc.read_rt = static_cast<unsigned>(u());
    else if (key == "write_rt") c.llc.write_rt = static_cast<unsigned>(u());
    else if (key == "data_lat") c.llc.data_lat = static_cast<unsigned>(u());
    else if (key == "occupancy_read") c.llc.occupancy_read = static_cast<unsigned>(u());
    else if (key == "occupancy_write") c.llc.occupancy_write = static_cast<unsigned>(u());
    else if (key == "write_queue") c.llc.write_queue = static_cast<unsigned>(u());
    else if (key == "fetch_to_l2") c.llc.fetch_to_l2 = b();
    else unknown();
  } else if (section == "pb") {
    if (key == "enabled") c.pb.enabled = b();
    else if (key == "count") c.pb.count = static_cast<unsigned>(u());
    else if (key == "size_b") c.pb.size_b = u();
    else if (key == "threshold") c.pb.threshold = static_cast<unsigned>(u());
    else if (key == "activation_period") c.pb.activation_period = static_cast<unsigned>(u());
    else if (key == "ptr_latency") c.pb.ptr_latency = static_cast<unsigned>(u());
    else if (key == "rt") c.pb.rt = static_cast<unsigned>(u());
    else if (key == "repl_counter_bits") c.pb.repl_counter_bits = static_cast<unsigned>(u());
    else unknown();
  } else if (section == "mem") {
    if (key == "size_gb") c.mem.size_gb = u();
    else if (key == "rt") c.mem.rt = static_cast<unsigned>(u());
    else if (key == "page_b") c.mem.page_b = u();
    else if (key == "page_policy") {
      if (value == "4k") c.mem.page_policy = PagePolicy::k4K;
      else if (value == "2m") c.mem.page_policy = PagePolicy::k2M;
      else if (value == "1g") c.mem.page_policy = PagePolicy::k1G;
      else throw ConfigError(where + ": mem.page_policy must be 4k, 2m or 1g");
    } else unknown();
  } else if (section == "energy") {
    if (key == "llc_read_nj") c.energy.llc_read_nj = f();
    else if (key == "llc_write_nj") c.energy.llc_write_nj = f();
    else if (key == "llc_tag_pj") c.energy.llc_tag_pj = f();
    else if (key == "pb_read_pj") c.energy.pb_read_pj = f();
    else if (key == "pb_write_pj") c.energy.pb_write_pj = f();
    else if (key == "pb_tag_pj") c.energy.pb_tag_pj = f();
    else if (key == "llc_leak_w") c.energy.llc_leak_w = f();
    else if (key == "pb_leak_w") c.energy.pb_leak_w = f();
    else if (key == "mem_access_nj") c.energy.mem_access_nj = f();
    else unknown();
  } else {
    throw ConfigError(where + ": unknown section [" + section + "]");
  }
}

/// Apply an inline "section.key=value" override string.
inline void apply_config_override(SimConfig& c, const std::string& assignment,
                                  const std::string& where) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(where + ": override needs key=value, got '" + assignment + "'");
  std::string lhs = detail::trim(assignment.substr(0, eq));
  std::string value = detail::trim(assignment.substr(eq + 1));
  size_t dot = lhs.find('.');
  if (dot == std::string::npos)
    throw ConfigError(where + ": override key must be section.key, got '" + lhs + "'");
  apply_config_kv(c, lhs.substr(0, dot), lhs.substr(dot + 1), value, where);
}

/// Parse a config stream: [section] headers, one key = value per line,
/// '#' starts a comment. Starts from defaults; does not validate.
inline SimConfig parse_config(std::istream& in,
                              const std::string& name = "<config>") {
  SimConfig c;
  std::string line;
  std::string section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::string where = name + ":" + std::to_string(n);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": malformed section header '" + line + "'");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected key = value, got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(where + ": key '" + key + "' outside any [section]");
    apply_config_kv(c, section, key, value, where);
  }
  return c;
}

inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  SimConfig c = parse_config(in, path);
  c.validate();
  return c;
}

}  // namespace pbsim
