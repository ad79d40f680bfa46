#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "pbsim/geometry.hpp"

namespace pbsim {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Op : uint8_t { kRead = 0, kWrite = 1 };

/// One memory instruction: `gap` non-memory instructions precede it.
struct TraceRecord {
  uint32_t gap = 0;
  Op op = Op::kRead;
  uint64_t vaddr = 0;

  bool operator==(const TraceRecord&) const = default;
};

inline constexpr char kTraceMagic[4] = {'P', 'B', 'T', '1'};

namespace detail {

inline void parse_text_line(const std::string& line, int n,
                            const std::string& name,
                            std::vector<TraceRecord>& out) {
  std::string body = line;
  size_t hash = body.find('#');
  if (hash != std::string::npos) body.resize(hash);
  size_t b = body.find_first_not_of(" \t\r");
  if (b == std::string::npos) return;

  std::istringstream ss(body);
  std::string gap_s, op_s, addr_s, extra;
  if (!(ss >> gap_s >> op_s >> addr_s))
    throw TraceError(name + ":" + std::to_string(n) +
                     ": expected 'gap op hexaddr'");
  if (ss >> extra)
    throw TraceError(name + ":" + std::to_string(n) + ": trailing field '" +
                     extra + "'");

  TraceRecord r;
  try {
    size_t pos = 0;
    unsigned long long g = std::stoull(gap_s, &pos, 10);
    if (pos != gap_s.size() || g > UINT32_MAX) throw std::invalid_argument("");
    r.gap = static_cast<uint32_t>(g);
  } catch (...) {
    throw TraceError(name + ":" + std::to_string(n) + ": bad gap '" + gap_s + "'");
  }
  if (op_s == "R" || op_s == "r") r.op = Op::kRead;
  else if (op_s == "W" || op_s == "w") r.op = Op::kWrite;
  else
    throw TraceError(name + ":" + std::to_string(n) + ": bad op '" + op_s +
                     "' (want R or W)");
  try {
    size_t pos = 0;
    r.vaddr = std::stoull(addr_s, &pos, 16);
    if (pos != addr_s.size()) throw std::invalid_argument("");
  } catch (...) {
    throw TraceError(name + ":" + std::to_string(n) + ": bad address '" +
                     addr_s + "'");
  }
  if (r.vaddr > kPaMask)
    throw TraceError(name + ":" + std::to_string(n) +
                     ": address exceeds 48 bits");
  out.push_back(r);
}

}  // namespace detail

/// Parse a trace stream. Detects the binary variant by magic; otherwise the
/// text form is one record per line, "gap op hexaddr", '#' to end of line.
inline std::vector<TraceRecord> parse_trace(std::istream& in,
                                            const std::string& name = "<trace>") {
  std::vector<TraceRecord> out;
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  std::streamsize got = in.gcount();
  if (got == 4 && std::memcmp(magic, kTraceMagic, 4) == 0) {
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 8);
    if (in.gcount() != 8)
      throw TraceError(name + ": truncated binary header");
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
      uint32_t gap;
      uint8_t op;
      uint64_t vaddr;
      in.read(reinterpret_cast<char*>(&gap), 4);
      in.read(reinterpret_cast<char*>(&op), 1);
      in.read(reinterpret_cast<char*>(&vaddr), 8);
      if (!in)
        throw TraceError(name + ": truncated at binary record " +
                         std::to_string(i));
      if (op > 1)
        throw TraceError(name + ": bad op byte in record " + std::to_string(i));
      if (vaddr > kPaMask)
        throw TraceError(name + ": address exceeds 48 bits in record " +
                         std::to_string(i));
      out.push_back({gap, static_cast<Op>(op), vaddr});
    }
    return out;
  }

  // Text: rewind-free fallback, the sniffed bytes belong to the first line.
  std::string first(magic, magic + got);
  std::string rest;
  int n = 0;
  if (got > 0) {
    if (std::getline(in, rest)) {
      detail::parse_text_line(first + rest, ++n, name, out);
    } else if (!first.empty()) {
      detail::parse_text_line(first, ++n, name, out);
    }
  }
  std::string line;
  while (std::getline(in, line)) detail::parse_text_line(line, ++n, name, out);
  return out;
}

inline std::vector<TraceRecord> load_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file: " + path);
  return parse_trace(in, path);
}

/// Write the text form. Comments are not preserved by design.
inline void write_trace(std::ostream& out, const std::vector<TraceRecord>& t) {
  char buf[48];
  for (const TraceRecord& r : t) {
    std::snprintf(buf, sizeof buf, "%u %c 0x%llx\n", r.gap,
                  r.op == Op::kRead ? 'R' : 'W',
                  static_cast<unsigned long long>(r.vaddr));
    out << buf;
  }
}

inline void write_trace_binary(std::ostream& out,
                               const std::vector<TraceRecord>& t) {
  out.write(kTraceMagic, 4);
  uint64_t count = t.size();
  out.write(reinterpret_cast<const char*>(&count), 8);
  for (const TraceRecord& r : t) {
    uint8_t op = static_cast<uint8_t>(r.op);
    out.write(reinterpret_cast<const char*>(&r.gap), 4);
    out.write(reinterpret_cast<const char*>(&op), 1);
    out.write(reinterpret_cast<const char*>(&r.vaddr), 8);
  }
}

/// Summary counts for `inspect`.
struct TraceSummary {
  uint64_t records = 0;
  uint64_t reads = 0;
  uint64_t writes = 0;
  uint64_t instructions = 0;  // records + gaps
  uint64_t distinct_lines = 0;
  uint64_t distinct_pages = 0;
  uint64_t footprint_bytes = 0;  // distinct_lines * 64
};

inline TraceSummary summarize_trace(const std::vector<TraceRecord>& t,
                                    uint64_t line_size = 64,
                                    uint64_t page_size = 4096) {
  TraceSummary s;
  std::unordered_set<uint64_t> lines, pages;
  for (const TraceRecord& r : t) {
    ++s.records;
    s.instructions += r.gap + 1;
    (r.op == Op::kRead ? s.reads : s.writes)++;
    lines.insert(r.vaddr / line_size);
    pages.insert(r.vaddr / page_size);
  }
  s.distinct_lines = lines.size();
  s.distinct_pages = pages.size();
  s.footprint_bytes = s.distinct_lines * line_size;
  return s;
}

/// Synthetic workload knobs. The generator walks a pool of pages through a
/// sliding working set: each visit picks a page (revisit from the window or
/// the next fresh pool page) and touches `lines_min..lines_max` random lines
/// of it. A window wider than the L1 TLB forces refills between revisits.
struct SynthParams {
  uint64_t accesses = 100000;   // total records to emit
  uint64_t pages = 1024;        // pool size (footprint = pages * 4KB)
  uint64_t working_set = 128;   // revisit window, in pages
  double revisit_prob = 0.8;    // chance a visit reuses a window page
  unsigned lines_min = 4;
  unsigned lines_max = 16;
  double read_fraction = 0.8;
  unsigned mean_gap = 8;        // non-memory instructions between records
  uint64_t base_vaddr = uint64_t{1} << 32;
  uint64_t seed = 42;
};

/// Deterministic trace synthesis. All randomness maps mt19937_64 outputs with
/// modulo/threshold arithmetic so output is identical across platforms.
inline std::vector<TraceRecord> generate_trace(const SynthParams& p) {
  if (p.pages == 0 || p.working_set == 0)
    throw TraceError("generator needs pages > 0 and working_set > 0");
  if (p.lines_min == 0 || p.lines_max < p.lines_min || p.lines_max > 64)
    throw TraceError("generator needs 1 <= lines_min <= lines_max <= 64");
  if (p.revisit_prob < 0 || p.revisit_prob > 1 || p.read_fraction < 0 ||
      p.read_fraction > 1)
    throw TraceError("generator probabilities must be within [0,1]");

  std::mt19937_64 rng(p.seed);
  auto pick = [&rng](uint64_t n) { return n ? rng() % n : 0; };
  auto chance = [&rng](double prob) {
    return (rng() >> 11) * 0x1.0p-53 < prob;
  };

  std::vector<TraceRecord> out;
  out.reserve(p.accesses);
  std::deque<uint64_t> window;  // most recently visited distinct pages
  uint64_t cursor = 0;          // next fresh pool page

  while (out.size() < p.accesses) {
    uint64_t page;
    if (!window.empty() && chance(p.revisit_prob)) {
      page = window[pick(window.size())];
    } else {
      page = cursor;
      cursor = (cursor + 1) % p.pages;
    }
    // Keep the window a unique LRU list of the last working_set pages.
    for (auto it = window.begin(); it != window.end(); ++it) {
      if (*it == page) {
        window.erase(it);
        break;
      }
    }
    window.push_back(page);
    if (window.size() > p.working_set) window.pop_front();

    unsigned burst =
        p.lines_min + static_cast<unsigned>(pick(p.lines_max - p.lines_min + 1));
    uint64_t page_base = p.base_vaddr + page * 4096;
    for (unsigned i = 0; i < burst && out.size() < p.accesses; ++i) {
      TraceRecord r;
      r.gap = p.mean_gap == 0 ? 0 : static_cast<uint32_t>(pick(2 * p.mean_gap + 1));
      r.op = chance(p.read_fraction) ? Op::kRead : Op::kWrite;
      r.vaddr = page_base + pick(64) * 64;
      out.push_back(r);
    }
  }
  return out;
}

/// Parse "key = value" generator parameters (same line syntax as configs,
/// no sections). Unknown keys are errors.
inline SynthParams parse_synth_params(std::istream& in,
                                      const std::string& name = "<params>") {
  SynthParams p;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t eq = line.find('=');
    std::string where = name + ":" + std::to_string(n);
    if (eq == std::string::npos)
      throw TraceError(where + ": expected key = value");
    auto trim = [](std::string s) {
      size_t x = s.find_first_not_of(" \t\r");
      size_t y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "accesses") p.accesses = std::stoull(val);
      else if (key == "pages") p.pages = std::stoull(val);
      else if (key == "working_set") p.working_set = std::stoull(val);
      else if (key == "revisit_prob") p.revisit_prob = std::stod(val);
      else if (key == "lines_min") p.lines_min = static_cast<unsigned>(std::stoul(val));
      else if (key == "lines_max") p.lines_max = static_cast<unsigned>(std::stoul(val));
      else if (key == "read_fraction") p.read_fraction = std::stod(val);
      else if (key == "mean_gap") p.mean_gap = static_cast<unsigned>(std::stoul(val));
      else if (key == "base_vaddr") p.base_vaddr = std::stoull(val, nullptr, 0);
      else if (key == "seed") p.seed = std::stoull(val);
      else throw TraceError(where + ": unknown key '" + key + "'");
    } catch (const TraceError&) {
      throw;
    } catch (...) {
      throw TraceError(where + ": bad value '" + val + "' for " + key);
    }
  }
  return p;
}

/// Single-line form: whitespace-separated key=value tokens.
inline SynthParams parse_synth_params(const std::string& text) {
  std::istringstream tokens(text);
  std::string tok, lines;
  while (tokens >> tok) lines += tok + "\n";
  std::istringstream in(lines);
  return parse_synth_params(in);
}

}  // namespace pbsim
