#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/geometry.hpp"
#include "pbsim/llc.hpp"

namespace pbsim {

/// Outcome of synchronizing a PB with an LLC line install.
enum class PbInstallOutcome {
  kNotResident,   // no PB holds this 4KB region
  kUpdated,       // slot already held this exact line; payload refreshed
  kInstalled,     // slot was empty or its occupant no longer LLC-valid
  kConflictKept,  // occupant from another region is still live; PB unchanged
};

/// A pool of SRAM page buffers fronting the NVM array. Each buffer mirrors
/// the lines of one 4KB region; a slot plus its region field identifies the
/// line, so no per-slot address tags exist. Data validity is gated entirely
/// by the LLC tag array.
class PageBufferSet {
 public:
  struct Stats {
    uint64_t promotions = 0;       // bulk fills from a row read
    uint64_t lines_installed = 0;  // slot fills: bulk + write-path installs
    uint64_t lines_first_read = 0; // slot fills later read at least once
    uint64_t write_updates = 0;
    uint64_t write_installs = 0;
    uint64_t conflicts_kept = 0;   // installs skipped, occupant still live
    uint64_t replacements = 0;     // a loaded PB reassigned to a new region
  };

  struct Buffer {
    bool used = false;
    uint64_t ppn = 0;          // 4KB frame number (pa >> 12)
    unsigned residency = 0;    // occupied slots whose line is LLC-valid
    uint64_t counter_base = 0; // replacement counter at last touch
    uint64_t last_touch = 0;
    uint64_t occupied = 0;     // slot bitmask
    uint64_t read_seen = 0;    // slots read since their last fill
    std::vector<uint8_t> region;  // per-slot source region within the page
    std::vector<uint64_t> value;
  };

  PageBufferSet(const SimConfig& cfg, const LayoutGeometry& geom)
      : cfg_(cfg), geom_(geom), slots_(geom.lines_per_region),
        counter_cap_(cfg.repl_counter_cap()), bufs_(cfg.pb.count) {
    assert(slots_ <= 64);
    for (Buffer& b : bufs_) {
      b.region.assign(slots_, 0);
      b.value.assign(slots_, 0);
    }
  }

  int find(uint64_t ppn) const {
    for (size_t i = 0; i < bufs_.size(); ++i)
      if (bufs_[i].used && bufs_[i].ppn == ppn) return static_cast<int>(i);
    return -1;
  }

  /// Counter after lazy decay: one unit per elapsed cycle since last touch.
  /// Touch times from overlapping services may arrive slightly out of
  /// order; evaluation before the recorded touch sees no decay.
  uint64_t effective_counter(size_t i, uint64_t now) const {
    const Buffer& b = bufs_[i];
    uint64_t elapsed = now > b.last_touch ? now - b.last_touch : 0;
    return b.counter_base > elapsed ? b.counter_base - elapsed : 0;
  }

  /// Recompute the counter from current residency (any PB read or write).
  void refresh(size_t i, uint64_t now) {
    Buffer& b = bufs_[i];
    uint64_t v = uint64_t{b.residency} * cfg_.pb.activation_period;
    b.counter_base = v > counter_cap_ ? counter_cap_ : v;
    b.last_touch = std::max(b.last_touch, now);
  }

  bool gate(unsigned population) const {
    return population >= cfg_.pb.threshold;
  }

  /// Pick the PB to overwrite: a never-used one first, then any with a
  /// decayed counter; ties to the lowest index. No candidate: no promotion.
  std::optional<size_t> select_victim(uint64_t now) const {
    for (size_t i = 0; i < bufs_.size(); ++i)
      if (!bufs_[i].used) return i;
    for (size_t i = 0; i < bufs_.size(); ++i)
      if (effective_counter(i, now) == 0) return i;
    return std::nullopt;
  }

  /// Bulk-fill a PB from a row snapshot. When both regions of the page hold
  /// a line mapping to the same slot, the line from the trigger's region
  /// wins. The trigger address lies inside the snapshot's 4KB region.
  /// Returns the number of lines placed (== residency).
  unsigned promote(size_t i, const RowSnapshot& snap, uint64_t trigger_pa,
                   uint64_t now) {
    Buffer& b = bufs_[i];
    if (b.used) ++stats_.replacements;
    b.used = true;
    b.ppn = trigger_pa >> 12;
    b.occupied = 0;
    b.read_seen = 0;
    uint64_t trigger_region = geom_.region_of(trigger_pa);
    for (uint64_t s = 0; s < slots_; ++s) {
      int winner = -1;
      for (uint64_t r = 0; r < geom_.regions_per_page; ++r) {
        uint64_t pos = r * slots_ + s;
        if (!(snap.valid_mask >> pos & 1)) continue;
        if (winner < 0 || r == trigger_region) winner = static_cast<int>(r);
      }
      if (winner < 0) continue;
      uint64_t pos = uint64_t(winner) * slots_ + s;
      b.occupied |= uint64_t{1} << s;
      b.region[s] = static_cast<uint8_t>(winner);
      b.value[s] = snap.values[pos];
    }
    b.residency = static_cast<unsigned>(std::popcount(b.occupied));
    stats_.lines_installed += b.residency;
    ++stats_.promotions;
    refresh(i, now);
    return b.residency;
  }

  struct Hit {
    bool hit = false;
    size_t pb = 0;
    uint64_t slot = 0;
    uint64_t value = 0;
  };

  /// Region check for a CLR that already hit the LLC tags at `position`.
  Hit lookup(uint64_t ppn, uint64_t position) const {
    Hit h;
    int i = find(ppn);
    if (i < 0) return h;
    const Buffer& b = bufs_[i];
    uint64_t s = geom_.slot_of_position(position);
    uint64_t r = geom_.region_of_position(position);
    if (!(b.occupied >> s & 1) || b.region[s] != r) return h;
    h.hit = true;
    h.pb = static_cast<size_t>(i);
    h.slot = s;
    h.value = b.value[s];
    return h;
  }

  /// Data delivery out of a PB slot. Counter refresh is the caller's last
  /// step, after the served line's LLC invalidation drops residency.
  uint64_t serve_read(size_t i, uint64_t slot, uint64_t now) {
    Buffer& b = bufs_[i];
    assert(b.occupied >> slot & 1);
    (void)now;
    if (!(b.read_seen >> slot & 1)) {
      b.read_seen |= uint64_t{1} << slot;
      ++stats_.lines_first_read;
    }
    return b.value[slot];
  }

  /// Mirror an LLC install into the region's PB, if one exists. `probe`
  /// reports whether a line address is currently valid in the LLC tags and
  /// is consulted only for a conflicting occupant.
  template <typename ProbeFn>
  PbInstallOutcome on_llc_install(uint64_t pa, uint64_t value, uint64_t now,
                                  ProbeFn&& probe) {
    int i = find(pa >> 12);
    if (i < 0) return PbInstallOutcome::kNotResident;
    Buffer& b = bufs_[i];
    uint64_t pos = geom_.position_of(pa);
    uint64_t s = geom_.slot_of_position(pos);
    uint64_t r = geom_.region_of_position(pos);
    if ((b.occupied >> s & 1) && b.region[s] == r) {
      // The exact line: it was not LLC-valid before this install (victim
      // discipline), so it re-enters the residency count now.
      b.value[s] = value;
      b.residency += 1;
      ++stats_.write_updates;
      refresh(i, now);
      return PbInstallOutcome::kUpdated;
    }
    if ((b.occupied >> s & 1) && probe(occupant_address(i, s))) {
      ++stats_.conflicts_kept;
      return PbInstallOutcome::kConflictKept;
    }
    b.occupied |= uint64_t{1} << s;
    b.read_seen &= ~(uint64_t{1} << s);
    b.region[s] = static_cast<uint8_t>(r);
    b.value[s] = value;
    b.residency += 1;
    ++stats_.write_installs;
    ++stats_.lines_installed;
    refresh(i, now);
    return PbInstallOutcome::kInstalled;
  }

  /// A line left the LLC (eviction, promotion to L2, or a store overwrite).
  /// Residency drops if its slot mirrors that exact line; the payload stays,
  /// gated stale by the LLC valid bit. Not a PB access: no counter refresh.
  bool on_llc_invalidate(uint64_t pa) {
    int i = find(pa >> 12);
    if (i < 0) return false;
    Buffer& b = bufs_[i];
    uint64_t pos = geom_.position_of(pa);
    uint64_t s = geom_.slot_of_position(pos);
    if (!(b.occupied >> s & 1) || b.region[s] != geom_.region_of_position(pos))
      return false;
    assert(b.residency > 0);
    b.residency -= 1;
    return true;
  }

  /// Full line address mirrored by a slot: ppn plus region plus slot.
  uint64_t occupant_address(size_t i, uint64_t slot) const {
    const Buffer& b = bufs_[i];
    assert(b.occupied >> slot & 1);
    uint64_t pos = uint64_t{b.region[slot]} * slots_ + slot;
    return (b.ppn << 12) + pos * geom_.line_size;
  }

  /// Ground-truth residency: occupied slots whose line is LLC-valid.
  template <typename ProbeFn>
  unsigned recount_residency(size_t i, ProbeFn&& probe) const {
    const Buffer& b = bufs_[i];
    unsigned n = 0;
    for (uint64_t s = 0; s < slots_; ++s)
      if ((b.occupied >> s & 1) && probe(occupant_address(i, s))) ++n;
    return n;
  }

  size_t count() const { return bufs_.size(); }
  uint64_t slots() const { return slots_; }
  const Buffer& buffer(size_t i) const { return bufs_[i]; }
  const Stats& stats() const { return stats_; }

  /// PB tag-entry width in bits: region frame number, replacement counter,
  /// residency counter, and one region field per slot.
  static unsigned tag_entry_bits(const LayoutGeometry& g, unsigned repl_bits) {
    unsigned ppn_bits = kPaBits - log2_exact(g.page_size);
    unsigned res_bits = log2_exact(g.pb_size / g.line_size);
    unsigned region_bits_per_slot = log2_exact(g.regions_per_page);
    return ppn_bits + repl_bits + res_bits +
           static_cast<unsigned>(g.lines_per_region) * region_bits_per_slot;
  }

  /// Area cost of one PB (data + tag entry, both SRAM) relative to the NVM
  /// slice, with an SRAM:NVM cell-area ratio applied.
  static double area_overhead_per_pb(const LayoutGeometry& g,
                                     unsigned repl_bits,
                                     double sram_area_ratio = 4.0) {
    double sram_bytes = static_cast<double>(g.pb_size) +
                        tag_entry_bits(g, repl_bits) / 8.0;
    return sram_bytes * sram_area_ratio / static_cast<double>(g.slice_size);
  }

  void dump(std::ostream& os) const {
    for (size_t i = 0; i < bufs_.size(); ++i) {
      const Buffer& b = bufs_[i];
      if (!b.used) continue;
      os << "pb " << i << " ppn 0x" << std::hex << b.ppn << std::dec
         << " residency " << b.residency << " counter_base " << b.counter_base
         << " slots";
      for (uint64_t s = 0; s < slots_; ++s)
        if (b.occupied >> s & 1)
          os << " " << s << ":r" << unsigned(b.region[s]) << ":v" << b.value[s];
      os << "\n";
    }
  }

 private:
  SimConfig cfg_;
  LayoutGeometry geom_;
  uint64_t slots_;
  uint64_t counter_cap_;
  std::vector<Buffer> bufs_;
  Stats stats_;
};

}  // namespace pbsim
