#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/geometry.hpp"

namespace pbsim {

/// One tag-array entry plus its (logical) line payload. Payloads are 64-bit
/// tokens rather than byte images; stores stamp fresh tokens so functional
/// equivalence against a flat memory can be checked exactly.
struct LlcLine {
  bool valid = false;
  bool dirty = false;
  uint64_t tag_high = 0;  // conventional indexing keeps its whole tag here
  uint64_t tag_low = 0;
  uint64_t stamp = 0;
  uint64_t value = 0;
};

struct LlcLookup {
  bool hit = false;
  uint64_t value = 0;
  bool dirty = false;
  uint64_t position = 0;  // page-row layout only: slot within the row
  uint64_t region = 0;
};

struct LlcInstall {
  bool evicted = false;
  uint64_t evicted_addr = 0;
  uint64_t evicted_value = 0;
  bool evicted_dirty = false;
};

/// All valid lines of one page's physical row that carry the requested
/// tag_high, indexed by their position inside the page image.
struct RowSnapshot {
  unsigned slice = 0;
  uint64_t row = 0;
  uint64_t tag_high = 0;
  uint64_t valid_mask = 0;  // bit p set: position p holds a matching line
  std::vector<uint64_t> values;

  unsigned population() const {
    return static_cast<unsigned>(std::popcount(valid_mask));
  }
};

/// Victim LLC array. Supports the page-row layout (rows of whole pages,
/// sets striped inside a row) and the conventional set-index layout behind
/// the same call surface; timing-side state is limited to per-slice array
/// occupancy, everything else is driven by the hierarchy.
class LlcCache {
 public:
  explicit LlcCache(const SimConfig& cfg) : page_row_(cfg.page_row()) {
    if (page_row_) {
      geom_ = cfg.page_geometry();
      lines_.resize(size_t(geom_.slice_count) * geom_.rows_per_slice *
                    geom_.sets_per_row * geom_.ways);
    } else {
      conv_ = cfg.conv_geometry();
      lines_.resize(size_t(conv_.slice_count) * conv_.sets_per_slice *
                    conv_.ways);
    }
    busy_until_.assign(slices(), 0);
  }

  unsigned slices() const {
    return page_row_ ? geom_.slice_count : conv_.slice_count;
  }
  const LayoutGeometry& geometry() const { return geom_; }
  const ConvGeometry& conv_geometry() const { return conv_; }
  unsigned slice_of(uint64_t pa) const {
    return page_row_ ? geom_.decompose_clr(pa).slice : conv_.decompose(pa).slice;
  }

  /// Per-line lookup; updates LRU on hit.
  LlcLookup lookup(uint64_t pa, uint64_t now) {
    LlcLookup r;
    LlcLine* l = find(pa);
    if (!l) return r;
    l->stamp = ++tick_;
    (void)now;
    r.hit = true;
    r.value = l->value;
    r.dirty = l->dirty;
    if (page_row_) {
      ClrIndex ix = geom_.decompose_clr(pa);
      r.position = geom_.position_in_row(ix);
      r.region = geom_.region_of_position(r.position);
    }
    return r;
  }

  /// Tag probe without LRU or state effects (audits, exclusivity checks).
  bool probe(uint64_t pa) const {
    return const_cast<LlcCache*>(this)->find(pa) != nullptr;
  }

  /// Row scan for a transfer request: population of lines carrying the
  /// region's tag_high. Page-row layout only.
  RowSnapshot scan_row(uint64_t region_base_pa) const {
    assert(page_row_);
    RowSnapshot s;
    PtrIndex px = geom_.decompose_ptr(region_base_pa);
    s.slice = px.slice;
    s.row = px.row;
    s.tag_high = px.tag_high;
    s.values.assign(geom_.lines_per_page, 0);
    for (uint64_t set = 0; set < geom_.sets_per_row; ++set) {
      const LlcLine* base = set_base(px.slice, px.row, set);
      for (unsigned w = 0; w < geom_.ways; ++w) {
        const LlcLine& l = base[w];
        if (!l.valid || l.tag_high != px.tag_high) continue;
        uint64_t pos = (l.tag_low << geom_.set_bits.width) | set;
        s.valid_mask |= uint64_t{1} << pos;
        s.values[pos] = l.value;
      }
    }
    return s;
  }

  /// Install an L2 victim. The line must not be resident (victim/exclusive
  /// discipline); a full set evicts its LRU way.
  LlcInstall install(uint64_t pa, uint64_t value, bool dirty) {
    assert(!probe(pa) && "install of a line already resident in the LLC");
    LlcInstall out;
    LlcLine* base;
    uint64_t th, tl;
    locate(pa, base, th, tl);
    LlcLine* victim = nullptr;
    for (unsigned w = 0; w < ways(); ++w) {
      if (!base[w].valid) { victim = &base[w]; break; }
      if (!victim || base[w].stamp < victim->stamp) victim = &base[w];
    }
    if (victim->valid) {
      out.evicted = true;
      out.evicted_addr = address_of(pa, *victim);
      out.evicted_value = victim->value;
      out.evicted_dirty = victim->dirty;
    }
    victim->valid = true;
    victim->dirty = dirty;
    victim->tag_high = th;
    victim->tag_low = tl;
    victim->value = value;
    victim->stamp = ++tick_;
    return out;
  }

  /// Remove a line (read-hit promotion to L2, or a store overwriting a
  /// victim copy). Returns false if it was not resident.
  bool invalidate(uint64_t pa) {
    LlcLine* l = find(pa);
    if (!l) return false;
    l->valid = false;
    return true;
  }

  /// In-place payload update of a resident line (write-queue data path).
  bool write_value(uint64_t pa, uint64_t value, bool dirty) {
    LlcLine* l = find(pa);
    if (!l) return false;
    l->value = value;
    l->dirty = l->dirty || dirty;
    return true;
  }

  std::optional<uint64_t> value_of(uint64_t pa) const {
    const LlcLine* l = const_cast<LlcCache*>(this)->find(pa);
    if (!l) return std::nullopt;
    return l->value;
  }

  /// Claim the (non-pipelined) data array: the access starts no earlier than
  /// `earliest` and the array stays busy for `cycles`. Returns the start.
  uint64_t claim_array(unsigned slice, uint64_t earliest, unsigned cycles) {
    uint64_t start = std::max(earliest, busy_until_[slice]);
    busy_until_[slice] = start + cycles;
    return start;
  }
  uint64_t busy_until(unsigned slice) const { return busy_until_[slice]; }

  uint64_t valid_lines() const {
    uint64_t n = 0;
    for (const LlcLine& l : lines_) n += l.valid;
    return n;
  }

  /// Text dump of one physical row's tag state, for golden tests.
  void dump_row(std::ostream& os, unsigned slice, uint64_t row) const {
    assert(page_row_);
    for (uint64_t set = 0; set < geom_.sets_per_row; ++set) {
      const LlcLine* base = set_base(slice, row, set);
      for (unsigned w = 0; w < geom_.ways; ++w) {
        const LlcLine& l = base[w];
        if (!l.valid) continue;
        os << "set " << set << " way " << w << " tag_high 0x" << std::hex
           << l.tag_high << " tag_low 0x" << l.tag_low << std::dec << " pos "
           << ((l.tag_low << geom_.set_bits.width) | set)
           << (l.dirty ? " dirty" : " clean") << " value " << l.value << "\n";
      }
    }
  }

 private:
  unsigned ways() const { return page_row_ ? geom_.ways : conv_.ways; }

  LlcLine* set_base(unsigned slice, uint64_t row, uint64_t set) {
    size_t ix = ((size_t(slice) * geom_.rows_per_slice + row) *
                     geom_.sets_per_row + set) * geom_.ways;
    return &lines_[ix];
  }
  const LlcLine* set_base(unsigned slice, uint64_t row, uint64_t set) const {
    return const_cast<LlcCache*>(this)->set_base(slice, row, set);
  }

  void locate(uint64_t pa, LlcLine*& base, uint64_t& th, uint64_t& tl) {
    if (page_row_) {
      ClrIndex ix = geom_.decompose_clr(pa);
      base = set_base(ix.slice, ix.row, ix.set);
      th = ix.tag_high;
      tl = ix.tag_low;
    } else {
      ConvIndex ix = conv_.decompose(pa);
      base = &lines_[(size_t(ix.slice) * conv_.sets_per_slice + ix.set) *
                     conv_.ways];
      th = ix.tag;
      tl = 0;
    }
  }

  LlcLine* find(uint64_t pa) {
    LlcLine* base;
    uint64_t th, tl;
    locate(pa, base, th, tl);
    LlcLine* hit = nullptr;
    for (unsigned w = 0; w < ways(); ++w) {
      LlcLine& l = base[w];
      if (l.valid && l.tag_high == th && l.tag_low == tl) {
        assert(!hit && "duplicate tag match in one set");
        hit = &l;
#ifdef NDEBUG
        break;
#endif
      }
    }
    return hit;
  }

  uint64_t address_of(uint64_t context_pa, const LlcLine& l) const {
    if (page_row_) {
      ClrIndex ix = geom_.decompose_clr(context_pa);
      ix.tag_high = l.tag_high;
      ix.tag_low = l.tag_low;
      ix.offset = 0;
      return geom_.recompose_clr(ix);
    }
    ConvIndex ix = conv_.decompose(context_pa);
    ix.tag = l.tag_high;
    ix.offset = 0;
    return conv_.recompose(ix);
  }

  bool page_row_;
  LayoutGeometry geom_;
  ConvGeometry conv_;
  std::vector<LlcLine> lines_;
  std::vector<uint64_t> busy_until_;
  uint64_t tick_ = 0;
};

}  // namespace pbsim
