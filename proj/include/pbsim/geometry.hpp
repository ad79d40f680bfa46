#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pbsim {

// Physical addresses are 48 bits everywhere in the model.
inline constexpr unsigned kPaBits = 48;
inline constexpr uint64_t kPaMask = (uint64_t{1} << kPaBits) - 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline unsigned log2_exact(uint64_t v) {
  assert(is_pow2(v));
  unsigned b = 0;
  while ((uint64_t{1} << b) != v) ++b;
  return b;
}

/// Contiguous bit field [lo, lo+width) of a physical address. width == 0 is a
/// legal empty field (extracts 0, occupies no bits).
struct BitRange {
  unsigned lo = 0;
  unsigned width = 0;

  uint64_t extract(uint64_t pa) const {
    if (width == 0) return 0;
    return (pa >> lo) & mask();
  }
  uint64_t place(uint64_t v) const { return (v & mask()) << lo; }
  uint64_t mask() const {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
  }
  unsigned hi() const { return width == 0 ? lo : lo + width - 1; }
};

/// Address decomposition for a per-line request against the page-row layout:
/// the row is selected by page-frame bits, the set by low page-offset bits,
/// and the remaining page-offset bits become the low half of the tag.
struct ClrIndex {
  uint64_t row = 0;
  uint64_t set = 0;
  uint64_t tag_high = 0;
  uint64_t tag_low = 0;
  uint64_t offset = 0;
  unsigned slice = 0;
};

/// Address decomposition for a page transfer request: row plus the high tag
/// only. Covers every line of the 4KB region regardless of set/tag_low.
struct PtrIndex {
  uint64_t row = 0;
  uint64_t tag_high = 0;
  unsigned slice = 0;
};

/// Conventional set-associative decomposition (set bits directly above the
/// line offset), used by the non-paged LLC configurations.
struct ConvIndex {
  uint64_t set = 0;
  uint64_t tag = 0;
  uint64_t offset = 0;
  unsigned slice = 0;
};

/// Tag-compare traffic for one lookup, in bits read from the tag array.
struct TagCompareCost {
  uint64_t clr_bits = 0;  // ways * (tag_high + tag_low) bits
  uint64_t ptr_bits = 0;  // lines_per_page * tag_high bits
  double ratio = 0.0;     // ptr_bits / clr_bits
};

/// Derived constants of the page-row LLC layout. All sizes are per slice.
///
/// Field order within an address (low to high):
///   [offset][set][tag_low] = page offset | [row][slice] = frame bits | [tag_high]
struct LayoutGeometry {
  uint64_t line_size = 0;
  uint64_t page_size = 0;
  uint64_t slice_size = 0;
  uint64_t pb_size = 0;
  unsigned ways = 0;
  unsigned slice_count = 1;

  uint64_t lines_per_page = 0;
  uint64_t rows_per_slice = 0;
  uint64_t sets_per_row = 0;
  uint64_t regions_per_page = 0;   // page_size / pb_size
  uint64_t lines_per_region = 0;   // lines_per_page / regions_per_page

  BitRange offset_bits;
  BitRange set_bits;
  BitRange tag_low_bits;
  BitRange row_bits;
  BitRange slice_bits;
  BitRange tag_high_bits;

  ClrIndex decompose_clr(uint64_t pa) const {
    assert((pa & ~kPaMask) == 0);
    ClrIndex ix;
    ix.offset = offset_bits.extract(pa);
    ix.set = set_bits.extract(pa);
    ix.tag_low = tag_low_bits.extract(pa);
    ix.row = row_bits.extract(pa);
    ix.slice = static_cast<unsigned>(slice_bits.extract(pa));
    ix.tag_high = tag_high_bits.extract(pa);
    return ix;
  }

  PtrIndex decompose_ptr(uint64_t pa) const {
    assert((pa & ~kPaMask) == 0);
    PtrIndex ix;
    ix.row = row_bits.extract(pa);
    ix.slice = static_cast<unsigned>(slice_bits.extract(pa));
    ix.tag_high = tag_high_bits.extract(pa);
    return ix;
  }

  uint64_t recompose_clr(const ClrIndex& ix) const {
    return offset_bits.place(ix.offset) | set_bits.place(ix.set) |
           tag_low_bits.place(ix.tag_low) | row_bits.place(ix.row) |
           slice_bits.place(ix.slice) | tag_high_bits.place(ix.tag_high);
  }

  /// Slot index 0..lines_per_page-1 of a line within its physical row. This
  /// is the line's position inside its own page image (page offset / line
  /// size); set and tag_low are its low and high bit halves.
  uint64_t position_in_row(const ClrIndex& ix) const {
    return (ix.tag_low << set_bits.width) | ix.set;
  }
  uint64_t position_of(uint64_t pa) const {
    return (pa & (page_size - 1)) / line_size;
  }
  uint64_t region_of_position(uint64_t pos) const {
    return pos / lines_per_region;
  }
  uint64_t slot_of_position(uint64_t pos) const {
    return pos % lines_per_region;
  }
  /// Region of an address = which pb_size-aligned chunk of its page it hits.
  uint64_t region_of(uint64_t pa) const {
    return region_of_position(position_of(pa));
  }

  /// Rebuild a line address from a row's coordinates and a page position.
  uint64_t line_address(uint64_t tag_high, unsigned slice, uint64_t row,
                        uint64_t pos) const {
    ClrIndex ix;
    ix.tag_high = tag_high;
    ix.slice = slice;
    ix.row = row;
    ix.set = pos & set_bits.mask();
    ix.tag_low = pos >> set_bits.width;
    return recompose_clr(ix);
  }

  TagCompareCost tag_compare_cost() const {
    TagCompareCost c;
    c.clr_bits = uint64_t{ways} * (tag_high_bits.width + tag_low_bits.width);
    c.ptr_bits = lines_per_page * tag_high_bits.width;
    c.ratio = c.clr_bits == 0 ? 0.0
                              : static_cast<double>(c.ptr_bits) /
                                    static_cast<double>(c.clr_bits);
    return c;
  }
};

/// Build the page-row layout from raw sizes. Throws ConfigError on any
/// inconsistent combination (non powers of two, too many ways, address
/// overflow past 48 bits).
inline LayoutGeometry derive_geometry(uint64_t line_size, uint64_t page_size,
                                      uint64_t slice_size, unsigned ways,
                                      uint64_t pb_size,
                                      unsigned slice_count = 1) {
  auto need_pow2 = [](uint64_t v, const char* what) {
    if (!is_pow2(v))
      throw ConfigError(std::string(what) + " must be a power of two");
  };
  need_pow2(line_size, "line size");
  need_pow2(page_size, "page size");
  need_pow2(slice_size, "slice size");
  need_pow2(pb_size, "page buffer size");
  need_pow2(ways, "associativity");
  need_pow2(slice_count, "slice count");
  if (page_size < line_size) throw ConfigError("page size < line size");
  if (slice_size < page_size) throw ConfigError("slice size < page size");
  if (pb_size < line_size || pb_size > page_size)
    throw ConfigError("page buffer size must lie between line and page size");

  LayoutGeometry g;
  g.line_size = line_size;
  g.page_size = page_size;
  g.slice_size = slice_size;
  g.pb_size = pb_size;
  g.ways = ways;
  g.slice_count = slice_count;
  g.lines_per_page = page_size / line_size;
  if (ways > g.lines_per_page)
    throw ConfigError("associativity exceeds lines per page");
  g.rows_per_slice = slice_size / page_size;
  g.sets_per_row = g.lines_per_page / ways;
  g.regions_per_page = page_size / pb_size;
  g.lines_per_region = g.lines_per_page / g.regions_per_page;

  unsigned off_w = log2_exact(line_size);
  unsigned set_w = log2_exact(g.sets_per_row);
  unsigned page_w = log2_exact(page_size);
  unsigned row_w = log2_exact(g.rows_per_slice);
  unsigned slice_w = log2_exact(slice_count);
  g.offset_bits = {0, off_w};
  g.set_bits = {off_w, set_w};
  g.tag_low_bits = {off_w + set_w, page_w - off_w - set_w};
  g.row_bits = {page_w, row_w};
  g.slice_bits = {page_w + row_w, slice_w};
  unsigned th_lo = page_w + row_w + slice_w;
  if (th_lo >= kPaBits)
    throw ConfigError("layout needs more than 48 physical address bits");
  g.tag_high_bits = {th_lo, kPaBits - th_lo};
  return g;
}

/// Conventional geometry: sets span the whole slice, indexed just above the
/// line offset; slice (if any) selected by the bits above the set index.
struct ConvGeometry {
  uint64_t line_size = 0;
  uint64_t slice_size = 0;
  unsigned ways = 0;
  unsigned slice_count = 1;
  uint64_t sets_per_slice = 0;

  BitRange offset_bits;
  BitRange set_bits;
  BitRange slice_bits;
  BitRange tag_bits;

  ConvIndex decompose(uint64_t pa) const {
    assert((pa & ~kPaMask) == 0);
    ConvIndex ix;
    ix.offset = offset_bits.extract(pa);
    ix.set = set_bits.extract(pa);
    ix.slice = static_cast<unsigned>(slice_bits.extract(pa));
    ix.tag = tag_bits.extract(pa);
    return ix;
  }
  uint64_t recompose(const ConvIndex& ix) const {
    return offset_bits.place(ix.offset) | set_bits.place(ix.set) |
           slice_bits.place(ix.slice) | tag_bits.place(ix.tag);
  }
};

inline ConvGeometry derive_conv_geometry(uint64_t line_size,
                                         uint64_t slice_size, unsigned ways,
                                         unsigned slice_count = 1) {
  if (!is_pow2(line_size) || !is_pow2(slice_size) || !is_pow2(ways) ||
      !is_pow2(slice_count))
    throw ConfigError("conventional layout sizes must be powers of two");
  ConvGeometry g;
  g.line_size = line_size;
  g.slice_size = slice_size;
  g.ways = ways;
  g.slice_count = slice_count;
  uint64_t lines = slice_size / line_size;
  if (lines % ways != 0 || lines / ways == 0)
    throw ConfigError("slice size, line size and ways are inconsistent");
  g.sets_per_slice = lines / ways;
  unsigned off_w = log2_exact(line_size);
  unsigned set_w = log2_exact(g.sets_per_slice);
  unsigned slice_w = log2_exact(slice_count);
  g.offset_bits = {0, off_w};
  g.set_bits = {off_w, set_w};
  g.slice_bits = {off_w + set_w, slice_w};
  unsigned tag_lo = off_w + set_w + slice_w;
  if (tag_lo >= kPaBits)
    throw ConfigError("layout needs more than 48 physical address bits");
  g.tag_bits = {tag_lo, kPaBits - tag_lo};
  return g;
}

}  // namespace pbsim
