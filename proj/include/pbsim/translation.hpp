#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/geometry.hpp"

namespace pbsim {

/// Chunk-id width for a huge page: number of 4KB units, log2.
inline unsigned chunk_bits(PagePolicy p) {
  switch (p) {
    case PagePolicy::k4K: return 0;
    case PagePolicy::k2M: return 9;   // 512 chunks
    case PagePolicy::k1G: return 18;  // 256K chunks
  }
  return 0;
}

struct PageTableEntry {
  uint64_t ppn = 0;  // frame number at the page's own granularity
  PagePolicy size = PagePolicy::k4K;
  bool accessed = false;
  bool dirty = false;
};

struct TlbEntry {
  bool valid = false;
  uint64_t vpn = 0;
  uint64_t ppn = 0;
  PagePolicy size = PagePolicy::k4K;
  uint64_t last_chunk = 0;  // most recently promoted 4KB chunk (huge pages)
  uint64_t stamp = 0;       // LRU
};

/// Request to move one 4KB region's resident lines toward the core.
struct PtrRequest {
  uint64_t region_base = 0;    // physical, 4KB aligned
  uint64_t trigger_paddr = 0;  // full translated address of the faulting access
};

struct TranslationResult {
  uint64_t paddr = 0;
  unsigned latency = 0;  // cycles on the translation path
  bool l1_hit = false;
  bool l2_hit = false;
  bool walked = false;
  bool refill = false;          // L1 TLB was refilled by this access
  bool refill_eligible = false; // refill passed the reuse-history test
  std::optional<PtrRequest> ptr;
};

/// Set-associative LRU TLB. Sets are vpn-modulo indexed, which also covers
/// the 1024-entry 12-way case (85 sets, 1020 effective entries).
class Tlb {
 public:
  Tlb(unsigned entries, unsigned ways)
      : ways_(ways), sets_(entries / ways ? entries / ways : 1),
        e_(sets_ * ways_) {}

  TlbEntry* lookup(uint64_t vpn, uint64_t now) {
    TlbEntry* hit = find(vpn);
    if (hit) hit->stamp = now;
    return hit;
  }

  TlbEntry* find(uint64_t vpn) {
    TlbEntry* base = set_base(vpn);
    for (unsigned w = 0; w < ways_; ++w)
      if (base[w].valid && base[w].vpn == vpn) return &base[w];
    return nullptr;
  }

  /// Insert (or overwrite) an entry; returns the evicted entry if a valid
  /// one was displaced.
  std::optional<TlbEntry> insert(const TlbEntry& e, uint64_t now) {
    TlbEntry* base = set_base(e.vpn);
    TlbEntry* victim = nullptr;
    for (unsigned w = 0; w < ways_; ++w) {
      if (base[w].valid && base[w].vpn == e.vpn) { victim = &base[w]; break; }
      if (!base[w].valid) { victim = &base[w]; break; }
      if (!victim || base[w].stamp < victim->stamp) victim = &base[w];
    }
    std::optional<TlbEntry> out;
    if (victim->valid && victim->vpn != e.vpn) out = *victim;
    *victim = e;
    victim->valid = true;
    victim->stamp = now;
    return out;
  }

  bool invalidate(uint64_t vpn) {
    TlbEntry* e = find(vpn);
    if (!e) return false;
    e->valid = false;
    return true;
  }

  unsigned sets() const { return sets_; }
  unsigned ways() const { return ways_; }
  const std::vector<TlbEntry>& entries() const { return e_; }

 private:
  TlbEntry* set_base(uint64_t vpn) { return &e_[(vpn % sets_) * ways_]; }

  unsigned ways_;
  unsigned sets_;
  std::vector<TlbEntry> e_;
};

/// Two-level TLB plus a demand-allocated page table. Physical frames come
/// from a seeded random draw over the configured memory size, so placement
/// is deterministic per seed and injective.
class TranslationUnit {
 public:
  struct Stats {
    uint64_t l1_hits = 0;
    uint64_t l1_refills = 0;
    uint64_t l2_hits = 0;
    uint64_t walks = 0;
    uint64_t eligible_refills = 0;
    uint64_t ptrs = 0;           // includes huge-page chunk changes
  };

  explicit TranslationUnit(const SimConfig& cfg)
      : cfg_(cfg),
        l1_(cfg.core.l1_tlb_entries, cfg.core.l1_tlb_ways),
        l2_(cfg.core.l2_tlb_entries, cfg.core.l2_tlb_ways),
        rng_(cfg.core.seed) {}

  TranslationResult translate(uint64_t vaddr, bool is_write) {
    assert((vaddr & ~kPaMask) == 0);
    PagePolicy pol = cfg_.mem.page_policy;
    uint64_t psize = page_bytes(pol);
    uint64_t vpn = vaddr / psize;
    uint64_t off = vaddr % psize;
    TranslationResult res;

    if (TlbEntry* e = l1_.lookup(vpn, ++tick_)) {
      res.l1_hit = true;
      res.latency = cfg_.core.l1_tlb_rt;
      res.paddr = e->ppn * psize + off;
      ++stats_.l1_hits;
      touch_pte(vpn, is_write);
      if (pol != PagePolicy::k4K) {
        uint64_t chunk = chunk_of(vaddr, pol);
        if (chunk != e->last_chunk) {
          e->last_chunk = chunk;
          res.ptr = make_ptr(res.paddr);
          ++stats_.ptrs;
        }
      }
      return res;
    }

    // L1 refill path. Reuse history is sampled before this access updates it.
    ++stats_.l1_refills;
    res.refill = true;
    if (TlbEntry* e2 = l2_.lookup(vpn, tick_)) {
      res.l2_hit = true;
      res.latency = cfg_.core.l2_tlb_rt;
      res.paddr = e2->ppn * psize + off;
      res.refill_eligible = true;  // present in the second-level TLB
      ++stats_.l2_hits;
      refill_l1(*e2, vaddr, pol);
    } else {
      res.walked = true;
      res.latency = cfg_.core.l2_tlb_rt + cfg_.mem.rt;
      ++stats_.walks;
      PageTableEntry* pte = walk(vpn, pol);
      res.refill_eligible = pte->accessed || pte->dirty;
      res.paddr = pte->ppn * psize + off;
      TlbEntry fresh;
      fresh.vpn = vpn;
      fresh.ppn = pte->ppn;
      fresh.size = pol;
      if (auto ev = l2_.insert(fresh, tick_)) l1_.invalidate(ev->vpn);
      refill_l1(fresh, vaddr, pol);
    }

    if (res.refill_eligible) {
      ++stats_.eligible_refills;
      res.ptr = make_ptr(res.paddr);
      ++stats_.ptrs;
    }
    touch_pte(vpn, is_write);
    return res;
  }

  /// Reuse-history predicate for an L1 refill, before the access updates it.
  bool should_send_ptr(uint64_t vpn) {
    if (l2_.find(vpn)) return true;
    auto it = pt_.find(vpn);
    return it != pt_.end() && (it->second.accessed || it->second.dirty);
  }

  const Stats& stats() const { return stats_; }
  const Tlb& l1() const { return l1_; }
  const Tlb& l2() const { return l2_; }
  size_t pages_touched() const { return pt_.size(); }
  uint64_t frame_pool() const { return frames(cfg_.mem.page_policy); }
  const PageTableEntry* pte(uint64_t vpn) const {
    auto it = pt_.find(vpn);
    return it == pt_.end() ? nullptr : &it->second;
  }

  /// Every valid L1 entry must also be present in the L2 TLB.
  bool audit_inclusive() const {
    for (const TlbEntry& e : l1_.entries())
      if (e.valid && !const_cast<Tlb&>(l2_).find(e.vpn)) return false;
    return true;
  }

 private:
  uint64_t chunk_of(uint64_t vaddr, PagePolicy pol) const {
    return (vaddr >> 12) & ((uint64_t{1} << chunk_bits(pol)) - 1);
  }

  PtrRequest make_ptr(uint64_t paddr) const {
    return {paddr & ~uint64_t{4095}, paddr};
  }

  void refill_l1(const TlbEntry& src, uint64_t vaddr, PagePolicy pol) {
    TlbEntry e = src;
    e.last_chunk = pol == PagePolicy::k4K ? 0 : chunk_of(vaddr, pol);
    l1_.insert(e, tick_);
  }

  void touch_pte(uint64_t vpn, bool is_write) {
    PageTableEntry& pte = pt_.at(vpn);
    pte.accessed = true;
    if (is_write) pte.dirty = true;
  }

  uint64_t frames(PagePolicy pol) const {
    return (cfg_.mem.size_gb << 30) / page_bytes(pol);
  }

  PageTableEntry* walk(uint64_t vpn, PagePolicy pol) {
    auto it = pt_.find(vpn);
    if (it != pt_.end()) return &it->second;
    PageTableEntry pte;
    pte.size = pol;
    pte.ppn = allocate_frame(pol);
    return &pt_.emplace(vpn, pte).first->second;
  }

  uint64_t allocate_frame(PagePolicy pol) {
    uint64_t pool = frames(pol);
    if (used_.size() >= pool)
      throw std::runtime_error("physical memory exhausted");
    for (;;) {
      uint64_t f = rng_() % pool;
      if (used_.insert(f).second) return f;
    }
  }

  const SimConfig& cfg_;
  Tlb l1_;
  Tlb l2_;
  std::unordered_map<uint64_t, PageTableEntry> pt_;
  std::unordered_set<uint64_t> used_;
  std::mt19937_64 rng_;
  uint64_t tick_ = 0;
  Stats stats_;
};

}  // namespace pbsim
