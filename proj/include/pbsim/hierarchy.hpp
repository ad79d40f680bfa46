#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/llc.hpp"
#include "pbsim/metrics.hpp"
#include "pbsim/page_buffers.hpp"
#include "pbsim/trace.hpp"
#include "pbsim/translation.hpp"

namespace pbsim {

// Round-trip decomposition shared by every LLC service: request traversal,
// tag check, data access, response traversal. 20 + 2 + data + 19 reproduces
// the configured RTs (SRAM 53 with 12-cycle data, NVM 63 with 22, PB 43
// with 2). The 20/19 split of the non-array cycles is a fixed convention.
inline constexpr unsigned kLlcRequestPath = 20;
inline constexpr unsigned kLlcResponsePath = 19;

/// Private write-back cache level (L1 or L2).
class PrivateCache {
 public:
  struct Line {
    bool valid = false;
    bool dirty = false;
    uint64_t tag = 0;
    uint64_t stamp = 0;
    uint64_t value = 0;
  };
  struct Evicted {
    uint64_t addr = 0;
    uint64_t value = 0;
    bool dirty = false;
  };

  PrivateCache(uint64_t bytes, unsigned ways, unsigned line)
      : ways_(ways), line_(line), sets_(bytes / ways / line),
        lines_(size_t(sets_) * ways) {
    assert(is_pow2(sets_));
  }

  Line* lookup(uint64_t pa) {
    Line* l = find(pa);
    if (l) l->stamp = ++tick_;
    return l;
  }
  bool probe(uint64_t pa) const {
    return const_cast<PrivateCache*>(this)->find(pa) != nullptr;
  }

  /// Insert or overwrite; returns a displaced valid line.
  std::optional<Evicted> insert(uint64_t pa, uint64_t value, bool dirty) {
    uint64_t set = (pa / line_) & (sets_ - 1);
    uint64_t tag = pa / line_ / sets_;
    Line* base = &lines_[set * ways_];
    Line* victim = nullptr;
    for (unsigned w = 0; w < ways_; ++w) {
      if (base[w].valid && base[w].tag == tag) { victim = &base[w]; break; }
      if (!base[w].valid) { victim = &base[w]; break; }
      if (!victim || base[w].stamp < victim->stamp) victim = &base[w];
    }
    std::optional<Evicted> out;
    if (victim->valid && victim->tag != tag)
      out = Evicted{(victim->tag * sets_ + set) * line_, victim->value,
                    victim->dirty};
    victim->valid = true;
    victim->dirty = dirty;
    victim->tag = tag;
    victim->value = value;
    victim->stamp = ++tick_;
    return out;
  }

  std::optional<Evicted> invalidate(uint64_t pa) {
    Line* l = find(pa);
    if (!l) return std::nullopt;
    l->valid = false;
    return Evicted{pa / line_ * line_, l->value, l->dirty};
  }

  bool write_value(uint64_t pa, uint64_t value, bool dirty) {
    Line* l = find(pa);
    if (!l) return false;
    l->value = value;
    l->dirty = l->dirty || dirty;
    return true;
  }

  uint64_t sets() const { return sets_; }
  unsigned ways() const { return ways_; }
  template <typename Fn>
  void for_each_valid(Fn&& fn) const {
    for (uint64_t s = 0; s < sets_; ++s)
      for (unsigned w = 0; w < ways_; ++w) {
        const Line& l = lines_[s * ways_ + w];
        if (l.valid) fn((l.tag * sets_ + s) * line_, l);
      }
  }

 private:
  Line* find(uint64_t pa) {
    uint64_t set = (pa / line_) & (sets_ - 1);
    uint64_t tag = pa / line_ / sets_;
    Line* base = &lines_[set * ways_];
    for (unsigned w = 0; w < ways_; ++w)
      if (base[w].valid && base[w].tag == tag) return &base[w];
    return nullptr;
  }

  unsigned ways_;
  unsigned line_;
  uint64_t sets_;
  std::vector<Line> lines_;
  uint64_t tick_ = 0;
};

struct SimOptions {
  uint64_t audit_interval = 0;     // 0: audits off
  bool collect_load_values = false;
  bool abort_on_audit_failure = false;
};

/// Trace-driven simulator: in-order front end with a bounded load window,
/// inclusive L1/L2, victim LLC, optional page buffers, flat memory backend.
class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg, SimOptions opt = {})
      : cfg_(cfg), opt_(opt), tr_(cfg), llc_(cfg),
        l1_(cfg.l1_bytes(), cfg.l1.ways, cfg.l1.line),
        l2_(cfg.l2_bytes(), cfg.l2.ways, cfg.l1.line) {
    cfg_.validate();
    if (cfg_.pb.enabled)
      pbs_.emplace(cfg_, llc_.geometry());
    ptr_machinery_ = cfg_.pb.enabled || cfg_.llc.fetch_to_l2;
    unsigned slices = llc_.slices();
    bus_.resize(slices);
    wq_.resize(slices);
  }

  Report run(const std::vector<TraceRecord>& trace) {
    for (const TraceRecord& rec : trace) step(rec);
    drain();
    Report r;
    r.scheme = cfg_.scheme();
    m_.eligible_refills = tr_.stats().eligible_refills;
    m_.l1_tlb_refills = tr_.stats().l1_refills;
    m_.tlb_walks = tr_.stats().walks;
    if (pbs_) {
      m_.pb_lines_installed = pbs_->stats().lines_installed;
      m_.pb_lines_first_read = pbs_->stats().lines_first_read;
    }
    m_.cycles = end_cycle();
    r.m = m_;
    double ratio = cfg_.page_row()
                       ? llc_.geometry().tag_compare_cost().ratio
                       : 0.0;
    EnergyModel em(cfg_.energy, cfg_.core.freq_hz, cfg_.pb.enabled, ratio);
    r.finalize(em);
    return r;
  }

  const RunMetrics& metrics() const { return m_; }
  const LlcCache& llc() const { return llc_; }
  const TranslationUnit& translation() const { return tr_; }
  const PageBufferSet* page_buffers() const {
    return pbs_ ? &*pbs_ : nullptr;
  }
  const std::vector<uint64_t>& load_values() const { return load_values_; }
  uint64_t end_cycle() const {
    uint64_t c = std::max(core_time_, max_completion_);
    for (unsigned s = 0; s < llc_.slices(); ++s)
      c = std::max(c, llc_.busy_until(s));
    return c;
  }

 private:
  // ---- core front end ------------------------------------------------

  void step(const TraceRecord& rec) {
    m_.instructions += rec.gap + 1;
    core_time_ += rec.gap;
    process_events_until(core_time_);

    if (rec.op == Op::kRead) {
      while (mshr_.size() >= cfg_.core.mshr) {
        core_time_ = std::max(core_time_, mshr_.top());
        mshr_.pop();
      }
      while (!mshr_.empty() && mshr_.top() <= core_time_) mshr_.pop();
      uint64_t done = service_load(rec.vaddr, core_time_);
      mshr_.push(done);
      max_completion_ = std::max(max_completion_, done);
      ++m_.loads;
    } else {
      uint64_t done = service_store(rec.vaddr, core_time_);
      max_completion_ = std::max(max_completion_, done);
      ++m_.stores;
    }
    core_time_ += 1;  // the memory instruction itself
    maybe_audit();
  }

  void drain() {
    process_events_until(UINT64_MAX);
    if (opt_.audit_interval) run_audits();
  }

  // ---- load path -------------------------------------------------------

  uint64_t service_load(uint64_t vaddr, uint64_t issue) {
    TranslationResult t = tr_.translate(vaddr, false);
    uint64_t t0 = issue + translation_penalty(t);
    note_refill(t);
    schedule_ptr(t, t0);
    uint64_t line = t.paddr / cfg_.l1.line * cfg_.l1.line;

    uint64_t fr = fill_ready(line);  // completion of an in-flight fill, or 0

    if (PrivateCache::Line* l = l1_.lookup(line)) {
      ++m_.l1_hits;
      ++m_.served_l1;
      deliver_load_value(l->value);
      uint64_t done = t0 + cfg_.l1.rt;
      if (fr > done) {
        ++m_.l2_fill_hits;
        done = fr;
      }
      return done;
    }
    ++m_.l1_misses;

    if (PrivateCache::Line* l = l2_.lookup(line)) {
      ++m_.l2_hits;
      ++m_.served_l2;
      uint64_t v = l->value;
      uint64_t done = t0 + cfg_.l2.rt;
      if (fr > done) {
        ++m_.l2_fill_hits;
        done = fr;
      }
      fill_l1(line, v, false);
      deliver_load_value(v);
      return done;
    }

    ++m_.l2_misses;
    uint64_t done = llc_read(line, t0);
    fills_[line] = done;
    m_.l2_miss_response_cycles += done - t0;
    return done;
  }

  /// L2-missing read: Fig-3b flow against the LLC and memory.
  uint64_t llc_read(uint64_t line, uint64_t t0) {
    ++m_.llc_lookups;
    ++m_.llc_tag_lookups;
    process_events_until(t0 + kLlcRequestPath);

    unsigned slice = llc_.slice_of(line);
    LlcLookup tags = llc_.lookup(line, t0);
    bool ppn_hit = false;
    if (pbs_) {
      ++m_.pb_tag_checks;
      ppn_hit = pbs_->find(line >> 12) >= 0;
    }
    unsigned region_cycle = (ppn_hit && tags.hit) ? 1 : 0;
    uint64_t tag_done = t0 + kLlcRequestPath + cfg_.llc.tag_lat + region_cycle;

    if (!tags.hit) {
      // A row fetch delivered during process_events_until above can move
      // the line into L2 after the front end checked it; the miss merges
      // into that in-flight fill instead of fabricating a memory copy.
      if (cfg_.llc.fetch_to_l2) {
        if (PrivateCache::Line* l = l2_.lookup(line)) {
          ++m_.l2_fill_hits;
          ++m_.served_l2;
          m_.llc_read_service_cycles += tag_done - t0;
          uint64_t v = l->value;
          uint64_t done = std::max(tag_done, fill_ready(line));
          fill_l1(line, v, false);
          deliver_load_value(v);
          return done;
        }
      }
      ++m_.llc_misses;
      ++m_.mem_reads;
      ++m_.served_mem;
      m_.llc_read_service_cycles += tag_done - t0;
      uint64_t v = mem_value(line);
      uint64_t done = t0 + cfg_.mem.rt;
      fill_private(line, v, false);
      deliver_load_value(v);
      return done;
    }

    ++m_.llc_hits;
    if (refilled_pages_.count(page_base(line))) ++m_.llc_hits_refilled_page;

    uint64_t value;
    bool was_dirty = tags.dirty;
    uint64_t done;
    if (pbs_ && ppn_hit) {
      PageBufferSet::Hit h = pbs_->lookup(line >> 12, tags.position);
      if (h.hit) {
        ++m_.pb_reads;
        ++m_.served_pb;
        value = pbs_->serve_read(h.pb, h.slot, tag_done);
        done = claim_bus(slice, t0 + cfg_.pb.rt + region_cycle);
        retire_llc_line(line);
        pbs_->refresh(h.pb, tag_done);
        finish_llc_hit(line, value, was_dirty, done, t0);
        return done;
      }
    }

    // NVM (or SRAM) array service.
    uint64_t start = claim_array_read(slice, tag_done);
    ++m_.llc_data_reads;
    ++m_.served_llc_array;
    value = tags.value;
    done = claim_bus(slice, start + cfg_.llc.data_lat + kLlcResponsePath);
    retire_llc_line(line);
    finish_llc_hit(line, value, was_dirty, done, t0);
    return done;
  }

  void finish_llc_hit(uint64_t line, uint64_t value, bool dirty, uint64_t done,
                      uint64_t t0) {
    m_.llc_read_service_cycles += done - t0;
    fill_private(line, value, dirty);
    deliver_load_value(value);
  }

  /// Victim promotion to L2: the LLC copy is gone once the hit is served.
  void retire_llc_line(uint64_t line) {
    bool had = llc_.invalidate(line);
    assert(had);
    (void)had;
    if (pbs_) pbs_->on_llc_invalidate(line);
  }

  // ---- store path ------------------------------------------------------

  uint64_t service_store(uint64_t vaddr, uint64_t issue) {
    TranslationResult t = tr_.translate(vaddr, true);
    uint64_t t0 = issue + translation_penalty(t);
    note_refill(t);
    schedule_ptr(t, t0);
    uint64_t line = t.paddr / cfg_.l1.line * cfg_.l1.line;
    uint64_t value = ++store_seq_;

    // Whole-line store, acked at the L1/L2 buffers. Allocation (L2 miss)
    // must silently drop any stale victim copy from the LLC.
    if (!l2_.probe(line)) {
      ++m_.llc_tag_lookups;
      if (llc_.probe(line)) {
        ++m_.llc_store_invalidations;
        llc_.invalidate(line);
        if (pbs_) pbs_->on_llc_invalidate(line);
      }
    }
    if (!l1_.write_value(line, value, true)) {
      if (auto ev = l1_.insert(line, value, true)) l1_victim(*ev, t0);
    }
    if (!l2_.write_value(line, value, true)) {
      if (auto ev = l2_.insert(line, value, true)) l2_victim(*ev, t0);
    }
    return t0 + cfg_.l1.rt;
  }

  // ---- fills and evictions ---------------------------------------------

  void fill_l1(uint64_t line, uint64_t value, bool dirty) {
    if (l1_.write_value(line, value, dirty)) return;
    if (auto ev = l1_.insert(line, value, dirty)) l1_victim(*ev, core_time_);
  }

  /// Install a line into L2 and L1 (inclusive fill).
  void fill_private(uint64_t line, uint64_t value, bool dirty) {
    if (!l2_.write_value(line, value, dirty)) {
      if (auto ev = l2_.insert(line, value, dirty)) l2_victim(*ev, core_time_);
    }
    fill_l1(line, value, false);
  }

  void l1_victim(const PrivateCache::Evicted& ev, uint64_t t) {
    if (!ev.dirty) return;
    if (l2_.write_value(ev.addr, ev.value, true)) return;
    // The L2 copy was displaced in between; re-install to keep inclusion.
    if (auto ev2 = l2_.insert(ev.addr, ev.value, true)) l2_victim(*ev2, t);
  }

  /// L2 victim: back-invalidate L1, then hand the line to the LLC.
  void l2_victim(PrivateCache::Evicted ev, uint64_t t) {
    if (auto l1copy = l1_.invalidate(ev.addr)) {
      if (l1copy->dirty) {
        ev.value = l1copy->value;
        ev.dirty = true;
      }
    }
    llc_install(ev.addr, ev.value, ev.dirty, t);
  }

  void llc_install(uint64_t addr, uint64_t value, bool dirty, uint64_t t) {
    ++m_.llc_tag_lookups;
    ++m_.llc_installs;
    ++m_.llc_data_writes;
    LlcInstall res = llc_.install(addr, value, dirty);
    if (res.evicted) {
      ++m_.llc_evictions;
      if (res.evicted_dirty) {
        ++m_.mem_writes;
        memory_[res.evicted_addr] = res.evicted_value;
      }
      if (pbs_) pbs_->on_llc_invalidate(res.evicted_addr);
    }
    if (pbs_) {
      PbInstallOutcome out = pbs_->on_llc_install(
          addr, value, t, [this](uint64_t pa) { return llc_.probe(pa); });
      if (out == PbInstallOutcome::kUpdated ||
          out == PbInstallOutcome::kInstalled)
        ++m_.pb_writes;
    }
    enqueue_llc_write(llc_.slice_of(addr), t);
  }

  // ---- transfer requests -----------------------------------------------

  struct PtrEvent {
    uint64_t due;
    uint64_t seq;
    PtrRequest req;
    bool operator>(const PtrEvent& o) const {
      return due != o.due ? due > o.due : seq > o.seq;
    }
  };

  void note_refill(const TranslationResult& t) {
    if (t.refill && t.refill_eligible)
      refilled_pages_.insert(page_base(t.paddr));
  }

  void schedule_ptr(const TranslationResult& t, uint64_t t0) {
    if (!ptr_machinery_ || !t.ptr) return;
    events_.push({t0 + cfg_.pb.ptr_latency, event_seq_++, *t.ptr});
  }

  void process_events_until(uint64_t limit) {
    while (!events_.empty() && events_.top().due <= limit) {
      PtrEvent ev = events_.top();
      events_.pop();
      deliver_ptr(ev.req, ev.due);
      maybe_audit();
    }
  }

  void deliver_ptr(const PtrRequest& req, uint64_t t) {
    ++m_.ptr_sent;
    RowSnapshot snap = llc_.scan_row(req.region_base);
    m_.record_ptr_population(snap.population());
    unsigned slice = llc_.slice_of(req.region_base);

    if (cfg_.llc.fetch_to_l2) {
      fetch_row_to_l2(snap, t, slice);
      return;
    }

    ++m_.pb_tag_checks;
    int existing = pbs_->find(req.region_base >> 12);
    if (existing >= 0) {
      ++m_.ptr_pb_resident;
      pbs_->refresh(existing, t);
      return;
    }
    ++m_.ptr_tag_scans;  // the population scan happens before gating
    uint64_t scan_done = t + cfg_.llc.tag_lat;
    if (!pbs_->gate(snap.population())) {
      ++m_.ptr_gated;
      return;
    }
    std::optional<size_t> victim = pbs_->select_victim(scan_done);
    if (!victim) {
      ++m_.ptr_dropped_no_victim;
      return;
    }
    uint64_t start = claim_array_read(slice, scan_done);
    ++m_.llc_data_reads;
    ++m_.llc_row_reads;
    unsigned placed = pbs_->promote(*victim, snap, req.trigger_paddr,
                                    start + cfg_.llc.occupancy_read);
    m_.pb_writes += placed;
    ++m_.ptr_promoted;
  }

  /// Alternative design: spill the row's lines into L2 as prefetches.
  void fetch_row_to_l2(const RowSnapshot& snap, uint64_t t, unsigned slice) {
    ++m_.ptr_tag_scans;
    uint64_t scan_done = t + cfg_.llc.tag_lat;
    if (snap.population() < cfg_.pb.threshold) {
      ++m_.ptr_gated;
      return;
    }
    if (mshr_.size() * 10 >= cfg_.core.mshr * 9) {
      ++m_.ptr_dropped_no_victim;  // back-pressure drop
      return;
    }
    uint64_t start = claim_array_read(slice, scan_done);
    ++m_.llc_data_reads;
    ++m_.llc_row_reads;
    ++m_.ptr_promoted;
    uint64_t ready = start + cfg_.llc.data_lat;
    const LayoutGeometry& g = llc_.geometry();
    for (uint64_t pos = 0; pos < g.lines_per_page; ++pos) {
      if (!(snap.valid_mask >> pos & 1)) continue;
      uint64_t line = g.line_address(snap.tag_high, snap.slice, snap.row, pos);
      if (l2_.probe(line)) continue;
      // The insert cascade below can push an L2 victim back into this row
      // and evict a snapshot line before the loop reaches it; such a line
      // is no longer fetchable.
      LlcLookup val = llc_.lookup(line, t);
      if (!val.hit) continue;
      uint64_t slot = claim_bus(slice, ready);
      llc_.invalidate(line);  // exclusive move into L2
      if (!l2_.write_value(line, val.value, val.dirty)) {
        if (auto ev = l2_.insert(line, val.value, val.dirty))
          l2_victim(*ev, slot);
      }
      fills_[line] = slot + kLlcResponsePath;
    }
  }

  // ---- shared resources ------------------------------------------------

  uint64_t claim_array_read(unsigned slice, uint64_t earliest) {
    drain_write_queue(slice, earliest);
    unsigned occ = cfg_.llc.array == LlcArrayKind::kNvm
                       ? cfg_.llc.occupancy_read
                       : 1;
    return llc_.claim_array(slice, earliest, occ);
  }

  /// Writes drain into array idle time; a full queue stalls the enqueuer.
  void enqueue_llc_write(unsigned slice, uint64_t t) {
    drain_write_queue(slice, t);
    std::deque<uint64_t>& q = wq_[slice];
    if (q.size() >= cfg_.llc.write_queue) {
      unsigned occ = write_occupancy();
      uint64_t start = llc_.claim_array(slice, std::max(q.front(), t), occ);
      q.pop_front();
      max_completion_ = std::max(max_completion_, start + occ);
    }
    q.push_back(t);
  }

  void drain_write_queue(unsigned slice, uint64_t horizon) {
    std::deque<uint64_t>& q = wq_[slice];
    unsigned occ = write_occupancy();
    while (!q.empty()) {
      uint64_t start = std::max(q.front(), llc_.busy_until(slice));
      if (start + occ > horizon) break;
      llc_.claim_array(slice, start, occ);
      q.pop_front();
    }
  }

  unsigned write_occupancy() const {
    return cfg_.llc.array == LlcArrayKind::kNvm ? cfg_.llc.occupancy_write : 1;
  }

  /// One response line per cycle toward L2: first free slot at or after
  /// `ready`. Claims are sparse; stale slots are pruned behind a watermark.
  uint64_t claim_bus(unsigned slice, uint64_t ready) {
    std::set<uint64_t>& b = bus_[slice];
    uint64_t slot = ready;
    while (b.count(slot)) ++slot;
    b.insert(slot);
    if (b.size() > 8192) b.erase(b.begin(), b.lower_bound(core_time_));
    return slot;
  }

  // ---- helpers -----------------------------------------------------------

  unsigned translation_penalty(const TranslationResult& t) const {
    // The L1 TLB probe overlaps the L1 cache access; only the excess shows.
    return t.latency - std::min(t.latency, cfg_.core.l1_tlb_rt);
  }

  uint64_t fill_ready(uint64_t line) {
    auto it = fills_.find(line);
    if (it == fills_.end()) return 0;
    if (it->second <= core_time_) {
      fills_.erase(it);
      return 0;
    }
    return it->second;
  }

  uint64_t mem_value(uint64_t line) const {
    auto it = memory_.find(line);
    return it == memory_.end() ? 0 : it->second;
  }

  uint64_t page_base(uint64_t pa) const {
    return pa & ~(page_bytes(cfg_.mem.page_policy) - 1);
  }

  void deliver_load_value(uint64_t v) {
    if (opt_.collect_load_values) load_values_.push_back(v);
  }

  // ---- audits ------------------------------------------------------------

  void maybe_audit() {
    if (!opt_.audit_interval) return;
    if (++event_count_ % opt_.audit_interval == 0) run_audits();
  }

  void run_audits() {
    ++m_.audit_runs;
    uint64_t fails = 0;
    if (pbs_) {
      for (size_t i = 0; i < pbs_->count(); ++i) {
        const PageBufferSet::Buffer& b = pbs_->buffer(i);
        if (!b.used) continue;
        // Slot data mirrors the NVM array wherever the line is LLC-valid.
        for (uint64_t s = 0; s < pbs_->slots(); ++s) {
          if (!(b.occupied >> s & 1)) continue;
          uint64_t addr = pbs_->occupant_address(i, s);
          auto v = llc_.value_of(addr);
          if (v && *v != b.value[s]) ++fails;
        }
        unsigned recount = pbs_->recount_residency(
            i, [this](uint64_t pa) { return llc_.probe(pa); });
        if (recount != b.residency) ++fails;
      }
    }
    // Victim discipline: nothing L2-resident may be LLC-resident, and every
    // L1 line must be covered by L2.
    l2_.for_each_valid([&](uint64_t addr, const PrivateCache::Line&) {
      if (llc_.probe(addr)) ++fails;
    });
    l1_.for_each_valid([&](uint64_t addr, const PrivateCache::Line&) {
      if (!l2_.probe(addr)) ++fails;
    });
    if (!tr_.audit_inclusive()) ++fails;
    m_.audit_failures += fails;
    assert(!(opt_.abort_on_audit_failure && fails) && "audit failure");
  }

  SimConfig cfg_;
  SimOptions opt_;
  RunMetrics m_;
  TranslationUnit tr_;
  LlcCache llc_;
  PrivateCache l1_;
  PrivateCache l2_;
  std::optional<PageBufferSet> pbs_;
  bool ptr_machinery_ = false;

  uint64_t core_time_ = 0;
  uint64_t max_completion_ = 0;
  uint64_t store_seq_ = 0;
  uint64_t event_seq_ = 0;
  uint64_t event_count_ = 0;

  std::priority_queue<PtrEvent, std::vector<PtrEvent>, std::greater<>> events_;
  std::priority_queue<uint64_t, std::vector<uint64_t>, std::greater<>> mshr_;
  std::unordered_map<uint64_t, uint64_t> fills_;   // line -> completion
  std::unordered_map<uint64_t, uint64_t> memory_;  // line -> last value
  std::unordered_set<uint64_t> refilled_pages_;
  std::vector<std::set<uint64_t>> bus_;
  std::vector<std::deque<uint64_t>> wq_;
  std::vector<uint64_t> load_values_;
};

}  // namespace pbsim
