#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <vector>

#include "pbsim/config.hpp"
#include "pbsim/translation.hpp"

using namespace pbsim;

namespace {

SimConfig tiny_tlb_config() {
  // 2 L1 sets x 2 ways, 4 L2 sets x 2 ways: conflict evictions take a
  // handful of accesses instead of hundreds.
  SimConfig cfg;
  cfg.core.l1_tlb_entries = 4;
  cfg.core.l1_tlb_ways = 2;
  cfg.core.l2_tlb_entries = 8;
  cfg.core.l2_tlb_ways = 2;
  return cfg;
}

uint64_t va(uint64_t vpn, uint64_t off = 0) { return vpn * 4096 + off; }

}  // namespace

TEST_CASE("first touch walks and samples history before the touch",
          "[translation]") {
  SimConfig cfg;
  TranslationUnit tu(cfg);

  TranslationResult r = tu.translate(va(0x100, 0x80), /*is_write=*/false);
  CHECK(r.walked);
  CHECK(r.refill);
  CHECK_FALSE(r.l1_hit);
  CHECK_FALSE(r.l2_hit);
  CHECK(r.latency == cfg.core.l2_tlb_rt + cfg.mem.rt);  // 12 + 190
  // The accessed bit is set by this access only after eligibility was
  // sampled, so a first touch never emits a promotion request.
  CHECK_FALSE(r.refill_eligible);
  CHECK_FALSE(r.ptr.has_value());
  CHECK(r.paddr % 4096 == 0x80);

  const PageTableEntry* pte = tu.pte(0x100);
  REQUIRE(pte != nullptr);
  CHECK(pte->accessed);
  CHECK_FALSE(pte->dirty);
  CHECK(tu.stats().walks == 1);
  CHECK(tu.stats().l1_refills == 1);
  CHECK(tu.stats().ptrs == 0);
}

TEST_CASE("L1 TLB hit costs 2 cycles and preserves the frame",
          "[translation]") {
  SimConfig cfg;
  TranslationUnit tu(cfg);

  TranslationResult first = tu.translate(va(7, 0x40), false);
  TranslationResult again = tu.translate(va(7, 0xC0), false);
  CHECK(again.l1_hit);
  CHECK(again.latency == cfg.core.l1_tlb_rt);
  CHECK_FALSE(again.refill);
  CHECK_FALSE(again.ptr.has_value());
  CHECK(again.paddr == first.paddr - 0x40 + 0xC0);
  CHECK(tu.stats().l1_hits == 1);
}

TEST_CASE("stores set the dirty bit, loads only the accessed bit",
          "[translation]") {
  TranslationUnit tu(SimConfig{});
  tu.translate(va(1), false);
  tu.translate(va(2), true);
  CHECK_FALSE(tu.pte(1)->dirty);
  CHECK(tu.pte(1)->accessed);
  CHECK(tu.pte(2)->dirty);
  CHECK(tu.pte(2)->accessed);
}

TEST_CASE("L2 TLB hit refills at 12 cycles and is promotion-eligible",
          "[translation]") {
  SimConfig cfg;  // default 16-set L1, 85-set L2
  TranslationUnit tu(cfg);
  const uint64_t vpn = 0x230;

  TranslationResult first = tu.translate(va(vpn), false);
  // Four more pages in the same L1 set (vpn mod 16) evict vpn from the
  // 4-way L1 while leaving its L2 set untouched (16 and 85 are coprime).
  for (uint64_t k = 1; k <= 4; ++k) tu.translate(va(vpn + 16 * k), false);

  TranslationResult r = tu.translate(va(vpn, 0x140), false);
  CHECK(r.refill);
  CHECK(r.l2_hit);
  CHECK_FALSE(r.walked);
  CHECK(r.latency == cfg.core.l2_tlb_rt);
  CHECK(r.refill_eligible);
  REQUIRE(r.ptr.has_value());
  CHECK(r.ptr->trigger_paddr == r.paddr);
  CHECK(r.ptr->region_base == (r.paddr & ~uint64_t{4095}));
  CHECK(r.paddr == first.paddr + 0x140);
  CHECK(tu.stats().eligible_refills == 1);
  CHECK(tu.stats().ptrs == 1);
}

TEST_CASE("a re-walk of a previously touched page is eligible",
          "[translation]") {
  SimConfig cfg = tiny_tlb_config();
  TranslationUnit tu(cfg);
  const uint64_t vpn = 100;  // L1 set 0, L2 set 0

  tu.translate(va(vpn), false);
  // Two more vpns congruent mod 4 overflow the 2-way L2 set and push the
  // original entry out of both levels.
  tu.translate(va(vpn + 4), false);
  tu.translate(va(vpn + 8), false);
  REQUIRE(tu.stats().walks == 3);

  TranslationResult r = tu.translate(va(vpn), false);
  CHECK(r.walked);
  CHECK(r.refill_eligible);  // accessed bit survived the TLB evictions
  REQUIRE(r.ptr.has_value());
  CHECK(tu.stats().walks == 4);
  CHECK(tu.stats().eligible_refills == 1);
}

TEST_CASE("refill decision table", "[translation]") {
  SimConfig cfg = tiny_tlb_config();
  TranslationUnit tu(cfg);

  SECTION("untouched page: no history, no promotion") {
    CHECK_FALSE(tu.should_send_ptr(0x999));
  }
  SECTION("page present in the L2 TLB") {
    tu.translate(va(0x11), false);
    CHECK(tu.should_send_ptr(0x11));
  }
  SECTION("accessed bit alone suffices") {
    tu.translate(va(100), false);
    tu.translate(va(104), false);
    tu.translate(va(108), false);  // 100 now out of both TLBs
    CHECK(tu.should_send_ptr(100));
  }
}

TEST_CASE("huge-page chunk ids are 9 or 18 bits wide", "[translation]") {
  CHECK(chunk_bits(PagePolicy::k4K) == 0);
  CHECK(chunk_bits(PagePolicy::k2M) == 9);
  CHECK(chunk_bits(PagePolicy::k1G) == 18);
}

TEST_CASE("same-chunk reuse of a 2MB page emits a single promotion",
          "[translation]") {
  SimConfig cfg;
  cfg.mem.page_policy = PagePolicy::k2M;
  TranslationUnit tu(cfg);
  const uint64_t two_mb = uint64_t{2} << 20;
  const uint64_t base = 0x40 * two_mb;  // vpn 0x40
  const uint64_t chunk5 = base + 5 * 4096;

  tu.translate(chunk5, false);  // cold walk, ineligible
  for (uint64_t k = 1; k <= 4; ++k)  // evict vpn 0x40 from the L1 TLB
    tu.translate((0x40 + 16 * k) * two_mb, false);
  uint64_t before = tu.stats().ptrs;

  TranslationResult refill = tu.translate(chunk5 + 0x100, false);
  REQUIRE(refill.ptr.has_value());
  CHECK(refill.ptr->region_base == refill.paddr - 0x100);

  TranslationResult hit = tu.translate(chunk5 + 0xF00, false);
  CHECK(hit.l1_hit);
  CHECK_FALSE(hit.ptr.has_value());
  CHECK(tu.stats().ptrs - before == 1);
}

TEST_CASE("2MB chunks 0, 3, 0 emit exactly three promotions",
          "[translation]") {
  SimConfig cfg;
  cfg.mem.page_policy = PagePolicy::k2M;
  TranslationUnit tu(cfg);
  const uint64_t two_mb = uint64_t{2} << 20;
  const uint64_t base = 0x51 * two_mb;

  tu.translate(base, false);
  for (uint64_t k = 1; k <= 4; ++k)
    tu.translate((0x51 + 16 * k) * two_mb, false);
  uint64_t before = tu.stats().ptrs;

  // Refill at chunk 0 promotes, then each chunk change promotes again.
  TranslationResult c0 = tu.translate(base, false);
  TranslationResult c3 = tu.translate(base + 3 * 4096 + 0x20, false);
  TranslationResult c0b = tu.translate(base + 0x80, false);

  CHECK(c0.refill);
  CHECK(c3.l1_hit);
  CHECK(c0b.l1_hit);
  REQUIRE(c0.ptr.has_value());
  REQUIRE(c3.ptr.has_value());
  REQUIRE(c0b.ptr.has_value());
  uint64_t frame_base = c0.paddr;
  CHECK(c0.ptr->region_base == frame_base);
  CHECK(c3.ptr->region_base == frame_base + 3 * 4096);
  CHECK(c0b.ptr->region_base == frame_base);
  CHECK(tu.stats().ptrs - before == 3);
}

TEST_CASE("1GB pages track chunks across the full 18-bit range",
          "[translation]") {
  SimConfig cfg;
  cfg.mem.page_policy = PagePolicy::k1G;
  TranslationUnit tu(cfg);
  const uint64_t one_gb = uint64_t{1} << 30;
  const uint64_t base = 3 * one_gb;
  const uint64_t high_chunk = 200000;  // needs all 18 bits

  TranslationResult walk = tu.translate(base, false);
  CHECK(walk.walked);
  TranslationResult far = tu.translate(base + high_chunk * 4096, false);
  CHECK(far.l1_hit);
  REQUIRE(far.ptr.has_value());
  CHECK(far.ptr->region_base == walk.paddr + high_chunk * 4096);
  TranslationResult back = tu.translate(base + 0x40, false);
  REQUIRE(back.ptr.has_value());
  CHECK(back.ptr->region_base == walk.paddr);
}

TEST_CASE("L1 TLB stays included in L2 under conflict pressure",
          "[translation]") {
  SimConfig cfg = tiny_tlb_config();
  TranslationUnit tu(cfg);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    tu.translate(va(rng() % 64), i % 3 == 0);
    REQUIRE(tu.audit_inclusive());
  }
}

TEST_CASE("frame allocation is deterministic, seeded, and injective",
          "[translation]") {
  SimConfig cfg;
  CHECK(TranslationUnit(cfg).frame_pool() == (uint64_t{64} << 30) / 4096);

  auto frames_for = [](uint64_t seed) {
    SimConfig c;
    c.core.seed = seed;
    TranslationUnit tu(c);
    std::vector<uint64_t> out;
    for (uint64_t vpn = 0; vpn < 1000; ++vpn)
      out.push_back(tu.translate(va(vpn), false).paddr / 4096);
    return out;
  };

  std::vector<uint64_t> a = frames_for(42);
  std::vector<uint64_t> b = frames_for(42);
  std::vector<uint64_t> c = frames_for(43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::set<uint64_t>(a.begin(), a.end()).size() == a.size());
}

TEST_CASE("exhausting physical frames throws", "[translation]") {
  SimConfig cfg;
  cfg.mem.size_gb = 1;
  cfg.mem.page_policy = PagePolicy::k1G;  // exactly one frame
  TranslationUnit tu(cfg);
  tu.translate(0, false);
  CHECK_THROWS(tu.translate(uint64_t{1} << 30, false));
}
