// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "echoes/fft.hpp"
#include "echoes/schedule.hpp"

namespace echoes {
namespace {

std::vector<std::uint32_t> words_of(std::uint32_t sample, DataType t) {
  switch (t) {
    case DataType::C64: return {2 * sample, 2 * sample + 1};
    case DataType::C32: return {sample};
    case DataType::C16: return {sample / 2};
  }
  return {};
}

std::set<int> banks(const std::vector<std::uint32_t>& words) {
  std::set<int> b;
  for (auto w : words) b.insert(BankedMemory::bank_of(w));
  return b;
}

struct Case {
  DataType dtype;
  std::uint32_t n;
};

std::vector<Case> grid() {
  std::vector<Case> g;
  for (auto t : {DataType::C64, DataType::C32, DataType::C16}) {
    for (std::uint32_t n = 8; n <= max_points(t); n *= 2) g.push_back({t, n});
  }
  return g;
}

TEST(StageScheduleTest, C64N16FirstStage) {
  const auto s = schedule_stage(16, DataType::C64, 0);
  EXPECT_EQ(s.span, 8u);
  EXPECT_EQ(s.issue_cycles, 8u);
  std::size_t bfs = 0;
  for (const auto& c : s.cycles) bfs += c.butterflies.size();
  EXPECT_EQ(bfs, 8u);
}

TEST(StageScheduleTest, C16N16UsesTwoIssueCycles) {
  const auto s = schedule_stage(16, DataType::C16, 0);
  EXPECT_EQ(s.issue_cycles, 2u);
  for (const auto& c : s.cycles) EXPECT_LE(c.butterflies.size(), 4u);
}

TEST(StageScheduleTest, StructuralProperties) {
  for (const auto& [t, n] : grid()) {
    const int log2n = log2_exact(n);
    const std::size_t words = words_for(n, t);
    for (int stage = 0; stage < log2n; ++stage) {
      SCOPED_TRACE(std::string(to_string(t)) + " n=" + std::to_string(n) + " stage=" + std::to_string(stage));
      const auto s = schedule_stage(n, t, stage);
      ASSERT_EQ(s.issue_cycles, words / kGroupWords);
      ASSERT_TRUE(s.drain_cycles() == 3 || s.drain_cycles() == 4);

      std::map<std::uint32_t, std::size_t> read_at, write_at;
      std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> bf_at;
      std::size_t issued = 0;
      for (std::size_t c = 0; c < s.cycles.size(); ++c) {
        const auto& cy = s.cycles[c];
        std::vector<std::uint32_t> touched;
        if (cy.read_word) {
          ++issued;
          ASSERT_EQ(*cy.read_word % kGroupWords, 0u);
          for (std::uint32_t k = 0; k < kGroupWords; ++k) {
            ASSERT_TRUE(read_at.emplace(*cy.read_word + k, c).second);
            touched.push_back(*cy.read_word + k);
          }
        }
        if (cy.write_word) {
          ASSERT_EQ(*cy.write_word % kGroupWords, 0u);
          for (std::uint32_t k = 0; k < kGroupWords; ++k) {
            ASSERT_TRUE(write_at.emplace(*cy.write_word + k, c).second);
            touched.push_back(*cy.write_word + k);
          }
        }
        ASSERT_EQ(banks(touched).size(), touched.size()) << "bank conflict in cycle " << c;
        ASSERT_LE(cy.butterflies.size(), static_cast<std::size_t>(butterflies_per_cycle(t)));
        for (const auto& bf : cy.butterflies) {
          ASSERT_EQ(bf.bottom, bf.top + s.span);
          ASSERT_EQ((bf.top / s.span) % 2, 0u);
          ASSERT_EQ(bf.twiddle, stage_twiddle_exponent(n, stage, bf.top));
          ASSERT_TRUE(bf_at.emplace(std::pair(bf.top, bf.bottom), c).second);
        }
      }
      ASSERT_EQ(issued, s.issue_cycles);
      ASSERT_EQ(read_at.size(), words);
      ASSERT_EQ(write_at.size(), words);
      ASSERT_EQ(bf_at.size(), n / 2);
      // Operands arrive before the butterfly; results leave after it.
      for (const auto& [pair, c] : bf_at) {
        for (auto i : {pair.first, pair.second}) {
          for (auto w : words_of(i, t)) {
            ASSERT_LT(read_at.at(w), c);
            ASSERT_GT(write_at.at(w), c);
          }
        }
      }
    }
  }
}

TEST(ReorderScheduleTest, N8Swaps) {
  const auto r = schedule_reorder(8, DataType::C64);
  std::set<std::pair<std::uint32_t, std::uint32_t>> moves;
  for (const auto& s : r.slots) {
    for (const auto& m : s.moves) moves.emplace(m.src, m.dst);
  }
  const std::set<std::pair<std::uint32_t, std::uint32_t>> expected{{1, 4}, {4, 1}, {3, 6}, {6, 3}};
  EXPECT_EQ(moves, expected);
  EXPECT_EQ(r.expected_stalls, 0u);
}

TEST(ReorderScheduleTest, StructuralProperties) {
  for (auto policy : {ReorderPolicy::BankAware, ReorderPolicy::NaturalOrder}) {
    for (const auto& [t, n] : grid()) {
      SCOPED_TRACE(std::string(to_string(t)) + " n=" + std::to_string(n) + " " + std::string(to_string(policy)));
      const int log2n = log2_exact(n);
      const auto r = schedule_reorder(n, t, policy);
      std::map<std::uint32_t, std::size_t> read_at, write_at;
      std::set<std::uint32_t> moved;
      std::size_t conflicts = 0;
      for (std::size_t k = 0; k < r.slots.size(); ++k) {
        const auto& s = r.slots[k];
        ASSERT_LE(s.reads.size(), 4u);
        ASSERT_LE(s.writes.size(), 4u);
        for (auto w : s.reads) ASSERT_TRUE(read_at.emplace(w, k).second);
        for (auto w : s.writes) ASSERT_TRUE(write_at.emplace(w, k).second);
        std::vector<std::uint32_t> all = s.reads;
        all.insert(all.end(), s.writes.begin(), s.writes.end());
        const std::size_t collisions = all.size() - banks(all).size();
        ASSERT_LE(collisions, 1u);
        ASSERT_EQ(s.conflict, collisions == 1);
        if (s.conflict) ++conflicts;
        for (const auto& m : s.moves) {
          ASSERT_EQ(m.dst, bit_reverse_index(m.src, log2n));
          ASSERT_NE(m.src, m.dst);
          ASSERT_TRUE(moved.insert(m.src).second);
        }
      }
      ASSERT_EQ(conflicts, r.expected_stalls);
      for (std::uint32_t i = 0; i < n; ++i) {
        ASSERT_EQ(moved.count(i) == 1, bit_reverse_index(i, log2n) != i) << i;
      }
      // Every written word was read in an earlier slot; read-only words stay put.
      for (const auto& [w, k] : write_at) ASSERT_LT(read_at.at(w), k);
      for (const auto& [w, k] : read_at) ASSERT_EQ(write_at.count(w), 1u);
      if (policy == ReorderPolicy::BankAware) {
        ASSERT_EQ(r.expected_stalls, 0u);
      }
    }
  }
}

TEST(ReorderScheduleTest, PalindromesNeverMove) {
  const auto r = schedule_reorder(64, DataType::C32);
  for (const auto& s : r.slots) {
    for (const auto& m : s.moves) EXPECT_NE(bit_reverse_index(m.src, 6), m.src);
  }
}

TEST(ReorderScheduleTest, FrozenStallCounts) {
  EXPECT_EQ(schedule_reorder(512, DataType::C64, ReorderPolicy::BankAware).expected_stalls, 0u);
  EXPECT_EQ(schedule_reorder(512, DataType::C64, ReorderPolicy::NaturalOrder).expected_stalls, 265u);
  EXPECT_EQ(schedule_reorder(512, DataType::C64, ReorderPolicy::NaturalOrder).slots.size(), 374u);
}

TEST(CycleModelTest, ButterflyCyclesClosedForm) {
  for (const auto& [t, n] : grid()) {
    const auto st = total_cycle_model(n, t);
    const std::uint64_t log2n = static_cast<std::uint64_t>(log2_exact(n));
    EXPECT_EQ(st.butterfly_cycles, log2n * n / 2 / static_cast<std::uint64_t>(butterflies_per_cycle(t)));
    EXPECT_EQ(st.total_cycles, st.butterfly_cycles + st.reorder_cycles + st.stall_cycles + st.overhead_cycles);
  }
  EXPECT_EQ(total_cycle_model(512, DataType::C64).butterfly_cycles, 2304u);
  EXPECT_EQ(total_cycle_model(1024, DataType::C32).butterfly_cycles, 2560u);
  EXPECT_EQ(total_cycle_model(2048, DataType::C16).butterfly_cycles, 2816u);
}

TEST(CycleModelTest, FrozenTotals) {
  EXPECT_EQ(total_cycle_model(512, DataType::C64).total_cycles, 2585u);
  EXPECT_EQ(total_cycle_model(1024, DataType::C32).total_cycles, 2862u);
  EXPECT_EQ(total_cycle_model(2048, DataType::C16).total_cycles, 3119u);
}

TEST(PolicyNameTest, RoundTrip) {
  for (auto p : {ReorderPolicy::BankAware, ReorderPolicy::NaturalOrder}) {
    EXPECT_EQ(parse_reorder_policy(to_string(p)), p);
  }
}

TEST(DumpTest, N8Header) {
  const auto d = dump_schedule(8, DataType::C64);
  EXPECT_EQ(d.rfind("# schedule n=8 dtype=C64\nstage 0 span 4 issue_cycles 4\n", 0), 0u);
  EXPECT_NE(d.find("cycle 2 reads 4,5,6,7 writes - butterflies 0:4@0\n"), std::string::npos);
  EXPECT_NE(d.find("reorder policy bank_aware slots 3 stalls 0\n"), std::string::npos);
  EXPECT_NE(d.find("slot 1 reads 6,7,12,13 writes 2,3,8,9 moves 4>1,1>4\n"), std::string::npos);
}

}  // namespace
}  // namespace echoes
