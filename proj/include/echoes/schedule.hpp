// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoes/fxp.hpp"
#include "echoes/memory.hpp"

namespace echoes {

/// Every port transfer moves one group of 4 consecutive words.
inline constexpr int kGroupWords = 4;
/// Words held by one set of butterfly registers (four C64 samples).
inline constexpr int kRegisterSetWords = 8;

/// Samples carried by one 4-word group: 2 (C64), 4 (C32), 8 (C16).
constexpr std::uint32_t group_samples(DataType t) { return 2u * static_cast<std::uint32_t>(butterflies_per_cycle(t)); }

struct ScheduledButterfly {
  std::uint32_t top = 0;     // sample index of the left wing
  std::uint32_t bottom = 0;  // sample index of the right wing
  std::uint8_t top_reg = 0;  // sample slots in the input register set
  std::uint8_t bottom_reg = 0;
  std::uint32_t twiddle = 0;  // exponent k of exp(-2*pi*i*k/n)
};

struct StageCycle {
  std::optional<std::uint32_t> read_word;   // first word offset read on ports 0-3
  std::optional<std::uint32_t> write_word;  // first word offset written on ports 4-7
  std::vector<ScheduledButterfly> butterflies;
};

/// Port plan for one butterfly stage. Word offsets are relative to the job's
/// base address. Data read in cycle c is usable by the butterfly unit from
/// cycle c+1. When the butterfly span is at least one group, left-wing and
/// right-wing groups are read on alternate cycles and paired in the input
/// registers; the pair retires over the next two cycles and is written back
/// right wings first. Otherwise each group holds complete butterflies and is
/// written three cycles after it was read. Both orders keep the read and
/// write groups of any cycle in different bank quads.
struct StageSchedule {
  std::uint32_t n_points = 0;
  DataType dtype = DataType::C64;
  int stage = 0;
  std::uint32_t span = 0;
  std::size_t issue_cycles = 0;  // cycles that read a group
  std::vector<StageCycle> cycles;

  /// Trailing cycles that only compute or write back.
  std::size_t drain_cycles() const { return cycles.size() - issue_cycles; }
};

struct ReorderMove {
  std::uint32_t src = 0;  // sample index
  std::uint32_t dst = 0;

  friend bool operator==(const ReorderMove&, const ReorderMove&) = default;
};

struct ReorderSlot {
  std::vector<std::uint32_t> reads;   // word offsets on ports 0, 1, ...
  std::vector<std::uint32_t> writes;  // word offsets on ports 4, 5, ...
  std::vector<ReorderMove> moves;     // sample moves landed by this slot's writes
  bool conflict = false;              // exactly one same-bank pair this slot
};

/// How the bit-reversal pass picks its accesses.
///  - BankAware: looks ahead over all pending word sets and only issues
///    requests to idle banks; a set that stalled for a full slot may force
///    one collision.
///  - NaturalOrder: word sets strictly in address order, reads and writes in
///    FIFO order; the first request that would add a second collision closes
///    the slot.
enum class ReorderPolicy { BankAware, NaturalOrder };

std::string_view to_string(ReorderPolicy p);
ReorderPolicy parse_reorder_policy(std::string_view name);

/// Bit-reversal pass. Words are grouped into closed sets ("atoms") that are
/// read completely before any of them is rewritten, so the permutation runs
/// in place. Gathering atoms live in the input register set, permuted atoms
/// wait in the output set. A slot holds at most one same-bank pair, which
/// costs exactly one stall cycle.
struct ReorderSchedule {
  std::uint32_t n_points = 0;
  DataType dtype = DataType::C64;
  ReorderPolicy policy = ReorderPolicy::BankAware;
  std::vector<ReorderSlot> slots;
  std::size_t expected_stalls = 0;
};

StageSchedule schedule_stage(std::uint32_t n_points, DataType dtype, int stage);
/// Connected word sets of the bit-reversal permutation, ordered by lowest
/// word. Words whose samples all stay in place belong to none.
std::vector<std::vector<std::uint32_t>> reorder_atoms(std::uint32_t n_points, DataType dtype);

ReorderSchedule schedule_reorder(std::uint32_t n_points, DataType dtype,
                                 ReorderPolicy policy = ReorderPolicy::BankAware);

/// Cycle prediction from the schedules alone.
CycleStats total_cycle_model(std::uint32_t n_points, DataType dtype,
                             ReorderPolicy policy = ReorderPolicy::BankAware);

/// One line per cycle: reads, writes, butterflies with twiddle exponents.
std::string dump_schedule(std::uint32_t n_points, DataType dtype,
                          ReorderPolicy policy = ReorderPolicy::BankAware);

}  // namespace echoes
