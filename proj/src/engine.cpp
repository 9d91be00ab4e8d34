// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Cycle-level execution of an FFT job: butterfly stages then the
// bit-reversal pass, each driven by its port schedule against the banked
// memory.

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "echoes/errors.hpp"
#include "echoes/fft.hpp"
#include "echoes/schedule.hpp"

namespace echoes {

namespace {

using WordMap = std::unordered_map<std::uint32_t, std::uint32_t>;

FixedComplex sample_from(const WordMap& regs, std::uint32_t i, DataType dtype) {
  switch (dtype) {
    case DataType::C64:
      return {static_cast<std::int32_t>(regs.at(2 * i)), static_cast<std::int32_t>(regs.at(2 * i + 1)), dtype};
    case DataType::C32:
      return unpack_c32(regs.at(i));
    case DataType::C16:
      return unpack_c16(static_cast<std::uint16_t>(regs.at(i / 2) >> ((i % 2) * 16)));
  }
  return {};
}

void sample_into(WordMap& regs, std::uint32_t i, const FixedComplex& s) {
  switch (s.dtype) {
    case DataType::C64:
      regs[2 * i] = static_cast<std::uint32_t>(s.re);
      regs[2 * i + 1] = static_cast<std::uint32_t>(s.im);
      break;
    case DataType::C32:
      regs[i] = pack_c32(s);
      break;
    case DataType::C16: {
      const int shift = static_cast<int>(i % 2) * 16;
      auto& w = regs[i / 2];
      w = (w & ~(0xFFFFu << shift)) | (static_cast<std::uint32_t>(pack_c16(s)) << shift);
      break;
    }
  }
}

/// Issues one cycle's requests, then replays rejected ones on stall cycles
/// until every request has completed.
class PortDriver {
 public:
  PortDriver(BankedMemory& memory, std::uint32_t base) : memory_(memory), base_(base) {}

  struct Outcome {
    std::uint64_t stalls = 0;
    std::uint64_t conflicts = 0;
  };

  // `reads`/`writes` are word offsets; read data lands in `read_into`.
  Outcome run(const std::vector<std::uint32_t>& reads, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& writes,
              WordMap& read_into) {
    std::vector<PortRequest> pending;
    for (std::size_t k = 0; k < reads.size(); ++k) {
      pending.push_back({static_cast<int>(k), base_ + reads[k], AccessKind::Read, 0});
    }
    for (std::size_t k = 0; k < writes.size(); ++k) {
      pending.push_back({BankedMemory::kReadPorts + static_cast<int>(k), base_ + writes[k].first, AccessKind::Write,
                         writes[k].second});
    }
    Outcome out;
    bool first = true;
    while (first || !pending.empty()) {
      if (!first) ++out.stalls;
      first = false;
      const auto res = memory_.access(cycle_++, pending);
      out.conflicts += static_cast<std::uint64_t>(res.conflicts);
      std::vector<PortRequest> retry;
      for (std::size_t k = 0; k < pending.size(); ++k) {
        if (!res.responses[k].granted) {
          retry.push_back(pending[k]);
        } else if (pending[k].kind == AccessKind::Read) {
          read_into[pending[k].address - base_] = res.responses[k].data;
        }
      }
      pending = std::move(retry);
    }
    return out;
  }

  std::uint64_t cycle() const { return cycle_; }

 private:
  BankedMemory& memory_;
  std::uint32_t base_;
  std::uint64_t cycle_ = 0;
};

}  // namespace

FftResultSummary fft_fixed(const FftJob& job, BankedMemory& memory) {
  validate_job(job, memory.size_words());
  const std::uint32_t n = job.n_points;
  const DataType dtype = job.dtype;
  const int log2n = log2_exact(n);
  const auto& table = TwiddleTable::get(dtype);

  FftResultSummary summary;
  CycleStats& st = summary.stats;
  PortDriver ports(memory, job.base_address);

  for (int s = 0; s < log2n; ++s) {
    const auto sched = schedule_stage(n, dtype, s);
    WordMap in_regs;
    WordMap out_regs;
    for (const auto& cy : sched.cycles) {
      for (const auto& bf : cy.butterflies) {
        const auto w = table.lookup(n, bf.twiddle);
        const auto [top, bottom] = butterfly(sample_from(in_regs, bf.top, dtype), sample_from(in_regs, bf.bottom, dtype),
                                             w, job.scaling, &summary.overflow);
        sample_into(out_regs, bf.top, top);
        sample_into(out_regs, bf.bottom, bottom);
      }
      // Both samples of a packed C16 word always retire in the same cycle.
      for (const auto& bf : cy.butterflies) {
        for (auto i : {bf.top, bf.bottom}) {
          switch (dtype) {
            case DataType::C64: in_regs.erase(2 * i); in_regs.erase(2 * i + 1); break;
            case DataType::C32: in_regs.erase(i); break;
            case DataType::C16: in_regs.erase(i / 2); break;
          }
        }
      }

      std::vector<std::uint32_t> reads;
      std::vector<std::pair<std::uint32_t, std::uint32_t>> writes;
      if (cy.read_word) {
        for (std::uint32_t k = 0; k < kGroupWords; ++k) reads.push_back(*cy.read_word + k);
      }
      if (cy.write_word) {
        for (std::uint32_t k = 0; k < kGroupWords; ++k) {
          const auto it = out_regs.find(*cy.write_word + k);
          if (it == out_regs.end()) throw ModelError("schedule writes a word before it was computed");
          writes.emplace_back(it->first, it->second);
          out_regs.erase(it);
        }
      }
      const auto outcome = ports.run(reads, writes, in_regs);
      st.stall_cycles += outcome.stalls;
      st.butterfly_conflicts += outcome.conflicts;
      summary.max_register_words = std::max({summary.max_register_words, in_regs.size(), out_regs.size()});
    }
    st.butterfly_cycles += sched.issue_cycles;
    st.overhead_cycles += sched.drain_cycles();
    if (job.scaling == ScalingPolicy::DivideByTwoPerStage) ++summary.scaling_stages;
  }

  const auto reorder = schedule_reorder(n, dtype, job.reorder);
  WordMap regs;
  auto permuted_word = [&](std::uint32_t w) -> std::uint32_t {
    switch (dtype) {
      case DataType::C64:
        return regs.at(2 * bit_reverse_index(w / 2, log2n) + w % 2);
      case DataType::C32:
        return regs.at(bit_reverse_index(w, log2n));
      case DataType::C16: {
        std::uint32_t value = 0;
        for (std::uint32_t h = 0; h < 2; ++h) {
          const std::uint32_t src = bit_reverse_index(2 * w + h, log2n);
          const std::uint32_t half = (regs.at(src / 2) >> ((src % 2) * 16)) & 0xFFFFu;
          value |= half << (h * 16);
        }
        return value;
      }
    }
    return 0;
  };
  for (const auto& slot : reorder.slots) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> writes;
    for (auto w : slot.writes) writes.emplace_back(w, permuted_word(w));
    const auto outcome = ports.run(slot.reads, writes, regs);
    st.stall_cycles += outcome.stalls;
    st.reorder_conflicts += outcome.conflicts;
  }
  st.reorder_cycles = reorder.slots.size();
  st.conflicts = st.butterfly_conflicts + st.reorder_conflicts;
  st.total_cycles = ports.cycle();
  return summary;
}

}  // namespace echoes
