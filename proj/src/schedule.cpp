// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/schedule.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>
#include <sstream>

#include "echoes/errors.hpp"
#include "echoes/fft.hpp"

namespace echoes {

namespace {

void check_size(std::uint32_t n_points, DataType dtype) {
  if (!is_power_of_two(n_points) || n_points < 8 || n_points > max_points(dtype)) {
    throw UsageError("unsupported transform size " + std::to_string(n_points) + " for " +
                     std::string(to_string(dtype)));
  }
}

/// Word offsets holding sample `i`.
std::vector<std::uint32_t> sample_words(std::uint32_t i, DataType dtype) {
  switch (dtype) {
    case DataType::C64: return {2 * i, 2 * i + 1};
    case DataType::C32: return {i};
    case DataType::C16: return {i / 2};
  }
  return {};
}

/// Samples stored (wholly or partly) in word `w`.
std::vector<std::uint32_t> word_samples(std::uint32_t w, DataType dtype) {
  switch (dtype) {
    case DataType::C64: return {w / 2};
    case DataType::C32: return {w};
    case DataType::C16: return {2 * w, 2 * w + 1};
  }
  return {};
}

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::string_view to_string(ReorderPolicy p) {
  return p == ReorderPolicy::NaturalOrder ? "natural_order" : "bank_aware";
}

ReorderPolicy parse_reorder_policy(std::string_view name) {
  if (name == "bank_aware") return ReorderPolicy::BankAware;
  if (name == "natural_order") return ReorderPolicy::NaturalOrder;
  throw ConfigError("unknown reorder policy '" + std::string(name) + "'");
}

StageSchedule schedule_stage(std::uint32_t n_points, DataType dtype, int stage) {
  check_size(n_points, dtype);
  const int log2n = log2_exact(n_points);
  if (stage < 0 || stage >= log2n) throw UsageError("stage " + std::to_string(stage) + " out of range");

  const std::uint32_t g = group_samples(dtype);
  const std::uint32_t t = static_cast<std::uint32_t>(butterflies_per_cycle(dtype));
  const std::uint32_t groups = n_points / g;
  const std::uint32_t span = stage_span(n_points, stage);

  StageSchedule sched;
  sched.n_points = n_points;
  sched.dtype = dtype;
  sched.stage = stage;
  sched.span = span;
  sched.issue_cycles = groups;

  auto make = [&](std::uint32_t top, std::uint32_t top_reg, std::uint32_t bottom_reg) {
    return ScheduledButterfly{top, top + span, static_cast<std::uint8_t>(top_reg),
                              static_cast<std::uint8_t>(bottom_reg), stage_twiddle_exponent(n_points, stage, top)};
  };

  if (span < g) {
    // Both wings inside one group: read, compute next cycle, write back.
    sched.cycles.resize(groups + 3);
    for (std::uint32_t q = 0; q < groups; ++q) {
      sched.cycles[q].read_word = q * kGroupWords;
      sched.cycles[q + 3].write_word = q * kGroupWords;
      auto& bfs = sched.cycles[q + 1].butterflies;
      for (std::uint32_t slot = 0; slot < g; ++slot) {
        if ((slot / span) % 2 == 0) bfs.push_back(make(q * g + slot, slot, slot + span));
      }
    }
    return sched;
  }

  // Wing sets: left group, then the right group `span` samples later.
  const std::uint32_t stride = span / g;  // groups between the wings
  sched.cycles.resize(groups + 4);
  std::uint32_t pair = 0;
  for (std::uint32_t block = 0; block < groups; block += 2 * stride) {
    for (std::uint32_t j = 0; j < stride; ++j, ++pair) {
      const std::uint32_t left = block + j;
      const std::uint32_t right = left + stride;
      const std::uint32_t c = 2 * pair;
      sched.cycles[c].read_word = left * kGroupWords;
      sched.cycles[c + 1].read_word = right * kGroupWords;
      for (std::uint32_t half = 0; half < 2; ++half) {
        auto& bfs = sched.cycles[c + 2 + half].butterflies;
        for (std::uint32_t k = 0; k < t; ++k) {
          const std::uint32_t slot = half * t + k;
          bfs.push_back(make(left * g + slot, slot, g + slot));
        }
      }
      sched.cycles[c + 4].write_word = right * kGroupWords;
      sched.cycles[c + 5].write_word = left * kGroupWords;
    }
  }
  return sched;
}

std::vector<std::vector<std::uint32_t>> reorder_atoms(std::uint32_t n_points, DataType dtype) {
  check_size(n_points, dtype);
  const int log2n = log2_exact(n_points);
  const auto n_words = static_cast<std::uint32_t>(words_for(n_points, dtype));

  // Words linked by a moving sample must be read before either is written.
  DisjointSets sets(n_words);
  std::vector<bool> moving(n_words, false);
  for (std::uint32_t i = 0; i < n_points; ++i) {
    const std::uint32_t j = bit_reverse_index(i, log2n);
    if (i == j) continue;
    for (auto w : sample_words(i, dtype)) {
      moving[w] = true;
      sets.unite(w, sample_words(j, dtype).front());
    }
  }
  std::vector<std::vector<std::uint32_t>> atoms;
  std::vector<std::int64_t> atom_of_root(n_words, -1);
  for (std::uint32_t w = 0; w < n_words; ++w) {
    if (!moving[w]) continue;
    const auto r = sets.find(w);
    if (atom_of_root[r] < 0) {
      atom_of_root[r] = static_cast<std::int64_t>(atoms.size());
      atoms.emplace_back();
    }
    atoms[static_cast<std::size_t>(atom_of_root[r])].push_back(w);
  }
  return atoms;
}

namespace {

constexpr std::size_t kReadPorts = BankedMemory::kReadPorts;
constexpr std::size_t kWritePorts = BankedMemory::kPorts - BankedMemory::kReadPorts;

/// Slot-by-slot packing state shared by both reorder policies.
class ReorderPacker {
 public:
  ReorderPacker(std::vector<std::vector<std::uint32_t>> atoms, ReorderPolicy policy)
      : atoms_(std::move(atoms)), policy_(policy), opened_(atoms_.size(), false) {
    for (const auto& a : atoms_) largest_ = std::max(largest_, a.size());
  }

  bool done() const { return opened_count_ == atoms_.size() && gathering_.empty() && complete_.empty() && pending_.empty(); }

  ReorderSlot next() {
    promote();
    slot_ = ReorderSlot{};
    bank_use_.fill(0);
    collisions_ = 0;
    issue_writes();
    issue_reads();
    for (auto it = gathering_.begin(); it != gathering_.end();) {
      if (it->unread.empty()) {
        it->completed_slot = index_;
        complete_.push_back(std::move(*it));
        it = gathering_.erase(it);
      } else {
        ++it;
      }
    }
    slot_.conflict = collisions_ == 1;
    ++index_;
    return std::move(slot_);
  }

 private:
  struct InFlight {
    std::size_t atom = 0;
    std::deque<std::uint32_t> unread;
    std::size_t completed_slot = 0;
    std::size_t idle_slots = 0;
  };
  struct Pending {
    std::uint32_t word;
    std::size_t ready_slot;
  };

  static int bank(std::uint32_t w) { return static_cast<int>(w % BankedMemory::kBanks); }

  // Completed atoms move to the output set (usable next slot) when it has room.
  void promote() {
    while (!complete_.empty() && complete_.front().completed_slot < index_ &&
           out_used_ + atoms_[complete_.front().atom].size() <= kRegisterSetWords) {
      const auto& a = atoms_[complete_.front().atom];
      for (auto w : a) pending_.push_back({w, index_});
      out_used_ += a.size();
      in_used_ -= a.size();
      complete_.pop_front();
    }
  }

  // At most one same-bank pair per slot; `may_collide` says whether this
  // request is allowed to be the one.
  bool admit(std::uint32_t word, bool may_collide) {
    const bool busy = bank_use_[bank(word)] > 0;
    if (busy && (!may_collide || collisions_ > 0)) return false;
    ++bank_use_[bank(word)];
    if (busy) ++collisions_;
    return true;
  }

  void issue_writes() {
    const bool natural = policy_ == ReorderPolicy::NaturalOrder;
    for (auto it = pending_.begin(); it != pending_.end() && slot_.writes.size() < kWritePorts;) {
      if (it->ready_slot <= index_ && admit(it->word, natural)) {
        slot_.writes.push_back(it->word);
        it = pending_.erase(it);
        --out_used_;
      } else if (natural) {
        break;  // strictly in order
      } else {
        ++it;
      }
    }
  }

  void read_from(InFlight& g, bool head_may_collide) {
    const bool natural = policy_ == ReorderPolicy::NaturalOrder;
    const auto before = g.unread.size();
    bool head = true;
    for (auto it = g.unread.begin(); it != g.unread.end() && slot_.reads.size() < kReadPorts;) {
      if (admit(*it, natural || (head && head_may_collide))) {
        slot_.reads.push_back(*it);
        it = g.unread.erase(it);
      } else if (natural) {
        blocked_ = true;
        return;
      } else {
        ++it;
      }
      head = false;
    }
    g.idle_slots = g.unread.size() == before ? g.idle_slots + 1 : 0;
  }

  void open(std::size_t a) {
    opened_[a] = true;
    ++opened_count_;
    in_used_ += atoms_[a].size();
    gathering_.push_back({a, {atoms_[a].begin(), atoms_[a].end()}, 0, 0});
  }

  // True when every bank the atom touches is idle this slot and the read
  // ports can take one word per bank.
  bool fits_now(std::size_t a) const {
    std::array<int, BankedMemory::kBanks> mine{};
    std::size_t distinct = 0;
    for (auto w : atoms_[a]) {
      if (mine[bank(w)]++ == 0) {
        if (bank_use_[bank(w)] != 0) return false;
        ++distinct;
      }
    }
    return slot_.reads.size() + distinct <= kReadPorts;
  }

  void issue_reads() {
    if (policy_ == ReorderPolicy::NaturalOrder) {
      blocked_ = false;
      for (auto& g : gathering_) {
        read_from(g, true);
        if (blocked_) return;
      }
      while (next_natural_ < atoms_.size() && slot_.reads.size() < kReadPorts &&
             in_used_ + atoms_[next_natural_].size() <= kRegisterSetWords) {
        open(next_natural_++);
        read_from(gathering_.back(), true);
        if (blocked_) return;
      }
      return;
    }

    // An atom that made no progress for a whole slot may take the collision.
    bool aged = !gathering_.empty() && gathering_.front().idle_slots >= 1;
    for (auto& g : gathering_) {
      read_from(g, aged);
      aged = false;
    }
    while (first_closed_ < atoms_.size() && opened_[first_closed_]) ++first_closed_;
    // Prefer the widest atoms: they fill the read ports with fewer openings.
    for (int pass = 0; pass < 2 && slot_.reads.size() < kReadPorts; ++pass) {
      for (std::size_t a = first_closed_; a < atoms_.size() && slot_.reads.size() < kReadPorts; ++a) {
        if (opened_[a] || (pass == 0 && atoms_[a].size() < largest_)) continue;
        if (in_used_ + atoms_[a].size() > kRegisterSetWords || !fits_now(a)) continue;
        open(a);
        read_from(gathering_.back(), false);
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> atoms_;
  ReorderPolicy policy_;
  std::vector<bool> opened_;
  std::size_t opened_count_ = 0;
  std::size_t largest_ = 0;
  std::size_t next_natural_ = 0;
  std::size_t first_closed_ = 0;
  std::deque<InFlight> gathering_;
  std::deque<InFlight> complete_;
  std::deque<Pending> pending_;
  std::size_t in_used_ = 0;
  std::size_t out_used_ = 0;
  std::size_t index_ = 0;
  ReorderSlot slot_;
  std::array<int, BankedMemory::kBanks> bank_use_{};
  int collisions_ = 0;
  bool blocked_ = false;
};

}  // namespace

ReorderSchedule schedule_reorder(std::uint32_t n_points, DataType dtype, ReorderPolicy policy) {
  const int log2n = log2_exact(n_points);
  ReorderPacker packer(reorder_atoms(n_points, dtype), policy);

  ReorderSchedule sched;
  sched.n_points = n_points;
  sched.dtype = dtype;
  sched.policy = policy;
  while (!packer.done()) {
    ReorderSlot s = packer.next();
    for (auto w : s.writes) {
      for (auto d : word_samples(w, dtype)) {
        if (dtype == DataType::C64 && w % 2 == 1) continue;  // listed once, on the real word
        const std::uint32_t src = bit_reverse_index(d, log2n);
        if (src != d) s.moves.push_back({src, d});
      }
    }
    if (s.conflict) ++sched.expected_stalls;
    sched.slots.push_back(std::move(s));
  }
  return sched;
}

CycleStats total_cycle_model(std::uint32_t n_points, DataType dtype, ReorderPolicy policy) {
  check_size(n_points, dtype);
  const int log2n = log2_exact(n_points);
  CycleStats st;
  for (int s = 0; s < log2n; ++s) {
    const auto sched = schedule_stage(n_points, dtype, s);
    st.butterfly_cycles += sched.issue_cycles;
    st.overhead_cycles += sched.drain_cycles();
  }
  const auto reorder = schedule_reorder(n_points, dtype, policy);
  st.reorder_cycles = reorder.slots.size();
  st.stall_cycles = reorder.expected_stalls;
  st.conflicts = reorder.expected_stalls;
  st.reorder_conflicts = reorder.expected_stalls;
  st.total_cycles = st.butterfly_cycles + st.overhead_cycles + st.reorder_cycles + st.stall_cycles;
  return st;
}

namespace {

std::string group_list(std::optional<std::uint32_t> first) {
  if (!first) return "-";
  std::ostringstream os;
  for (int k = 0; k < kGroupWords; ++k) os << (k ? "," : "") << *first + k;
  return os.str();
}

std::string word_list(const std::vector<std::uint32_t>& words) {
  if (words.empty()) return "-";
  std::ostringstream os;
  for (std::size_t k = 0; k < words.size(); ++k) os << (k ? "," : "") << words[k];
  return os.str();
}

}  // namespace

std::string dump_schedule(std::uint32_t n_points, DataType dtype, ReorderPolicy policy) {
  const int log2n = log2_exact(n_points);
  std::ostringstream os;
  os << "# schedule n=" << n_points << " dtype=" << to_string(dtype) << '\n';
  for (int s = 0; s < log2n; ++s) {
    const auto sched = schedule_stage(n_points, dtype, s);
    os << "stage " << s << " span " << sched.span << " issue_cycles " << sched.issue_cycles << '\n';
    for (std::size_t c = 0; c < sched.cycles.size(); ++c) {
      const auto& cy = sched.cycles[c];
      os << "cycle " << c << " reads " << group_list(cy.read_word) << " writes " << group_list(cy.write_word)
         << " butterflies ";
      if (cy.butterflies.empty()) os << '-';
      for (std::size_t b = 0; b < cy.butterflies.size(); ++b) {
        const auto& bf = cy.butterflies[b];
        os << (b ? "," : "") << bf.top << ':' << bf.bottom << '@' << bf.twiddle;
      }
      os << '\n';
    }
  }
  const auto reorder = schedule_reorder(n_points, dtype, policy);
  os << "reorder policy " << to_string(policy) << " slots " << reorder.slots.size() << " stalls " << reorder.expected_stalls << '\n';
  for (std::size_t k = 0; k < reorder.slots.size(); ++k) {
    const auto& sl = reorder.slots[k];
    os << "slot " << k << " reads " << word_list(sl.reads) << " writes " << word_list(sl.writes) << " moves ";
    if (sl.moves.empty()) os << '-';
    for (std::size_t m = 0; m < sl.moves.size(); ++m) {
      os << (m ? "," : "") << sl.moves[m].src << '>' << sl.moves[m].dst;
    }
    if (sl.conflict) os << " conflict";
    os << '\n';
  }
  return os.str();
}

}  // namespace echoes
