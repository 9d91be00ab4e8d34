// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "echoes/fxp.hpp"

namespace echoes {

enum class AccessKind { Read, Write };

struct PortRequest {
  int port = 0;
  std::uint32_t address = 0;  // word address
  AccessKind kind = AccessKind::Read;
  std::uint32_t data = 0;  // payload for writes
};

struct PortResponse {
  int port = 0;
  bool granted = false;
  std::uint32_t data = 0;  // read data when granted
};

struct AccessResult {
  std::vector<PortResponse> responses;  // same order as the requests
  int conflicts = 0;                    // rejected requests
};

struct AccessRecord {
  std::uint64_t cycle = 0;
  int port = 0;
  int bank = 0;
  AccessKind kind = AccessKind::Read;
  bool granted = false;

  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

/// Counters for one accelerator run. total_cycles is the sum of the other
/// cycle counters; every conflict costs one stall cycle.
struct CycleStats {
  std::uint64_t total_cycles = 0;
  std::uint64_t butterfly_cycles = 0;
  std::uint64_t reorder_cycles = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t overhead_cycles = 0;  // pipeline drain between phases
  std::uint64_t conflicts = 0;
  std::uint64_t butterfly_conflicts = 0;
  std::uint64_t reorder_conflicts = 0;

  friend bool operator==(const CycleStats&, const CycleStats&) = default;
};

/// L2 model: 16 word-interleaved single-cycle banks behind the accelerator's
/// 8 ports (0-3 read, 4-7 write). Same-bank requests in one cycle are
/// serialized: the lowest port wins and the others must retry.
class BankedMemory {
 public:
  static constexpr int kBanks = 16;
  static constexpr int kPorts = 8;
  static constexpr int kReadPorts = 4;
  static constexpr std::size_t kDefaultWords = 65536;  // 256 kB

  explicit BankedMemory(std::size_t words = kDefaultWords);

  std::size_t size_words() const { return storage_.size(); }
  static constexpr int bank_of(std::uint32_t address) { return static_cast<int>(address % kBanks); }

  AccessResult access(std::uint64_t cycle, std::span<const PortRequest> requests);

  // Backdoor access for fixtures; not logged, no conflicts.
  std::uint32_t peek(std::uint32_t address) const;
  void poke(std::uint32_t address, std::uint32_t value);

  const std::vector<AccessRecord>& access_log() const { return log_; }
  void clear_log() { log_.clear(); }
  void set_logging(bool enabled) { logging_ = enabled; }

  const std::vector<std::uint32_t>& words() const { return storage_; }

 private:
  void check_address(std::uint32_t address) const;

  std::vector<std::uint32_t> storage_;
  std::vector<AccessRecord> log_;
  bool logging_ = true;
};

/// Peak bytes/second when every bank moves one word per cycle.
double bandwidth_check(double frequency_hz, int banks = BankedMemory::kBanks);

/// Words occupied by `n` samples of the given format (C64: 2/sample,
/// C32: 1/sample, C16: 2 samples/word).
std::size_t words_for(std::size_t n, DataType dtype);

// Packing of one sample into its word(s). C32 keeps re in the low half; C16
// puts sample 2i in the low half-word, each half-word holding re low / im high.
std::uint32_t pack_c32(const FixedComplex& s);
FixedComplex unpack_c32(std::uint32_t word);
std::uint16_t pack_c16(const FixedComplex& s);
FixedComplex unpack_c16(std::uint16_t half);

void load_samples(BankedMemory& memory, std::uint32_t base_address, std::span<const FixedComplex> samples);
std::vector<FixedComplex> read_samples(const BankedMemory& memory, std::uint32_t base_address, std::size_t n,
                                       DataType dtype);

/// Describes a memory image on disk.
struct ImageDescriptor {
  DataType dtype = DataType::C64;
  std::uint32_t n_points = 0;
  std::uint32_t base_address = 0;
};

// Raw little-endian 32-bit words of the sample region, plus `<path>.json`.
void export_image(const BankedMemory& memory, const ImageDescriptor& desc, const std::filesystem::path& path);
ImageDescriptor import_image(BankedMemory& memory, const std::filesystem::path& path);

}  // namespace echoes
