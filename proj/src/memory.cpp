// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/memory.hpp"

#include <array>
#include <fstream>
#include <string>

#include <json.hpp>

#include "echoes/errors.hpp"

namespace echoes {

BankedMemory::BankedMemory(std::size_t words) : storage_(words, 0u) {
  if (words == 0 || words % kBanks != 0) throw ModelError("memory size must be a positive multiple of 16 words");
}

void BankedMemory::check_address(std::uint32_t address) const {
  if (address >= storage_.size()) {
    throw ModelError("address " + std::to_string(address) + " outside " + std::to_string(storage_.size()) +
                     "-word memory");
  }
}

AccessResult BankedMemory::access(std::uint64_t cycle, std::span<const PortRequest> requests) {
  if (requests.size() > kPorts) throw UsageError("more requests than ports");
  std::array<bool, kPorts> port_used{};
  for (const auto& r : requests) {
    if (r.port < 0 || r.port >= kPorts) throw UsageError("invalid port " + std::to_string(r.port));
    if (port_used[r.port]) throw UsageError("two requests on port " + std::to_string(r.port));
    port_used[r.port] = true;
    const bool read_port = r.port < kReadPorts;
    if (read_port != (r.kind == AccessKind::Read)) {
      throw UsageError("port " + std::to_string(r.port) + " cannot serve this access kind");
    }
    check_address(r.address);
  }

  // Lowest port per bank wins.
  std::array<int, kBanks> winner;
  winner.fill(kPorts);
  for (const auto& r : requests) {
    auto& w = winner[bank_of(r.address)];
    if (r.port < w) w = r.port;
  }

  AccessResult result;
  result.responses.reserve(requests.size());
  for (const auto& r : requests) {
    const int bank = bank_of(r.address);
    PortResponse resp{r.port, winner[bank] == r.port, 0};
    if (resp.granted) {
      if (r.kind == AccessKind::Read) {
        resp.data = storage_[r.address];
      } else {
        storage_[r.address] = r.data;
      }
    } else {
      ++result.conflicts;
    }
    if (logging_) log_.push_back({cycle, r.port, bank, r.kind, resp.granted});
    result.responses.push_back(resp);
  }
  return result;
}

std::uint32_t BankedMemory::peek(std::uint32_t address) const {
  check_address(address);
  return storage_[address];
}

void BankedMemory::poke(std::uint32_t address, std::uint32_t value) {
  check_address(address);
  storage_[address] = value;
}

double bandwidth_check(double frequency_hz, int banks) { return banks * 4.0 * frequency_hz; }

std::size_t words_for(std::size_t n, DataType dtype) {
  switch (dtype) {
    case DataType::C64: return 2 * n;
    case DataType::C32: return n;
    case DataType::C16: return (n + 1) / 2;
  }
  return 0;
}

std::uint32_t pack_c32(const FixedComplex& s) {
  return (static_cast<std::uint32_t>(static_cast<std::uint16_t>(s.im)) << 16) |
         static_cast<std::uint16_t>(s.re);
}

FixedComplex unpack_c32(std::uint32_t word) {
  return {static_cast<std::int16_t>(word & 0xFFFFu), static_cast<std::int16_t>(word >> 16), DataType::C32};
}

std::uint16_t pack_c16(const FixedComplex& s) {
  return static_cast<std::uint16_t>((static_cast<std::uint8_t>(s.im) << 8) | static_cast<std::uint8_t>(s.re));
}

FixedComplex unpack_c16(std::uint16_t half) {
  return {static_cast<std::int8_t>(half & 0xFFu), static_cast<std::int8_t>(half >> 8), DataType::C16};
}

void load_samples(BankedMemory& memory, std::uint32_t base_address, std::span<const FixedComplex> samples) {
  if (samples.empty()) return;
  const DataType dtype = samples.front().dtype;
  const std::size_t words = words_for(samples.size(), dtype);
  if (std::size_t{base_address} + words > memory.size_words()) {
    throw ModelError("sample array does not fit in memory");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.dtype != dtype) throw UsageError("load_samples: mixed data types");
    switch (dtype) {
      case DataType::C64:
        memory.poke(base_address + 2 * i, static_cast<std::uint32_t>(s.re));
        memory.poke(base_address + 2 * i + 1, static_cast<std::uint32_t>(s.im));
        break;
      case DataType::C32:
        memory.poke(base_address + i, pack_c32(s));
        break;
      case DataType::C16: {
        const auto addr = static_cast<std::uint32_t>(base_address + i / 2);
        const int shift = (i % 2) * 16;
        std::uint32_t w = memory.peek(addr);
        w = (w & ~(0xFFFFu << shift)) | (static_cast<std::uint32_t>(pack_c16(s)) << shift);
        memory.poke(addr, w);
        break;
      }
    }
  }
}

std::vector<FixedComplex> read_samples(const BankedMemory& memory, std::uint32_t base_address, std::size_t n,
                                       DataType dtype) {
  if (std::size_t{base_address} + words_for(n, dtype) > memory.size_words()) {
    throw ModelError("sample array exceeds memory");
  }
  std::vector<FixedComplex> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (dtype) {
      case DataType::C64:
        out.push_back({static_cast<std::int32_t>(memory.peek(base_address + 2 * i)),
                       static_cast<std::int32_t>(memory.peek(base_address + 2 * i + 1)), dtype});
        break;
      case DataType::C32:
        out.push_back(unpack_c32(memory.peek(base_address + i)));
        break;
      case DataType::C16: {
        const std::uint32_t w = memory.peek(base_address + i / 2);
        out.push_back(unpack_c16(static_cast<std::uint16_t>(w >> ((i % 2) * 16))));
        break;
      }
    }
  }
  return out;
}

void export_image(const BankedMemory& memory, const ImageDescriptor& desc, const std::filesystem::path& path) {
  const std::size_t words = words_for(desc.n_points, desc.dtype);
  if (std::size_t{desc.base_address} + words > memory.size_words()) throw ModelError("image region exceeds memory");
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw ModelError("cannot write " + path.string());
  for (std::size_t i = 0; i < words; ++i) {
    const std::uint32_t w = memory.peek(static_cast<std::uint32_t>(desc.base_address + i));
    const char bytes[4] = {static_cast<char>(w & 0xFF), static_cast<char>((w >> 8) & 0xFF),
                           static_cast<char>((w >> 16) & 0xFF), static_cast<char>((w >> 24) & 0xFF)};
    bin.write(bytes, 4);
  }
  nlohmann::ordered_json j;
  j["dtype"] = std::string(to_string(desc.dtype));
  j["n_points"] = desc.n_points;
  j["base_address"] = desc.base_address;
  j["words"] = words;
  std::ofstream side(path.string() + ".json");
  side << j.dump(2) << '\n';
}

ImageDescriptor import_image(BankedMemory& memory, const std::filesystem::path& path) {
  std::ifstream side(path.string() + ".json");
  if (!side) throw ModelError("missing image descriptor for " + path.string());
  const auto j = nlohmann::json::parse(side);
  ImageDescriptor desc;
  desc.dtype = parse_data_type(j.at("dtype").get<std::string>());
  desc.n_points = j.at("n_points").get<std::uint32_t>();
  desc.base_address = j.at("base_address").get<std::uint32_t>();
  const std::size_t words = words_for(desc.n_points, desc.dtype);

  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw ModelError("cannot read " + path.string());
  for (std::size_t i = 0; i < words; ++i) {
    unsigned char b[4];
    if (!bin.read(reinterpret_cast<char*>(b), 4)) throw ModelError("image file shorter than descriptor");
    memory.poke(static_cast<std::uint32_t>(desc.base_address + i),
                static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                    (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24));
  }
  return desc;
}

}  // namespace echoes
