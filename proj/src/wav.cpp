// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <fstream>
#include <iterator>

#include "echoes/i2s.hpp"

namespace echoes {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  put_u16(out, static_cast<std::uint16_t>(v & 0xffff));
  put_u16(out, static_cast<std::uint16_t>(v >> 16));
}

std::uint32_t get_le(const std::string& in, std::size_t at, int bytes) {
  if (at + static_cast<std::size_t>(bytes) > in.size()) throw ConfigError("truncated WAV file");
  std::uint32_t v = 0;
  for (int b = bytes - 1; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(in[at + static_cast<std::size_t>(b)]);
  return v;
}

}  // namespace

void write_wav(const WavData& wav, const std::filesystem::path& path) {
  if (wav.channels == 0 || wav.samples.size() % wav.channels != 0) {
    throw UsageError("sample count does not fill whole frames");
  }
  const auto data_bytes = static_cast<std::uint32_t>(wav.samples.size() * 2);
  std::string out = "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, wav.channels);
  put_u32(out, wav.sample_rate);
  put_u32(out, wav.sample_rate * wav.channels * 2u);
  put_u16(out, static_cast<std::uint16_t>(wav.channels * 2u));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (auto s : wav.samples) put_u16(out, static_cast<std::uint16_t>(s));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path.string());
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < 12 || in.compare(0, 4, "RIFF") != 0 || in.compare(8, 4, "WAVE") != 0) {
    throw ConfigError(path.string() + " is not a RIFF/WAVE file");
  }
  WavData wav;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= in.size()) {
    const std::string id = in.substr(at, 4);
    const std::uint32_t size = get_le(in, at + 4, 4);
    const std::size_t body = at + 8;
    if (body + size > in.size()) throw ConfigError("truncated WAV chunk '" + id + "'");
    if (id == "fmt ") {
      if (get_le(in, body, 2) != 1 || get_le(in, body + 14, 2) != 16) {
        throw ConfigError("only 16-bit PCM WAV is supported");
      }
      wav.channels = static_cast<std::uint16_t>(get_le(in, body + 2, 2));
      wav.sample_rate = get_le(in, body + 4, 4);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ConfigError("WAV data chunk before fmt chunk");
      wav.samples.resize(size / 2);
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        wav.samples[i] = static_cast<std::int16_t>(get_le(in, body + 2 * i, 2));
      }
      return wav;
    }
    at = body + size + (size & 1u);
  }
  throw ConfigError("WAV file has no data chunk");
}

WavData payloads_to_wav(const BusConfig& c, std::span<const FramePayload> payloads) {
  validate_bus(c);
  const auto devices = static_cast<std::size_t>(c.n_devices);
  if (payloads.size() % devices != 0) throw UsageError("payloads do not fill whole sample periods");
  const int shift = 16 - channel_bits(c);
  WavData wav;
  wav.channels = static_cast<std::uint16_t>(2 * devices);
  wav.sample_rate = c.sample_rate;
  wav.samples.reserve(payloads.size() * 2);
  for (const auto& p : payloads) {
    if (shift < 0) throw UsageError("channel wider than the 16-bit container");
    wav.samples.push_back(static_cast<std::int16_t>(static_cast<std::uint16_t>(p.left << shift)));
    wav.samples.push_back(static_cast<std::int16_t>(static_cast<std::uint16_t>(p.right << shift)));
  }
  return wav;
}

std::vector<FramePayload> wav_to_payloads(const BusConfig& c, const WavData& wav) {
  validate_bus(c);
  if (wav.channels != 2 * c.n_devices) {
    throw ConfigError("WAV has " + std::to_string(wav.channels) + " channels, bus needs " +
                      std::to_string(2 * c.n_devices));
  }
  const int shift = 16 - channel_bits(c);
  const std::uint32_t mask = (1u << channel_bits(c)) - 1u;
  std::vector<FramePayload> out;
  out.reserve(wav.samples.size() / 2);
  for (std::size_t i = 0; i + 1 < wav.samples.size(); i += 2) {
    const auto l = static_cast<std::uint16_t>(wav.samples[i]);
    const auto r = static_cast<std::uint16_t>(wav.samples[i + 1]);
    out.push_back({static_cast<int>((i / 2) % static_cast<std::size_t>(c.n_devices)),
                   (static_cast<std::uint32_t>(l) >> shift) & mask, (static_cast<std::uint32_t>(r) >> shift) & mask});
  }
  return out;
}

}  // namespace echoes
