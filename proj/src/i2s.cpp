// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/i2s.hpp"

#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

namespace echoes {

namespace {

template <typename E>
E parse_choice(std::string_view name, std::initializer_list<std::pair<std::string_view, E>> choices,
               std::string_view what) {
  for (const auto& [key, value] : choices) {
    if (key == name) return value;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

struct SlotPlan {
  int driver = kNoDriver;
  std::uint8_t bit = 0;
};

bool is_dsp(const BusConfig& c) { return c.mode == BusMode::TdmDsp; }

// Word-select / frame-sync level at offset `o` of a sample period.
std::uint8_t fsync_level(const BusConfig& c, std::uint32_t o) {
  const auto k = static_cast<std::uint32_t>(channel_bits(c));
  if (!is_dsp(c)) return o >= static_cast<std::uint32_t>(c.n_devices) * k ? 1 : 0;
  if (c.fsync_style == FsyncStyle::Pulse) return o == 0 ? 1 : 0;
  return o < k ? 1 : 0;
}

std::uint8_t idle_fsync(const BusConfig& c) { return is_dsp(c) ? 0 : 1; }

struct SlotRole {
  int device;
  bool right;
  int bit;  // 0 = MSB
};

SlotRole slot_role(const BusConfig& c, std::uint32_t o) {
  const auto k = static_cast<std::uint32_t>(channel_bits(c));
  if (is_dsp(c)) {
    const auto n = static_cast<std::uint32_t>(c.frame_bits);
    const auto within = o % n;
    return {static_cast<int>(o / n), within >= k, static_cast<int>(within % k)};
  }
  const auto half = static_cast<std::uint32_t>(c.n_devices) * k;
  const auto w = o % half;
  return {static_cast<int>(w / k), o >= half, static_cast<int>(w % k)};
}

std::uint8_t sampling_level(const BusConfig& c) { return c.polarity == ClockPolarity::SampleOnRising ? 1 : 0; }

}  // namespace

std::string_view to_string(BusMode m) {
  switch (m) {
    case BusMode::StandardI2s: return "standard_i2s";
    case BusMode::TdmI2s: return "tdm_i2s";
    case BusMode::TdmDsp: return "tdm_dsp";
  }
  return "?";
}
std::string_view to_string(ClockPolarity p) {
  return p == ClockPolarity::SampleOnRising ? "sample_on_rising" : "sample_on_falling";
}
std::string_view to_string(FrameAlignment a) { return a == FrameAlignment::Aligned ? "aligned" : "one_bit_delay"; }
std::string_view to_string(FsyncStyle s) { return s == FsyncStyle::Pulse ? "pulse" : "channel_length"; }
std::string_view to_string(BusRole r) { return r == BusRole::Master ? "master" : "slave"; }

BusMode parse_bus_mode(std::string_view name) {
  return parse_choice<BusMode>(
      name, {{"standard_i2s", BusMode::StandardI2s}, {"tdm_i2s", BusMode::TdmI2s}, {"tdm_dsp", BusMode::TdmDsp}},
      "bus mode");
}
ClockPolarity parse_polarity(std::string_view name) {
  return parse_choice<ClockPolarity>(
      name, {{"sample_on_rising", ClockPolarity::SampleOnRising}, {"sample_on_falling", ClockPolarity::SampleOnFalling}},
      "polarity");
}
FrameAlignment parse_alignment(std::string_view name) {
  return parse_choice<FrameAlignment>(
      name, {{"aligned", FrameAlignment::Aligned}, {"one_bit_delay", FrameAlignment::OneBitDelay}}, "alignment");
}
FsyncStyle parse_fsync_style(std::string_view name) {
  return parse_choice<FsyncStyle>(name, {{"pulse", FsyncStyle::Pulse}, {"channel_length", FsyncStyle::ChannelLength}},
                                  "fsync style");
}
BusRole parse_role(std::string_view name) {
  return parse_choice<BusRole>(name, {{"master", BusRole::Master}, {"slave", BusRole::Slave}}, "role");
}

void validate_bus(const BusConfig& c) {
  if (c.n_devices < 1 || c.n_devices > kMaxDevices) {
    throw ConfigError("n_devices must be in 1.." + std::to_string(kMaxDevices));
  }
  if (c.frame_bits != 16 && c.frame_bits != 24 && c.frame_bits != 32) {
    throw ConfigError("frame_bits must be 16, 24 or 32");
  }
  if (c.sample_rate == 0 || c.sample_rate > kMaxSampleRate) {
    throw ConfigError("sample_rate must be in 1.." + std::to_string(kMaxSampleRate) + " Hz");
  }
  if (c.clk_div == 0) throw ConfigError("clk_div must be positive");
  if (c.mode == BusMode::StandardI2s && c.n_devices != 1) {
    throw ConfigError("standard I2S carries exactly one device");
  }
}

double latency_tdm(int n_bits, int n_devices, double tclk) {
  return static_cast<double>(static_cast<std::int64_t>(n_bits / 2) * (n_devices + 1)) * tclk;
}

double latency_dsp(int n_bits, double tclk) { return static_cast<double>(n_bits) * tclk; }

std::uint64_t expected_latency_slots(const BusConfig& c) {
  if (is_dsp(c)) return static_cast<std::uint64_t>(c.frame_bits);
  return static_cast<std::uint64_t>(c.frame_bits / 2) * static_cast<std::uint64_t>(c.n_devices + 1);
}

double bclk_frequency(int n_devices, int frame_bits, double sample_rate) {
  return static_cast<double>(n_devices) * static_cast<double>(frame_bits) * sample_rate;
}

double bclk_frequency(const BusConfig& c) { return bclk_frequency(c.n_devices, c.frame_bits, c.sample_rate); }

double bit_period(const BusConfig& c) { return 1.0 / bclk_frequency(c); }

std::uint32_t clock_divider(double peripheral_hz, const BusConfig& c) {
  const double need = bclk_frequency(c);
  const double div = std::floor(peripheral_hz / need);
  if (!(div >= 1.0)) {
    throw ConfigError("peripheral clock " + std::to_string(peripheral_hz) + " Hz cannot produce BCLK " +
                      std::to_string(need) + " Hz");
  }
  return div > 4294967295.0 ? 4294967295u : static_cast<std::uint32_t>(div);
}

Timeline encode(const BusConfig& c, std::span<const FramePayload> payloads) {
  validate_bus(c);
  const auto devices = static_cast<std::size_t>(c.n_devices);
  if (payloads.size() % devices != 0) {
    throw UsageError("payload count " + std::to_string(payloads.size()) + " is not a multiple of " +
                     std::to_string(devices) + " devices");
  }
  const int k = channel_bits(c);
  const std::uint32_t limit = 1u << k;
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto& p = payloads[i];
    if (p.device != static_cast<int>(i % devices)) {
      throw UsageError("payload " + std::to_string(i) + " belongs to device " + std::to_string(p.device));
    }
    if (p.left >= limit || p.right >= limit) {
      throw UsageError("payload " + std::to_string(i) + " exceeds " + std::to_string(k) + " bits");
    }
  }

  const std::uint32_t period = period_slots(c);
  const std::uint32_t delay = alignment_delay(c);
  const std::size_t periods = payloads.size() / devices;
  const std::size_t data_slots = periods * period;
  const std::size_t total = data_slots + delay;
  const std::uint8_t first_half = c.polarity == ClockPolarity::SampleOnRising ? 0 : 1;

  Timeline tl;
  tl.events.reserve(2 * total);
  for (std::size_t s = 0; s < total; ++s) {
    const std::uint8_t fs = s < data_slots ? fsync_level(c, static_cast<std::uint32_t>(s % period)) : idle_fsync(c);
    SlotPlan plan;
    if (s >= delay) {
      const std::size_t t = s - delay;
      const auto o = static_cast<std::uint32_t>(t % period);
      const auto role = slot_role(c, o);
      const auto& p = payloads[(t / period) * devices + static_cast<std::size_t>(role.device)];
      const std::uint32_t word = role.right ? p.right : p.left;
      plan.driver = role.device;
      plan.bit = static_cast<std::uint8_t>((word >> (k - 1 - role.bit)) & 1u);
    }
    const auto t0 = static_cast<std::int64_t>(2 * s);
    tl.events.push_back({t0, first_half, fs, plan.bit, plan.driver});
    tl.events.push_back({t0 + 1, static_cast<std::uint8_t>(first_half ^ 1), fs, plan.bit, plan.driver});
  }
  return tl;
}

std::vector<FramePayload> decode(const Timeline& tl, const BusConfig& c) {
  validate_bus(c);
  struct Sample {
    std::uint8_t fsync, sd;
  };
  const std::uint8_t level = sampling_level(c);
  std::vector<Sample> samples;
  samples.reserve(tl.events.size() / 2);
  for (std::size_t i = 1; i < tl.events.size(); ++i) {
    const auto& e = tl.events[i];
    if (e.bclk != tl.events[i - 1].bclk && e.bclk == level) samples.push_back({e.fsync, e.sd});
  }

  const std::uint8_t idle = idle_fsync(c);
  const std::uint8_t active = idle ^ 1;
  std::vector<std::size_t> starts;
  std::uint8_t prev = idle;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (prev == idle && samples[j].fsync == active) starts.push_back(j);
    prev = samples[j].fsync;
  }
  if (starts.empty()) throw FramingError("no frame sync found", {}, false);

  const std::uint32_t period = period_slots(c);
  const std::uint32_t delay = alignment_delay(c);
  const auto devices = static_cast<std::size_t>(c.n_devices);
  const int k = channel_bits(c);

  std::vector<FramePayload> out;
  std::size_t next_free = 0;
  for (const auto start : starts) {
    if (start < next_free) continue;  // a sync edge inside the previous period
    const std::size_t first = start + delay;
    std::vector<FramePayload> frame(devices);
    for (std::size_t d = 0; d < devices; ++d) frame[d].device = static_cast<int>(d);
    std::vector<int> bits_seen(devices, 0);
    std::size_t o = 0;
    for (; o < period && first + o < samples.size(); ++o) {
      const auto role = slot_role(c, static_cast<std::uint32_t>(o));
      auto& p = frame[static_cast<std::size_t>(role.device)];
      auto& word = role.right ? p.right : p.left;
      word |= static_cast<std::uint32_t>(samples[first + o].sd & 1u) << (k - 1 - role.bit);
      ++bits_seen[static_cast<std::size_t>(role.device)];
    }
    if (o < period) {
      for (std::size_t d = 0; d < devices; ++d) {
        if (bits_seen[d] == c.frame_bits) out.push_back(frame[d]);
      }
      throw FramingError("timeline ends inside a frame (" + std::to_string(o) + " of " + std::to_string(period) +
                             " bits)",
                         std::move(out), true);
    }
    out.insert(out.end(), frame.begin(), frame.end());
    next_free = start + period;
  }
  return out;
}

std::uint64_t measure_latency_slots(const Timeline& tl, const BusConfig& c) {
  validate_bus(c);
  std::vector<int> drivers;
  drivers.reserve(tl.slots());
  for (std::size_t i = 0; i + 1 < tl.events.size(); i += 2) drivers.push_back(tl.events[i].driver);

  std::size_t first = drivers.size();
  for (std::size_t s = 0; s < drivers.size(); ++s) {
    if (drivers[s] != kNoDriver) {
      first = s;
      break;
    }
  }
  if (first == drivers.size()) throw FramingError("no device drives the bus", {}, false);

  std::vector<int> counts(static_cast<std::size_t>(c.n_devices), 0);
  std::uint64_t latency = 0;
  for (std::size_t s = first; s < drivers.size(); ++s) {
    const int d = drivers[s];
    if (d < 0 || d >= c.n_devices) continue;
    if (++counts[static_cast<std::size_t>(d)] == c.frame_bits && d == 0) latency = s + 1 - first;
  }
  for (int cnt : counts) {
    if (cnt < c.frame_bits) throw FramingError("timeline holds no complete round of all devices", {}, true);
  }
  return latency;
}

double measure_latency(const Timeline& tl, const BusConfig& c) {
  return static_cast<double>(measure_latency_slots(tl, c)) * bit_period(c);
}

}  // namespace echoes
