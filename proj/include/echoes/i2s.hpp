// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "echoes/errors.hpp"

namespace echoes {

enum class BusMode { StandardI2s, TdmI2s, TdmDsp };
enum class ClockPolarity { SampleOnRising, SampleOnFalling };
enum class FrameAlignment { Aligned, OneBitDelay };
enum class FsyncStyle { Pulse, ChannelLength };
enum class BusRole { Master, Slave };

std::string_view to_string(BusMode m);
std::string_view to_string(ClockPolarity p);
std::string_view to_string(FrameAlignment a);
std::string_view to_string(FsyncStyle s);
std::string_view to_string(BusRole r);
BusMode parse_bus_mode(std::string_view name);
ClockPolarity parse_polarity(std::string_view name);
FrameAlignment parse_alignment(std::string_view name);
FsyncStyle parse_fsync_style(std::string_view name);
BusRole parse_role(std::string_view name);

inline constexpr int kMaxDevices = 16;
inline constexpr std::uint32_t kMaxSampleRate = 48000;

/// One serial audio interface. A frame is `frame_bits` long and carries a
/// left and a right channel of frame_bits/2 bits each. fsync_style only
/// applies to TdmDsp; the I2S modes always use a word-select level.
struct BusConfig {
  BusMode mode = BusMode::TdmDsp;
  int n_devices = 1;
  int frame_bits = 32;
  std::uint32_t sample_rate = 48000;
  std::uint32_t clk_div = 1;
  ClockPolarity polarity = ClockPolarity::SampleOnRising;
  FrameAlignment alignment = FrameAlignment::Aligned;
  FsyncStyle fsync_style = FsyncStyle::Pulse;
  BusRole role = BusRole::Master;

  friend bool operator==(const BusConfig&, const BusConfig&) = default;
};

/// Throws ConfigError for out-of-range fields.
void validate_bus(const BusConfig& config);

constexpr int channel_bits(const BusConfig& c) { return c.frame_bits / 2; }
/// Bit slots per sample period.
constexpr std::uint32_t period_slots(const BusConfig& c) {
  return static_cast<std::uint32_t>(c.n_devices * c.frame_bits);
}
constexpr std::uint32_t alignment_delay(const BusConfig& c) {
  return c.alignment == FrameAlignment::OneBitDelay ? 1u : 0u;
}

/// Channel words are raw two's-complement codes of channel_bits() bits.
struct FramePayload {
  int device = 0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;

  friend bool operator==(const FramePayload&, const FramePayload&) = default;
};

inline constexpr int kNoDriver = -1;

/// State of the bus from `time` until the next event. Time counts BCLK half
/// periods; bit slot s spans [2s, 2s+2).
struct TimelineEvent {
  std::int64_t time = 0;
  std::uint8_t bclk = 0;
  std::uint8_t fsync = 0;
  std::uint8_t sd = 0;
  int driver = kNoDriver;

  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

struct Timeline {
  std::vector<TimelineEvent> events;

  std::size_t slots() const { return events.size() / 2; }
  friend bool operator==(const Timeline&, const Timeline&) = default;
};

/// Closed forms in units of `tclk`.
double latency_tdm(int n_bits, int n_devices, double tclk);
double latency_dsp(int n_bits, double tclk);
/// Closed-form latency for `config`, in bit clocks.
std::uint64_t expected_latency_slots(const BusConfig& config);

double bclk_frequency(int n_devices, int frame_bits, double sample_rate);
double bclk_frequency(const BusConfig& config);
double bit_period(const BusConfig& config);

/// Largest divider whose BCLK still covers `config`; ConfigError if the
/// peripheral clock is too slow.
std::uint32_t clock_divider(double peripheral_hz, const BusConfig& config);
inline double divided_clock(double peripheral_hz, std::uint32_t clk_div) { return peripheral_hz / clk_div; }

/// `payloads` holds whole sample periods: n_devices entries per period, in
/// device order. Data changes on the driving edge, MSB first.
Timeline encode(const BusConfig& config, std::span<const FramePayload> payloads);

class FramingError : public ModelError {
 public:
  FramingError(const std::string& what, std::vector<FramePayload> partial, bool truncated)
      : ModelError(what), partial_(std::move(partial)), truncated_(truncated) {}

  /// Payloads recovered before the failure.
  const std::vector<FramePayload>& partial() const { return partial_; }
  bool truncated() const { return truncated_; }

 private:
  std::vector<FramePayload> partial_;
  bool truncated_;
};

/// Samples the bus on the configured edge and re-frames on FSYNC.
std::vector<FramePayload> decode(const Timeline& timeline, const BusConfig& config);

/// Bit clocks from the first driven slot until device 0 has delivered its
/// whole frame, read from the SD driver track.
std::uint64_t measure_latency_slots(const Timeline& timeline, const BusConfig& config);
double measure_latency(const Timeline& timeline, const BusConfig& config);

/// Value-change dump of BCLK, FSYNC, SD and the SD driver id.
std::string to_vcd(const Timeline& timeline, const BusConfig& config);
void export_vcd(const Timeline& timeline, const BusConfig& config, const std::filesystem::path& path);

/// 16-bit PCM, interleaved.
struct WavData {
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::vector<std::int16_t> samples;

  friend bool operator==(const WavData&, const WavData&) = default;
};

void write_wav(const WavData& wav, const std::filesystem::path& path);
WavData read_wav(const std::filesystem::path& path);

/// Channel 2d is device d's left channel, 2d+1 its right. Codes are
/// left-justified in the 16-bit container.
WavData payloads_to_wav(const BusConfig& config, std::span<const FramePayload> payloads);
std::vector<FramePayload> wav_to_payloads(const BusConfig& config, const WavData& wav);

}  // namespace echoes
