// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "echoes/fft.hpp"
#include "echoes/i2s.hpp"

namespace echoes {

using ojson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { FftRun, FftSweep, I2sScenario, LatencySweep };
enum class InputSource { Tone, Impulse, Dc, WhiteNoise, File };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(InputSource s);
ExperimentKind parse_experiment_kind(std::string_view name);
InputSource parse_input_source(std::string_view name);

struct InputSpec {
  InputSource source = InputSource::WhiteNoise;
  double amplitude = 0.5;      // peak of each part; noise parts are uniform in [-a, a)
  std::uint32_t bin = 1;       // tone frequency
  std::uint32_t position = 0;  // impulse index
  std::filesystem::path path;  // text file, one "re im" pair per line
};

struct FftSweepSpec {
  std::vector<DataType> dtypes{DataType::C64, DataType::C32, DataType::C16};
  std::vector<std::uint32_t> sizes;  // empty: every power of two from 8 to the dtype maximum
};

struct I2sSpec {
  BusConfig bus;
  std::uint32_t periods = 4;       // sample periods after the preamble
  std::filesystem::path payload_wav;  // optional payload source
  double peripheral_clock_hz = 0;  // 0: skip the divider check
};

struct LatencySweepSpec {
  std::vector<BusMode> modes{BusMode::TdmI2s, BusMode::TdmDsp};
  std::vector<int> n_devices;  // empty: 1..16
  std::vector<int> frame_bits{16, 24, 32};
};

struct OutputSpec {
  std::filesystem::path dir;  // empty: nothing written
  bool timeline_dump = false;
  bool memory_image = false;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::FftRun;
  std::uint64_t seed = 1;
  double clock_frequency_hz = 254e6;
  FftJob fft{512, DataType::C64};
  InputSpec input;
  FftSweepSpec sweep;
  I2sSpec i2s;
  LatencySweepSpec latency;
  OutputSpec outputs;
};

/// Strict parse: unknown keys, wrong types, bad enum names and missing files
/// raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// The raw document with relative paths resolved against the file's directory.
nlohmann::json load_config_document(const std::filesystem::path& path);
/// Canonical echo of the fields that define the experiment (outputs excluded).
ojson config_echo(const ExperimentConfig& config);

/// White-noise SNR floors, frozen from oracle calibration at each format's
/// largest size, minus 1 dB.
double snr_floor_db(DataType dtype);
inline constexpr double kSnrCeilingDb = 300.0;

/// 10 real operations per radix-2 butterfly: 4 multiplies, 6 additions.
std::uint64_t fft_ops(std::uint32_t n_points);
double gops(std::uint64_t ops, std::uint64_t cycles, double clock_hz);

double snr_db(const std::vector<cplx>& reference, const std::vector<cplx>& test);

std::vector<cplx> make_input(const InputSpec& input, std::uint32_t n_points, std::uint64_t seed);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<Check>& checks);

struct FftReport {
  ojson config;
  DataType dtype = DataType::C64;
  std::uint32_t n_points = 0;
  CycleStats stats;
  CycleStats predicted;
  bool overflow = false;
  std::size_t max_register_words = 0;
  double snr_db = 0;
  std::uint64_t ops = 0;
  double clock_hz = 0;
  double gops = 0;
  std::vector<Check> checks;

  bool pass() const { return all_pass(checks); }
};

struct I2sReport {
  ojson config;
  BusConfig bus;
  double bclk_hz = 0;
  double tclk_s = 0;
  std::uint32_t clk_div_required = 0;  // 0 when no peripheral clock given
  std::uint64_t latency_slots = 0;
  std::uint64_t expected_latency_slots = 0;
  double latency_s = 0;
  double latency_tdm_s = 0;
  double latency_dsp_s = 0;
  std::size_t payloads = 0;
  std::size_t mismatches = 0;
  std::vector<Check> checks;

  bool pass() const { return all_pass(checks); }
};

struct SweepReport {
  ojson config;
  std::vector<FftReport> fft;  // sorted by (dtype, n_points)
  std::vector<I2sReport> i2s;  // sorted by (mode, frame_bits, n_devices)
  std::vector<Check> checks;   // member failures and cross-run properties

  bool pass() const;
  std::string csv() const;
};

FftReport run_fft_experiment(const ExperimentConfig& config);
I2sReport run_i2s_scenario(const ExperimentConfig& config);
/// Members run in parallel, each on its own memory.
SweepReport run_sweep(const ExperimentConfig& config);

ojson to_json(const FftReport& r);
ojson to_json(const I2sReport& r);
ojson to_json(const SweepReport& r);
std::string to_text(const FftReport& r);
std::string to_text(const I2sReport& r);
std::string to_text(const SweepReport& r);

/// Writes report.json, report.txt and, for sweeps, summary.csv to
/// config.outputs.dir. Runs write their own timeline and memory images there.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config, const ojson& json,
                                                 const std::string& text, const std::string& csv = {});

}  // namespace echoes
