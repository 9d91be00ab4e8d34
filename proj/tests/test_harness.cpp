// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "echoes/errors.hpp"
#include "echoes/harness.hpp"

namespace echoes {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

json base(const char* kind) { return {{"schema_version", 1}, {"kind", kind}}; }

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("echoes_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const Check* find_check(const std::vector<Check>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

TEST(ConfigTest, MinimalDefaults) {
  const auto cfg = parse_config(base("fft_run"));
  EXPECT_EQ(cfg.kind, ExperimentKind::FftRun);
  EXPECT_EQ(cfg.fft.n_points, 512u);
  EXPECT_EQ(cfg.fft.dtype, DataType::C64);
  EXPECT_EQ(cfg.fft.reorder, ReorderPolicy::BankAware);
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_DOUBLE_EQ(cfg.clock_frequency_hz, 254e6);
}

TEST(ConfigTest, Rejections) {
  auto expect_bad = [](json doc) { EXPECT_THROW(parse_config(doc), ConfigError) << doc.dump(); };
  expect_bad(json::object({{"kind", "fft_run"}}));
  expect_bad(json::object({{"schema_version", 1}}));
  expect_bad(json::object({{"schema_version", 2}, {"kind", "fft_run"}}));
  auto d = base("fft_run");
  d["colour"] = "blue";
  expect_bad(d);
  d = base("fft_run");
  d["fft"] = {{"dtype", "C128"}};
  expect_bad(d);
  d = base("fft_run");
  d["fft"] = {{"dtype", "C64"}, {"n_points", 1024}};
  expect_bad(d);
  d = base("fft_run");
  d["fft"] = {{"n_points", "512"}};
  expect_bad(d);
  d = base("fft_run");
  d["fft"] = {{"npoints", 512}};
  expect_bad(d);
  d = base("fft_run");
  d["input"] = {{"source", "file"}, {"path", "/nonexistent/echoes.txt"}};
  expect_bad(d);
  d = base("fft_run");
  d["input"] = {{"amplitude", 1.5}};
  expect_bad(d);
  d = base("i2s_scenario");
  d["i2s"] = {{"n_devices", 17}};
  expect_bad(d);
  d = base("i2s_scenario");
  d["i2s"] = {{"mode", "standard_i2s"}, {"n_devices", 2}};
  expect_bad(d);
  d = base("latency_sweep");
  d["latency"] = {{"frame_bits", {16, 20}}};
  expect_bad(d);
  expect_bad(json::array());
}

TEST(ConfigTest, LoadRebasesRelativePaths) {
  const auto dir = scratch("load");
  std::ofstream(dir / "x.txt") << "0.5 0\n";
  for (int i = 1; i < 8; ++i) std::ofstream(dir / "x.txt", std::ios::app) << "0 0\n";
  auto doc = base("fft_run");
  doc["fft"] = {{"n_points", 8}};
  doc["input"] = {{"source", "file"}, {"path", "x.txt"}};
  doc["outputs"] = {{"dir", "out"}};
  std::ofstream(dir / "cfg.json") << doc.dump();
  const auto cfg = load_config(dir / "cfg.json");
  EXPECT_EQ(cfg.input.path, dir / "x.txt");
  EXPECT_EQ(cfg.outputs.dir, dir / "out");
  const auto r = run_fft_experiment(cfg);
  EXPECT_TRUE(r.pass());
  fs::remove_all(dir);
}

TEST(ConfigTest, MalformedJsonIsConfigError) {
  const auto dir = scratch("malformed");
  std::ofstream(dir / "cfg.json") << "{\"schema_version\": 1,";
  EXPECT_THROW(load_config(dir / "cfg.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  fs::remove_all(dir);
}

TEST(MetricTest, OpsAndGops) {
  EXPECT_EQ(fft_ops(8), 120u);
  EXPECT_EQ(fft_ops(512), 23040u);
  EXPECT_NEAR(gops(23040, 2585, 254e6), 2.2639, 1e-4);
  EXPECT_DOUBLE_EQ(snr_db({{1, 0}}, {{1, 0}}), kSnrCeilingDb);
  EXPECT_NEAR(snr_db({{1, 0}, {0, 1}}, {{1.1, 0}, {0, 1}}), 10 * std::log10(2 / 0.01), 1e-9);
}

TEST(MetricTest, InputsAreDeterministic) {
  InputSpec in;
  EXPECT_EQ(make_input(in, 64, 9), make_input(in, 64, 9));
  EXPECT_NE(make_input(in, 64, 9), make_input(in, 64, 10));
  for (auto v : make_input(in, 256, 3)) {
    EXPECT_LT(std::abs(v.real()), 0.5 + 1e-12);
    EXPECT_LT(std::abs(v.imag()), 0.5 + 1e-12);
  }
  in.source = InputSource::Impulse;
  in.position = 3;
  const auto x = make_input(in, 8, 1);
  EXPECT_EQ(x[3], cplx(0.5, 0));
  EXPECT_EQ(x[2], cplx(0, 0));
}

TEST(FftExperimentTest, AllChecksPassAcrossGrid) {
  for (auto t : {DataType::C64, DataType::C32, DataType::C16}) {
    for (auto src : {InputSource::WhiteNoise, InputSource::Tone, InputSource::Impulse, InputSource::Dc}) {
      auto cfg = parse_config(base("fft_run"));
      cfg.fft.dtype = t;
      cfg.fft.n_points = static_cast<std::uint32_t>(max_points(t));
      cfg.input.source = src;
      cfg.input.bin = 17;
      const auto r = run_fft_experiment(cfg);
      for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << to_string(t) << " " << c.name << ": " << c.detail;
      EXPECT_NEAR(r.gops, static_cast<double>(r.ops) / r.stats.total_cycles * r.clock_hz / 1e9, 1e-9);
    }
  }
}

TEST(FftExperimentTest, UnscaledNoiseFailsSaturationCheck) {
  auto cfg = parse_config(base("fft_run"));
  cfg.fft.scaling = ScalingPolicy::None;
  const auto r = run_fft_experiment(cfg);
  EXPECT_TRUE(r.overflow);
  const auto* c = find_check(r.checks, "no_saturation");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_FALSE(r.pass());
}

TEST(FftExperimentTest, ReportsAreByteDeterministic) {
  auto cfg = parse_config(base("fft_run"));
  cfg.seed = 42;
  const auto a = run_fft_experiment(cfg), b = run_fft_experiment(cfg);
  EXPECT_EQ(to_json(a).dump(2), to_json(b).dump(2));
  EXPECT_EQ(to_text(a), to_text(b));
  cfg.seed = 43;
  EXPECT_NE(to_json(run_fft_experiment(cfg)).dump(), to_json(a).dump());
}

TEST(FftExperimentTest, MemoryImageArtifact) {
  const auto dir = scratch("image");
  auto cfg = parse_config(base("fft_run"));
  cfg.fft = {64, DataType::C32};
  cfg.outputs.dir = dir;
  cfg.outputs.memory_image = true;
  const auto r = run_fft_experiment(cfg);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(fs::file_size(dir / "spectrum.bin"), 64u * 4u);
  fs::remove_all(dir);
}

TEST(I2sScenarioTest, PassesAcrossModes) {
  for (auto mode : {BusMode::StandardI2s, BusMode::TdmI2s, BusMode::TdmDsp}) {
    for (int k : {1, 4, 16}) {
      if (mode == BusMode::StandardI2s && k != 1) continue;
      auto cfg = parse_config(base("i2s_scenario"));
      cfg.i2s.bus.mode = mode;
      cfg.i2s.bus.n_devices = k;
      cfg.i2s.bus.alignment = FrameAlignment::OneBitDelay;
      cfg.i2s.peripheral_clock_hz = 100e6;
      const auto r = run_i2s_scenario(cfg);
      for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << to_string(mode) << " " << k << " " << c.name << ": " << c.detail;
      EXPECT_EQ(r.latency_slots, r.expected_latency_slots);
      EXPECT_EQ(r.mismatches, 0u);
    }
  }
}

TEST(I2sScenarioTest, LatencyRatioExample) {
  auto cfg = parse_config(base("i2s_scenario"));
  cfg.i2s.bus.mode = BusMode::TdmI2s;
  cfg.i2s.bus.n_devices = 4;
  const auto r = run_i2s_scenario(cfg);
  EXPECT_EQ(r.latency_slots, 80u);
  EXPECT_NEAR(r.latency_tdm_s / r.latency_dsp_s, 2.5, 1e-12);
}

TEST(I2sScenarioTest, UnreachableClockFails) {
  auto cfg = parse_config(base("i2s_scenario"));
  cfg.i2s.bus.n_devices = 16;
  cfg.i2s.peripheral_clock_hz = 10e6;
  const auto r = run_i2s_scenario(cfg);
  const auto* c = find_check(r.checks, "bclk_reachable");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
}

TEST(I2sScenarioTest, WavPayloadAndTimelineArtifacts) {
  const auto dir = scratch("wav");
  BusConfig b;
  b.n_devices = 2;
  b.frame_bits = 32;
  WavData w{4, 48000, {}};
  for (int i = 0; i < 40; ++i) w.samples.push_back(static_cast<std::int16_t>(i * 811 - 16000));
  write_wav(w, dir / "in.wav");
  auto doc = base("i2s_scenario");
  doc["i2s"] = {{"n_devices", 2}, {"payload_wav", (dir / "in.wav").string()}};
  doc["outputs"] = {{"dir", dir.string()}, {"timeline_dump", true}};
  const auto cfg = parse_config(doc);
  const auto r = run_i2s_scenario(cfg);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(read_wav(dir / "decoded.wav"), w);
  EXPECT_EQ(slurp(dir / "timeline.vcd").rfind("$version", 0), 0u);
  fs::remove_all(dir);
}

TEST(SweepTest, FftSweepIsSortedAndPasses) {
  auto cfg = parse_config(base("fft_sweep"));
  cfg.sweep.sizes = {64, 8, 256};
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.fft.size(), 9u);
  EXPECT_TRUE(r.pass());
  for (std::size_t i = 1; i < r.fft.size(); ++i) {
    const auto& a = r.fft[i - 1];
    const auto& b = r.fft[i];
    EXPECT_TRUE(a.dtype < b.dtype || (a.dtype == b.dtype && a.n_points < b.n_points));
  }
  const auto csv = r.csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  EXPECT_EQ(to_json(r).dump(), to_json(run_sweep(cfg)).dump());
}

TEST(SweepTest, LatencySweepChecks) {
  auto cfg = parse_config(base("latency_sweep"));
  cfg.latency.n_devices = {1, 2, 8, 16};
  cfg.latency.frame_bits = {16, 32};
  const auto r = run_sweep(cfg);
  EXPECT_EQ(r.i2s.size(), 16u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_NE(find_check(r.checks, "dsp_latency_flat_in_k"), nullptr);
  EXPECT_NE(find_check(r.checks, "tdm_latency_grows_with_k"), nullptr);
}

TEST(OutputTest, WritesReportFiles) {
  const auto dir = scratch("outputs");
  auto cfg = parse_config(base("fft_sweep"));
  cfg.sweep.sizes = {16};
  cfg.outputs.dir = dir / "nested";
  const auto r = run_sweep(cfg);
  write_outputs(cfg, to_json(r), to_text(r), r.csv());
  EXPECT_EQ(slurp(dir / "nested" / "report.json"), to_json(r).dump(2) + "\n");
  EXPECT_EQ(slurp(dir / "nested" / "report.txt"), to_text(r));
  EXPECT_EQ(slurp(dir / "nested" / "summary.csv"), r.csv());
  fs::remove_all(dir);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ECHOES_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("fft run --dtype C32 --points 256"), 0);
  EXPECT_EQ(run_cli("fft run --scaling none"), 1);
  EXPECT_EQ(run_cli("fft run --dtype C16 --points 4096"), 2);
  EXPECT_EQ(run_cli("fft run --bogus"), 2);
  EXPECT_EQ(run_cli("i2s run --mode tdm_i2s --devices 4 --frame-bits 24"), 0);
  EXPECT_EQ(run_cli("i2s run --devices 17"), 2);
  EXPECT_EQ(run_cli("i2s run --config /nonexistent/cfg.json"), 2);
  EXPECT_EQ(run_cli("schedule dump --points 16 --dtype C16"), 0);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(CliTest, JsonOutputMatchesFile) {
  const auto dir = scratch("cli");
  const std::string cmd = std::string(ECHOES_SIM_PATH) + " fft run --format json --seed 5 --points 64 --out " +
                          dir.string() + " > " + (dir / "stdout.json").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(dir / "stdout.json"), slurp(dir / "report.json"));
  const auto j = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["config"]["seed"], 5);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace echoes
