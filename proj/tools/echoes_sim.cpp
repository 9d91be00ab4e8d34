// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

// echoes_sim: command-line front end for the FFT accelerator and audio bus
// models. Exit status: 0 all checks pass, 1 a check failed, 2 bad input.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "echoes/harness.hpp"

namespace {

using echoes::ojson;
using json = nlohmann::json;

enum ExitCode { kOk = 0, kCheckFailed = 1, kBadInput = 2 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "text";
  bool timeline_dump = false;
};

struct FftOpts {
  std::optional<std::string> dtype, input, scaling, reorder;
  std::optional<std::uint32_t> points;
  std::optional<double> clock_hz;
  bool memory_image = false;
};

struct I2sOpts {
  std::optional<std::string> mode, polarity, alignment, fsync;
  std::optional<int> devices, frame_bits;
  std::optional<std::uint32_t> sample_rate, periods;
  std::vector<int> devices_list, frame_bits_list;  // sweep axes
};

void add_common(CLI::App* cmd, Common& c, bool timeline) {
  cmd->add_option("--config", c.config, "experiment config (JSON)");
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--out", c.out, "directory for reports and artifacts");
  cmd->add_option("--format", c.format, "stdout report format")
      ->check(CLI::IsMember({"text", "json", "json-like"}));
  if (timeline) cmd->add_flag("--timeline-dump", c.timeline_dump, "write timeline.vcd to --out");
}

void add_fft(CLI::App* cmd, FftOpts& f, bool sized) {
  cmd->add_option("--dtype", f.dtype, "C64, C32 or C16");
  if (sized) cmd->add_option("--points", f.points, "transform size");
  cmd->add_option("--input", f.input, "white_noise, tone, impulse or dc");
  cmd->add_option("--scaling", f.scaling, "divide_by_two_per_stage or none");
  cmd->add_option("--reorder", f.reorder, "bank_aware or natural_order");
  cmd->add_option("--clock-hz", f.clock_hz, "accelerator clock for GOPS");
  cmd->add_flag("--memory-image", f.memory_image, "write spectrum.bin to --out");
}

void add_i2s(CLI::App* cmd, I2sOpts& o, bool sized) {
  cmd->add_option("--mode", o.mode, "standard_i2s, tdm_i2s or tdm_dsp");
  if (sized) {
    cmd->add_option("--devices", o.devices, "devices on the bus");
    cmd->add_option("--frame-bits", o.frame_bits, "16, 24 or 32");
  } else {
    cmd->add_option("--devices", o.devices_list, "device counts to sweep (default 1..16)");
    cmd->add_option("--frame-bits", o.frame_bits_list, "frame sizes to sweep");
  }
  cmd->add_option("--sample-rate", o.sample_rate, "Hz");
  cmd->add_option("--polarity", o.polarity, "sample_on_rising or sample_on_falling");
  cmd->add_option("--alignment", o.alignment, "aligned or one_bit_delay");
  cmd->add_option("--fsync", o.fsync, "pulse or channel_length");
  cmd->add_option("--periods", o.periods, "sample periods to transmit");
}

json base_document(const Common& c, echoes::ExperimentKind kind) {
  json doc;
  if (!c.config.empty()) {
    doc = echoes::load_config_document(c.config);
    if (!doc.is_object()) throw echoes::ConfigError("config must be a JSON object");
    if (doc.contains("kind") && doc["kind"] != std::string(echoes::to_string(kind))) {
      throw echoes::ConfigError("config kind " + doc["kind"].dump() + " does not match this command");
    }
  } else {
    doc["schema_version"] = echoes::kSchemaVersion;
  }
  doc["kind"] = echoes::to_string(kind);
  if (c.seed) doc["seed"] = *c.seed;
  if (!c.out.empty()) doc["outputs"]["dir"] = c.out;
  if (c.timeline_dump) doc["outputs"]["timeline_dump"] = true;
  return doc;
}

template <typename T>
void put(json& doc, const char* section, const char* key, const std::optional<T>& v) {
  if (v) doc[section][key] = *v;
}

void apply_overrides(json& doc, const FftOpts& f) {
  put(doc, "fft", "dtype", f.dtype);
  put(doc, "fft", "n_points", f.points);
  put(doc, "fft", "scaling", f.scaling);
  put(doc, "fft", "reorder", f.reorder);
  put(doc, "input", "source", f.input);
  if (f.clock_hz) doc["clock_frequency_hz"] = *f.clock_hz;
  if (f.memory_image) doc["outputs"]["memory_image"] = true;
}

void apply_overrides(json& doc, const I2sOpts& o) {
  put(doc, "i2s", "mode", o.mode);
  put(doc, "i2s", "n_devices", o.devices);
  put(doc, "i2s", "frame_bits", o.frame_bits);
  put(doc, "i2s", "sample_rate", o.sample_rate);
  put(doc, "i2s", "polarity", o.polarity);
  put(doc, "i2s", "alignment", o.alignment);
  put(doc, "i2s", "fsync_style", o.fsync);
  put(doc, "i2s", "periods", o.periods);
  if (!o.devices_list.empty()) doc["latency"]["n_devices"] = o.devices_list;
  if (!o.frame_bits_list.empty()) doc["latency"]["frame_bits"] = o.frame_bits_list;
}

int emit(const echoes::ExperimentConfig& cfg, const Common& c, const ojson& j, const std::string& text,
         const std::string& csv, bool pass) {
  echoes::write_outputs(cfg, j, text, csv);
  if (c.format == "text") {
    std::cout << text;
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level FFT accelerator and I2S/TDM bus simulator"};
  app.require_subcommand(1);

  Common common;
  FftOpts fft_opts;
  I2sOpts i2s_opts;
  std::string sched_dtype = "C64", sched_reorder = "bank_aware";
  std::uint32_t sched_points = 16;

  auto* fft = app.add_subcommand("fft", "FFT accelerator experiments")->require_subcommand(1);
  auto* fft_run = fft->add_subcommand("run", "one transform, verified against the oracle");
  auto* fft_sweep = fft->add_subcommand("sweep", "grid over data types and sizes");
  add_common(fft_run, common, false);
  add_common(fft_sweep, common, false);
  add_fft(fft_run, fft_opts, true);
  add_fft(fft_sweep, fft_opts, false);

  auto* i2s = app.add_subcommand("i2s", "audio bus experiments")->require_subcommand(1);
  auto* i2s_run = i2s->add_subcommand("run", "encode, decode and time one bus scenario");
  auto* i2s_sweep = i2s->add_subcommand("sweep", "latency over modes, device counts and frame sizes");
  add_common(i2s_run, common, true);
  add_common(i2s_sweep, common, false);
  add_i2s(i2s_run, i2s_opts, true);
  add_i2s(i2s_sweep, i2s_opts, false);

  auto* sched = app.add_subcommand("schedule", "port schedules")->require_subcommand(1);
  auto* dump = sched->add_subcommand("dump", "print the per-cycle plan of every stage and the reorder pass");
  dump->add_option("--dtype", sched_dtype, "C64, C32 or C16");
  dump->add_option("--points", sched_points, "transform size");
  dump->add_option("--reorder", sched_reorder, "bank_aware or natural_order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (*dump) {
      const auto t = echoes::parse_data_type(sched_dtype);
      echoes::validate_job({sched_points, t}, echoes::BankedMemory::kDefaultWords);
      std::cout << echoes::dump_schedule(sched_points, t, echoes::parse_reorder_policy(sched_reorder));
      return kOk;
    }
    if (*fft_run) {
      auto doc = base_document(common, echoes::ExperimentKind::FftRun);
      apply_overrides(doc, fft_opts);
      const auto cfg = echoes::parse_config(doc);
      const auto r = echoes::run_fft_experiment(cfg);
      return emit(cfg, common, echoes::to_json(r), echoes::to_text(r), {}, r.pass());
    }
    if (*fft_sweep) {
      auto doc = base_document(common, echoes::ExperimentKind::FftSweep);
      apply_overrides(doc, fft_opts);
      if (fft_opts.dtype) doc["sweep"]["dtypes"] = json::array({*fft_opts.dtype});
      if (doc.contains("fft") && doc["fft"].contains("dtype")) doc["fft"].erase("dtype");
      const auto cfg = echoes::parse_config(doc);
      const auto r = echoes::run_sweep(cfg);
      return emit(cfg, common, echoes::to_json(r), echoes::to_text(r), r.csv(), r.pass());
    }
    if (*i2s_run) {
      auto doc = base_document(common, echoes::ExperimentKind::I2sScenario);
      apply_overrides(doc, i2s_opts);
      const auto cfg = echoes::parse_config(doc);
      const auto r = echoes::run_i2s_scenario(cfg);
      return emit(cfg, common, echoes::to_json(r), echoes::to_text(r), {}, r.pass());
    }
    if (*i2s_sweep) {
      auto doc = base_document(common, echoes::ExperimentKind::LatencySweep);
      apply_overrides(doc, i2s_opts);
      if (i2s_opts.mode) {
        doc["latency"]["modes"] = json::array({*i2s_opts.mode});
        doc["i2s"].erase("mode");
      }
      const auto cfg = echoes::parse_config(doc);
      const auto r = echoes::run_sweep(cfg);
      return emit(cfg, common, echoes::to_json(r), echoes::to_text(r), r.csv(), r.pass());
    }
  } catch (const echoes::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kBadInput;
  } catch (const echoes::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kBadInput;
}
