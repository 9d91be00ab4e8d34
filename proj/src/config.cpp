// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>

#include "echoes/harness.hpp"

namespace echoes {

namespace {

using json = nlohmann::json;

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class Section {
 public:
  Section(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key);
  }

  const json& raw(const std::string& key) { return (used_.insert(key), obj_.at(key)); }

  std::string str(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw type_error(key, "a string");
    return v.get<std::string>();
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!non_negative_integer(v)) throw type_error(key, "a non-negative integer");
    return v.get<std::uint64_t>();
  }

  double num(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw type_error(key, "a number");
    return v.get<double>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw type_error(key, "true or false");
    return v.get<bool>();
  }

  template <typename T, typename F>
  std::vector<T> list(const std::string& key, std::vector<T> fallback, F convert) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_array()) throw type_error(key, "an array");
    std::vector<T> out;
    for (const auto& item : v) out.push_back(convert(item, where_ + "." + key));
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
    }
  }

 private:
  ConfigError type_error(const std::string& key, const char* want) const {
    return ConfigError(where_ + "." + key + " must be " + want);
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

std::uint64_t as_uint(const json& v, const std::string& where) {
  if (!non_negative_integer(v)) throw ConfigError(where + " entries must be non-negative integers");
  return v.get<std::uint64_t>();
}

std::string as_str(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " entries must be strings");
  return v.get<std::string>();
}

std::uint32_t narrow32(std::uint64_t v, const char* what) {
  if (v > 0xffffffffull) throw ConfigError(std::string(what) + " out of range");
  return static_cast<std::uint32_t>(v);
}

void parse_bus(Section& s, BusConfig& bus) {
  bus.mode = parse_bus_mode(s.str("mode", std::string(to_string(bus.mode))));
  bus.n_devices = static_cast<int>(std::min<std::uint64_t>(s.uint("n_devices", 1), 1000));
  bus.frame_bits = static_cast<int>(std::min<std::uint64_t>(s.uint("frame_bits", 32), 1000));
  bus.sample_rate = narrow32(s.uint("sample_rate", bus.sample_rate), "sample_rate");
  bus.clk_div = narrow32(s.uint("clk_div", bus.clk_div), "clk_div");
  bus.polarity = parse_polarity(s.str("polarity", std::string(to_string(bus.polarity))));
  bus.alignment = parse_alignment(s.str("alignment", std::string(to_string(bus.alignment))));
  bus.fsync_style = parse_fsync_style(s.str("fsync_style", std::string(to_string(bus.fsync_style))));
  bus.role = parse_role(s.str("role", std::string(to_string(bus.role))));
}

void require_file(const std::filesystem::path& p, const char* what) {
  if (!std::filesystem::is_regular_file(p)) throw ConfigError(std::string(what) + " '" + p.string() + "' not found");
}

ojson bus_json(const BusConfig& b) {
  ojson j;
  j["mode"] = to_string(b.mode);
  j["n_devices"] = b.n_devices;
  j["frame_bits"] = b.frame_bits;
  j["sample_rate"] = b.sample_rate;
  j["clk_div"] = b.clk_div;
  j["polarity"] = to_string(b.polarity);
  j["alignment"] = to_string(b.alignment);
  j["fsync_style"] = to_string(b.fsync_style);
  j["role"] = to_string(b.role);
  return j;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::FftRun: return "fft_run";
    case ExperimentKind::FftSweep: return "fft_sweep";
    case ExperimentKind::I2sScenario: return "i2s_scenario";
    case ExperimentKind::LatencySweep: return "latency_sweep";
  }
  return "?";
}

std::string_view to_string(InputSource s) {
  switch (s) {
    case InputSource::Tone: return "tone";
    case InputSource::Impulse: return "impulse";
    case InputSource::Dc: return "dc";
    case InputSource::WhiteNoise: return "white_noise";
    case InputSource::File: return "file";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::FftRun, ExperimentKind::FftSweep, ExperimentKind::I2sScenario,
                 ExperimentKind::LatencySweep}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

InputSource parse_input_source(std::string_view name) {
  for (auto s : {InputSource::Tone, InputSource::Impulse, InputSource::Dc, InputSource::WhiteNoise,
                 InputSource::File}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown input source '" + std::string(name) + "'");
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Section top(doc, "config");
  if (!top.has("schema_version")) throw ConfigError("config.schema_version is required");
  cfg.schema_version = static_cast<int>(std::min<std::uint64_t>(top.uint("schema_version", 0), 1000));
  if (cfg.schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  if (!top.has("kind")) throw ConfigError("config.kind is required");
  cfg.kind = parse_experiment_kind(top.str("kind", ""));
  cfg.seed = top.uint("seed", cfg.seed);
  cfg.clock_frequency_hz = top.num("clock_frequency_hz", cfg.clock_frequency_hz);

  if (top.has("fft")) {
    Section s(top.raw("fft"), "fft");
    cfg.fft.dtype = parse_data_type(s.str("dtype", std::string(to_string(cfg.fft.dtype))));
    cfg.fft.n_points = narrow32(s.uint("n_points", cfg.fft.n_points), "n_points");
    cfg.fft.base_address = narrow32(s.uint("base_address", cfg.fft.base_address), "base_address");
    cfg.fft.scaling = parse_scaling(s.str("scaling", std::string(to_string(cfg.fft.scaling))));
    cfg.fft.reorder = parse_reorder_policy(s.str("reorder", std::string(to_string(cfg.fft.reorder))));
    s.finish();
  }
  if (top.has("input")) {
    Section s(top.raw("input"), "input");
    cfg.input.source = parse_input_source(s.str("source", std::string(to_string(cfg.input.source))));
    cfg.input.amplitude = s.num("amplitude", cfg.input.amplitude);
    cfg.input.bin = narrow32(s.uint("bin", cfg.input.bin), "bin");
    cfg.input.position = narrow32(s.uint("position", cfg.input.position), "position");
    cfg.input.path = s.str("path", "");
    s.finish();
  }
  if (top.has("sweep")) {
    Section s(top.raw("sweep"), "sweep");
    cfg.sweep.dtypes = s.list<DataType>("dtypes", cfg.sweep.dtypes, [](const json& v, const std::string& w) {
      return parse_data_type(as_str(v, w));
    });
    cfg.sweep.sizes = s.list<std::uint32_t>("sizes", {}, [](const json& v, const std::string& w) {
      return narrow32(as_uint(v, w), "sweep size");
    });
    s.finish();
  }
  if (top.has("i2s")) {
    Section s(top.raw("i2s"), "i2s");
    parse_bus(s, cfg.i2s.bus);
    cfg.i2s.periods = narrow32(s.uint("periods", cfg.i2s.periods), "periods");
    cfg.i2s.payload_wav = s.str("payload_wav", "");
    cfg.i2s.peripheral_clock_hz = s.num("peripheral_clock_hz", 0);
    s.finish();
  }
  if (top.has("latency")) {
    Section s(top.raw("latency"), "latency");
    cfg.latency.modes = s.list<BusMode>("modes", cfg.latency.modes, [](const json& v, const std::string& w) {
      return parse_bus_mode(as_str(v, w));
    });
    auto as_int = [](const json& v, const std::string& w) {
      return static_cast<int>(std::min<std::uint64_t>(as_uint(v, w), 1000));
    };
    cfg.latency.n_devices = s.list<int>("n_devices", {}, as_int);
    cfg.latency.frame_bits = s.list<int>("frame_bits", cfg.latency.frame_bits, as_int);
    s.finish();
  }
  if (top.has("outputs")) {
    Section s(top.raw("outputs"), "outputs");
    cfg.outputs.dir = s.str("dir", "");
    cfg.outputs.timeline_dump = s.flag("timeline_dump", false);
    cfg.outputs.memory_image = s.flag("memory_image", false);
    s.finish();
  }
  top.finish();

  if (!(cfg.clock_frequency_hz > 0)) throw ConfigError("clock_frequency_hz must be positive");
  switch (cfg.kind) {
    case ExperimentKind::FftRun:
      validate_job(cfg.fft, BankedMemory::kDefaultWords);
      [[fallthrough]];
    case ExperimentKind::FftSweep:
      if (!(cfg.input.amplitude > 0 && cfg.input.amplitude < 1)) {
        throw ConfigError("input.amplitude must be in (0, 1)");
      }
      if (cfg.input.source == InputSource::File) require_file(cfg.input.path, "input file");
      if (cfg.kind == ExperimentKind::FftRun && cfg.input.bin >= cfg.fft.n_points) {
        throw ConfigError("input.bin must be below n_points");
      }
      if (cfg.kind == ExperimentKind::FftRun && cfg.input.position >= cfg.fft.n_points) {
        throw ConfigError("input.position must be below n_points");
      }
      if (cfg.kind == ExperimentKind::FftSweep) {
        if (cfg.sweep.dtypes.empty()) throw ConfigError("sweep.dtypes is empty");
        if (cfg.input.source == InputSource::File) throw ConfigError("file input cannot be swept over sizes");
        for (auto t : cfg.sweep.dtypes) {
          for (auto n : cfg.sweep.sizes) {
            FftJob job = cfg.fft;
            job.dtype = t;
            job.n_points = n;
            validate_job(job, BankedMemory::kDefaultWords);
          }
        }
      }
      break;
    case ExperimentKind::I2sScenario:
    case ExperimentKind::LatencySweep:
      validate_bus(cfg.i2s.bus);
      if (cfg.i2s.periods == 0 || cfg.i2s.periods > 4096) throw ConfigError("i2s.periods must be in 1..4096");
      if (!cfg.i2s.payload_wav.empty()) require_file(cfg.i2s.payload_wav, "payload WAV");
      if (cfg.i2s.peripheral_clock_hz < 0) throw ConfigError("i2s.peripheral_clock_hz must be non-negative");
      for (int k : cfg.latency.n_devices) {
        if (k < 1 || k > kMaxDevices) throw ConfigError("latency.n_devices entries must be in 1..16");
      }
      for (int n : cfg.latency.frame_bits) {
        if (n != 16 && n != 24 && n != 32) throw ConfigError("latency.frame_bits entries must be 16, 24 or 32");
      }
      break;
  }
  return cfg;
}

nlohmann::json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  // Relative paths are taken from the config file's directory.
  const auto base = path.parent_path();
  auto rebase = [&](json& obj, const char* section, const char* key) {
    if (obj.contains(section) && obj[section].is_object() && obj[section].contains(key) &&
        obj[section][key].is_string()) {
      std::filesystem::path p = obj[section][key].get<std::string>();
      if (!p.empty() && p.is_relative()) obj[section][key] = (base / p).lexically_normal().generic_string();
    }
  };
  rebase(doc, "input", "path");
  rebase(doc, "i2s", "payload_wav");
  rebase(doc, "outputs", "dir");
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(load_config_document(path)); }

ojson config_echo(const ExperimentConfig& cfg) {
  ojson j;
  j["schema_version"] = cfg.schema_version;
  j["kind"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  j["clock_frequency_hz"] = cfg.clock_frequency_hz;
  if (cfg.kind == ExperimentKind::FftRun || cfg.kind == ExperimentKind::FftSweep) {
    ojson f;
    if (cfg.kind == ExperimentKind::FftRun) {
      f["dtype"] = to_string(cfg.fft.dtype);
      f["n_points"] = cfg.fft.n_points;
    }
    f["base_address"] = cfg.fft.base_address;
    f["scaling"] = to_string(cfg.fft.scaling);
    f["reorder"] = to_string(cfg.fft.reorder);
    j["fft"] = f;
    ojson in;
    in["source"] = to_string(cfg.input.source);
    in["amplitude"] = cfg.input.amplitude;
    if (cfg.input.source == InputSource::Tone) in["bin"] = cfg.input.bin;
    if (cfg.input.source == InputSource::Impulse) in["position"] = cfg.input.position;
    if (cfg.input.source == InputSource::File) in["path"] = cfg.input.path.generic_string();
    j["input"] = in;
  }
  if (cfg.kind == ExperimentKind::FftSweep) {
    ojson s;
    s["dtypes"] = ojson::array();
    for (auto t : cfg.sweep.dtypes) s["dtypes"].push_back(to_string(t));
    s["sizes"] = cfg.sweep.sizes;
    j["sweep"] = s;
  }
  if (cfg.kind == ExperimentKind::I2sScenario || cfg.kind == ExperimentKind::LatencySweep) {
    ojson i = bus_json(cfg.i2s.bus);
    i["periods"] = cfg.i2s.periods;
    if (!cfg.i2s.payload_wav.empty()) i["payload_wav"] = cfg.i2s.payload_wav.generic_string();
    i["peripheral_clock_hz"] = cfg.i2s.peripheral_clock_hz;
    j["i2s"] = i;
  }
  if (cfg.kind == ExperimentKind::LatencySweep) {
    ojson l;
    l["modes"] = ojson::array();
    for (auto m : cfg.latency.modes) l["modes"].push_back(to_string(m));
    l["n_devices"] = cfg.latency.n_devices;
    l["frame_bits"] = cfg.latency.frame_bits;
    j["latency"] = l;
  }
  return j;
}

}  // namespace echoes
