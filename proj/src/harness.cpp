// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace echoes {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Check make_check(std::string name, bool pass, std::string detail = {}) {
  return {std::move(name), pass, std::move(detail)};
}

ojson checks_json(const std::vector<Check>& checks) {
  ojson a = ojson::array();
  for (const auto& c : checks) {
    ojson j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["detail"] = c.detail;
    a.push_back(j);
  }
  return a;
}

void checks_text(std::ostringstream& os, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    os << "check " << c.name << ' ' << (c.pass ? "PASS" : "FAIL");
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
}

ojson stats_json(const CycleStats& s) {
  ojson j;
  j["total_cycles"] = s.total_cycles;
  j["butterfly_cycles"] = s.butterfly_cycles;
  j["reorder_cycles"] = s.reorder_cycles;
  j["stall_cycles"] = s.stall_cycles;
  j["overhead_cycles"] = s.overhead_cycles;
  j["conflicts"] = s.conflicts;
  j["butterfly_conflicts"] = s.butterfly_conflicts;
  j["reorder_conflicts"] = s.reorder_conflicts;
  return j;
}

std::size_t argmax_abs(const std::vector<cplx>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

std::vector<cplx> read_complex_file(const std::filesystem::path& path, std::uint32_t n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file '" + path.string() + "'");
  std::vector<cplx> out;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re)) continue;
    ls >> im;
    out.emplace_back(re, im);
  }
  if (out.size() != n) {
    throw ConfigError("input file holds " + std::to_string(out.size()) + " samples, job needs " + std::to_string(n));
  }
  return out;
}

std::vector<std::uint32_t> sweep_sizes(const FftSweepSpec& spec, DataType t) {
  if (!spec.sizes.empty()) return spec.sizes;
  std::vector<std::uint32_t> out;
  for (std::uint32_t n = 8; n <= max_points(t); n *= 2) out.push_back(n);
  return out;
}

// Alternating bits: any one-slot misalignment turns 1010... into 0101...
std::vector<FramePayload> preamble(const BusConfig& bus) {
  const std::uint32_t mask = (1u << channel_bits(bus)) - 1u;
  std::vector<FramePayload> out;
  for (int d = 0; d < bus.n_devices; ++d) out.push_back({d, 0xAAAAAAAAu & mask, 0x55555555u & mask});
  return out;
}

// FSYNC assertions (DSP) or word-select changes (I2S) per sample period.
bool fsync_periodic(const Timeline& tl, const BusConfig& bus, std::size_t periods) {
  const std::uint32_t period = period_slots(bus);
  const bool dsp = bus.mode == BusMode::TdmDsp;
  std::vector<std::size_t> marks;
  std::uint8_t prev = dsp ? 0 : 1;
  for (std::size_t s = 0; s < tl.slots(); ++s) {
    const auto f = tl.events[2 * s].fsync;
    if (dsp ? (prev == 0 && f == 1) : (f != prev)) marks.push_back(s);
    prev = f;
  }
  const std::size_t per_period = dsp ? 1 : 2;
  if (marks.size() != periods * per_period) return false;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const std::size_t p = i / per_period;
    const std::size_t expect = p * period + (i % per_period ? period / 2 : 0);
    if (marks[i] != expect) return false;
  }
  return true;
}

// Runs of one SD driver within each period: K in DSP mode, 2K in I2S modes
// (one when a lone device sends L and R back to back).
bool slots_exclusive(const Timeline& tl, const BusConfig& bus, std::size_t periods) {
  const std::uint32_t period = period_slots(bus);
  const std::uint32_t delay = alignment_delay(bus);
  const auto k = static_cast<std::size_t>(bus.n_devices);
  const std::size_t expect = bus.mode == BusMode::TdmDsp || k == 1 ? k : 2 * k;
  for (std::size_t p = 0; p < periods; ++p) {
    std::size_t runs = 0;
    int prev = kNoDriver - 1;
    for (std::uint32_t o = 0; o < period; ++o) {
      const std::size_t s = p * period + o + delay;
      if (s >= tl.slots()) return false;
      const int d = tl.events[2 * s].driver;
      if (d == kNoDriver) return false;
      if (d != prev) ++runs;
      prev = d;
    }
    if (runs != expect) return false;
  }
  return true;
}

std::string i2s_key(const I2sReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d/%02d/%02d", static_cast<int>(r.bus.mode), r.bus.frame_bits, r.bus.n_devices);
  return buf;
}

}  // namespace

double snr_floor_db(DataType dtype) {
  switch (dtype) {
    case DataType::C64: return 152.5;  // worst of 64 seeds at 512 points: 153.54 dB
    case DataType::C32: return 53.4;   // 1024 points: 54.43 dB
    case DataType::C16: return 2.8;    // 2048 points: 3.81 dB
  }
  return 0;
}

std::uint64_t fft_ops(std::uint32_t n_points) {
  return 10ull * (n_points / 2) * static_cast<std::uint64_t>(log2_exact(n_points));
}

double gops(std::uint64_t ops, std::uint64_t cycles, double clock_hz) {
  if (cycles == 0) return 0;
  return static_cast<double>(ops) / (static_cast<double>(cycles) / clock_hz) / 1e9;
}

double snr_db(const std::vector<cplx>& reference, const std::vector<cplx>& test) {
  if (reference.size() != test.size()) throw UsageError("snr_db: length mismatch");
  double sig = 0, err = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    sig += std::norm(reference[i]);
    err += std::norm(reference[i] - test[i]);
  }
  if (err == 0) return kSnrCeilingDb;
  if (sig == 0) return -kSnrCeilingDb;
  return std::min(kSnrCeilingDb, 10.0 * std::log10(sig / err));
}

std::vector<cplx> make_input(const InputSpec& in, std::uint32_t n, std::uint64_t seed) {
  std::vector<cplx> x(n);
  switch (in.source) {
    case InputSource::WhiteNoise: {
      std::mt19937_64 rng(seed);
      auto part = [&] { return in.amplitude * (2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0); };
      for (auto& v : x) {
        const double re = part();
        v = {re, part()};
      }
      break;
    }
    case InputSource::Tone:
      for (std::uint32_t j = 0; j < n; ++j) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>((std::uint64_t{in.bin} * j) % n) / n;
        x[j] = in.amplitude * cplx(std::cos(ph), std::sin(ph));
      }
      break;
    case InputSource::Impulse:
      if (in.position >= n) throw ConfigError("impulse position beyond the transform");
      x[in.position] = in.amplitude;
      break;
    case InputSource::Dc:
      std::fill(x.begin(), x.end(), cplx(in.amplitude, 0));
      break;
    case InputSource::File:
      x = read_complex_file(in.path, n);
      break;
  }
  return x;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

FftReport run_fft_experiment(const ExperimentConfig& cfg) {
  const FftJob& job = cfg.fft;
  validate_job(job, BankedMemory::kDefaultWords);
  const std::uint32_t n = job.n_points;

  const auto x = make_input(cfg.input, n, cfg.seed);
  std::vector<FixedComplex> q;
  q.reserve(n);
  for (const auto& v : x) q.push_back(quantize(v, job.dtype));

  BankedMemory memory;
  load_samples(memory, job.base_address, q);
  const auto summary = fft_fixed(job, memory);
  const auto out = read_samples(memory, job.base_address, n, job.dtype);

  std::vector<cplx> y(n);
  for (std::uint32_t i = 0; i < n; ++i) y[i] = dequantize(out[i]);
  auto ref = fft_reference(x);
  const double scale = std::ldexp(1.0, -summary.scaling_stages);
  for (auto& v : ref) v *= scale;

  FftReport r;
  r.config = config_echo(cfg);
  r.dtype = job.dtype;
  r.n_points = n;
  r.stats = summary.stats;
  r.predicted = total_cycle_model(n, job.dtype, job.reorder);
  r.overflow = summary.overflow;
  r.max_register_words = summary.max_register_words;
  r.snr_db = snr_db(ref, y);
  r.ops = fft_ops(n);
  r.clock_hz = cfg.clock_frequency_hz;
  r.gops = gops(r.ops, r.stats.total_cycles, r.clock_hz);

  const auto& s = r.stats;
  const std::uint64_t ideal =
      std::uint64_t{n / 2} * static_cast<std::uint64_t>(log2_exact(n)) / butterflies_per_cycle(job.dtype);
  r.checks.push_back(make_check("throughput_model", s.butterfly_cycles == ideal,
                                std::to_string(s.butterfly_cycles) + " vs " + std::to_string(ideal)));
  r.checks.push_back(make_check("cycle_model", s == r.predicted,
                                "predicted total " + std::to_string(r.predicted.total_cycles)));
  r.checks.push_back(make_check(
      "cycle_accounting",
      s.total_cycles == s.butterfly_cycles + s.reorder_cycles + s.stall_cycles + s.overhead_cycles));
  r.checks.push_back(make_check("butterfly_stage_conflict_free", s.butterfly_conflicts == 0,
                                std::to_string(s.butterfly_conflicts) + " conflicts"));
  r.checks.push_back(make_check("one_stall_per_conflict",
                                s.stall_cycles == s.conflicts && s.conflicts == s.reorder_conflicts,
                                std::to_string(s.stall_cycles) + " stalls, " + std::to_string(s.conflicts) +
                                    " conflicts"));
  r.checks.push_back(make_check("register_capacity", r.max_register_words <= kRegisterSetWords,
                                std::to_string(r.max_register_words) + " words"));
  r.checks.push_back(make_check("matches_unscheduled_arithmetic", out == fft_fixed_direct(q, job.scaling)));
  r.checks.push_back(make_check("no_saturation", !r.overflow));

  switch (cfg.input.source) {
    case InputSource::WhiteNoise:
      if (job.scaling == ScalingPolicy::DivideByTwoPerStage) {
        const double floor = snr_floor_db(job.dtype);
        r.checks.push_back(make_check("snr_floor", r.snr_db >= floor,
                                      fmt("%.3f dB", r.snr_db) + " vs floor " + fmt("%.1f dB", floor)));
      }
      break;
    case InputSource::Tone:
    case InputSource::Dc: {
      const auto got = argmax_abs(y), want = argmax_abs(ref);
      r.checks.push_back(make_check("peak_bin", got == want,
                                    "bin " + std::to_string(got) + " vs oracle " + std::to_string(want)));
      break;
    }
    case InputSource::Impulse: {
      // Every bin within two LSBs of the oracle's flat spectrum.
      double worst = 0;
      for (std::uint32_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y[i] - ref[i]));
      const double tol = 2.0 * ulp(job.dtype);
      r.checks.push_back(make_check("flat_spectrum", worst <= tol, fmt("max error %.3g", worst)));
      break;
    }
    case InputSource::File: break;
  }

  const double back = r.gops * 1e9 * static_cast<double>(s.total_cycles) / r.clock_hz;
  r.checks.push_back(make_check("gops_consistency",
                                std::abs(back - static_cast<double>(r.ops)) <= 1e-6 * static_cast<double>(r.ops)));

  if (cfg.outputs.memory_image && !cfg.outputs.dir.empty()) {
    std::filesystem::create_directories(cfg.outputs.dir);
    export_image(memory, {job.dtype, n, job.base_address}, cfg.outputs.dir / "spectrum.bin");
  }
  return r;
}

I2sReport run_i2s_scenario(const ExperimentConfig& cfg) {
  const BusConfig& bus = cfg.i2s.bus;
  validate_bus(bus);
  const int k = channel_bits(bus);
  const std::uint32_t mask = (1u << k) - 1u;

  std::vector<FramePayload> body;
  if (!cfg.i2s.payload_wav.empty()) {
    body = wav_to_payloads(bus, read_wav(cfg.i2s.payload_wav));
  } else {
    std::mt19937_64 rng(cfg.seed);
    for (std::uint32_t p = 0; p < cfg.i2s.periods; ++p) {
      for (int d = 0; d < bus.n_devices; ++d) {
        const auto l = static_cast<std::uint32_t>(rng()) & mask;
        body.push_back({d, l, static_cast<std::uint32_t>(rng()) & mask});
      }
    }
  }
  auto payloads = preamble(bus);
  const std::size_t head = payloads.size();
  payloads.insert(payloads.end(), body.begin(), body.end());
  const std::size_t periods = payloads.size() / static_cast<std::size_t>(bus.n_devices);

  const Timeline tl = encode(bus, payloads);

  I2sReport r;
  r.config = config_echo(cfg);
  r.bus = bus;
  r.bclk_hz = bclk_frequency(bus);
  r.tclk_s = bit_period(bus);
  r.payloads = payloads.size();
  r.latency_slots = measure_latency_slots(tl, bus);
  r.expected_latency_slots = expected_latency_slots(bus);
  r.latency_s = measure_latency(tl, bus);
  r.latency_tdm_s = latency_tdm(bus.frame_bits, bus.n_devices, r.tclk_s);
  r.latency_dsp_s = latency_dsp(bus.frame_bits, r.tclk_s);

  std::vector<FramePayload> decoded;
  std::string decode_note;
  try {
    decoded = decode(tl, bus);
  } catch (const FramingError& e) {
    decoded = e.partial();
    decode_note = e.what();
  }
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    if (i >= decoded.size() || !(decoded[i] == payloads[i])) ++r.mismatches;
  }
  if (decoded.size() > payloads.size()) r.mismatches += decoded.size() - payloads.size();

  const bool preamble_ok =
      decoded.size() >= head && std::equal(payloads.begin(), payloads.begin() + static_cast<std::ptrdiff_t>(head),
                                           decoded.begin());
  r.checks.push_back(make_check("round_trip", r.mismatches == 0 && decode_note.empty(),
                                std::to_string(r.mismatches) + " mismatches" +
                                    (decode_note.empty() ? std::string() : "; " + decode_note)));
  r.checks.push_back(make_check("preamble", preamble_ok));
  r.checks.push_back(make_check("latency_formula", r.latency_slots == r.expected_latency_slots,
                                std::to_string(r.latency_slots) + " vs " + std::to_string(r.expected_latency_slots) +
                                    " Tclk"));

  BusConfig flipped = bus;
  flipped.polarity = bus.polarity == ClockPolarity::SampleOnRising ? ClockPolarity::SampleOnFalling
                                                                   : ClockPolarity::SampleOnRising;
  bool detected = true;
  try {
    const auto wrong = decode(tl, flipped);
    detected = wrong.size() < head ||
               !std::equal(payloads.begin(), payloads.begin() + static_cast<std::ptrdiff_t>(head), wrong.begin());
  } catch (const FramingError&) {
  }
  r.checks.push_back(make_check("polarity_guard", detected, "opposite-edge decode rejected by the preamble"));
  r.checks.push_back(make_check("fsync_periodicity", fsync_periodic(tl, bus, periods)));
  r.checks.push_back(make_check("slot_exclusivity", slots_exclusive(tl, bus, periods)));

  if (cfg.i2s.peripheral_clock_hz > 0) {
    std::string detail;
    bool ok = false;
    try {
      r.clk_div_required = clock_divider(cfg.i2s.peripheral_clock_hz, bus);
      ok = bus.clk_div <= r.clk_div_required;
      detail = "clk_div " + std::to_string(bus.clk_div) + ", largest usable " + std::to_string(r.clk_div_required);
    } catch (const ConfigError& e) {
      detail = e.what();
    }
    r.checks.push_back(make_check("bclk_reachable", ok, detail));
  }

  if (!cfg.outputs.dir.empty() && cfg.outputs.timeline_dump) {
    std::filesystem::create_directories(cfg.outputs.dir);
    export_vcd(tl, bus, cfg.outputs.dir / "timeline.vcd");
  }
  if (!cfg.outputs.dir.empty() && !cfg.i2s.payload_wav.empty() && decoded.size() >= head) {
    std::filesystem::create_directories(cfg.outputs.dir);
    const std::vector<FramePayload> tail(decoded.begin() + static_cast<std::ptrdiff_t>(head), decoded.end());
    write_wav(payloads_to_wav(bus, tail), cfg.outputs.dir / "decoded.wav");
  }
  return r;
}

bool SweepReport::pass() const {
  if (!all_pass(checks)) return false;
  return std::all_of(fft.begin(), fft.end(), [](const FftReport& r) { return r.pass(); }) &&
         std::all_of(i2s.begin(), i2s.end(), [](const I2sReport& r) { return r.pass(); });
}

std::string SweepReport::csv() const {
  std::ostringstream os;
  if (!fft.empty()) {
    os << "dtype,n_points,total_cycles,butterfly_cycles,reorder_cycles,stall_cycles,overhead_cycles,conflicts,"
          "butterfly_conflicts,snr_db,ops,gops,model_match,pass\n";
    for (const auto& r : fft) {
      os << to_string(r.dtype) << ',' << r.n_points << ',' << r.stats.total_cycles << ',' << r.stats.butterfly_cycles
         << ',' << r.stats.reorder_cycles << ',' << r.stats.stall_cycles << ',' << r.stats.overhead_cycles << ','
         << r.stats.conflicts << ',' << r.stats.butterfly_conflicts << ',' << fmt("%.3f", r.snr_db) << ',' << r.ops
         << ',' << fmt("%.6f", r.gops) << ',' << (r.stats == r.predicted ? 1 : 0) << ',' << (r.pass() ? 1 : 0)
         << '\n';
    }
  }
  if (!i2s.empty()) {
    os << "mode,n_devices,frame_bits,bclk_hz,latency_tclk,expected_tclk,latency_us,mismatches,pass\n";
    for (const auto& r : i2s) {
      os << to_string(r.bus.mode) << ',' << r.bus.n_devices << ',' << r.bus.frame_bits << ','
         << fmt("%.0f", r.bclk_hz) << ',' << r.latency_slots << ',' << r.expected_latency_slots << ','
         << fmt("%.6f", r.latency_s * 1e6) << ',' << r.mismatches << ',' << (r.pass() ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
  SweepReport rep;
  rep.config = config_echo(cfg);

  if (cfg.kind == ExperimentKind::FftSweep) {
    std::vector<std::future<FftReport>> jobs;
    for (auto t : cfg.sweep.dtypes) {
      for (auto n : sweep_sizes(cfg.sweep, t)) {
        ExperimentConfig member = cfg;
        member.kind = ExperimentKind::FftRun;
        member.fft.dtype = t;
        member.fft.n_points = n;
        member.outputs = {};
        if (member.input.bin >= n) member.input.bin = 1;
        if (member.input.position >= n) member.input.position = 0;
        jobs.push_back(std::async(std::launch::async, [member] { return run_fft_experiment(member); }));
      }
    }
    for (auto& j : jobs) rep.fft.push_back(j.get());
    std::sort(rep.fft.begin(), rep.fft.end(), [](const FftReport& a, const FftReport& b) {
      return std::pair(static_cast<int>(a.dtype), a.n_points) < std::pair(static_cast<int>(b.dtype), b.n_points);
    });

    std::string failed;
    for (const auto& r : rep.fft) {
      if (!r.pass()) failed += std::string(failed.empty() ? "" : " ") + std::string(to_string(r.dtype)) + "/" +
                               std::to_string(r.n_points);
    }
    rep.checks.push_back(make_check("members_pass", failed.empty(), failed));

    std::map<DataType, std::vector<const FftReport*>> by_type;
    std::map<std::uint32_t, std::map<DataType, std::uint64_t>> by_size;
    for (const auto& r : rep.fft) {
      by_type[r.dtype].push_back(&r);
      by_size[r.n_points][r.dtype] = r.stats.butterfly_cycles;
    }
    bool mono = true;
    std::string where;
    for (const auto& [t, list] : by_type) {
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i]->stats.total_cycles <= list[i - 1]->stats.total_cycles) {
          mono = false;
          where += std::string(to_string(t)) + "/" + std::to_string(list[i]->n_points) + " ";
        }
      }
    }
    rep.checks.push_back(make_check("cycles_increase_with_n", mono, where));
    bool ratio = true;
    std::size_t compared = 0;
    for (const auto& [n, m] : by_size) {
      const auto c64 = m.find(DataType::C64);
      if (c64 == m.end()) continue;
      for (auto [t, div] : {std::pair(DataType::C32, 2u), std::pair(DataType::C16, 4u)}) {
        const auto it = m.find(t);
        if (it == m.end()) continue;
        ++compared;
        ratio = ratio && it->second * div == c64->second;
      }
    }
    rep.checks.push_back(
        make_check("butterfly_cycles_scale_with_throughput", ratio, std::to_string(compared) + " pairs compared"));
    return rep;
  }

  if (cfg.kind == ExperimentKind::LatencySweep) {
    std::vector<int> devices = cfg.latency.n_devices;
    if (devices.empty()) {
      for (int k = 1; k <= kMaxDevices; ++k) devices.push_back(k);
    }
    std::vector<std::future<I2sReport>> jobs;
    for (auto mode : cfg.latency.modes) {
      for (int n : cfg.latency.frame_bits) {
        for (int k : devices) {
          if (mode == BusMode::StandardI2s && k != 1) continue;
          ExperimentConfig member = cfg;
          member.kind = ExperimentKind::I2sScenario;
          member.i2s.bus.mode = mode;
          member.i2s.bus.frame_bits = n;
          member.i2s.bus.n_devices = k;
          member.i2s.payload_wav.clear();
          member.outputs = {};
          jobs.push_back(std::async(std::launch::async, [member] { return run_i2s_scenario(member); }));
        }
      }
    }
    for (auto& j : jobs) rep.i2s.push_back(j.get());
    std::sort(rep.i2s.begin(), rep.i2s.end(),
              [](const I2sReport& a, const I2sReport& b) { return i2s_key(a) < i2s_key(b); });

    std::string failed;
    for (const auto& r : rep.i2s) {
      if (!r.pass()) failed += (failed.empty() ? "" : " ") + i2s_key(r);
    }
    rep.checks.push_back(make_check("members_pass", failed.empty(), failed));

    std::map<std::pair<BusMode, int>, std::vector<const I2sReport*>> groups;
    for (const auto& r : rep.i2s) groups[{r.bus.mode, r.bus.frame_bits}].push_back(&r);
    bool flat = true, grows = true;
    for (const auto& [key, list] : groups) {
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (key.first == BusMode::TdmDsp) flat = flat && list[i]->latency_slots == list[0]->latency_slots;
        if (key.first == BusMode::TdmI2s) grows = grows && list[i]->latency_slots > list[i - 1]->latency_slots;
      }
    }
    rep.checks.push_back(make_check("dsp_latency_flat_in_k", flat));
    rep.checks.push_back(make_check("tdm_latency_grows_with_k", grows));
    return rep;
  }
  throw UsageError("run_sweep needs a sweep experiment");
}

ojson to_json(const FftReport& r) {
  ojson j;
  j["report"] = "fft_run";
  j["config"] = r.config;
  ojson res;
  res["dtype"] = to_string(r.dtype);
  res["n_points"] = r.n_points;
  res["cycles"] = stats_json(r.stats);
  res["predicted_cycles"] = stats_json(r.predicted);
  res["overflow"] = r.overflow;
  res["max_register_words"] = r.max_register_words;
  res["snr_db"] = r.snr_db;
  res["ops"] = r.ops;
  res["clock_frequency_hz"] = r.clock_hz;
  res["gops"] = r.gops;
  j["result"] = res;
  j["checks"] = checks_json(r.checks);
  j["pass"] = r.pass();
  return j;
}

ojson to_json(const I2sReport& r) {
  ojson j;
  j["report"] = "i2s_scenario";
  j["config"] = r.config;
  ojson res;
  res["mode"] = to_string(r.bus.mode);
  res["n_devices"] = r.bus.n_devices;
  res["frame_bits"] = r.bus.frame_bits;
  res["bclk_hz"] = r.bclk_hz;
  res["tclk_s"] = r.tclk_s;
  if (r.clk_div_required) res["clk_div_max"] = r.clk_div_required;
  res["latency_tclk"] = r.latency_slots;
  res["expected_latency_tclk"] = r.expected_latency_slots;
  res["latency_s"] = r.latency_s;
  res["latency_tdm_s"] = r.latency_tdm_s;
  res["latency_dsp_s"] = r.latency_dsp_s;
  res["tdm_to_dsp_latency_ratio"] = r.latency_tdm_s / r.latency_dsp_s;
  res["payloads"] = r.payloads;
  res["mismatches"] = r.mismatches;
  j["result"] = res;
  j["checks"] = checks_json(r.checks);
  j["pass"] = r.pass();
  return j;
}

ojson to_json(const SweepReport& r) {
  ojson j;
  j["report"] = r.fft.empty() && !r.i2s.empty() ? "latency_sweep" : "fft_sweep";
  j["config"] = r.config;
  ojson members = ojson::array();
  for (const auto& m : r.fft) {
    auto mj = to_json(m);
    mj.erase("config");
    members.push_back(mj);
  }
  for (const auto& m : r.i2s) {
    auto mj = to_json(m);
    mj.erase("config");
    members.push_back(mj);
  }
  j["members"] = members;
  j["checks"] = checks_json(r.checks);
  j["pass"] = r.pass();
  return j;
}

std::string to_text(const FftReport& r) {
  std::ostringstream os;
  const auto& s = r.stats;
  os << "fft run " << to_string(r.dtype) << " n=" << r.n_points << " seed=" << r.config.value("seed", 0ull) << '\n'
     << "cycles total=" << s.total_cycles << " butterfly=" << s.butterfly_cycles << " reorder=" << s.reorder_cycles
     << " stall=" << s.stall_cycles << " overhead=" << s.overhead_cycles << '\n'
     << "conflicts total=" << s.conflicts << " butterfly=" << s.butterfly_conflicts
     << " reorder=" << s.reorder_conflicts << '\n'
     << "model total=" << r.predicted.total_cycles << " match=" << (s == r.predicted ? "yes" : "no") << '\n'
     << "snr_db=" << fmt("%.3f", r.snr_db) << " overflow=" << (r.overflow ? "yes" : "no") << '\n'
     << "ops=" << r.ops << " clock_hz=" << fmt("%.0f", r.clock_hz) << " gops=" << fmt("%.4f", r.gops) << '\n';
  checks_text(os, r.checks);
  os << "result " << (r.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string to_text(const I2sReport& r) {
  std::ostringstream os;
  os << "i2s " << to_string(r.bus.mode) << " devices=" << r.bus.n_devices << " frame_bits=" << r.bus.frame_bits
     << " sample_rate=" << r.bus.sample_rate << '\n'
     << "bclk_hz=" << fmt("%.0f", r.bclk_hz) << " tclk_ns=" << fmt("%.3f", r.tclk_s * 1e9) << '\n'
     << "latency tclk=" << r.latency_slots << " expected=" << r.expected_latency_slots
     << " us=" << fmt("%.4f", r.latency_s * 1e6) << '\n'
     << "closed_form tdm_us=" << fmt("%.4f", r.latency_tdm_s * 1e6) << " dsp_us=" << fmt("%.4f", r.latency_dsp_s * 1e6)
     << " ratio=" << fmt("%.4f", r.latency_tdm_s / r.latency_dsp_s) << '\n'
     << "payloads=" << r.payloads << " mismatches=" << r.mismatches << '\n';
  checks_text(os, r.checks);
  os << "result " << (r.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string to_text(const SweepReport& r) {
  std::ostringstream os;
  os << (r.fft.empty() && !r.i2s.empty() ? "latency sweep" : "fft sweep") << ", "
     << (r.fft.size() + r.i2s.size()) << " runs\n"
     << r.csv();
  checks_text(os, r.checks);
  os << "result " << (r.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& cfg, const ojson& json,
                                                 const std::string& text, const std::string& csv) {
  std::vector<std::filesystem::path> written;
  if (cfg.outputs.dir.empty()) return written;
  std::filesystem::create_directories(cfg.outputs.dir);
  auto put = [&](const char* name, const std::string& body) {
    const auto p = cfg.outputs.dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ModelError("cannot write " + p.string());
    out << body;
    written.push_back(p);
  };
  put("report.json", json.dump(2) + "\n");
  put("report.txt", text);
  if (!csv.empty()) put("summary.csv", csv);
  return written;
}

}  // namespace echoes
