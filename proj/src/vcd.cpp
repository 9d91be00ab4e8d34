// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <sstream>

#include "echoes/i2s.hpp"

namespace echoes {

namespace {

constexpr int kDriverBits = 5;

std::string driver_value(int driver) {
  std::string v(kDriverBits, 'x');
  if (driver == kNoDriver) return v;
  for (int b = 0; b < kDriverBits; ++b) v[kDriverBits - 1 - b] = ((driver >> b) & 1) ? '1' : '0';
  return v;
}

}  // namespace

std::string to_vcd(const Timeline& tl, const BusConfig& c) {
  const auto half_ps = static_cast<std::int64_t>(std::llround(0.5e12 / bclk_frequency(c)));
  std::ostringstream os;
  os << "$version echoes-sim $end\n"
     << "$comment mode " << to_string(c.mode) << " devices " << c.n_devices << " frame_bits " << c.frame_bits
     << " sample_rate " << c.sample_rate << ' ' << to_string(c.polarity) << ' ' << to_string(c.alignment) << ' '
     << to_string(c.fsync_style) << ' ' << to_string(c.role) << " $end\n"
     << "$timescale 1 ps $end\n"
     << "$scope module i2s $end\n"
     << "$var wire 1 ! bclk $end\n"
     << "$var wire 1 \" fsync $end\n"
     << "$var wire 1 # sd $end\n"
     << "$var wire " << kDriverBits << " $ sd_driver $end\n"
     << "$upscope $end\n"
     << "$enddefinitions $end\n";
  const TimelineEvent* last = nullptr;
  for (const auto& e : tl.events) {
    std::ostringstream changes;
    if (!last) changes << "$dumpvars\n";
    if (!last || last->bclk != e.bclk) changes << int{e.bclk} << "!\n";
    if (!last || last->fsync != e.fsync) changes << int{e.fsync} << "\"\n";
    if (!last || last->sd != e.sd) changes << int{e.sd} << "#\n";
    if (!last || last->driver != e.driver) changes << 'b' << driver_value(e.driver) << " $\n";
    if (!last) changes << "$end\n";
    if (!changes.str().empty()) os << '#' << e.time * half_ps << '\n' << changes.str();
    last = &e;
  }
  if (last) os << '#' << (last->time + 1) * half_ps << '\n';
  return os.str();
}

void export_vcd(const Timeline& tl, const BusConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write " + path.string());
  out << to_vcd(tl, c);
}

}  // namespace echoes
