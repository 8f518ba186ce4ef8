#pragma once

// Trace files and synthetic trace generators.
//
// Trace grammar (one command per line, integer ns, '#' starts a comment):
//
//   # amcsim trace v1
//   # array <id> <tech> <mode> <rows> <cols>
//   <time> WRITE_SRAM|WRITE_DRAM <sa>:<row>:<col> 0|1
//   <time> READ_SRAM|READ_SRAM_PULSED|READ_DRAM|READ_TRIT|REFRESH <sa>:<row>:<col>
//   <time> WRITE_TRIT <sa>:<row>:<col> -1|0|+1
//   <time> SET_MODE <sa> NORMAL|AUGMENTED|POWER_GATED
//   <time> IDLE

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amcsim/runner.hpp"

namespace amcsim {

inline constexpr int kTraceVersion = 1;

struct TraceFile {
  int version = kTraceVersion;
  std::vector<ArraySpec> arrays;  // header echo; may be empty
  std::vector<Command> commands;

  friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

// Throws TraceError(line, reason) on malformed lines or time regressions.
TraceFile parse_trace_file(std::string_view text);
std::vector<Command> parse_trace(std::string_view text);

std::string format_command(const Command& cmd);
std::string serialize(const TraceFile& trace);

TraceFile load_trace(const std::string& path);

struct WeightStationaryParams {
  std::uint32_t weights = 64;
  std::uint64_t activations = 256;
  TimeNs inter_arrival_ns = 10;
  std::uint32_t subarray = 0;
  std::uint32_t rows = 64;
  std::uint32_t cols = 64;
};

// Weights go to the static planes, activations stream through the dynamic
// plane of the same cells (write then read), and the weights are read back
// after the sub-array drops to Normal mode, which discards the consumed
// activations without touching the static data.
TraceFile gen_weight_stationary(const WeightStationaryParams& params, std::uint64_t seed);

// Warning text when an activation may outlive retention before it is read.
std::optional<std::string> check_weight_stationary(const WeightStationaryParams& params,
                                                   double retention_ns);

struct RandomTraceParams {
  std::vector<ArraySpec> arrays = uniform_arrays(Technology::Aug8T, CellMode::Augmented, 16, 16, 1);
  std::uint64_t commands = 1000;
  TimeNs mean_gap_ns = 100;        // gaps uniform in [0, 2 * mean]
  double violation_rate = 0.0;     // chance to inject a FILO violation when one is possible
  double set_mode_rate = 0.0;
};

struct RandomTraceStats {
  std::uint64_t eligible = 0;  // steps where a violation could be injected
  std::uint64_t injected = 0;
};

TraceFile gen_random(const RandomTraceParams& params, std::uint64_t seed,
                     RandomTraceStats* stats = nullptr);

}  // namespace amcsim
