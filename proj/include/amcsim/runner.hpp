#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amcsim/controller.hpp"

namespace amcsim {

struct ArraySpec {
  std::uint32_t id = 0;
  Technology tech = Technology::Aug8T;
  CellMode mode = CellMode::Augmented;
  std::uint32_t rows = 64;
  std::uint32_t cols = 64;

  friend bool operator==(const ArraySpec&, const ArraySpec&) = default;
};

// `count` identical sub-arrays with ids 0..count-1.
std::vector<ArraySpec> uniform_arrays(Technology tech, CellMode mode, std::uint32_t rows,
                                      std::uint32_t cols, std::uint32_t count);

struct RunSetup {
  std::vector<ArraySpec> arrays;
  double temperature_C = 85.0;
  std::optional<BiasConfig> bias;  // unset: default_bias(tech) per sub-array
  std::uint64_t seed = 1;
  Policies policies;
  bool resample_on_refresh = false;
  // Zero trits get the model's zero_retention_factor; otherwise every trit
  // shares the (0,1)/(1,0) bound.
  bool zero_retention_study = false;
  TimeNs horizon_ns = 0;  // 0: time of the last command
  unsigned workers = 1;
  bool snapshot = false;  // dump final cell occupancy into RunResult::snapshot
  nlohmann::json config_echo;
};

// Builds the sub-arrays, sampling per-cell retention from the models at the
// configured temperature and bias.
std::vector<SubArray> build_arrays(const std::vector<ArraySpec>& specs, const RunSetup& setup,
                                   const ModelParams& models);

struct RunResult {
  SimReport report;
  std::vector<TraceEvent> events;  // canonical order
  std::string snapshot;            // sub-arrays in id order, at the horizon
};

// Runs a time-sorted trace to the horizon. Sub-arrays are split across
// `workers` independent controllers and the results merged; the outcome does
// not depend on the worker count.
RunResult run(const std::vector<Command>& trace, const RunSetup& setup, const ModelParams& models);

}  // namespace amcsim
