#pragma once

// Command-line front end: simulate, capacity, compare, gen-trace,
// validate-trace.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amcsim/runner.hpp"

namespace amcsim {

// Exit codes: 0 clean, 2 violations or lint findings, 1 error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

enum class CompareWorkload : std::uint8_t { Ternary, Dual };

std::string_view to_string(CompareWorkload w);
std::optional<CompareWorkload> parse_compare_workload(std::string_view s);

struct CompareSetup {
  CompareWorkload workload = CompareWorkload::Ternary;
  std::uint64_t items = 1024;  // trits, or bit pairs for Dual
  TimeNs gap_ns = 10;
  std::uint64_t seed = 1;
  double temperature_C = 85.0;
  std::optional<BiasConfig> bias;
  Policies policies;
};

struct CompareSide {
  std::string name;
  Technology tech = Technology::Std6T;
  std::vector<Command> trace;
  SimReport report;
  std::vector<TraceEvent> events;
  std::uint64_t cells = 0;          // cells holding the logical data
  std::uint64_t logical_ops = 0;    // distinct labels among executed ops
  std::uint64_t readback_errors = 0;
};

struct CompareResult {
  CompareSetup setup;
  CompareSide baseline;  // 6T
  CompareSide amc;       // 8T or 7T in Augmented mode

  double write_energy(const CompareSide& s) const;
  double read_energy(const CompareSide& s) const;
  // baseline / amc
  double write_energy_ratio() const;
  double read_energy_ratio() const;
  double dynamic_energy_ratio() const;
  double cell_ratio() const;
  double latency_ratio() const;
  bool same_workload() const { return baseline.logical_ops == amc.logical_ops; }
};

// Runs the same labelled logical workload on a 6T baseline and on AMC cells.
// Ternary: one 7T cell per trit against a 6T pair holding the (Q, QB) node
// encoding. Dual: one 8T cell holding a static and a dynamic bit against two
// 6T cells.
CompareResult compare(const CompareSetup& setup, const ModelParams& models);

nlohmann::json to_json(const CompareResult& r);

}  // namespace amcsim
