#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "amcsim/array.hpp"
#include "json.hpp"

namespace amcsim {

struct Counters {
  std::uint64_t commands = 0;
  std::uint64_t executed = 0;
  std::uint64_t rejected = 0;
  std::uint64_t failed = 0;
  std::uint64_t filo_violations = 0;
  std::uint64_t retention_violations = 0;
  std::uint64_t silent_decays = 0;
  std::uint64_t refreshes = 0;  // scheduled and explicit
  std::uint64_t mode_flushes = 0;
  std::uint64_t dram_destroyed = 0;
  std::uint64_t pulsed_copies = 0;

  Counters& operator+=(const Counters& o);
  friend bool operator==(const Counters&, const Counters&) = default;
};

struct OpTally {
  std::uint64_t count = 0;
  double unit_fJ = 0.0;
  friend bool operator==(const OpTally&, const OpTally&) = default;
};

struct HoldTally {
  std::uint64_t cell_ns = 0;  // sum of cells x resident time
  double power_uW = 0.0;
  double energy_fJ() const { return power_uW * static_cast<double>(cell_ns); }
  friend bool operator==(const HoldTally&, const HoldTally&) = default;
};

struct CapacityRow {
  std::uint32_t subarray = 0;
  Technology tech = Technology::Std6T;
  CellMode mode = CellMode::Normal;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  Capacity capacity;
  friend bool operator==(const CapacityRow&, const CapacityRow&) = default;
};

// Aggregated results. Energies are kept as integer tallies times table
// constants, so totals do not depend on execution or merge order.
struct SimReport {
  using OpKey = std::tuple<std::uint32_t, Technology, CellMode, OpKind>;
  using HoldKey = std::pair<Technology, CellMode>;

  std::map<OpKey, OpTally> ops;
  std::map<HoldKey, HoldTally> hold;
  std::map<double, std::uint64_t> latency_histogram;  // delay ns -> count
  Counters counters;
  std::vector<CapacityRow> capacity;  // sorted by sub-array id
  TimeNs start_ns = 0;
  TimeNs horizon_ns = 0;
  nlohmann::json config;
  std::string model_checksum;

  double dynamic_energy_fJ() const;
  double refresh_energy_fJ() const;
  double hold_energy_fJ() const;
  double total_delay_ns() const;
  std::map<OpKind, OpTally> by_op() const;
  std::map<std::uint32_t, double> energy_by_subarray() const;
  std::uint64_t violations() const {
    return counters.filo_violations + counters.retention_violations;
  }

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Merges reports from disjoint sub-array groups or consecutive epochs.
// Associative and commutative.
SimReport merge(const SimReport& a, const SimReport& b);

nlohmann::json to_json(const SimReport& report);
void write_summary(std::ostream& out, const SimReport& report);

}  // namespace amcsim
