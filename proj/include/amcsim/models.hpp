#pragma once

// Parameter tables for the AMC cells: retention anchors with log-linear
// temperature interpolation, per-access energy, hold power and access delay.
//
// Units: retention and delay in ns, energy in fJ, hold power in uW per cell.
// uW x ns = fJ, so hold energy integrates without unit conversion.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "amcsim/types.hpp"

namespace amcsim {

// Wordline bias protocol. Underdrive is the negative hold bias on the access
// wordline; boost is the overdrive used to write a full high level. Retention
// anchors are keyed by underdrive only; boost is carried as protocol metadata.
struct BiasConfig {
  int wl_underdrive_mV = 0;
  int wl_boost_mV = 0;
  friend bool operator==(const BiasConfig&, const BiasConfig&) = default;
};

// -100 mV underdrive for Aug8T, no bias otherwise.
BiasConfig default_bias(Technology tech);

enum class OpKind : std::uint8_t {
  SramRead,
  SramWrite,
  SramReadPulsed,
  DramRead,
  DramWrite,
  TritRead,
  TritWrite,
  Refresh,
};

inline constexpr OpKind kAllOps[] = {OpKind::SramRead,       OpKind::SramWrite,
                                     OpKind::SramReadPulsed, OpKind::DramRead,
                                     OpKind::DramWrite,      OpKind::TritRead,
                                     OpKind::TritWrite,      OpKind::Refresh};

std::string_view to_string(OpKind op);
std::optional<OpKind> parse_op_kind(std::string_view s);

// 7T augmented delays depend on whether (0,0) or (0,1)/(1,0) is stored.
enum class DataPattern : std::uint8_t { Any, Zero, NonZero };

std::string_view to_string(DataPattern p);
DataPattern pattern_of(Trit t);

// Where a table entry comes from. Anything other than Measured is called out
// in reports.
enum class Origin : std::uint8_t { Measured, Approx, LowerBound, Derived, Assumed };

std::string_view to_string(Origin o);

struct RetentionAnchor {
  Technology tech;
  double temperature_C;
  int underdrive_mV;
  double retention_ns;
  Origin origin = Origin::Measured;
};

class RetentionTable {
 public:
  void add(const RetentionAnchor& anchor);
  const std::vector<RetentionAnchor>& anchors() const { return anchors_; }

  // Exact at anchors; log-retention linear in temperature between and beyond
  // the two nearest anchors of the (tech, underdrive) group.
  double retention_time(Technology tech, double temperature_C, BiasConfig bias) const;

  // Throws ConfigError on non-positive entries, duplicate temperatures or a
  // group whose retention increases with temperature.
  void validate() const;

  double min_temperature_C = -50.0;
  double max_temperature_C = 125.0;
  double variation_sigma = 0.0;
  double zero_retention_factor = 4.0;

 private:
  std::vector<RetentionAnchor> anchors_;
};

// Counter-based key for a cell: independent of access order.
std::uint64_t cell_key(std::uint32_t subarray, std::uint32_t row, std::uint32_t col);

// Lognormal multiplier around nominal with median nominal; deterministic in
// (cell_id, seed). sigma == 0 returns nominal exactly.
double sample_cell_retention(double nominal_ns, std::uint64_t cell_id, std::uint64_t seed,
                             double sigma);

template <typename V>
struct Entry {
  V value;
  Origin origin = Origin::Measured;
};

class EnergyTable {
 public:
  void set_hold(Technology tech, CellMode mode, Entry<double> uW);
  void set_op(Technology tech, CellMode mode, OpKind op, Entry<double> fJ);

  double hold_power(Technology tech, CellMode mode) const;

  // Refresh is derived as read + write of the stored datum. 8T SRAM-plane
  // reads/writes fall back to the 6T row when no 8T-specific row exists.
  double op_energy(Technology tech, CellMode mode, OpKind op) const;

  bool has_op(Technology tech, CellMode mode, OpKind op) const;

  using OpKey = std::tuple<Technology, CellMode, OpKind>;
  const std::map<std::pair<Technology, CellMode>, Entry<double>>& hold_entries() const {
    return hold_;
  }
  const std::map<OpKey, Entry<double>>& op_entries() const { return op_; }

 private:
  const Entry<double>* find_op(Technology tech, CellMode mode, OpKind op) const;

  std::map<std::pair<Technology, CellMode>, Entry<double>> hold_;
  std::map<OpKey, Entry<double>> op_;
};

class DelayTable {
 public:
  void set(Technology tech, CellMode mode, OpKind op, DataPattern pattern, Entry<double> ns);

  // Pattern-specific row first, then the Any row. Same 6T fallback and
  // refresh derivation as EnergyTable.
  double op_delay(Technology tech, CellMode mode, OpKind op,
                  DataPattern pattern = DataPattern::Any) const;

  bool has(Technology tech, CellMode mode, OpKind op, DataPattern pattern) const;

  using Key = std::tuple<Technology, CellMode, OpKind, DataPattern>;
  const std::map<Key, Entry<double>>& entries() const { return rows_; }

 private:
  const Entry<double>* find(Technology tech, CellMode mode, OpKind op, DataPattern p) const;

  std::map<Key, Entry<double>> rows_;
};

// Operations the controller can issue for a (tech, mode) pair.
std::vector<OpKind> reachable_ops(Technology tech, CellMode mode);

struct ModelParams {
  RetentionTable retention;
  EnergyTable energy;
  DelayTable delay;
  // Wordline boost overhead charged on DramWrite/TritWrite (and refresh).
  double boost_energy_fJ = 0.0;
  std::string checksum;  // sha256 of the source text

  double op_energy(Technology tech, CellMode mode, OpKind op) const;
  double op_delay(Technology tech, CellMode mode, OpKind op,
                  DataPattern pattern = DataPattern::Any) const;

  // Every reachable (tech, mode, op) must have energy and delay, every legal
  // (tech, mode) must have hold power. Throws ConfigError otherwise.
  void check_complete() const;

  static ModelParams parse(std::string_view text);
  static ModelParams load(const std::filesystem::path& path);
  static ModelParams defaults();
};

// Text of the bundled parameter file.
std::string_view default_model_text();

std::string sha256_hex(std::string_view data);

}  // namespace amcsim
