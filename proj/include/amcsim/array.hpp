#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amcsim/cell.hpp"
#include "amcsim/models.hpp"

namespace amcsim {

// Which datum of a cell is addressed. Dynamic is the Vz plane of an 8T cell in
// Augmented mode; trit accesses ignore the plane.
enum class Plane : std::uint8_t { Static, Dynamic };

struct Address {
  std::uint32_t subarray = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  Plane plane = Plane::Static;
  friend bool operator==(const Address&, const Address&) = default;
};

Plane plane_for(OpKind op);

struct AddressedEvent {
  CellEvent event;
  Address addr;
};

// Per-cell retention setup, fixed at construction.
struct RetentionSetup {
  double nominal_ns = 0.0;  // unused for Std6T
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double zero_factor = 1.0;
  bool resample_on_refresh = false;
};

struct CellOp {
  OpKind kind = OpKind::SramRead;
  std::optional<bool> bit;  // SramWrite / DramWrite
  std::optional<Trit> trit;  // TritWrite
};

struct AccessOptions {
  bool silent_decay = false;
  bool pulsed_override = false;
};

struct AccessResult {
  std::optional<bool> bit;
  std::optional<Trit> trit;
  std::vector<AddressedEvent> events;
  double energy_fJ = 0.0;
  double delay_ns = 0.0;
  DataPattern pattern = DataPattern::Any;
};

struct Capacity {
  std::uint64_t cells = 0;
  std::uint64_t bits = 0;   // binary storage
  std::uint64_t trits = 0;  // ternary storage
  double bit_equivalent = 0.0;                // bits + trits * log2(3)
  std::uint64_t conventional_6t_cells = 0;    // 6T cells for the same data
  friend bool operator==(const Capacity&, const Capacity&) = default;
};

Capacity effective_capacity(Technology tech, CellMode mode, std::uint32_t rows,
                            std::uint32_t cols);

// Grid of cells sharing one technology and one operating mode. Mode changes
// apply to every cell at once.
class SubArray {
 public:
  SubArray(std::uint32_t id, Technology tech, CellMode mode, std::uint32_t rows,
           std::uint32_t cols, RetentionSetup retention);

  std::uint32_t id() const { return id_; }
  Technology tech() const { return tech_; }
  CellMode mode() const { return mode_; }
  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  std::uint64_t cell_count() const { return cells_.size(); }

  const CellState& cell(std::uint32_t row, std::uint32_t col) const;
  double cell_retention(std::uint32_t row, std::uint32_t col) const;
  double nominal_retention() const { return setup_.nominal_ns; }

  bool contains(const Address& addr) const;

  // Flushes dynamic data (and 7T static data) cell by cell; returns the
  // address-tagged ModeFlush events.
  std::vector<AddressedEvent> set_mode(CellMode new_mode, TimeNs now);

  AccessResult access(const Address& addr, const CellOp& op, TimeNs now,
                      const ModelParams& models, AccessOptions options = {});

  Capacity capacity() const { return effective_capacity(tech_, mode_, rows_, cols_); }

  // Occupancy dump, one line per row.
  void write_snapshot(std::ostream& out, TimeNs now) const;

 private:
  std::size_t index(std::uint32_t row, std::uint32_t col) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }
  RetentionWindow window(std::size_t i) const { return {retention_[i], setup_.zero_factor}; }

  std::uint32_t id_;
  Technology tech_;
  CellMode mode_;
  std::uint32_t rows_;
  std::uint32_t cols_;
  RetentionSetup setup_;
  std::vector<CellState> cells_;
  std::vector<double> retention_;
  std::vector<std::uint32_t> refreshes_;
};

std::string format_address(const Address& addr);

}  // namespace amcsim
