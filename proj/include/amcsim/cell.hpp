#pragma once

// Logical state machines for the 6T, 8T dual-bit and 7T ternary bit-cells.
//
// Node voltages are abstracted to logical levels plus a write timestamp. A
// dynamic datum is sensible while (now - written_at) < retention and lost
// afterwards; there is no intermediate analog level.
//
// Every operation is a pure transition: it takes a CellState by value and
// returns the successor along with any side-effect events. Illegal accesses
// throw amcsim::Error and leave the caller's state untouched.

#include <optional>
#include <variant>
#include <vector>

#include "amcsim/types.hpp"

namespace amcsim {

using DynamicPayload = std::variant<bool, Trit>;

struct DynamicDatum {
  DynamicPayload payload;
  TimeNs written_at = 0;
  double retention_ns = 0.0;

  bool valid_at(TimeNs now) const {
    return static_cast<double>(now - written_at) < retention_ns;
  }
  friend bool operator==(const DynamicDatum&, const DynamicDatum&) = default;
};

// Retention granted to a fresh dynamic write. cell_ns bounds DRAM bits and the
// (0,1)/(1,0) trits; Zero trits get cell_ns * zero_factor.
struct RetentionWindow {
  double cell_ns = 0.0;
  double zero_factor = 1.0;
};

enum class CellEventKind : std::uint8_t {
  DramDestroyedBySramAccess,
  SilentDecayAlias,
  ExpiredRead,
  ModeFlush,
  PulsedCopyOverwrite,
};

std::string_view to_string(CellEventKind kind);

struct CellEvent {
  CellEventKind kind;
  TimeNs at;
  friend bool operator==(const CellEvent&, const CellEvent&) = default;
};

using CellEvents = std::vector<CellEvent>;

struct CellState {
  Technology tech = Technology::Std6T;
  CellMode mode = CellMode::Normal;
  std::optional<bool> static_bit;
  std::optional<DynamicDatum> dynamic;

  bool has_valid_dynamic(TimeNs now) const { return dynamic && dynamic->valid_at(now); }

  // Checks the per-(tech, mode) storage invariants.
  bool satisfies_invariants() const;

  friend bool operator==(const CellState&, const CellState&) = default;
};

struct Transition {
  CellState cell;
  CellEvents events;
};

template <typename T>
struct Readout {
  T value;
  CellState cell;
  CellEvents events;
};

CellState new_cell(Technology tech, CellMode mode);

Transition write_sram_bit(CellState cell, bool bit, TimeNs now);
Readout<bool> read_sram_bit(CellState cell, TimeNs now);

// Decoupled read through the M4 port after a WL1-only pulse copies the static
// bit onto Vz. Outside Normal mode this clobbers user DRAM data and is refused
// unless destroy_override is set.
Readout<bool> read_sram_pulsed(CellState cell, TimeNs now, bool destroy_override = false);

CellState write_dram_bit(CellState cell, bool bit, TimeNs now, RetentionWindow window);

// Non-destructive gate-input sensing; does not reset written_at. An expired
// bit throws ExpiredRead, or with silent_decay reads as 0 (the high level has
// leaked away) and reports SilentDecayAlias.
Readout<bool> read_dram_bit(CellState cell, TimeNs now, bool silent_decay = false);

// Read + rewrite of the dynamic datum (DRAM bit or trit); restarts the window.
CellState refresh_dram_bit(CellState cell, TimeNs now, RetentionWindow window);

CellState write_trit(CellState cell, Trit trit, TimeNs now, RetentionWindow window);

// A valid trit is written back after sensing (written_at := now). A decayed
// (0,1)/(1,0) is indistinguishable from (0,0) at the sense inverters, so with
// silent_decay an expired trit reads as Zero.
Readout<Trit> read_trit(CellState cell, TimeNs now, bool silent_decay = false);

Transition set_cell_mode(CellState cell, CellMode new_mode, TimeNs now);

}  // namespace amcsim
