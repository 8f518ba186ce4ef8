#include "amcsim/cell.hpp"

#include <string>

#include "amcsim/error.hpp"

namespace amcsim {

std::string_view to_string(CellEventKind kind) {
  switch (kind) {
    case CellEventKind::DramDestroyedBySramAccess: return "DRAM_DESTROYED";
    case CellEventKind::SilentDecayAlias: return "SILENT_DECAY";
    case CellEventKind::ExpiredRead: return "EXPIRED_READ";
    case CellEventKind::ModeFlush: return "MODE_FLUSH";
    case CellEventKind::PulsedCopyOverwrite: return "PULSED_COPY";
  }
  return "?";
}

bool CellState::satisfies_invariants() const {
  if (!is_legal(tech, mode)) return false;
  if (dynamic && !(dynamic->retention_ns > 0.0)) return false;
  switch (tech) {
    case Technology::Std6T:
      return !dynamic;
    case Technology::Aug8T:
      if (mode == CellMode::Normal) return !dynamic;
      return !dynamic || std::holds_alternative<bool>(dynamic->payload);
    case Technology::Aug7T:
      if (mode == CellMode::Normal) return !dynamic;
      if (static_bit) return false;
      if (mode == CellMode::PowerGated) return !dynamic;
      return !dynamic || std::holds_alternative<Trit>(dynamic->payload);
  }
  return false;
}

namespace {

[[noreturn]] void wrong_mode(const CellState& c, const char* op) {
  throw Error(ErrorCode::WrongMode, std::string(op) + " not available for " +
                                        std::string(to_string(c.tech)) + "/" +
                                        std::string(to_string(c.mode)));
}

// Static storage exists for 6T, 8T (both modes) and 7T with the header on.
bool has_static_storage(const CellState& c) {
  switch (c.tech) {
    case Technology::Std6T:
    case Technology::Aug8T:
      return c.mode == CellMode::Normal || c.mode == CellMode::Augmented;
    case Technology::Aug7T:
      return c.mode == CellMode::Normal;
  }
  return false;
}

// The SRAM access path runs through Vz, so any dynamic bit is lost.
void clobber_dynamic(CellState& c, TimeNs now, CellEvents& events) {
  if (!c.dynamic) return;
  if (c.dynamic->valid_at(now)) {
    events.push_back({CellEventKind::DramDestroyedBySramAccess, now});
  }
  c.dynamic.reset();
}

double window_for(const DynamicPayload& payload, RetentionWindow w) {
  if (const auto* t = std::get_if<Trit>(&payload); t && *t == Trit::Zero) {
    return w.cell_ns * w.zero_factor;
  }
  return w.cell_ns;
}

DynamicDatum make_datum(DynamicPayload payload, TimeNs now, RetentionWindow w) {
  const double retention = window_for(payload, w);
  if (!(retention > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "retention must be positive");
  }
  return DynamicDatum{payload, now, retention};
}

const DynamicDatum& require_dynamic(const CellState& c) {
  if (!c.dynamic) throw Error(ErrorCode::EmptyCell, "no dynamic datum stored");
  return *c.dynamic;
}

bool is_aug(const CellState& c, Technology tech) {
  return c.tech == tech && c.mode == CellMode::Augmented;
}

}  // namespace

CellState new_cell(Technology tech, CellMode mode) {
  if (!is_legal(tech, mode)) {
    throw Error(ErrorCode::IllegalMode, std::string(to_string(tech)) + " cannot enter " +
                                            std::string(to_string(mode)));
  }
  return CellState{tech, mode, std::nullopt, std::nullopt};
}

Transition write_sram_bit(CellState cell, bool bit, TimeNs now) {
  if (!has_static_storage(cell)) wrong_mode(cell, "write_sram_bit");
  CellEvents events;
  clobber_dynamic(cell, now, events);
  cell.static_bit = bit;
  return {std::move(cell), std::move(events)};
}

Readout<bool> read_sram_bit(CellState cell, TimeNs now) {
  if (!has_static_storage(cell)) wrong_mode(cell, "read_sram_bit");
  if (!cell.static_bit) throw Error(ErrorCode::EmptyCell, "no static bit stored");
  CellEvents events;
  clobber_dynamic(cell, now, events);
  const bool value = *cell.static_bit;
  return {value, std::move(cell), std::move(events)};
}

Readout<bool> read_sram_pulsed(CellState cell, TimeNs now, bool destroy_override) {
  if (cell.tech != Technology::Aug8T) wrong_mode(cell, "read_sram_pulsed");
  if (cell.mode == CellMode::Augmented && !destroy_override) {
    throw Error(ErrorCode::WrongMode, "pulsed read in augmented mode overwrites Vz");
  }
  if (!cell.static_bit) throw Error(ErrorCode::EmptyCell, "no static bit stored");
  CellEvents events;
  clobber_dynamic(cell, now, events);
  // Vz briefly holds a copy of the static bit; it is sensed and discarded.
  events.push_back({CellEventKind::PulsedCopyOverwrite, now});
  const bool value = *cell.static_bit;
  return {value, std::move(cell), std::move(events)};
}

CellState write_dram_bit(CellState cell, bool bit, TimeNs now, RetentionWindow window) {
  if (!is_aug(cell, Technology::Aug8T)) wrong_mode(cell, "write_dram_bit");
  cell.dynamic = make_datum(bit, now, window);
  return cell;
}

Readout<bool> read_dram_bit(CellState cell, TimeNs now, bool silent_decay) {
  if (!is_aug(cell, Technology::Aug8T)) wrong_mode(cell, "read_dram_bit");
  const auto& d = require_dynamic(cell);
  if (d.valid_at(now)) {
    const bool value = std::get<bool>(d.payload);
    return {value, std::move(cell), {}};
  }
  if (!silent_decay) throw Error(ErrorCode::ExpiredRead, "dynamic bit past retention");
  return {false, std::move(cell), {{CellEventKind::SilentDecayAlias, now}}};
}

CellState refresh_dram_bit(CellState cell, TimeNs now, RetentionWindow window) {
  if (!is_aug(cell, Technology::Aug8T) && !is_aug(cell, Technology::Aug7T)) {
    wrong_mode(cell, "refresh");
  }
  const auto& d = require_dynamic(cell);
  if (!d.valid_at(now)) throw Error(ErrorCode::ExpiredRead, "cannot refresh expired data");
  cell.dynamic = make_datum(d.payload, now, window);
  return cell;
}

CellState write_trit(CellState cell, Trit trit, TimeNs now, RetentionWindow window) {
  if (!is_aug(cell, Technology::Aug7T)) wrong_mode(cell, "write_trit");
  cell.dynamic = make_datum(trit, now, window);
  return cell;
}

Readout<Trit> read_trit(CellState cell, TimeNs now, bool silent_decay) {
  if (!is_aug(cell, Technology::Aug7T)) wrong_mode(cell, "read_trit");
  require_dynamic(cell);
  auto& d = *cell.dynamic;
  if (d.valid_at(now)) {
    const Trit value = std::get<Trit>(d.payload);
    d.written_at = now;  // write-back after sensing
    return {value, std::move(cell), {}};
  }
  if (!silent_decay) throw Error(ErrorCode::ExpiredRead, "trit past retention");
  return {Trit::Zero, std::move(cell), {{CellEventKind::SilentDecayAlias, now}}};
}

Transition set_cell_mode(CellState cell, CellMode new_mode, TimeNs now) {
  if (!is_legal(cell.tech, new_mode)) {
    throw Error(ErrorCode::IllegalMode, std::string(to_string(cell.tech)) + " cannot enter " +
                                            std::string(to_string(new_mode)));
  }
  CellEvents events;
  if (new_mode == cell.mode) return {std::move(cell), std::move(events)};

  if (cell.dynamic) {
    if (cell.dynamic->valid_at(now)) events.push_back({CellEventKind::ModeFlush, now});
    cell.dynamic.reset();
  }
  // Switching the 7T header PMOS off drops the static pair; 8T keeps Vx/Vy.
  if (cell.tech == Technology::Aug7T && new_mode != CellMode::Normal && cell.static_bit) {
    events.push_back({CellEventKind::ModeFlush, now});
    cell.static_bit.reset();
  }
  cell.mode = new_mode;
  return {std::move(cell), std::move(events)};
}

}  // namespace amcsim
