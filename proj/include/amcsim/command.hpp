#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "amcsim/array.hpp"

namespace amcsim {

enum class CommandKind : std::uint8_t {
  WriteSram,
  ReadSram,
  ReadSramPulsed,
  WriteDram,
  ReadDram,
  WriteTrit,
  ReadTrit,
  Refresh,
  SetMode,
  Idle,
};

// Trace spelling: WRITE_SRAM, READ_DRAM, SET_MODE, ...
std::string_view to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view s);

// Cell operation a command maps to; none for SetMode and Idle.
std::optional<OpKind> op_kind(CommandKind kind);

bool needs_bit(CommandKind kind);
bool needs_trit(CommandKind kind);
bool needs_mode(CommandKind kind);

struct Command {
  TimeNs at = 0;
  CommandKind kind = CommandKind::Idle;
  Address addr;  // SetMode uses only addr.subarray; Idle ignores it
  std::optional<bool> bit;
  std::optional<Trit> trit;
  std::optional<CellMode> mode;
  // Logical-operation tag for cross-run comparisons; not part of the trace
  // format.
  std::optional<std::uint64_t> label;

  friend bool operator==(const Command&, const Command&) = default;
};

// Throws ConfigError unless time >= 0 and the payload matches the kind.
void validate(const Command& cmd);

// Convenience constructors used by generators and tests.
Command make_command(TimeNs at, CommandKind kind, Address addr = {});
Command with_bit(Command cmd, bool bit);
Command with_trit(Command cmd, Trit trit);
Command set_mode_command(TimeNs at, std::uint32_t subarray, CellMode mode);

}  // namespace amcsim
