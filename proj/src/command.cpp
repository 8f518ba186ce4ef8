#include "amcsim/command.hpp"

#include <string>

#include "amcsim/error.hpp"

namespace amcsim {

namespace {

constexpr std::pair<CommandKind, std::string_view> kNames[] = {
    {CommandKind::WriteSram, "WRITE_SRAM"},
    {CommandKind::ReadSram, "READ_SRAM"},
    {CommandKind::ReadSramPulsed, "READ_SRAM_PULSED"},
    {CommandKind::WriteDram, "WRITE_DRAM"},
    {CommandKind::ReadDram, "READ_DRAM"},
    {CommandKind::WriteTrit, "WRITE_TRIT"},
    {CommandKind::ReadTrit, "READ_TRIT"},
    {CommandKind::Refresh, "REFRESH"},
    {CommandKind::SetMode, "SET_MODE"},
    {CommandKind::Idle, "IDLE"},
};

}  // namespace

std::string_view to_string(CommandKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<CommandKind> parse_command_kind(std::string_view s) {
  for (const auto& [k, name] : kNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::optional<OpKind> op_kind(CommandKind kind) {
  switch (kind) {
    case CommandKind::WriteSram: return OpKind::SramWrite;
    case CommandKind::ReadSram: return OpKind::SramRead;
    case CommandKind::ReadSramPulsed: return OpKind::SramReadPulsed;
    case CommandKind::WriteDram: return OpKind::DramWrite;
    case CommandKind::ReadDram: return OpKind::DramRead;
    case CommandKind::WriteTrit: return OpKind::TritWrite;
    case CommandKind::ReadTrit: return OpKind::TritRead;
    case CommandKind::Refresh: return OpKind::Refresh;
    case CommandKind::SetMode:
    case CommandKind::Idle:
      break;
  }
  return std::nullopt;
}

bool needs_bit(CommandKind kind) {
  return kind == CommandKind::WriteSram || kind == CommandKind::WriteDram;
}
bool needs_trit(CommandKind kind) { return kind == CommandKind::WriteTrit; }
bool needs_mode(CommandKind kind) { return kind == CommandKind::SetMode; }

void validate(const Command& cmd) {
  if (cmd.at < 0) throw Error(ErrorCode::ConfigError, "negative command time");
  if (needs_bit(cmd.kind) != cmd.bit.has_value() ||
      needs_trit(cmd.kind) != cmd.trit.has_value() ||
      needs_mode(cmd.kind) != cmd.mode.has_value()) {
    throw Error(ErrorCode::ConfigError,
                "payload does not match " + std::string(to_string(cmd.kind)));
  }
}

Command make_command(TimeNs at, CommandKind kind, Address addr) {
  Command c;
  c.at = at;
  c.kind = kind;
  c.addr = addr;
  if (auto op = op_kind(kind)) c.addr.plane = plane_for(*op);
  return c;
}

Command with_bit(Command cmd, bool bit) {
  cmd.bit = bit;
  return cmd;
}

Command with_trit(Command cmd, Trit trit) {
  cmd.trit = trit;
  return cmd;
}

Command set_mode_command(TimeNs at, std::uint32_t subarray, CellMode mode) {
  Command c = make_command(at, CommandKind::SetMode, Address{subarray, 0, 0, Plane::Static});
  c.mode = mode;
  return c;
}

}  // namespace amcsim
