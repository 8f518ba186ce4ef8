#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace amcsim {

// Simulation time in integer nanoseconds.
using TimeNs = std::int64_t;

enum class Technology : std::uint8_t { Std6T, Aug8T, Aug7T };

enum class CellMode : std::uint8_t { Normal, Augmented, PowerGated };

// Ternary digit held on the (Q, QB) node pair of a 7T cell in Augmented mode.
enum class Trit : std::int8_t { MinusOne = -1, Zero = 0, PlusOne = 1 };

struct NodePair {
  bool q;
  bool qb;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

// MinusOne <-> (1,0), PlusOne <-> (0,1), Zero <-> (0,0). (1,1) has no trit.
constexpr NodePair encode(Trit t) {
  switch (t) {
    case Trit::MinusOne: return {true, false};
    case Trit::PlusOne: return {false, true};
    case Trit::Zero: break;
  }
  return {false, false};
}

constexpr std::optional<Trit> decode(NodePair p) {
  if (p.q && p.qb) return std::nullopt;
  if (p.q) return Trit::MinusOne;
  if (p.qb) return Trit::PlusOne;
  return Trit::Zero;
}

bool is_legal(Technology tech, CellMode mode);

std::string_view to_string(Technology tech);
std::string_view to_string(CellMode mode);
std::string_view to_string(Trit t);  // "-1", "0", "+1"

std::optional<Technology> parse_technology(std::string_view s);
std::optional<CellMode> parse_mode(std::string_view s);
std::optional<Trit> parse_trit(std::string_view s);

}  // namespace amcsim
