#include "amcsim/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "amcsim/error.hpp"

namespace amcsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalMode: return "IllegalMode";
    case ErrorCode::WrongMode: return "WrongMode";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::ExpiredRead: return "ExpiredRead";
    case ErrorCode::NoAnchor: return "NoAnchor";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::AddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TraceError: return "TraceError";
  }
  return "Unknown";
}

bool is_legal(Technology tech, CellMode mode) {
  switch (mode) {
    case CellMode::Normal: return true;
    case CellMode::Augmented: return tech != Technology::Std6T;
    case CellMode::PowerGated: return tech == Technology::Aug7T;
  }
  return false;
}

std::string_view to_string(Technology tech) {
  switch (tech) {
    case Technology::Std6T: return "std6t";
    case Technology::Aug8T: return "aug8t";
    case Technology::Aug7T: return "aug7t";
  }
  return "?";
}

std::string_view to_string(CellMode mode) {
  switch (mode) {
    case CellMode::Normal: return "normal";
    case CellMode::Augmented: return "augmented";
    case CellMode::PowerGated: return "power_gated";
  }
  return "?";
}

std::string_view to_string(Trit t) {
  switch (t) {
    case Trit::MinusOne: return "-1";
    case Trit::Zero: return "0";
    case Trit::PlusOne: return "+1";
  }
  return "?";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<Technology> parse_technology(std::string_view s) {
  const auto v = lower(s);
  if (v == "std6t" || v == "6t") return Technology::Std6T;
  if (v == "aug8t" || v == "8t") return Technology::Aug8T;
  if (v == "aug7t" || v == "7t") return Technology::Aug7T;
  return std::nullopt;
}

std::optional<CellMode> parse_mode(std::string_view s) {
  const auto v = lower(s);
  if (v == "normal") return CellMode::Normal;
  if (v == "augmented") return CellMode::Augmented;
  if (v == "power_gated" || v == "powergated") return CellMode::PowerGated;
  return std::nullopt;
}

std::optional<Trit> parse_trit(std::string_view s) {
  if (s == "-1") return Trit::MinusOne;
  if (s == "0") return Trit::Zero;
  if (s == "+1" || s == "1") return Trit::PlusOne;
  return std::nullopt;
}

}  // namespace amcsim
