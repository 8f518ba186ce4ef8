#include "amcsim/models.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "amcsim/error.hpp"

namespace amcsim {

BiasConfig default_bias(Technology tech) {
  if (tech == Technology::Aug8T) return {-100, 0};
  return {};
}

std::string_view to_string(OpKind op) {
  switch (op) {
    case OpKind::SramRead: return "sram_read";
    case OpKind::SramWrite: return "sram_write";
    case OpKind::SramReadPulsed: return "sram_read_pulsed";
    case OpKind::DramRead: return "dram_read";
    case OpKind::DramWrite: return "dram_write";
    case OpKind::TritRead: return "trit_read";
    case OpKind::TritWrite: return "trit_write";
    case OpKind::Refresh: return "refresh";
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view s) {
  for (auto op : kAllOps) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

std::string_view to_string(DataPattern p) {
  switch (p) {
    case DataPattern::Any: return "any";
    case DataPattern::Zero: return "zero";
    case DataPattern::NonZero: return "nonzero";
  }
  return "?";
}

DataPattern pattern_of(Trit t) {
  return t == Trit::Zero ? DataPattern::Zero : DataPattern::NonZero;
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Measured: return "measured";
    case Origin::Approx: return "approx";
    case Origin::LowerBound: return "lower_bound";
    case Origin::Derived: return "derived";
    case Origin::Assumed: return "assumed";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Retention

void RetentionTable::add(const RetentionAnchor& anchor) {
  anchors_.push_back(anchor);
  std::stable_sort(anchors_.begin(), anchors_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.tech, a.underdrive_mV, a.temperature_C) <
           std::tie(b.tech, b.underdrive_mV, b.temperature_C);
  });
}

void RetentionTable::validate() const {
  if (!(min_temperature_C < max_temperature_C)) {
    throw Error(ErrorCode::ConfigError, "empty temperature range");
  }
  if (!(variation_sigma >= 0.0)) throw Error(ErrorCode::ConfigError, "variation_sigma < 0");
  if (!(zero_retention_factor > 0.0)) {
    throw Error(ErrorCode::ConfigError, "zero_retention_factor must be positive");
  }
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& a = anchors_[i];
    if (!(a.retention_ns > 0.0)) {
      throw Error(ErrorCode::ConfigError, "retention anchor must be positive");
    }
    if (a.tech == Technology::Std6T) {
      throw Error(ErrorCode::ConfigError, "std6t has no dynamic storage");
    }
    if (i == 0) continue;
    const auto& p = anchors_[i - 1];
    if (p.tech != a.tech || p.underdrive_mV != a.underdrive_mV) continue;
    if (p.temperature_C == a.temperature_C) {
      throw Error(ErrorCode::ConfigError, "duplicate retention anchor temperature");
    }
    if (a.retention_ns > p.retention_ns) {
      throw Error(ErrorCode::ConfigError, "retention must not increase with temperature");
    }
  }
}

double RetentionTable::retention_time(Technology tech, double temperature_C,
                                      BiasConfig bias) const {
  if (tech == Technology::Std6T) {
    throw Error(ErrorCode::NoAnchor, "std6t has no retention");
  }
  if (!(temperature_C >= min_temperature_C && temperature_C <= max_temperature_C)) {
    throw Error(ErrorCode::OutOfRange, "temperature outside configured range");
  }
  std::vector<const RetentionAnchor*> group;
  for (const auto& a : anchors_) {
    if (a.tech == tech && a.underdrive_mV == bias.wl_underdrive_mV) group.push_back(&a);
  }
  for (const auto* a : group) {
    if (a->temperature_C == temperature_C) return a->retention_ns;
  }
  if (group.size() < 2) {
    throw Error(ErrorCode::NoAnchor, std::string(to_string(tech)) + " has too few anchors at " +
                                         std::to_string(bias.wl_underdrive_mV) + " mV");
  }
  // Bracketing pair, or the nearest end pair when extrapolating.
  std::size_t hi = 1;
  while (hi + 1 < group.size() && group[hi]->temperature_C < temperature_C) ++hi;
  const auto& a = *group[hi - 1];
  const auto& b = *group[hi];
  const double frac = (temperature_C - a.temperature_C) / (b.temperature_C - a.temperature_C);
  const double log_r = std::log(a.retention_ns) +
                       frac * (std::log(b.retention_ns) - std::log(a.retention_ns));
  return std::exp(log_r);
}

std::uint64_t cell_key(std::uint32_t subarray, std::uint32_t row, std::uint32_t col) {
  return (static_cast<std::uint64_t>(subarray) << 40) ^
         (static_cast<std::uint64_t>(row) << 20) ^ static_cast<std::uint64_t>(col);
}

namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // (0, 1]: never zero so the log below is finite.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double sample_cell_retention(double nominal_ns, std::uint64_t cell_id, std::uint64_t seed,
                             double sigma) {
  if (sigma == 0.0) return nominal_ns;
  const std::uint64_t a = mix64(seed ^ mix64(cell_id));
  const std::uint64_t b = mix64(a);
  const double z = std::sqrt(-2.0 * std::log(unit_open(a))) *
                   std::cos(2.0 * std::numbers::pi * unit_open(b));
  return nominal_ns * std::exp(sigma * z);
}

// ---------------------------------------------------------------------------
// Energy / delay

namespace {

[[noreturn]] void missing(std::string what) {
  throw Error(ErrorCode::MissingEntry, std::move(what));
}

std::string key_name(Technology t, CellMode m, OpKind op) {
  return std::string(to_string(t)) + "." + std::string(to_string(m)) + "." +
         std::string(to_string(op));
}

bool falls_back_to_6t(Technology tech, OpKind op) {
  return tech == Technology::Aug8T && (op == OpKind::SramRead || op == OpKind::SramWrite);
}

// Refresh of a stored datum decomposes into its read and write.
std::optional<std::pair<OpKind, OpKind>> refresh_parts(Technology tech) {
  if (tech == Technology::Aug8T) return std::pair{OpKind::DramRead, OpKind::DramWrite};
  if (tech == Technology::Aug7T) return std::pair{OpKind::TritRead, OpKind::TritWrite};
  return std::nullopt;
}

}  // namespace

void EnergyTable::set_hold(Technology tech, CellMode mode, Entry<double> uW) {
  hold_[{tech, mode}] = uW;
}

void EnergyTable::set_op(Technology tech, CellMode mode, OpKind op, Entry<double> fJ) {
  op_[{tech, mode, op}] = fJ;
}

double EnergyTable::hold_power(Technology tech, CellMode mode) const {
  if (auto it = hold_.find({tech, mode}); it != hold_.end()) return it->second.value;
  missing("hold power " + std::string(to_string(tech)) + "." + std::string(to_string(mode)));
}

const Entry<double>* EnergyTable::find_op(Technology tech, CellMode mode, OpKind op) const {
  if (auto it = op_.find({tech, mode, op}); it != op_.end()) return &it->second;
  if (falls_back_to_6t(tech, op)) {
    if (auto it = op_.find({Technology::Std6T, CellMode::Normal, op}); it != op_.end()) {
      return &it->second;
    }
  }
  return nullptr;
}

bool EnergyTable::has_op(Technology tech, CellMode mode, OpKind op) const {
  if (op == OpKind::Refresh) {
    auto parts = refresh_parts(tech);
    return parts && has_op(tech, mode, parts->first) && has_op(tech, mode, parts->second);
  }
  return find_op(tech, mode, op) != nullptr;
}

double EnergyTable::op_energy(Technology tech, CellMode mode, OpKind op) const {
  if (op == OpKind::Refresh) {
    auto parts = refresh_parts(tech);
    if (!parts) missing(key_name(tech, mode, op));
    return op_energy(tech, mode, parts->first) + op_energy(tech, mode, parts->second);
  }
  if (const auto* e = find_op(tech, mode, op)) return e->value;
  missing(key_name(tech, mode, op));
}

void DelayTable::set(Technology tech, CellMode mode, OpKind op, DataPattern pattern,
                     Entry<double> ns) {
  rows_[{tech, mode, op, pattern}] = ns;
}

const Entry<double>* DelayTable::find(Technology tech, CellMode mode, OpKind op,
                                      DataPattern p) const {
  for (auto pat : {p, DataPattern::Any}) {
    if (auto it = rows_.find({tech, mode, op, pat}); it != rows_.end()) return &it->second;
  }
  if (falls_back_to_6t(tech, op)) return find(Technology::Std6T, CellMode::Normal, op, p);
  return nullptr;
}

bool DelayTable::has(Technology tech, CellMode mode, OpKind op, DataPattern pattern) const {
  if (op == OpKind::Refresh) {
    auto parts = refresh_parts(tech);
    return parts && has(tech, mode, parts->first, pattern) &&
           has(tech, mode, parts->second, pattern);
  }
  return find(tech, mode, op, pattern) != nullptr;
}

double DelayTable::op_delay(Technology tech, CellMode mode, OpKind op,
                            DataPattern pattern) const {
  if (op == OpKind::Refresh) {
    auto parts = refresh_parts(tech);
    if (!parts) missing("delay " + key_name(tech, mode, op));
    return op_delay(tech, mode, parts->first, pattern) +
           op_delay(tech, mode, parts->second, pattern);
  }
  if (const auto* e = find(tech, mode, op, pattern)) return e->value;
  missing("delay " + key_name(tech, mode, op) + "." + std::string(to_string(pattern)));
}

std::vector<OpKind> reachable_ops(Technology tech, CellMode mode) {
  switch (tech) {
    case Technology::Std6T:
      return {OpKind::SramRead, OpKind::SramWrite};
    case Technology::Aug8T:
      if (mode == CellMode::Normal) {
        return {OpKind::SramRead, OpKind::SramWrite, OpKind::SramReadPulsed};
      }
      return {OpKind::SramRead,  OpKind::SramWrite, OpKind::SramReadPulsed,
              OpKind::DramRead,  OpKind::DramWrite, OpKind::Refresh};
    case Technology::Aug7T:
      if (mode == CellMode::Normal) return {OpKind::SramRead, OpKind::SramWrite};
      if (mode == CellMode::Augmented) {
        return {OpKind::TritRead, OpKind::TritWrite, OpKind::Refresh};
      }
      return {};
  }
  return {};
}

// ---------------------------------------------------------------------------
// ModelParams

namespace {

bool boosted(OpKind op) {
  return op == OpKind::DramWrite || op == OpKind::TritWrite || op == OpKind::Refresh;
}

}  // namespace

double ModelParams::op_energy(Technology tech, CellMode mode, OpKind op) const {
  const double e = energy.op_energy(tech, mode, op);
  return boosted(op) ? e + boost_energy_fJ : e;
}

double ModelParams::op_delay(Technology tech, CellMode mode, OpKind op,
                             DataPattern pattern) const {
  return delay.op_delay(tech, mode, op, pattern);
}

void ModelParams::check_complete() const {
  retention.validate();
  for (auto tech : {Technology::Std6T, Technology::Aug8T, Technology::Aug7T}) {
    for (auto mode : {CellMode::Normal, CellMode::Augmented, CellMode::PowerGated}) {
      if (!is_legal(tech, mode)) continue;
      const auto name = std::string(to_string(tech)) + "." + std::string(to_string(mode));
      if (!energy.hold_entries().contains({tech, mode})) {
        throw Error(ErrorCode::ConfigError, "missing hold power for " + name);
      }
      for (auto op : reachable_ops(tech, mode)) {
        if (!energy.has_op(tech, mode, op)) {
          throw Error(ErrorCode::ConfigError, "missing energy for " + key_name(tech, mode, op));
        }
        const bool trit = op == OpKind::TritRead || op == OpKind::TritWrite ||
                          (op == OpKind::Refresh && tech == Technology::Aug7T);
        const auto patterns = trit ? std::vector{DataPattern::Zero, DataPattern::NonZero}
                                   : std::vector{DataPattern::Any};
        for (auto p : patterns) {
          if (!delay.has(tech, mode, op, p)) {
            throw Error(ErrorCode::ConfigError, "missing delay for " + key_name(tech, mode, op) +
                                                    "." + std::string(to_string(p)));
          }
        }
      }
    }
  }
  for (const auto& [k, e] : energy.op_entries()) {
    if (!(e.value > 0.0)) throw Error(ErrorCode::ConfigError, "energy entries must be positive");
  }
  for (const auto& [k, e] : energy.hold_entries()) {
    if (!(e.value > 0.0)) throw Error(ErrorCode::ConfigError, "hold power must be positive");
  }
  for (const auto& [k, e] : delay.entries()) {
    if (!(e.value > 0.0)) throw Error(ErrorCode::ConfigError, "delays must be positive");
  }
  if (!(boost_energy_fJ >= 0.0)) throw Error(ErrorCode::ConfigError, "boost energy < 0");
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, "model file: " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double to_number(const std::string& tok, const std::string& key) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || p != end) config_error("'" + key + "': bad number '" + tok + "'");
  return v;
}

Origin to_origin(const std::string& tok, const std::string& key) {
  if (tok == "approx") return Origin::Approx;
  if (tok == "lower_bound") return Origin::LowerBound;
  if (tok == "derived") return Origin::Derived;
  if (tok == "assumed") return Origin::Assumed;
  if (tok == "measured") return Origin::Measured;
  config_error("'" + key + "': unknown flag '" + tok + "'");
}

Entry<double> to_entry(const std::string& value, const std::string& key) {
  auto toks = split_ws(value);
  if (toks.empty() || toks.size() > 2) config_error("'" + key + "': expected 'number [flag]'");
  Entry<double> e{to_number(toks[0], key)};
  if (toks.size() == 2) e.origin = to_origin(toks[1], key);
  return e;
}

Technology tech_of(const std::string& s, const std::string& key) {
  if (auto t = parse_technology(s)) return *t;
  config_error("'" + key + "': unknown technology '" + s + "'");
}

CellMode mode_of(const std::string& s, const std::string& key) {
  if (auto m = parse_mode(s)) return *m;
  config_error("'" + key + "': unknown mode '" + s + "'");
}

OpKind op_of(const std::string& s, const std::string& key) {
  if (auto op = parse_op_kind(s); op && *op != OpKind::Refresh) return *op;
  config_error("'" + key + "': unknown op '" + s + "'");
}

}  // namespace

ModelParams ModelParams::parse(std::string_view text) {
  ModelParams m;
  m.checksum = sha256_hex(text);

  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    config_error(e.what());
  }

  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::vector<std::string> path = item.parents;
    path.push_back(item.name);
    std::string key;
    for (const auto& p : path) key += (key.empty() ? "" : ".") + p;
    if (item.inputs.size() != 1) config_error("'" + key + "': expected a single value");
    const std::string& value = item.inputs.front();
    const std::string& section = path.front();

    if (section == "retention" && path.size() == 2) {
      const auto v = to_number(value, key);
      if (path[1] == "temperature_min_C") m.retention.min_temperature_C = v;
      else if (path[1] == "temperature_max_C") m.retention.max_temperature_C = v;
      else if (path[1] == "variation_sigma") m.retention.variation_sigma = v;
      else if (path[1] == "zero_retention_factor") m.retention.zero_retention_factor = v;
      else config_error("unknown key '" + key + "'");
    } else if (section == "retention" && path.size() == 3 && path[1] == "anchors") {
      auto toks = split_ws(value);
      if (toks.size() < 4 || toks.size() > 5) {
        config_error("'" + key + "': expected 'tech temperature_C underdrive_mV retention_ns [flag]'");
      }
      RetentionAnchor a{tech_of(toks[0], key), to_number(toks[1], key),
                        static_cast<int>(to_number(toks[2], key)), to_number(toks[3], key)};
      if (toks.size() == 5) a.origin = to_origin(toks[4], key);
      m.retention.add(a);
    } else if (section == "hold_power_uW" && path.size() == 3) {
      m.energy.set_hold(tech_of(path[1], key), mode_of(path[2], key), to_entry(value, key));
    } else if (section == "op_energy_fJ" && path.size() == 4) {
      m.energy.set_op(tech_of(path[1], key), mode_of(path[2], key), op_of(path[3], key),
                      to_entry(value, key));
    } else if (section == "op_delay_ns" && (path.size() == 4 || path.size() == 5)) {
      DataPattern pattern = DataPattern::Any;
      if (path.size() == 5) {
        if (path[4] == "zero") pattern = DataPattern::Zero;
        else if (path[4] == "nonzero") pattern = DataPattern::NonZero;
        else config_error("'" + key + "': unknown data pattern");
      }
      m.delay.set(tech_of(path[1], key), mode_of(path[2], key), op_of(path[3], key), pattern,
                  to_entry(value, key));
    } else if (section == "boost" && path.size() == 2 && path[1] == "energy_fJ") {
      m.boost_energy_fJ = to_number(value, key);
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  m.check_complete();
  return m;
}

ModelParams ModelParams::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ModelParams ModelParams::defaults() {
  static const ModelParams params = parse(default_model_text());
  return params;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

}  // namespace amcsim
