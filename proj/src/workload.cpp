#include "amcsim/workload.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "amcsim/error.hpp"

namespace amcsim {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> to_uint(std::string_view s) {
  T v{};
  if (s.empty() || s.front() == '+' || s.front() == '-') return std::nullopt;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<Address> parse_cell_address(std::string_view s) {
  const auto a = s.find(':');
  const auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
  if (b == std::string_view::npos || s.find(':', b + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  auto sa = to_uint<std::uint32_t>(s.substr(0, a));
  auto row = to_uint<std::uint32_t>(s.substr(a + 1, b - a - 1));
  auto col = to_uint<std::uint32_t>(s.substr(b + 1));
  if (!sa || !row || !col) return std::nullopt;
  return Address{*sa, *row, *col, Plane::Static};
}

Command parse_command_line(const std::vector<std::string_view>& tok, std::size_t line) {
  auto fail = [line](const std::string& why) -> TraceError { return TraceError(line, why); };

  auto at = to_uint<std::uint64_t>(tok[0]);
  if (!at || *at > static_cast<std::uint64_t>(INT64_MAX)) throw fail("bad time '" + std::string(tok[0]) + "'");
  if (tok.size() < 2) throw fail("missing command kind");
  auto kind = parse_command_kind(tok[1]);
  if (!kind) throw fail("unknown command '" + std::string(tok[1]) + "'");

  Command cmd = make_command(static_cast<TimeNs>(*at), *kind);
  std::size_t expected = 3;
  if (*kind == CommandKind::Idle) {
    expected = 2;
  } else if (*kind == CommandKind::SetMode) {
    expected = 4;
    if (tok.size() < 3) throw fail("missing sub-array");
    auto sa = to_uint<std::uint32_t>(tok[2]);
    if (!sa) throw fail("bad sub-array '" + std::string(tok[2]) + "'");
    cmd.addr = Address{*sa, 0, 0, Plane::Static};
    if (tok.size() < 4) throw fail("missing mode");
    auto mode = parse_mode(tok[3]);
    if (!mode) throw fail("bad mode '" + std::string(tok[3]) + "'");
    cmd.mode = *mode;
  } else {
    if (tok.size() < 3) throw fail("missing address");
    auto addr = parse_cell_address(tok[2]);
    if (!addr) throw fail("bad address '" + std::string(tok[2]) + "'");
    addr->plane = cmd.addr.plane;
    cmd.addr = *addr;
    if (needs_bit(*kind)) {
      expected = 4;
      if (tok.size() < 4) throw fail("missing bit payload");
      if (tok[3] == "0") cmd.bit = false;
      else if (tok[3] == "1") cmd.bit = true;
      else throw fail("bad bit '" + std::string(tok[3]) + "'");
    } else if (needs_trit(*kind)) {
      expected = 4;
      if (tok.size() < 4) throw fail("missing trit payload");
      if (tok[3] == "-1") cmd.trit = Trit::MinusOne;
      else if (tok[3] == "0") cmd.trit = Trit::Zero;
      else if (tok[3] == "+1") cmd.trit = Trit::PlusOne;
      else throw fail("bad trit '" + std::string(tok[3]) + "' (expected -1, 0 or +1)");
    }
  }
  if (tok.size() != expected) throw fail("unexpected trailing fields");
  return cmd;
}

}  // namespace

TraceFile parse_trace_file(std::string_view text) {
  TraceFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_content = false;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      auto comment = tokens(line.substr(hash + 1));
      if (comment.size() >= 3 && comment[0] == "amcsim" && comment[1] == "trace") {
        if (seen_content) throw TraceError(line_no, "header after commands");
        if (comment[2] != "v" + std::to_string(kTraceVersion)) {
          throw TraceError(line_no, "unsupported trace version '" + std::string(comment[2]) + "'");
        }
      } else if (!comment.empty() && comment[0] == "array") {
        if (comment.size() != 6) throw TraceError(line_no, "array header needs 5 fields");
        auto id = to_uint<std::uint32_t>(comment[1]);
        auto tech = parse_technology(comment[2]);
        auto mode = parse_mode(comment[3]);
        auto rows = to_uint<std::uint32_t>(comment[4]);
        auto cols = to_uint<std::uint32_t>(comment[5]);
        if (!id || !tech || !mode || !rows || !cols) {
          throw TraceError(line_no, "malformed array header");
        }
        out.arrays.push_back({*id, *tech, *mode, *rows, *cols});
      }
      line = line.substr(0, hash);
    }
    auto tok = tokens(line);
    if (tok.empty()) continue;
    seen_content = true;
    Command cmd = parse_command_line(tok, line_no);
    if (!out.commands.empty() && cmd.at < out.commands.back().at) {
      throw TraceError(line_no, "time " + std::to_string(cmd.at) + " precedes " +
                                    std::to_string(out.commands.back().at));
    }
    out.commands.push_back(cmd);
    if (end == text.size()) break;
  }
  return out;
}

std::vector<Command> parse_trace(std::string_view text) {
  return parse_trace_file(text).commands;
}

std::string format_command(const Command& cmd) {
  std::string s = std::to_string(cmd.at) + " " + std::string(to_string(cmd.kind));
  switch (cmd.kind) {
    case CommandKind::Idle:
      break;
    case CommandKind::SetMode:
      s += " " + std::to_string(cmd.addr.subarray) + " " +
           upper(to_string(cmd.mode.value_or(CellMode::Normal)));
      break;
    default:
      s += " " + format_address(cmd.addr);
      if (cmd.bit) s += *cmd.bit ? " 1" : " 0";
      if (cmd.trit) s += " " + std::string(to_string(*cmd.trit));
      break;
  }
  return s;
}

std::string serialize(const TraceFile& trace) {
  std::ostringstream out;
  out << "# amcsim trace v" << trace.version << "\n";
  for (const auto& a : trace.arrays) {
    out << "# array " << a.id << " " << to_string(a.tech) << " " << to_string(a.mode) << " "
        << a.rows << " " << a.cols << "\n";
  }
  for (const auto& c : trace.commands) out << format_command(c) << "\n";
  return out.str();
}

TraceFile load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::TraceError, "cannot open trace " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_file(ss.str());
}

// ---------------------------------------------------------------------------
// Weight-stationary

TraceFile gen_weight_stationary(const WeightStationaryParams& p, std::uint64_t seed) {
  if (p.rows == 0 || p.cols == 0) throw Error(ErrorCode::ConfigError, "empty sub-array");
  const std::uint64_t cells = static_cast<std::uint64_t>(p.rows) * p.cols;
  if (p.weights > cells) {
    throw Error(ErrorCode::ConfigError, std::to_string(p.weights) + " weights do not fit in " +
                                            std::to_string(cells) + " cells");
  }
  if (p.weights == 0 && p.activations > 0) {
    throw Error(ErrorCode::ConfigError, "activations need at least one weight cell");
  }
  if (p.inter_arrival_ns < 0) throw Error(ErrorCode::ConfigError, "negative inter-arrival");

  TraceFile out;
  out.arrays.push_back({p.subarray, Technology::Aug8T, CellMode::Augmented, p.rows, p.cols});
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);

  auto addr_of = [&](std::uint64_t i) {
    return Address{p.subarray, static_cast<std::uint32_t>(i / p.cols),
                   static_cast<std::uint32_t>(i % p.cols), Plane::Static};
  };
  TimeNs t = 0;
  for (std::uint32_t w = 0; w < p.weights; ++w) {
    out.commands.push_back(with_bit(make_command(t, CommandKind::WriteSram, addr_of(w)), coin(rng)));
    t += p.inter_arrival_ns;
  }
  for (std::uint64_t a = 0; a < p.activations; ++a) {
    const auto addr = addr_of(a % p.weights);
    out.commands.push_back(with_bit(make_command(t, CommandKind::WriteDram, addr), coin(rng)));
    t += p.inter_arrival_ns;
    out.commands.push_back(make_command(t, CommandKind::ReadDram, addr));
    t += p.inter_arrival_ns;
  }
  if (p.activations > 0) {
    out.commands.push_back(set_mode_command(t, p.subarray, CellMode::Normal));
    t += p.inter_arrival_ns;
  }
  for (std::uint32_t w = 0; w < p.weights; ++w) {
    out.commands.push_back(make_command(t, CommandKind::ReadSram, addr_of(w)));
    t += p.inter_arrival_ns;
  }
  return out;
}

std::optional<std::string> check_weight_stationary(const WeightStationaryParams& p,
                                                   double retention_ns) {
  constexpr int kOpsPerActivation = 2;
  if (static_cast<double>(p.inter_arrival_ns * kOpsPerActivation) < retention_ns) {
    return std::nullopt;
  }
  return "inter-arrival " + std::to_string(p.inter_arrival_ns) + " ns x " +
         std::to_string(kOpsPerActivation) + " ops is not below retention " +
         std::to_string(static_cast<long long>(retention_ns)) + " ns; activations may expire";
}

// ---------------------------------------------------------------------------
// Random

namespace {

struct Shadow {
  ArraySpec spec;
  CellMode mode;
  std::vector<char> static_known;
  std::vector<std::uint32_t> dyn;      // cells holding a dynamic datum
  std::vector<std::int64_t> dyn_pos;  // position in dyn, -1 if absent

  explicit Shadow(const ArraySpec& s)
      : spec(s),
        mode(s.mode),
        static_known(static_cast<std::size_t>(s.rows) * s.cols, 0),
        dyn_pos(static_cast<std::size_t>(s.rows) * s.cols, -1) {}

  std::uint32_t cells() const { return static_cast<std::uint32_t>(static_known.size()); }
  bool has_dyn(std::uint32_t i) const { return dyn_pos[i] >= 0; }
  void add_dyn(std::uint32_t i) {
    if (has_dyn(i)) return;
    dyn_pos[i] = static_cast<std::int64_t>(dyn.size());
    dyn.push_back(i);
  }
  void clear_dyn() {
    for (auto i : dyn) dyn_pos[i] = -1;
    dyn.clear();
  }
  Address addr(std::uint32_t i) const {
    return Address{spec.id, i / spec.cols, i % spec.cols, Plane::Static};
  }
};

}  // namespace

TraceFile gen_random(const RandomTraceParams& p, std::uint64_t seed, RandomTraceStats* stats) {
  if (p.arrays.empty()) throw Error(ErrorCode::ConfigError, "no sub-arrays");
  TraceFile out;
  out.arrays = p.arrays;
  std::vector<Shadow> shadows;
  for (const auto& a : p.arrays) {
    if (!is_legal(a.tech, a.mode)) throw Error(ErrorCode::IllegalMode, "illegal array mode");
    if (a.rows == 0 || a.cols == 0) throw Error(ErrorCode::ZeroDimension, "empty sub-array");
    shadows.emplace_back(a);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<TimeNs> gap(0, 2 * std::max<TimeNs>(p.mean_gap_ns, 0));
  std::uniform_int_distribution<std::size_t> pick_array(0, shadows.size() - 1);
  auto below = [&](std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
  };
  RandomTraceStats local;

  TimeNs t = 0;
  for (std::uint64_t n = 0; n < p.commands; ++n) {
    t += gap(rng);
    Shadow& s = shadows[pick_array(rng)];
    const auto cell = [&] { return static_cast<std::uint32_t>(below(s.cells())); };

    if (p.set_mode_rate > 0.0 && unit(rng) < p.set_mode_rate) {
      std::vector<CellMode> modes;
      for (auto m : {CellMode::Normal, CellMode::Augmented, CellMode::PowerGated}) {
        if (m != s.mode && is_legal(s.spec.tech, m)) modes.push_back(m);
      }
      if (!modes.empty()) {
        const CellMode m = modes[below(modes.size())];
        out.commands.push_back(set_mode_command(t, s.spec.id, m));
        s.clear_dyn();
        if (s.spec.tech == Technology::Aug7T && m != CellMode::Normal) {
          std::fill(s.static_known.begin(), s.static_known.end(), 0);
        }
        s.mode = m;
        continue;
      }
    }

    // A clean static-plane target: no dynamic datum, and for reads a known bit.
    auto clean_cell = [&](bool need_static) -> std::optional<std::uint32_t> {
      for (int tries = 0; tries < 8; ++tries) {
        const auto i = cell();
        if (!s.has_dyn(i) && (!need_static || s.static_known[i])) return i;
      }
      return std::nullopt;
    };
    auto emit_static = [&](CommandKind kind, std::uint32_t i) {
      Command c = make_command(t, kind, s.addr(i));
      if (kind == CommandKind::WriteSram) {
        c.bit = unit(rng) < 0.5;
        s.static_known[i] = 1;
      }
      out.commands.push_back(c);
    };

    const Technology tech = s.spec.tech;
    if (tech == Technology::Aug8T && s.mode == CellMode::Augmented) {
      if (!s.dyn.empty()) {
        ++local.eligible;
        if (unit(rng) < p.violation_rate) {
          ++local.injected;
          const auto i = s.dyn[below(s.dyn.size())];
          const auto kind = s.static_known[i] && unit(rng) < 0.5 ? CommandKind::ReadSram
                                                                 : CommandKind::WriteSram;
          Command c = make_command(t, kind, s.addr(i));
          if (kind == CommandKind::WriteSram) c.bit = unit(rng) < 0.5;
          out.commands.push_back(c);
          continue;
        }
      }
      const auto choice = below(10);
      if (choice < 4) {
        const auto i = cell();
        out.commands.push_back(
            with_bit(make_command(t, CommandKind::WriteDram, s.addr(i)), unit(rng) < 0.5));
        s.add_dyn(i);
      } else if (choice < 7 && !s.dyn.empty()) {
        out.commands.push_back(make_command(t, CommandKind::ReadDram, s.addr(s.dyn[below(s.dyn.size())])));
      } else if (choice < 8) {
        if (auto i = clean_cell(false)) emit_static(CommandKind::WriteSram, *i);
        else out.commands.push_back(make_command(t, CommandKind::Idle));
      } else if (choice < 9) {
        if (auto i = clean_cell(true)) emit_static(CommandKind::ReadSram, *i);
        else out.commands.push_back(make_command(t, CommandKind::Idle));
      } else {
        out.commands.push_back(make_command(t, CommandKind::Idle));
      }
    } else if (tech == Technology::Aug7T && s.mode == CellMode::Augmented) {
      if (below(2) == 0 || s.dyn.empty()) {
        const auto i = cell();
        const Trit v = static_cast<Trit>(static_cast<int>(below(3)) - 1);
        out.commands.push_back(with_trit(make_command(t, CommandKind::WriteTrit, s.addr(i)), v));
        s.add_dyn(i);
      } else {
        out.commands.push_back(make_command(t, CommandKind::ReadTrit, s.addr(s.dyn[below(s.dyn.size())])));
      }
    } else if (s.mode == CellMode::PowerGated) {
      out.commands.push_back(make_command(t, CommandKind::Idle));
    } else {
      const auto choice = below(tech == Technology::Aug8T ? 3 : 2);
      const auto i = cell();
      if (choice == 0 || !s.static_known[i]) {
        emit_static(CommandKind::WriteSram, i);
      } else {
        emit_static(choice == 1 ? CommandKind::ReadSram : CommandKind::ReadSramPulsed, i);
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace amcsim
