#include "amcsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "amcsim/error.hpp"
#include "amcsim/workload.hpp"

namespace amcsim {

std::string_view to_string(CompareWorkload w) {
  return w == CompareWorkload::Ternary ? "ternary" : "dual";
}

std::optional<CompareWorkload> parse_compare_workload(std::string_view s) {
  if (s == "ternary") return CompareWorkload::Ternary;
  if (s == "dual") return CompareWorkload::Dual;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// compare

namespace {

double op_total(const SimReport& r, std::initializer_list<OpKind> kinds) {
  double sum = 0.0;
  for (const auto& [key, t] : r.ops) {
    if (std::find(kinds.begin(), kinds.end(), std::get<3>(key)) != kinds.end()) {
      sum += static_cast<double>(t.count) * t.unit_fJ;
    }
  }
  return sum;
}

std::uint64_t count_logical_ops(const std::vector<TraceEvent>& events) {
  std::set<std::uint64_t> labels;
  for (const auto& e : events) {
    if (e.kind == EventKind::Op && e.command && e.label) labels.insert(*e.label);
  }
  return labels.size();
}

Address cell_at(std::uint64_t i, std::uint32_t cols) {
  return Address{0, static_cast<std::uint32_t>(i / cols), static_cast<std::uint32_t>(i % cols),
                 Plane::Static};
}

Command labelled(Command c, std::uint64_t label) {
  c.label = label;
  return c;
}

void run_side(CompareSide& side, CellMode mode, std::uint64_t cells, const CompareSetup& setup,
              const ModelParams& models,
              const std::function<void(std::size_t, const SubmitResult&)>& check) {
  constexpr std::uint32_t kCols = 64;
  const auto rows = static_cast<std::uint32_t>((cells + kCols - 1) / kCols);
  RunSetup rs;
  rs.arrays = {{0, side.tech, mode, std::max<std::uint32_t>(rows, 1), kCols}};
  rs.temperature_C = setup.temperature_C;
  rs.bias = setup.bias;
  rs.seed = setup.seed;
  rs.policies = setup.policies;
  Controller ctl(build_arrays(rs.arrays, rs, models), models, setup.policies);
  for (std::size_t i = 0; i < side.trace.size(); ++i) check(i, ctl.submit(side.trace[i], i));
  side.report = ctl.take_report(side.trace.empty() ? 0 : side.trace.back().at);
  side.events = ctl.take_events();
  side.cells = cells;
  side.logical_ops = count_logical_ops(side.events);
}

}  // namespace

CompareResult compare(const CompareSetup& setup, const ModelParams& models) {
  if (setup.items == 0) throw Error(ErrorCode::ConfigError, "compare needs at least one item");
  if (setup.gap_ns <= 0) throw Error(ErrorCode::ConfigError, "gap must be positive");
  constexpr std::uint32_t kCols = 64;

  CompareResult r;
  r.setup = setup;
  r.baseline.name = "6T";
  r.baseline.tech = Technology::Std6T;
  std::mt19937_64 rng(setup.seed);
  const TimeNs g = setup.gap_ns;
  const std::uint64_t n = setup.items;

  if (setup.workload == CompareWorkload::Ternary) {
    r.amc.name = "7T-AMC";
    r.amc.tech = Technology::Aug7T;
    std::uniform_int_distribution<int> pick(-1, 1);
    std::vector<Trit> data(n);
    for (auto& t : data) t = static_cast<Trit>(pick(rng));

    for (std::uint64_t i = 0; i < n; ++i) {
      const TimeNs t0 = static_cast<TimeNs>(i) * 2 * g;
      const NodePair p = encode(data[i]);
      const Address qa = cell_at(2 * i, kCols), qba = cell_at(2 * i + 1, kCols);
      auto& b = r.baseline.trace;
      b.push_back(labelled(with_bit(make_command(t0, CommandKind::WriteSram, qa), p.q), 2 * i));
      b.push_back(labelled(with_bit(make_command(t0, CommandKind::WriteSram, qba), p.qb), 2 * i));
      b.push_back(labelled(make_command(t0 + g, CommandKind::ReadSram, qa), 2 * i + 1));
      b.push_back(labelled(make_command(t0 + g, CommandKind::ReadSram, qba), 2 * i + 1));

      const Address a = cell_at(i, kCols);
      auto& m = r.amc.trace;
      m.push_back(labelled(with_trit(make_command(t0, CommandKind::WriteTrit, a), data[i]), 2 * i));
      m.push_back(labelled(make_command(t0 + g, CommandKind::ReadTrit, a), 2 * i + 1));
    }

    std::optional<bool> q;
    run_side(r.baseline, CellMode::Normal, 2 * n, setup, models,
             [&](std::size_t i, const SubmitResult& s) {
               if (i % 4 == 2) q = s.bit;
               if (i % 4 == 3) {
                 std::optional<Trit> got;
                 if (q && s.bit) got = decode({*q, *s.bit});
                 if (got != data[i / 4]) ++r.baseline.readback_errors;
               }
             });
    run_side(r.amc, CellMode::Augmented, n, setup, models,
             [&](std::size_t i, const SubmitResult& s) {
               if (i % 2 == 1 && s.trit != data[i / 2]) ++r.amc.readback_errors;
             });
  } else {
    r.amc.name = "8T-AMC";
    r.amc.tech = Technology::Aug8T;
    std::bernoulli_distribution coin(0.5);
    std::vector<std::pair<bool, bool>> data(n);
    for (auto& [a, b] : data) {
      a = coin(rng);
      b = coin(rng);
    }

    for (std::uint64_t i = 0; i < n; ++i) {
      const TimeNs t0 = static_cast<TimeNs>(i) * 4 * g;
      const auto [x, y] = data[i];
      const Address xa = cell_at(2 * i, kCols), ya = cell_at(2 * i + 1, kCols);
      // Static bit read before the dynamic bit is written: FILO-safe.
      auto& b = r.baseline.trace;
      b.push_back(labelled(with_bit(make_command(t0, CommandKind::WriteSram, xa), x), 4 * i));
      b.push_back(labelled(make_command(t0 + g, CommandKind::ReadSram, xa), 4 * i + 1));
      b.push_back(labelled(with_bit(make_command(t0 + 2 * g, CommandKind::WriteSram, ya), y), 4 * i + 2));
      b.push_back(labelled(make_command(t0 + 3 * g, CommandKind::ReadSram, ya), 4 * i + 3));

      Address a = cell_at(i, kCols);
      auto& m = r.amc.trace;
      m.push_back(labelled(with_bit(make_command(t0, CommandKind::WriteSram, a), x), 4 * i));
      m.push_back(labelled(make_command(t0 + g, CommandKind::ReadSram, a), 4 * i + 1));
      a.plane = Plane::Dynamic;
      m.push_back(labelled(with_bit(make_command(t0 + 2 * g, CommandKind::WriteDram, a), y), 4 * i + 2));
      m.push_back(labelled(make_command(t0 + 3 * g, CommandKind::ReadDram, a), 4 * i + 3));
    }

    auto check = [&](CompareSide& side) {
      return [&side, &data](std::size_t i, const SubmitResult& s) {
        const auto& [x, y] = data[i / 4];
        if (i % 4 == 1 && s.bit != x) ++side.readback_errors;
        if (i % 4 == 3 && s.bit != y) ++side.readback_errors;
      };
    };
    run_side(r.baseline, CellMode::Normal, 2 * n, setup, models, check(r.baseline));
    run_side(r.amc, CellMode::Augmented, n, setup, models, check(r.amc));
  }
  return r;
}

double CompareResult::write_energy(const CompareSide& s) const {
  return op_total(s.report, {OpKind::SramWrite, OpKind::DramWrite, OpKind::TritWrite});
}

double CompareResult::read_energy(const CompareSide& s) const {
  return op_total(s.report, {OpKind::SramRead, OpKind::SramReadPulsed, OpKind::DramRead,
                             OpKind::TritRead});
}

double CompareResult::write_energy_ratio() const {
  return write_energy(baseline) / write_energy(amc);
}

double CompareResult::read_energy_ratio() const {
  return read_energy(baseline) / read_energy(amc);
}

double CompareResult::dynamic_energy_ratio() const {
  return baseline.report.dynamic_energy_fJ() / amc.report.dynamic_energy_fJ();
}

double CompareResult::cell_ratio() const {
  return static_cast<double>(baseline.cells) / static_cast<double>(amc.cells);
}

double CompareResult::latency_ratio() const {
  return baseline.report.total_delay_ns() / amc.report.total_delay_ns();
}

nlohmann::json to_json(const CompareResult& r) {
  const double items = static_cast<double>(r.setup.items);
  auto side = [&](const CompareSide& s) {
    return nlohmann::json{
        {"name", s.name},
        {"tech", to_string(s.tech)},
        {"cells", s.cells},
        {"cells_per_item", static_cast<double>(s.cells) / items},
        {"logical_ops", s.logical_ops},
        {"readback_errors", s.readback_errors},
        {"write_energy_fJ", r.write_energy(s)},
        {"read_energy_fJ", r.read_energy(s)},
        {"write_energy_per_item_fJ", r.write_energy(s) / items},
        {"dynamic_energy_fJ", s.report.dynamic_energy_fJ()},
        {"hold_energy_fJ", s.report.hold_energy_fJ()},
        {"total_delay_ns", s.report.total_delay_ns()},
        {"report", to_json(s.report)},
    };
  };
  return {
      {"workload", to_string(r.setup.workload)},
      {"items", r.setup.items},
      {"baseline", side(r.baseline)},
      {"amc", side(r.amc)},
      {"same_workload", r.same_workload()},
      {"ratios",
       {{"write_energy", r.write_energy_ratio()},
        {"read_energy", r.read_energy_ratio()},
        {"dynamic_energy", r.dynamic_energy_ratio()},
        {"cells", r.cell_ratio()},
        {"latency", r.latency_ratio()}}},
  };
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct Common {
  std::string model;
  std::string tech = "aug8t";
  std::string mode = "augmented";
  std::uint32_t rows = 64;
  std::uint32_t cols = 64;
  std::uint32_t count = 1;
  double temperature_C = 85.0;
  int underdrive_mV = 0;
  int boost_mV = 0;
  std::string filo = "enforce";
  bool refresh = false;
  double refresh_margin = 0.8;
  bool knows_variation = false;
  bool silent_decay = false;
  bool pulsed_override = false;
  bool strict = false;
  bool resample_on_refresh = false;
  bool zero_retention_study = false;
  std::uint64_t seed = 1;
  TimeNs horizon_ns = 0;
  unsigned workers = 1;

  CLI::Option* tech_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* rows_opt = nullptr;
  CLI::Option* cols_opt = nullptr;
  CLI::Option* count_opt = nullptr;
  CLI::Option* underdrive_opt = nullptr;
  CLI::Option* boost_opt = nullptr;
};

struct Loaded {
  ModelParams params;
  std::string source;  // path or "builtin"
};

Loaded load_models(const Common& c) {
  if (c.model.empty()) return {ModelParams::defaults(), "builtin"};
  return {ModelParams::load(c.model), c.model};
}

bool array_flags_given(const Common& c) {
  for (auto* o : {c.tech_opt, c.mode_opt, c.rows_opt, c.cols_opt, c.count_opt}) {
    if (o->count() > 0) return true;
  }
  return false;
}

std::vector<ArraySpec> resolve_arrays(const Common& c, const std::vector<ArraySpec>& header) {
  if (!header.empty() && !array_flags_given(c)) return header;
  auto tech = parse_technology(c.tech);
  if (!tech) throw Error(ErrorCode::ConfigError, "unknown technology '" + c.tech + "'");
  auto mode = parse_mode(c.mode);
  if (!mode) throw Error(ErrorCode::ConfigError, "unknown mode '" + c.mode + "'");
  if (!is_legal(*tech, *mode)) {
    throw Error(ErrorCode::IllegalMode, std::string(to_string(*mode)) + " is not available on " +
                                            std::string(to_string(*tech)));
  }
  if (c.count == 0) throw Error(ErrorCode::ConfigError, "count must be >= 1");
  return uniform_arrays(*tech, *mode, c.rows, c.cols, c.count);
}

std::optional<BiasConfig> resolve_bias(const Common& c) {
  if (c.underdrive_opt->count() == 0 && c.boost_opt->count() == 0) return std::nullopt;
  return BiasConfig{c.underdrive_mV, c.boost_mV};
}

Policies resolve_policies(const Common& c) {
  Policies p;
  auto filo = parse_filo_policy(c.filo);
  if (!filo) throw Error(ErrorCode::ConfigError, "unknown FILO policy '" + c.filo + "'");
  p.filo = *filo;
  p.refresh.enabled = c.refresh;
  p.refresh.margin = c.refresh_margin;
  p.refresh.controller_knows_variation = c.knows_variation;
  p.silent_decay = c.silent_decay;
  p.pulsed_override = c.pulsed_override;
  p.strict = c.strict;
  validate(p);
  return p;
}

RunSetup resolve_setup(const Common& c, const std::vector<ArraySpec>& header) {
  RunSetup s;
  s.arrays = resolve_arrays(c, header);
  s.temperature_C = c.temperature_C;
  s.bias = resolve_bias(c);
  s.seed = c.seed;
  s.policies = resolve_policies(c);
  s.resample_on_refresh = c.resample_on_refresh;
  s.zero_retention_study = c.zero_retention_study;
  s.horizon_ns = c.horizon_ns;
  s.workers = c.workers;
  if (s.workers == 0) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  return s;
}

nlohmann::json config_echo(const RunSetup& s, const Loaded& m, const std::string& command) {
  nlohmann::json arrays = nlohmann::json::array();
  for (const auto& a : s.arrays) {
    const BiasConfig b = s.bias.value_or(default_bias(a.tech));
    arrays.push_back({{"id", a.id},
                      {"tech", to_string(a.tech)},
                      {"mode", to_string(a.mode)},
                      {"rows", a.rows},
                      {"cols", a.cols},
                      {"wl_underdrive_mV", b.wl_underdrive_mV},
                      {"wl_boost_mV", b.wl_boost_mV}});
  }
  const auto& p = s.policies;
  return {
      {"command", command},
      {"model", m.source},
      {"model_checksum", m.params.checksum},
      {"arrays", arrays},
      {"temperature_C", s.temperature_C},
      {"bias", s.bias ? nlohmann::json{{"wl_underdrive_mV", s.bias->wl_underdrive_mV},
                                       {"wl_boost_mV", s.bias->wl_boost_mV}}
                      : nlohmann::json("default")},
      {"policies",
       {{"filo", to_string(p.filo)},
        {"refresh",
         {{"enabled", p.refresh.enabled},
          {"margin", p.refresh.margin},
          {"controller_knows_variation", p.refresh.controller_knows_variation}}},
        {"silent_decay", p.silent_decay},
        {"pulsed_override", p.pulsed_override},
        {"strict", p.strict}}},
      {"resample_on_refresh", s.resample_on_refresh},
      {"zero_retention_study", s.zero_retention_study},
      {"seed", s.seed},
      {"horizon_ns", s.horizon_ns},
  };
}

void add_common(CLI::App& app, Common& c) {
  app.add_option("--model", c.model, "Model parameter file (default: built-in)")
      ->envname("AMCSIM_MODEL_FILE");
  c.tech_opt = app.add_option("--tech", c.tech, "std6t | aug8t | aug7t");
  c.mode_opt = app.add_option("--mode", c.mode, "normal | augmented | power_gated");
  c.rows_opt = app.add_option("--rows", c.rows);
  c.cols_opt = app.add_option("--cols", c.cols);
  c.count_opt = app.add_option("--count", c.count, "Number of identical sub-arrays");
  app.add_option("--temperature", c.temperature_C, "Die temperature, C");
  c.underdrive_opt = app.add_option("--underdrive-mv", c.underdrive_mV,
                                    "Hold wordline underdrive (default -100 for aug8t, 0 otherwise)");
  c.boost_opt = app.add_option("--boost-mv", c.boost_mV, "Write wordline boost");
  app.add_option("--filo", c.filo, "enforce | warn | off");
  app.add_flag("--refresh", c.refresh, "Enable scheduled refresh");
  app.add_option("--refresh-margin", c.refresh_margin, "Refresh at margin x retention");
  app.add_flag("--knows-variation", c.knows_variation,
               "Schedule refresh from per-cell retention");
  app.add_flag("--silent-decay", c.silent_decay, "Expired reads return 0 instead of failing");
  app.add_flag("--pulsed-override", c.pulsed_override,
               "Pulsed SRAM reads restore M3 and destroy the dynamic bit");
  app.add_flag("--strict", c.strict, "Abort on the first failing command");
  app.add_flag("--resample-on-refresh", c.resample_on_refresh);
  app.add_flag("--zero-retention-study", c.zero_retention_study,
               "Give Zero trits zero_retention_factor x the cell bound");
  app.add_option("--seed", c.seed, "Seed for every random choice");
  app.add_option("--horizon", c.horizon_ns, "Simulation end, ns (default: last command)");
  app.add_option("--workers", c.workers, "Worker threads");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write " + path);
}

std::string fmt_double(double v, int digits = 15) {
  std::ostringstream ss;
  ss << std::setprecision(digits) << v;
  return ss.str();
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string trace;
  std::string report = "report.json";
  std::string events = "events.log";
  std::string snapshot;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out) {
  const Loaded m = load_models(c);
  const TraceFile trace = load_trace(a.trace);
  RunSetup setup = resolve_setup(c, trace.arrays);
  setup.config_echo = config_echo(setup, m, "simulate");
  setup.config_echo["trace"] = a.trace;
  setup.snapshot = !a.snapshot.empty();

  const RunResult r = run(trace.commands, setup, m.params);
  if (!a.report.empty()) write_file(a.report, to_json(r.report).dump(2) + "\n");
  if (!a.events.empty()) {
    std::ostringstream ss;
    write_event_log(ss, r.events);
    write_file(a.events, ss.str());
  }
  if (setup.snapshot) write_file(a.snapshot, r.snapshot);

  write_summary(out, r.report);
  const bool dirty = r.report.violations() > 0 || r.report.counters.failed > 0;
  out << (dirty ? "status: violations\n" : "status: clean\n");
  return dirty ? 2 : 0;
}

// capacity ----------------------------------------------------------------

int cmd_capacity(const Common& c, bool json, std::ostream& out) {
  auto tech = parse_technology(c.tech);
  if (!tech) throw Error(ErrorCode::ConfigError, "unknown technology '" + c.tech + "'");
  if (c.rows == 0 || c.cols == 0) throw Error(ErrorCode::ZeroDimension, "empty sub-array");
  const std::uint64_t n = c.count;

  nlohmann::json modes = nlohmann::json::array();
  std::optional<Capacity> normal, augmented;
  for (auto mode : {CellMode::Normal, CellMode::Augmented, CellMode::PowerGated}) {
    if (!is_legal(*tech, mode)) continue;
    const Capacity cap = effective_capacity(*tech, mode, c.rows, c.cols);
    if (mode == CellMode::Normal) normal = cap;
    if (mode == CellMode::Augmented) augmented = cap;
    modes.push_back({{"mode", to_string(mode)},
                     {"cells", cap.cells * n},
                     {"bits", cap.bits * n},
                     {"trits", cap.trits * n},
                     {"bit_equivalent", cap.bit_equivalent * static_cast<double>(n)},
                     {"conventional_6t_cells", cap.conventional_6t_cells * n}});
  }
  nlohmann::json j{{"tech", to_string(*tech)},
                   {"rows", c.rows},
                   {"cols", c.cols},
                   {"count", c.count},
                   {"modes", modes}};
  if (normal && augmented) {
    j["augmented_to_normal_ratio"] = augmented->bit_equivalent / normal->bit_equivalent;
    if (augmented->trits > 0) {
      j["cells_per_trit"] = 1;
      j["conventional_6t_cells_per_trit"] =
          static_cast<double>(augmented->conventional_6t_cells) / static_cast<double>(augmented->trits);
    }
  }

  if (json) {
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "capacity " << to_string(*tech) << " " << c.rows << "x" << c.cols << " x" << c.count << "\n";
  out << std::left << std::setw(12) << "mode" << std::setw(10) << "cells" << std::setw(10) << "bits"
      << std::setw(10) << "trits" << std::setw(16) << "bit_equiv" << "6t_cells\n";
  for (const auto& row : modes) {
    out << std::left << std::setw(12) << row["mode"].get<std::string>() << std::setw(10)
        << row["cells"].get<std::uint64_t>() << std::setw(10) << row["bits"].get<std::uint64_t>()
        << std::setw(10) << row["trits"].get<std::uint64_t>() << std::setw(16)
        << fmt_double(row["bit_equivalent"].get<double>(), 10)
        << row["conventional_6t_cells"].get<std::uint64_t>() << "\n";
  }
  if (j.contains("augmented_to_normal_ratio")) {
    out << "augmented/normal: " << fmt_double(j["augmented_to_normal_ratio"].get<double>()) << "\n";
  }
  if (j.contains("cells_per_trit")) {
    out << "cells per trit: 1 (6T: "
        << fmt_double(j["conventional_6t_cells_per_trit"].get<double>()) << ")\n";
  }
  return 0;
}

// compare -----------------------------------------------------------------

struct CompareArgs {
  std::string workload = "ternary";
  std::uint64_t items = 1024;
  TimeNs gap_ns = 10;
  std::string report;
  std::string baseline_events;
  std::string amc_events;
};

int cmd_compare(const Common& c, const CompareArgs& a, std::ostream& out) {
  const Loaded m = load_models(c);
  CompareSetup s;
  auto w = parse_compare_workload(a.workload);
  if (!w) throw Error(ErrorCode::ConfigError, "unknown workload '" + a.workload + "'");
  s.workload = *w;
  s.items = a.items;
  s.gap_ns = a.gap_ns;
  s.seed = c.seed;
  s.temperature_C = c.temperature_C;
  s.bias = resolve_bias(c);
  s.policies = resolve_policies(c);

  const CompareResult r = compare(s, m.params);
  nlohmann::json j = to_json(r);
  j["config"] = {{"command", "compare"},
                 {"model", m.source},
                 {"model_checksum", m.params.checksum},
                 {"workload", a.workload},
                 {"items", a.items},
                 {"gap_ns", a.gap_ns},
                 {"seed", c.seed},
                 {"temperature_C", c.temperature_C},
                 {"bias", s.bias ? nlohmann::json{{"wl_underdrive_mV", s.bias->wl_underdrive_mV},
                                                  {"wl_boost_mV", s.bias->wl_boost_mV}}
                                 : nlohmann::json("default")}};
  if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
  auto dump_events = [](const std::string& path, const std::vector<TraceEvent>& ev) {
    if (path.empty()) return;
    std::ostringstream ss;
    write_event_log(ss, ev);
    write_file(path, ss.str());
  };
  dump_events(a.baseline_events, r.baseline.events);
  dump_events(a.amc_events, r.amc.events);

  const double items = static_cast<double>(s.items);
  out << "compare " << to_string(s.workload) << ", " << s.items << " items\n";
  for (const CompareSide* side : {&r.baseline, &r.amc}) {
    out << "  " << std::left << std::setw(8) << side->name << " cells/item "
        << fmt_double(static_cast<double>(side->cells) / items) << "  write fJ/item "
        << fmt_double(r.write_energy(*side) / items) << "  dynamic fJ "
        << fmt_double(side->report.dynamic_energy_fJ()) << "  delay ns "
        << fmt_double(side->report.total_delay_ns()) << "  logical ops " << side->logical_ops
        << "\n";
  }
  out << "  ratios (6T / AMC): write energy " << fmt_double(r.write_energy_ratio())
      << ", dynamic energy " << fmt_double(r.dynamic_energy_ratio()) << ", cells "
      << fmt_double(r.cell_ratio()) << ", latency " << fmt_double(r.latency_ratio()) << "\n";
  if (!r.same_workload()) {
    out << "  logical-op counts differ\n";
    return 1;
  }
  if (r.baseline.readback_errors + r.amc.readback_errors > 0) {
    out << "  readback errors: 6T " << r.baseline.readback_errors << ", AMC "
        << r.amc.readback_errors << "\n";
    return 2;
  }
  return 0;
}

// gen-trace ---------------------------------------------------------------

struct GenArgs {
  std::string generator = "weight-stationary";
  std::string out;
  WeightStationaryParams ws;
  std::uint64_t commands = 1000;
  TimeNs mean_gap_ns = 100;
  double violation_rate = 0.0;
  double set_mode_rate = 0.0;
};

int cmd_gen_trace(const Common& c, const GenArgs& a, std::ostream& out, std::ostream& err) {
  TraceFile trace;
  if (a.generator == "weight-stationary") {
    const Loaded m = load_models(c);
    trace = gen_weight_stationary(a.ws, c.seed);
    const auto bias = resolve_bias(c).value_or(default_bias(Technology::Aug8T));
    const double ret = m.params.retention.retention_time(Technology::Aug8T, c.temperature_C, bias);
    if (auto warning = check_weight_stationary(a.ws, ret)) err << "warning: " << *warning << "\n";
  } else if (a.generator == "random") {
    RandomTraceParams p;
    p.arrays = resolve_arrays(c, {});
    p.commands = a.commands;
    p.mean_gap_ns = a.mean_gap_ns;
    p.violation_rate = a.violation_rate;
    p.set_mode_rate = a.set_mode_rate;
    if (p.violation_rate < 0 || p.violation_rate > 1 || p.set_mode_rate < 0 ||
        p.set_mode_rate > 1) {
      throw Error(ErrorCode::ConfigError, "rates must lie in [0, 1]");
    }
    trace = gen_random(p, c.seed);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown generator '" + a.generator + "'");
  }
  const std::string text = serialize(trace);
  if (a.out.empty() || a.out == "-") {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return 0;
}

// validate-trace ----------------------------------------------------------

int cmd_validate_trace(const Common& c, const std::string& path, std::ostream& out) {
  const Loaded m = load_models(c);
  TraceFile trace;
  try {
    trace = load_trace(path);
  } catch (const TraceError& e) {
    out << path << ":" << e.line() << ": error: " << e.reason() << "\n";
    return 1;
  }
  RunSetup setup = resolve_setup(c, trace.arrays);

  std::map<std::uint32_t, const ArraySpec*> arrays;
  for (const auto& a : setup.arrays) arrays[a.id] = &a;
  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < trace.commands.size(); ++i) {
    const Command& cmd = trace.commands[i];
    if (cmd.kind == CommandKind::Idle) continue;
    auto it = arrays.find(cmd.addr.subarray);
    if (it == arrays.end()) {
      out << "command " << i << ": error: no sub-array " << cmd.addr.subarray << "\n";
      ++errors;
      continue;
    }
    const ArraySpec& a = *it->second;
    if (cmd.kind == CommandKind::SetMode) {
      if (!is_legal(a.tech, *cmd.mode)) {
        out << "command " << i << ": error: " << to_string(*cmd.mode) << " is not available on "
            << to_string(a.tech) << "\n";
        ++errors;
      }
    } else if (cmd.addr.row >= a.rows || cmd.addr.col >= a.cols) {
      out << "command " << i << ": error: address " << format_address(cmd.addr)
          << " outside " << a.rows << "x" << a.cols << "\n";
      ++errors;
    }
  }
  if (errors > 0) {
    out << errors << " error(s)\n";
    return 1;
  }

  // Dry run: violating commands are rejected so later findings are not
  // artefacts of earlier ones.
  setup.policies.filo = FiloPolicy::Enforce;
  setup.policies.strict = false;
  setup.workers = 1;
  const RunResult r = run(trace.commands, setup, m.params);
  std::uint64_t findings = 0, warnings = 0;
  for (const auto& e : r.events) {
    if (!e.command) continue;
    const Command& cmd = trace.commands[*e.command];
    switch (e.kind) {
      case EventKind::FiloViolation:
        out << "command " << *e.command << ": FILO violation: " << format_command(cmd)
            << " would destroy the live dynamic bit\n";
        ++findings;
        break;
      case EventKind::ExpiredRead:
      case EventKind::SilentDecay:
        out << "command " << *e.command << ": warning: " << format_command(cmd)
            << " reads data past its retention\n";
        ++warnings;
        break;
      case EventKind::CommandFailed:
        out << "command " << *e.command << ": " << format_command(cmd) << " fails: "
            << (e.error ? to_string(*e.error) : "error") << "\n";
        ++findings;
        break;
      default:
        break;
    }
  }
  out << trace.commands.size() << " commands, " << findings << " finding(s), " << warnings
      << " warning(s)\n";
  return findings > 0 ? 2 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Augmented memory cell simulator", "amcsim"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option values; flags take precedence");
  Common common;
  add_common(app, common);

  auto* sim = app.add_subcommand("simulate", "Run a trace and write report, event log, summary");
  SimulateArgs sim_args;
  sim->add_option("trace", sim_args.trace, "Trace file")->required();
  sim->add_option("--report", sim_args.report, "Report JSON path ('' to skip)");
  sim->add_option("--events", sim_args.events, "Event log path ('' to skip)");
  sim->add_option("--snapshot", sim_args.snapshot, "Write final cell occupancy here");

  auto* cap = app.add_subcommand("capacity", "Effective capacity per mode");
  bool cap_json = false;
  cap->add_flag("--json", cap_json);

  auto* cmp = app.add_subcommand("compare", "6T baseline against AMC cells on one workload");
  CompareArgs cmp_args;
  cmp->add_option("--workload", cmp_args.workload, "ternary | dual");
  cmp->add_option("--items", cmp_args.items);
  cmp->add_option("--gap", cmp_args.gap_ns, "ns between logical operations");
  cmp->add_option("--report", cmp_args.report, "Comparison JSON path");
  cmp->add_option("--baseline-events", cmp_args.baseline_events);
  cmp->add_option("--amc-events", cmp_args.amc_events);

  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic trace");
  GenArgs gen_args;
  gen->add_option("--generator", gen_args.generator, "weight-stationary | random");
  gen->add_option("--out", gen_args.out, "Output path (default: stdout)");
  gen->add_option("--weights", gen_args.ws.weights);
  gen->add_option("--activations", gen_args.ws.activations);
  gen->add_option("--inter-arrival", gen_args.ws.inter_arrival_ns, "ns");
  gen->add_option("--subarray", gen_args.ws.subarray);
  gen->add_option("--commands", gen_args.commands);
  gen->add_option("--mean-gap", gen_args.mean_gap_ns, "ns");
  gen->add_option("--violation-rate", gen_args.violation_rate);
  gen->add_option("--set-mode-rate", gen_args.set_mode_rate);

  auto* val = app.add_subcommand("validate-trace", "Static checks and FILO dry run");
  std::string val_path;
  val->add_option("trace", val_path, "Trace file")->required();

  for (auto* s : {sim, cap, cmp, gen, val}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(common, sim_args, out);
    if (*cap) return cmd_capacity(common, cap_json, out);
    if (*cmp) return cmd_compare(common, cmp_args, out);
    if (*gen) {
      gen_args.ws.rows = common.rows;
      gen_args.ws.cols = common.cols;
      return cmd_gen_trace(common, gen_args, out, err);
    }
    if (*val) return cmd_validate_trace(common, val_path, out);
  } catch (const TraceError& e) {
    err << "error: line " << e.line() << ": " << e.reason() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace amcsim
