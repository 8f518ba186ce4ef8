#include "amcsim/report.hpp"

#include <algorithm>
#include <iomanip>

namespace amcsim {

Counters& Counters::operator+=(const Counters& o) {
  commands += o.commands;
  executed += o.executed;
  rejected += o.rejected;
  failed += o.failed;
  filo_violations += o.filo_violations;
  retention_violations += o.retention_violations;
  silent_decays += o.silent_decays;
  refreshes += o.refreshes;
  mode_flushes += o.mode_flushes;
  dram_destroyed += o.dram_destroyed;
  pulsed_copies += o.pulsed_copies;
  return *this;
}

double SimReport::dynamic_energy_fJ() const {
  double sum = 0.0;
  for (const auto& [k, t] : ops) sum += static_cast<double>(t.count) * t.unit_fJ;
  return sum;
}

double SimReport::refresh_energy_fJ() const {
  double sum = 0.0;
  for (const auto& [k, t] : ops) {
    if (std::get<3>(k) == OpKind::Refresh) sum += static_cast<double>(t.count) * t.unit_fJ;
  }
  return sum;
}

double SimReport::hold_energy_fJ() const {
  double sum = 0.0;
  for (const auto& [k, t] : hold) sum += t.energy_fJ();
  return sum;
}

double SimReport::total_delay_ns() const {
  double sum = 0.0;
  for (const auto& [d, n] : latency_histogram) sum += d * static_cast<double>(n);
  return sum;
}

std::map<OpKind, OpTally> SimReport::by_op() const {
  // unit_fJ here is the summed energy, not a per-op constant.
  std::map<OpKind, OpTally> out;
  for (const auto& [k, t] : ops) {
    auto& o = out[std::get<3>(k)];
    o.count += t.count;
    o.unit_fJ += static_cast<double>(t.count) * t.unit_fJ;
  }
  return out;
}

std::map<std::uint32_t, double> SimReport::energy_by_subarray() const {
  std::map<std::uint32_t, double> out;
  for (const auto& [k, t] : ops) out[std::get<0>(k)] += static_cast<double>(t.count) * t.unit_fJ;
  return out;
}

SimReport merge(const SimReport& a, const SimReport& b) {
  SimReport out = a;
  for (const auto& [k, t] : b.ops) {
    auto& o = out.ops[k];
    o.count += t.count;
    o.unit_fJ = t.unit_fJ;
  }
  for (const auto& [k, t] : b.hold) {
    auto& o = out.hold[k];
    o.cell_ns += t.cell_ns;
    o.power_uW = t.power_uW;
  }
  for (const auto& [d, n] : b.latency_histogram) out.latency_histogram[d] += n;
  out.counters += b.counters;

  // Same sub-array in both: keep the later state.
  for (const auto& row : b.capacity) {
    auto it = std::find_if(out.capacity.begin(), out.capacity.end(),
                           [&](const CapacityRow& r) { return r.subarray == row.subarray; });
    if (it == out.capacity.end()) {
      out.capacity.push_back(row);
    } else if (b.horizon_ns > a.horizon_ns) {
      *it = row;
    }
  }
  std::sort(out.capacity.begin(), out.capacity.end(),
            [](const auto& x, const auto& y) { return x.subarray < y.subarray; });

  out.start_ns = std::min(a.start_ns, b.start_ns);
  out.horizon_ns = std::max(a.horizon_ns, b.horizon_ns);
  if (out.config.is_null()) out.config = b.config;
  if (out.model_checksum.empty()) out.model_checksum = b.model_checksum;
  return out;
}

namespace {

nlohmann::json capacity_json(const Capacity& c) {
  return {{"cells", c.cells},
          {"bits", c.bits},
          {"trits", c.trits},
          {"bit_equivalent", c.bit_equivalent},
          {"conventional_6t_cells", c.conventional_6t_cells}};
}

}  // namespace

nlohmann::json to_json(const SimReport& r) {
  nlohmann::json j;
  j["config"] = r.config;
  j["model_checksum"] = r.model_checksum;
  j["start_ns"] = r.start_ns;
  j["horizon_ns"] = r.horizon_ns;

  const auto& c = r.counters;
  j["counters"] = {{"commands", c.commands},
                   {"executed", c.executed},
                   {"rejected", c.rejected},
                   {"failed", c.failed},
                   {"filo_violations", c.filo_violations},
                   {"retention_violations", c.retention_violations},
                   {"silent_decays", c.silent_decays},
                   {"refreshes", c.refreshes},
                   {"mode_flushes", c.mode_flushes},
                   {"dram_destroyed", c.dram_destroyed},
                   {"pulsed_copies", c.pulsed_copies}};

  j["dynamic_energy_fJ"] = r.dynamic_energy_fJ();
  j["refresh_energy_fJ"] = r.refresh_energy_fJ();
  j["hold_energy_fJ"] = r.hold_energy_fJ();
  j["total_energy_fJ"] = r.dynamic_energy_fJ() + r.hold_energy_fJ();

  auto by_op = nlohmann::json::object();
  for (const auto& [op, t] : r.by_op()) {
    by_op[std::string(to_string(op))] = {{"count", t.count}, {"energy_fJ", t.unit_fJ}};
  }
  j["energy_by_op"] = by_op;

  auto by_sa = nlohmann::json::object();
  for (const auto& [sa, e] : r.energy_by_subarray()) by_sa[std::to_string(sa)] = e;
  j["energy_by_subarray"] = by_sa;

  auto ops = nlohmann::json::array();
  for (const auto& [k, t] : r.ops) {
    const auto& [sa, tech, mode, op] = k;
    ops.push_back({{"subarray", sa},
                   {"tech", to_string(tech)},
                   {"mode", to_string(mode)},
                   {"op", to_string(op)},
                   {"count", t.count},
                   {"unit_fJ", t.unit_fJ}});
  }
  j["ops"] = ops;

  auto hold = nlohmann::json::array();
  for (const auto& [k, t] : r.hold) {
    hold.push_back({{"tech", to_string(k.first)},
                    {"mode", to_string(k.second)},
                    {"power_uW", t.power_uW},
                    {"cell_ns", t.cell_ns},
                    {"energy_fJ", t.energy_fJ()}});
  }
  j["hold"] = hold;

  auto hist = nlohmann::json::array();
  for (const auto& [d, n] : r.latency_histogram) hist.push_back({{"delay_ns", d}, {"count", n}});
  j["latency"] = {{"total_delay_ns", r.total_delay_ns()}, {"histogram", hist}};

  auto cap = nlohmann::json::array();
  Capacity total;
  for (const auto& row : r.capacity) {
    auto e = capacity_json(row.capacity);
    e["subarray"] = row.subarray;
    e["tech"] = to_string(row.tech);
    e["mode"] = to_string(row.mode);
    e["rows"] = row.rows;
    e["cols"] = row.cols;
    cap.push_back(e);
    total.cells += row.capacity.cells;
    total.bits += row.capacity.bits;
    total.trits += row.capacity.trits;
    total.bit_equivalent += row.capacity.bit_equivalent;
    total.conventional_6t_cells += row.capacity.conventional_6t_cells;
  }
  j["capacity"] = {{"subarrays", cap}, {"total", capacity_json(total)}};
  return j;
}

void write_summary(std::ostream& out, const SimReport& r) {
  const auto& c = r.counters;
  const auto flags = out.flags();
  out << "horizon            " << r.start_ns << " .. " << r.horizon_ns << " ns\n";
  out << "commands           " << c.commands << " (executed " << c.executed << ", rejected "
      << c.rejected << ", failed " << c.failed << ")\n";
  out << "filo violations    " << c.filo_violations << "\n";
  out << "retention viol.    " << c.retention_violations << " (silent " << c.silent_decays
      << ")\n";
  out << "refreshes          " << c.refreshes << "\n";
  out << "mode flushes       " << c.mode_flushes << "\n";
  out << "dram destroyed     " << c.dram_destroyed << "\n";
  out << std::setprecision(6);
  out << "dynamic energy     " << r.dynamic_energy_fJ() << " fJ (refresh "
      << r.refresh_energy_fJ() << " fJ)\n";
  out << "hold energy        " << r.hold_energy_fJ() << " fJ\n";
  out << "total delay        " << r.total_delay_ns() << " ns\n";
  out << "\n  op                 count        energy_fJ\n";
  for (const auto& [op, t] : r.by_op()) {
    out << "  " << std::left << std::setw(18) << to_string(op) << std::right << std::setw(7)
        << t.count << std::setw(17) << t.unit_fJ << "\n";
  }
  out.flags(flags);
}

}  // namespace amcsim
