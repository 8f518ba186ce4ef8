#include "amcsim/runner.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "amcsim/error.hpp"

namespace amcsim {

std::vector<ArraySpec> uniform_arrays(Technology tech, CellMode mode, std::uint32_t rows,
                                      std::uint32_t cols, std::uint32_t count) {
  std::vector<ArraySpec> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back({i, tech, mode, rows, cols});
  return out;
}

std::vector<SubArray> build_arrays(const std::vector<ArraySpec>& specs, const RunSetup& setup,
                                   const ModelParams& models) {
  std::vector<SubArray> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    RetentionSetup rs;
    if (s.tech != Technology::Std6T) {
      try {
        rs.nominal_ns = models.retention.retention_time(s.tech, setup.temperature_C,
                                                        setup.bias.value_or(default_bias(s.tech)));
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
      }
    }
    rs.sigma = models.retention.variation_sigma;
    rs.seed = setup.seed;
    rs.zero_factor = setup.zero_retention_study ? models.retention.zero_retention_factor : 1.0;
    rs.resample_on_refresh = setup.resample_on_refresh;
    out.emplace_back(s.id, s.tech, s.mode, s.rows, s.cols, rs);
  }
  return out;
}

namespace {

struct Group {
  std::vector<ArraySpec> specs;
  std::vector<std::size_t> commands;  // indices into the trace
  RunResult result;
  std::map<std::uint32_t, std::string> snapshots;
  std::exception_ptr error;
};

void run_group(Group& g, const std::vector<Command>& trace, const RunSetup& setup,
               const ModelParams& models, TimeNs horizon) {
  try {
    Controller ctl(build_arrays(g.specs, setup, models), models, setup.policies);
    for (auto i : g.commands) ctl.submit(trace[i], i);
    g.result.report = ctl.take_report(horizon);
    g.result.events = ctl.take_events();
    if (setup.snapshot) {
      for (const auto& s : g.specs) {
        std::ostringstream ss;
        ctl.subarray(s.id).write_snapshot(ss, horizon);
        g.snapshots[s.id] = ss.str();
      }
    }
  } catch (...) {
    g.error = std::current_exception();
  }
}

}  // namespace

RunResult run(const std::vector<Command>& trace, const RunSetup& setup,
              const ModelParams& models) {
  if (setup.arrays.empty()) throw Error(ErrorCode::ConfigError, "no sub-arrays configured");
  if (setup.workers == 0) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  validate(setup.policies);
  std::set<std::uint32_t> ids;
  for (const auto& a : setup.arrays) {
    if (!ids.insert(a.id).second) {
      throw Error(ErrorCode::ConfigError, "duplicate sub-array id " + std::to_string(a.id));
    }
  }

  TimeNs last = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].at < last) {
      throw Error(ErrorCode::TraceError, "command " + std::to_string(i) + " is out of order");
    }
    last = trace[i].at;
  }
  const TimeNs horizon = setup.horizon_ns > 0 ? setup.horizon_ns : last;
  if (horizon < last) {
    throw Error(ErrorCode::ConfigError, "horizon precedes the last command");
  }

  // Sub-arrays in id order, dealt round-robin to workers.
  auto specs = setup.arrays;
  std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const std::size_t n = std::min<std::size_t>(setup.workers, specs.size());
  std::vector<Group> groups(n);
  std::map<std::uint32_t, std::size_t> owner;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    groups[i % n].specs.push_back(specs[i]);
    owner[specs[i].id] = i % n;
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& c = trace[i];
    auto it = owner.find(c.addr.subarray);
    // Idle and unknown sub-arrays go to the first group.
    const std::size_t g = (c.kind == CommandKind::Idle || it == owner.end()) ? 0 : it->second;
    groups[g].commands.push_back(i);
  }

  if (n == 1) {
    run_group(groups[0], trace, setup, models, horizon);
  } else {
    std::vector<std::jthread> threads;
    for (auto& g : groups) {
      threads.emplace_back([&g, &trace, &setup, &models, horizon] {
        run_group(g, trace, setup, models, horizon);
      });
    }
  }
  for (auto& g : groups) {
    if (g.error) std::rethrow_exception(g.error);
  }

  RunResult out;
  out.report = groups[0].result.report;
  out.events = std::move(groups[0].result.events);
  for (std::size_t i = 1; i < n; ++i) {
    out.report = merge(out.report, groups[i].result.report);
    auto& ev = groups[i].result.events;
    out.events.insert(out.events.end(), ev.begin(), ev.end());
  }
  if (!std::is_sorted(out.events.begin(), out.events.end(), event_order)) {
    std::stable_sort(out.events.begin(), out.events.end(), event_order);
  }
  out.report.config = setup.config_echo;
  if (setup.snapshot) {
    std::map<std::uint32_t, std::string> all;
    for (auto& g : groups) all.merge(g.snapshots);
    for (auto& [id, text] : all) out.snapshot += text;
  }
  return out;
}

}  // namespace amcsim
