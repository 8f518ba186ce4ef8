#pragma once

// Executes time-ordered command streams against a set of sub-arrays.
//
// Commands run atomically at their timestamp; delays feed latency statistics
// only. Before each command every scheduled refresh due at or before its
// timestamp is executed, earliest first, ties by (sub-array, row, col).
// Retention loss is observed when data is read or refreshed, never eagerly.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "amcsim/command.hpp"
#include "amcsim/error.hpp"
#include "amcsim/report.hpp"

namespace amcsim {

enum class FiloPolicy : std::uint8_t { Enforce, Warn, Off };

std::string_view to_string(FiloPolicy p);
std::optional<FiloPolicy> parse_filo_policy(std::string_view s);

struct RefreshPolicy {
  bool enabled = false;
  double margin = 0.8;  // refresh once age >= margin * retention
  // false: schedule from the nominal retention, blind to per-cell variation
  bool controller_knows_variation = false;
};

struct Policies {
  FiloPolicy filo = FiloPolicy::Enforce;
  RefreshPolicy refresh;
  bool silent_decay = false;
  bool pulsed_override = false;
  bool strict = false;  // abort on the first failing command
};

// Throws ConfigError for a margin outside (0, 1).
void validate(const Policies& p);

enum class EventKind : std::uint8_t {
  Op,
  DramDestroyed,
  SilentDecay,
  ExpiredRead,
  ModeFlush,
  PulsedCopy,
  FiloViolation,
  CommandFailed,
};

std::string_view to_string(EventKind kind);

enum class AddrScope : std::uint8_t { None, SubArray, Cell };

struct TraceEvent {
  TimeNs at = 0;
  EventKind kind = EventKind::Op;
  AddrScope scope = AddrScope::Cell;
  Address addr;
  // Trace index of the causing command; nullopt for scheduled refreshes.
  std::optional<std::uint64_t> command;
  std::optional<OpKind> op;
  double energy_fJ = 0.0;
  double delay_ns = 0.0;
  std::optional<ErrorCode> error;
  bool executed = false;  // FiloViolation: command ran anyway
  std::optional<std::uint64_t> label;

  // Canonical order: (at, refreshes before commands, cell or command index, seq).
  std::uint8_t phase = 1;
  std::uint64_t order_key = 0;
  std::uint32_t seq = 0;
};

bool event_order(const TraceEvent& a, const TraceEvent& b);

// `time_ns kind addr detail`, one line per event.
std::string format_event(const TraceEvent& e);
void write_event_log(std::ostream& out, const std::vector<TraceEvent>& events);

// True iff cmd is a static-plane access (or pulsed read without override)
// that would destroy a live dynamic bit of an 8T sub-array in Augmented mode.
// Reads of an empty static plane fail without touching Vz and are not flagged.
bool check_filo(const SubArray& subarray, const Command& cmd, bool pulsed_override = false);

enum class Outcome : std::uint8_t { Executed, Rejected, Failed, Ignored };

struct SubmitResult {
  Outcome outcome = Outcome::Ignored;
  std::optional<bool> bit;
  std::optional<Trit> trit;
  std::optional<ErrorCode> error;
};

class Controller {
 public:
  Controller(std::vector<SubArray> arrays, const ModelParams& models, Policies policies,
             TimeNs start = 0);

  // Runs due refreshes, then the command. Throws OutOfOrder on a time
  // regression, and any access error in strict mode.
  SubmitResult submit(const Command& cmd, std::uint64_t index);

  // Refreshes whose deadline is <= now, in execution order.
  std::vector<Command> schedule_refresh(TimeNs now) const;

  // Executes scheduled refreshes with deadline <= now.
  void advance(TimeNs now);

  // Closes the current epoch at `until` (hold energy integrated up to it) and
  // returns its report; counters restart for the next epoch.
  SimReport take_report(TimeNs until);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> take_events();

  const SubArray& subarray(std::uint32_t id) const;
  TimeNs now() const { return now_; }

 private:
  using Deadline = std::tuple<TimeNs, std::uint32_t, std::uint32_t, std::uint32_t>;

  SubArray* find(std::uint32_t id);
  double scheduling_retention(const SubArray& sa, std::uint32_t row, std::uint32_t col) const;
  TimeNs refresh_offset(double retention) const;
  void update_deadline(const SubArray& sa, std::uint32_t row, std::uint32_t col, TimeNs now);
  void clear_deadlines(const SubArray& sa);
  void close_hold(SubArray& sa, TimeNs t);
  void execute_refresh(const Deadline& d);
  void emit(TraceEvent e);
  void record_op(const SubArray& sa, OpKind op, const AccessResult& r);
  void record_cell_events(const std::vector<AddressedEvent>& events);

  std::vector<SubArray> arrays_;
  std::map<std::uint32_t, std::size_t> index_;
  const ModelParams& models_;
  Policies policies_;

  TimeNs epoch_start_;
  TimeNs now_;
  std::vector<TimeNs> mode_since_;

  std::set<Deadline> deadlines_;
  std::vector<std::vector<TimeNs>> deadline_of_;  // per array, per cell; -1 = none

  SimReport report_;
  std::vector<TraceEvent> events_;

  // ordering context for events being emitted
  std::uint8_t cur_phase_ = 1;
  std::uint64_t cur_key_ = 0;
  std::uint32_t cur_seq_ = 0;
  std::optional<std::uint64_t> cur_command_;
  std::optional<std::uint64_t> cur_label_;
};

}  // namespace amcsim
