#include "amcsim/controller.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "amcsim/error.hpp"

namespace amcsim {

std::string_view to_string(FiloPolicy p) {
  switch (p) {
    case FiloPolicy::Enforce: return "enforce";
    case FiloPolicy::Warn: return "warn";
    case FiloPolicy::Off: return "off";
  }
  return "?";
}

std::optional<FiloPolicy> parse_filo_policy(std::string_view s) {
  if (s == "enforce") return FiloPolicy::Enforce;
  if (s == "warn") return FiloPolicy::Warn;
  if (s == "off") return FiloPolicy::Off;
  return std::nullopt;
}

void validate(const Policies& p) {
  if (!(p.refresh.margin > 0.0 && p.refresh.margin < 1.0)) {
    throw Error(ErrorCode::ConfigError, "refresh margin must lie in (0, 1)");
  }
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Op: return "OP";
    case EventKind::DramDestroyed: return "DRAM_DESTROYED";
    case EventKind::SilentDecay: return "SILENT_DECAY";
    case EventKind::ExpiredRead: return "EXPIRED_READ";
    case EventKind::ModeFlush: return "MODE_FLUSH";
    case EventKind::PulsedCopy: return "PULSED_COPY";
    case EventKind::FiloViolation: return "FILO_VIOLATION";
    case EventKind::CommandFailed: return "COMMAND_FAILED";
  }
  return "?";
}

bool event_order(const TraceEvent& a, const TraceEvent& b) {
  return std::tie(a.at, a.phase, a.order_key, a.seq) < std::tie(b.at, b.phase, b.order_key, b.seq);
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

void append_event(std::string& line, const TraceEvent& e) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e.at);
  line.append(buf, p);
  line += ' ';
  line += to_string(e.kind);
  line += ' ';
  switch (e.scope) {
    case AddrScope::None: line += '-'; break;
    case AddrScope::SubArray: append_uint(line, e.addr.subarray); break;
    case AddrScope::Cell:
      append_uint(line, e.addr.subarray);
      line += ':';
      append_uint(line, e.addr.row);
      line += ':';
      append_uint(line, e.addr.col);
      break;
  }
  if (e.command) {
    line += " cmd=";
    append_uint(line, *e.command);
  } else {
    line += " cmd=refresh";
  }
  if (e.op) {
    line += " op=";
    line += to_string(*e.op);
  }
  if (e.kind == EventKind::Op) {
    line += " e=";
    append_double(line, e.energy_fJ);
    line += " d=";
    append_double(line, e.delay_ns);
  }
  if (e.kind == EventKind::FiloViolation) line += e.executed ? " action=executed" : " action=rejected";
  if (e.error) {
    line += " error=";
    line += to_string(*e.error);
  }
  if (e.label) {
    line += " lop=";
    append_uint(line, *e.label);
  }
}

}  // namespace

std::string format_event(const TraceEvent& e) {
  std::string line;
  append_event(line, e);
  return line;
}

void write_event_log(std::ostream& out, const std::vector<TraceEvent>& events) {
  std::string buf;
  buf.reserve(1 << 16);
  for (const auto& e : events) {
    append_event(buf, e);
    buf += '\n';
    if (buf.size() > (1 << 16) - 256) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

bool check_filo(const SubArray& sa, const Command& cmd, bool pulsed_override) {
  if (sa.tech() != Technology::Aug8T || sa.mode() != CellMode::Augmented) return false;
  if (!sa.contains(cmd.addr)) return false;
  const auto& cell = sa.cell(cmd.addr.row, cmd.addr.col);
  const bool live = cell.has_valid_dynamic(cmd.at);
  switch (cmd.kind) {
    case CommandKind::WriteSram:
      return live;
    case CommandKind::ReadSram:
      return live && cell.static_bit.has_value();
    case CommandKind::ReadSramPulsed:
      return live && cell.static_bit.has_value() && !pulsed_override;
    default:
      return false;
  }
}

Controller::Controller(std::vector<SubArray> arrays, const ModelParams& models,
                       Policies policies, TimeNs start)
    : arrays_(std::move(arrays)),
      models_(models),
      policies_(policies),
      epoch_start_(start),
      now_(start) {
  validate(policies_);
  std::sort(arrays_.begin(), arrays_.end(),
            [](const SubArray& a, const SubArray& b) { return a.id() < b.id(); });
  for (std::size_t i = 0; i < arrays_.size(); ++i) {
    const auto& sa = arrays_[i];
    if (!index_.emplace(sa.id(), i).second) {
      throw Error(ErrorCode::ConfigError, "duplicate sub-array id " + std::to_string(sa.id()));
    }
    if (sa.rows() >= (1u << 20) || sa.cols() >= (1u << 20)) {
      throw Error(ErrorCode::ConfigError, "sub-array dimension too large");
    }
    deadline_of_.emplace_back(sa.cell_count(), TimeNs{-1});
  }
  mode_since_.assign(arrays_.size(), start);
  report_.start_ns = start;
  report_.model_checksum = models_.checksum;
}

const SubArray& Controller::subarray(std::uint32_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::AddressOutOfRange, "no sub-array " + std::to_string(id));
  return arrays_[it->second];
}

SubArray* Controller::find(std::uint32_t id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &arrays_[it->second];
}

double Controller::scheduling_retention(const SubArray& sa, std::uint32_t row,
                                        std::uint32_t col) const {
  return policies_.refresh.controller_knows_variation ? sa.cell_retention(row, col)
                                                      : sa.nominal_retention();
}

TimeNs Controller::refresh_offset(double retention) const {
  auto off = static_cast<TimeNs>(std::ceil(policies_.refresh.margin * retention));
  // Must land strictly inside the retention window.
  if (static_cast<double>(off) >= retention) off = static_cast<TimeNs>(std::ceil(retention)) - 1;
  return std::max<TimeNs>(off, 1);
}

void Controller::update_deadline(const SubArray& sa, std::uint32_t row, std::uint32_t col,
                                 TimeNs now) {
  if (!policies_.refresh.enabled) return;
  const std::size_t ai = index_.at(sa.id());
  auto& slot = deadline_of_[ai][static_cast<std::size_t>(row) * sa.cols() + col];
  if (slot >= 0) deadlines_.erase({slot, sa.id(), row, col});
  slot = -1;
  const auto& cell = sa.cell(row, col);
  if (!cell.has_valid_dynamic(now)) return;
  slot = cell.dynamic->written_at + refresh_offset(scheduling_retention(sa, row, col));
  deadlines_.insert({slot, sa.id(), row, col});
}

void Controller::clear_deadlines(const SubArray& sa) {
  auto& slots = deadline_of_[index_.at(sa.id())];
  for (std::uint32_t r = 0; r < sa.rows(); ++r) {
    for (std::uint32_t c = 0; c < sa.cols(); ++c) {
      auto& slot = slots[static_cast<std::size_t>(r) * sa.cols() + c];
      if (slot >= 0) deadlines_.erase({slot, sa.id(), r, c});
      slot = -1;
    }
  }
}

void Controller::close_hold(SubArray& sa, TimeNs t) {
  auto& since = mode_since_[index_.at(sa.id())];
  if (t > since) {
    auto& tally = report_.hold[{sa.tech(), sa.mode()}];
    tally.power_uW = models_.energy.hold_power(sa.tech(), sa.mode());
    tally.cell_ns += sa.cell_count() * static_cast<std::uint64_t>(t - since);
  }
  since = std::max(since, t);
}

void Controller::emit(TraceEvent e) {
  e.phase = cur_phase_;
  e.order_key = cur_key_;
  e.seq = cur_seq_++;
  e.command = cur_command_;
  e.label = cur_label_;
  events_.push_back(e);
}

void Controller::record_op(const SubArray& sa, OpKind op, const AccessResult& r) {
  auto& tally = report_.ops[{sa.id(), sa.tech(), sa.mode(), op}];
  ++tally.count;
  tally.unit_fJ = r.energy_fJ;
  ++report_.latency_histogram[r.delay_ns];
}

void Controller::record_cell_events(const std::vector<AddressedEvent>& events) {
  for (const auto& ae : events) {
    TraceEvent e;
    e.at = ae.event.at;
    e.addr = ae.addr;
    switch (ae.event.kind) {
      case CellEventKind::DramDestroyedBySramAccess:
        e.kind = EventKind::DramDestroyed;
        ++report_.counters.dram_destroyed;
        break;
      case CellEventKind::SilentDecayAlias:
        e.kind = EventKind::SilentDecay;
        ++report_.counters.silent_decays;
        ++report_.counters.retention_violations;
        break;
      case CellEventKind::ExpiredRead:
        e.kind = EventKind::ExpiredRead;
        ++report_.counters.retention_violations;
        break;
      case CellEventKind::ModeFlush:
        e.kind = EventKind::ModeFlush;
        ++report_.counters.mode_flushes;
        break;
      case CellEventKind::PulsedCopyOverwrite:
        e.kind = EventKind::PulsedCopy;
        ++report_.counters.pulsed_copies;
        break;
    }
    emit(e);
  }
}

void Controller::execute_refresh(const Deadline& d) {
  const auto& [at, id, row, col] = d;
  SubArray& sa = *find(id);
  cur_phase_ = 0;
  cur_key_ = cell_key(id, row, col);
  cur_seq_ = 0;
  cur_command_.reset();
  cur_label_.reset();

  const Address addr{id, row, col, Plane::Dynamic};
  try {
    auto r = sa.access(addr, CellOp{OpKind::Refresh, std::nullopt, std::nullopt}, at, models_,
                       {policies_.silent_decay, policies_.pulsed_override});
    ++report_.counters.refreshes;
    record_op(sa, OpKind::Refresh, r);
    TraceEvent e;
    e.at = at;
    e.addr = addr;
    e.op = OpKind::Refresh;
    e.energy_fJ = r.energy_fJ;
    e.delay_ns = r.delay_ns;
    emit(e);
    record_cell_events(r.events);
  } catch (const Error& err) {
    if (policies_.strict) throw;
    TraceEvent e;
    e.at = at;
    e.addr = addr;
    e.op = OpKind::Refresh;
    e.error = err.code();
    if (err.code() == ErrorCode::ExpiredRead) {
      e.kind = EventKind::ExpiredRead;
      ++report_.counters.retention_violations;
    } else {
      e.kind = EventKind::CommandFailed;
      ++report_.counters.failed;
    }
    emit(e);
  }
  update_deadline(sa, row, col, at);
}

void Controller::advance(TimeNs now) {
  if (now < now_) throw Error(ErrorCode::OutOfOrder, "time regression to " + std::to_string(now));
  while (!deadlines_.empty() && std::get<0>(*deadlines_.begin()) <= now) {
    const Deadline d = *deadlines_.begin();
    execute_refresh(d);
  }
  now_ = now;
}

std::vector<Command> Controller::schedule_refresh(TimeNs now) const {
  std::vector<Command> out;
  if (!policies_.refresh.enabled) return out;
  for (const auto& sa : arrays_) {
    if (sa.mode() != CellMode::Augmented || sa.tech() == Technology::Std6T) continue;
    for (std::uint32_t r = 0; r < sa.rows(); ++r) {
      for (std::uint32_t c = 0; c < sa.cols(); ++c) {
        const auto& cell = sa.cell(r, c);
        if (!cell.has_valid_dynamic(now)) continue;
        const auto age = now - cell.dynamic->written_at;
        if (age >= refresh_offset(scheduling_retention(sa, r, c))) {
          out.push_back(make_command(now, CommandKind::Refresh, Address{sa.id(), r, c}));
        }
      }
    }
  }
  return out;
}

SubmitResult Controller::submit(const Command& cmd, std::uint64_t index) {
  validate(cmd);
  if (cmd.at < now_) {
    throw Error(ErrorCode::OutOfOrder, "command " + std::to_string(index) + " at " +
                                           std::to_string(cmd.at) + " precedes " +
                                           std::to_string(now_));
  }
  advance(cmd.at);

  cur_phase_ = 1;
  cur_key_ = index;
  cur_seq_ = 0;
  cur_command_ = index;
  cur_label_ = cmd.label;
  ++report_.counters.commands;

  SubmitResult result;
  if (cmd.kind == CommandKind::Idle) {
    ++report_.counters.executed;
    return result;
  }

  auto fail = [&](const Error& err, AddrScope scope) {
    if (policies_.strict) throw err;
    TraceEvent e;
    e.at = cmd.at;
    e.scope = scope;
    e.addr = cmd.addr;
    e.op = op_kind(cmd.kind);
    e.error = err.code();
    if (err.code() == ErrorCode::ExpiredRead) {
      e.kind = EventKind::ExpiredRead;
      ++report_.counters.retention_violations;
    } else {
      e.kind = EventKind::CommandFailed;
      ++report_.counters.failed;
    }
    emit(e);
    result.outcome = Outcome::Failed;
    result.error = err.code();
    return result;
  };

  SubArray* sa = find(cmd.addr.subarray);
  if (!sa) {
    return fail(Error(ErrorCode::AddressOutOfRange, "no sub-array " + std::to_string(cmd.addr.subarray)),
                AddrScope::SubArray);
  }

  if (cmd.kind == CommandKind::SetMode) {
    try {
      close_hold(*sa, cmd.at);
      auto events = sa->set_mode(*cmd.mode, cmd.at);
      clear_deadlines(*sa);
      record_cell_events(events);
    } catch (const Error& err) {
      return fail(err, AddrScope::SubArray);
    }
    ++report_.counters.executed;
    result.outcome = Outcome::Executed;
    return result;
  }

  bool override_pulsed = policies_.pulsed_override;
  if (policies_.filo != FiloPolicy::Off && check_filo(*sa, cmd, policies_.pulsed_override)) {
    ++report_.counters.filo_violations;
    TraceEvent e;
    e.at = cmd.at;
    e.kind = EventKind::FiloViolation;
    e.addr = cmd.addr;
    e.op = op_kind(cmd.kind);
    e.executed = policies_.filo == FiloPolicy::Warn;
    emit(e);
    if (policies_.filo == FiloPolicy::Enforce) {
      ++report_.counters.rejected;
      result.outcome = Outcome::Rejected;
      return result;
    }
    // Warn: the hardware performs the access and the dynamic bit is lost.
    override_pulsed = true;
  }

  const OpKind op = *op_kind(cmd.kind);
  AccessResult r;
  try {
    r = sa->access(cmd.addr, CellOp{op, cmd.bit, cmd.trit}, cmd.at, models_,
                   {policies_.silent_decay, override_pulsed});
  } catch (const Error& err) {
    return fail(err, AddrScope::Cell);
  }

  ++report_.counters.executed;
  if (op == OpKind::Refresh) ++report_.counters.refreshes;
  record_op(*sa, op, r);
  TraceEvent e;
  e.at = cmd.at;
  e.addr = cmd.addr;
  e.addr.plane = plane_for(op);
  e.op = op;
  e.energy_fJ = r.energy_fJ;
  e.delay_ns = r.delay_ns;
  emit(e);
  record_cell_events(r.events);
  update_deadline(*sa, cmd.addr.row, cmd.addr.col, cmd.at);

  result.outcome = Outcome::Executed;
  result.bit = r.bit;
  result.trit = r.trit;
  return result;
}

SimReport Controller::take_report(TimeNs until) {
  advance(until);
  for (auto& sa : arrays_) close_hold(sa, until);

  SimReport out = std::move(report_);
  out.horizon_ns = until;
  out.capacity.clear();
  for (const auto& sa : arrays_) {
    out.capacity.push_back({sa.id(), sa.tech(), sa.mode(), sa.rows(), sa.cols(), sa.capacity()});
  }

  report_ = SimReport{};
  report_.start_ns = until;
  report_.model_checksum = models_.checksum;
  report_.config = out.config;
  epoch_start_ = until;
  return out;
}

std::vector<TraceEvent> Controller::take_events() {
  std::vector<TraceEvent> out;
  out.swap(events_);
  return out;
}

}  // namespace amcsim
