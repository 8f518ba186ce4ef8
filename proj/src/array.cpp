#include "amcsim/array.hpp"

#include <cmath>
#include <numbers>

#include "amcsim/error.hpp"

namespace amcsim {

Plane plane_for(OpKind op) {
  switch (op) {
    case OpKind::DramRead:
    case OpKind::DramWrite:
    case OpKind::TritRead:
    case OpKind::TritWrite:
    case OpKind::Refresh:
      return Plane::Dynamic;
    default:
      return Plane::Static;
  }
}

std::string format_address(const Address& addr) {
  return std::to_string(addr.subarray) + ":" + std::to_string(addr.row) + ":" +
         std::to_string(addr.col);
}

Capacity effective_capacity(Technology tech, CellMode mode, std::uint32_t rows,
                            std::uint32_t cols) {
  Capacity c;
  c.cells = static_cast<std::uint64_t>(rows) * cols;
  if (mode == CellMode::PowerGated) {
    // no storage
  } else if (mode == CellMode::Augmented && tech == Technology::Aug8T) {
    c.bits = 2 * c.cells;
  } else if (mode == CellMode::Augmented && tech == Technology::Aug7T) {
    c.trits = c.cells;
  } else {
    c.bits = c.cells;
  }
  c.bit_equivalent = static_cast<double>(c.bits) +
                     static_cast<double>(c.trits) * std::log2(3.0);
  // A 6T cell holds one bit; two are needed per trit.
  c.conventional_6t_cells = c.bits + 2 * c.trits;
  return c;
}

SubArray::SubArray(std::uint32_t id, Technology tech, CellMode mode, std::uint32_t rows,
                   std::uint32_t cols, RetentionSetup retention)
    : id_(id), tech_(tech), mode_(mode), rows_(rows), cols_(cols), setup_(retention) {
  if (!is_legal(tech, mode)) {
    throw Error(ErrorCode::IllegalMode, std::string(to_string(tech)) + " cannot enter " +
                                            std::string(to_string(mode)));
  }
  if (rows == 0 || cols == 0) throw Error(ErrorCode::ZeroDimension, "rows and cols must be >= 1");
  if (tech != Technology::Std6T && !(setup_.nominal_ns > 0.0)) {
    throw Error(ErrorCode::ConfigError, "augmented sub-array needs a positive retention");
  }
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  cells_.assign(n, new_cell(tech, mode));
  retention_.resize(n);
  refreshes_.assign(n, 0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      retention_[index(r, c)] =
          sample_cell_retention(setup_.nominal_ns, cell_key(id, r, c), setup_.seed, setup_.sigma);
    }
  }
}

const CellState& SubArray::cell(std::uint32_t row, std::uint32_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw Error(ErrorCode::AddressOutOfRange, "cell outside sub-array");
  }
  return cells_[index(row, col)];
}

double SubArray::cell_retention(std::uint32_t row, std::uint32_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw Error(ErrorCode::AddressOutOfRange, "cell outside sub-array");
  }
  return retention_[index(row, col)];
}

bool SubArray::contains(const Address& addr) const {
  return addr.subarray == id_ && addr.row < rows_ && addr.col < cols_;
}

std::vector<AddressedEvent> SubArray::set_mode(CellMode new_mode, TimeNs now) {
  if (!is_legal(tech_, new_mode)) {
    throw Error(ErrorCode::IllegalMode, std::string(to_string(tech_)) + " cannot enter " +
                                            std::string(to_string(new_mode)));
  }
  std::vector<AddressedEvent> events;
  if (new_mode == mode_) return events;
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (std::uint32_t c = 0; c < cols_; ++c) {
      auto& cell = cells_[index(r, c)];
      auto t = set_cell_mode(std::move(cell), new_mode, now);
      cell = std::move(t.cell);
      for (const auto& e : t.events) events.push_back({e, Address{id_, r, c, Plane::Static}});
    }
  }
  mode_ = new_mode;
  return events;
}

AccessResult SubArray::access(const Address& addr, const CellOp& op, TimeNs now,
                              const ModelParams& models, AccessOptions options) {
  if (!contains(addr)) {
    throw Error(ErrorCode::AddressOutOfRange, format_address(addr));
  }
  const std::size_t i = index(addr.row, addr.col);
  CellState cell = cells_[i];
  Address tagged = addr;
  tagged.plane = plane_for(op.kind);

  AccessResult result;
  CellEvents events;
  auto require = [](const auto& opt, const char* what) {
    if (!opt) throw Error(ErrorCode::ConfigError, std::string("missing payload: ") + what);
    return *opt;
  };

  switch (op.kind) {
    case OpKind::SramWrite: {
      auto t = write_sram_bit(std::move(cell), require(op.bit, "bit"), now);
      cell = std::move(t.cell);
      events = std::move(t.events);
      break;
    }
    case OpKind::SramRead: {
      auto r = read_sram_bit(std::move(cell), now);
      result.bit = r.value;
      cell = std::move(r.cell);
      events = std::move(r.events);
      break;
    }
    case OpKind::SramReadPulsed: {
      auto r = read_sram_pulsed(std::move(cell), now, options.pulsed_override);
      result.bit = r.value;
      cell = std::move(r.cell);
      events = std::move(r.events);
      break;
    }
    case OpKind::DramWrite:
      cell = write_dram_bit(std::move(cell), require(op.bit, "bit"), now, window(i));
      break;
    case OpKind::DramRead: {
      auto r = read_dram_bit(std::move(cell), now, options.silent_decay);
      result.bit = r.value;
      cell = std::move(r.cell);
      events = std::move(r.events);
      break;
    }
    case OpKind::TritWrite: {
      const Trit t = require(op.trit, "trit");
      cell = write_trit(std::move(cell), t, now, window(i));
      result.pattern = pattern_of(t);
      break;
    }
    case OpKind::TritRead: {
      auto r = read_trit(std::move(cell), now, options.silent_decay);
      result.trit = r.value;
      result.pattern = pattern_of(r.value);
      cell = std::move(r.cell);
      events = std::move(r.events);
      break;
    }
    case OpKind::Refresh: {
      double ret = retention_[i];
      if (setup_.resample_on_refresh && setup_.sigma > 0.0) {
        const std::uint64_t key =
            cell_key(id_, addr.row, addr.col) + 0x9e3779b97f4a7c15ULL * (refreshes_[i] + 1ULL);
        ret = sample_cell_retention(setup_.nominal_ns, key, setup_.seed, setup_.sigma);
      }
      cell = refresh_dram_bit(std::move(cell), now, {ret, setup_.zero_factor});
      retention_[i] = ret;
      ++refreshes_[i];
      if (const auto* t = std::get_if<Trit>(&cell.dynamic->payload)) {
        result.pattern = pattern_of(*t);
      }
      break;
    }
  }

  result.energy_fJ = models.op_energy(tech_, mode_, op.kind);
  result.delay_ns = models.op_delay(tech_, mode_, op.kind, result.pattern);
  cells_[i] = std::move(cell);
  result.events.reserve(events.size());
  for (const auto& e : events) result.events.push_back({e, tagged});
  return result;
}

void SubArray::write_snapshot(std::ostream& out, TimeNs now) const {
  out << "subarray " << id_ << " tech=" << to_string(tech_) << " mode=" << to_string(mode_)
      << " rows=" << rows_ << " cols=" << cols_ << " at=" << now << "\n";
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (std::uint32_t c = 0; c < cols_; ++c) {
      const auto& cell = cells_[index(r, c)];
      char s = '.';
      if (cell.static_bit) s = *cell.static_bit ? '1' : '0';
      char d = '.';
      if (cell.dynamic) {
        if (!cell.dynamic->valid_at(now)) {
          d = 'x';
        } else if (const auto* b = std::get_if<bool>(&cell.dynamic->payload)) {
          d = *b ? '1' : '0';
        } else {
          const Trit t = std::get<Trit>(cell.dynamic->payload);
          d = t == Trit::MinusOne ? '-' : (t == Trit::PlusOne ? '+' : '0');
        }
      }
      if (c) out << ' ';
      out << s << d;
    }
    out << "\n";
  }
}

}  // namespace amcsim
