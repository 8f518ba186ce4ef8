#include <gtest/gtest.h>

#include <random>

#include "amcsim/cell.hpp"
#include "amcsim/error.hpp"

namespace amcsim {
namespace {

constexpr RetentionWindow k8T85{25000.0, 4.0};  // 85 C, -100 mV
constexpr RetentionWindow k7T85{4000.0, 4.0};

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ConfigError;
}

CellState aug8t_with(std::optional<bool> s, std::optional<bool> d, TimeNs at = 0) {
  CellState c = new_cell(Technology::Aug8T, CellMode::Augmented);
  if (s) c = write_sram_bit(c, *s, at).cell;
  if (d) c = write_dram_bit(c, *d, at, k8T85);
  return c;
}

TEST(NewCell, EmptyDualCapable) {
  const CellState c = new_cell(Technology::Aug8T, CellMode::Augmented);
  EXPECT_FALSE(c.static_bit);
  EXPECT_FALSE(c.dynamic);
  EXPECT_TRUE(c.satisfies_invariants());
}

TEST(NewCell, IllegalCombinations) {
  EXPECT_EQ(error_of([] { new_cell(Technology::Std6T, CellMode::Augmented); }),
            ErrorCode::IllegalMode);
  EXPECT_EQ(error_of([] { new_cell(Technology::Aug8T, CellMode::PowerGated); }),
            ErrorCode::IllegalMode);
  EXPECT_NO_THROW(new_cell(Technology::Aug7T, CellMode::PowerGated));
}

TEST(WriteSram, DestroysLiveDram) {
  auto t = write_sram_bit(aug8t_with(std::nullopt, true), false, 10);
  EXPECT_EQ(t.cell.static_bit, false);
  EXPECT_FALSE(t.cell.dynamic);
  ASSERT_EQ(t.events.size(), 1u);
  EXPECT_EQ(t.events[0].kind, CellEventKind::DramDestroyedBySramAccess);
}

TEST(WriteSram, Plain6T) {
  auto t = write_sram_bit(new_cell(Technology::Std6T, CellMode::Normal), true, 0);
  EXPECT_EQ(t.cell.static_bit, true);
  EXPECT_TRUE(t.events.empty());
}

TEST(WriteSram, SevenTAugmentedHasNoStaticPath) {
  const auto c = new_cell(Technology::Aug7T, CellMode::Augmented);
  EXPECT_EQ(error_of([&] { write_sram_bit(c, true, 0); }), ErrorCode::WrongMode);
}

TEST(ReadSram, DestroysDram) {
  auto r = read_sram_bit(aug8t_with(true, false), 5);
  EXPECT_TRUE(r.value);
  EXPECT_FALSE(r.cell.dynamic);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].kind, CellEventKind::DramDestroyedBySramAccess);
}

TEST(ReadSram, SixTNoEvents) {
  auto c = write_sram_bit(new_cell(Technology::Std6T, CellMode::Normal), false, 0).cell;
  auto r = read_sram_bit(c, 1);
  EXPECT_FALSE(r.value);
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.cell, c);
}

TEST(ReadSram, EmptyCell) {
  const auto c = new_cell(Technology::Aug8T, CellMode::Normal);
  EXPECT_EQ(error_of([&] { read_sram_bit(c, 0); }), ErrorCode::EmptyCell);
}

TEST(ReadSram, ExpiredDramIsNotReportedDestroyed) {
  auto r = read_sram_bit(aug8t_with(true, true), 30000);
  EXPECT_TRUE(r.events.empty());
  EXPECT_FALSE(r.cell.dynamic);
}

TEST(ReadSramPulsed, NormalModeCopiesOntoVz) {
  auto c = write_sram_bit(new_cell(Technology::Aug8T, CellMode::Normal), true, 0).cell;
  auto r = read_sram_pulsed(c, 3);
  EXPECT_TRUE(r.value);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].kind, CellEventKind::PulsedCopyOverwrite);
  EXPECT_EQ(r.cell, c);
}

TEST(ReadSramPulsed, ProtectedWithoutOverride) {
  const auto c = aug8t_with(true, false);
  EXPECT_EQ(error_of([&] { read_sram_pulsed(c, 1); }), ErrorCode::WrongMode);
}

TEST(ReadSramPulsed, OverrideDestroys) {
  auto r = read_sram_pulsed(aug8t_with(false, true), 1, true);
  EXPECT_FALSE(r.value);
  EXPECT_FALSE(r.cell.dynamic);
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_EQ(r.events[0].kind, CellEventKind::DramDestroyedBySramAccess);
  EXPECT_EQ(r.events[1].kind, CellEventKind::PulsedCopyOverwrite);
}

// Enumerates every 8T pre-state and checks read_sram_pulsed against an
// independently written transition table.
TEST(ReadSramPulsed, StateMachineOracle) {
  enum class Dyn { None, Valid0, Valid1, Expired };
  const TimeNs now = 20000;
  int checked = 0;
  for (auto mode : {CellMode::Normal, CellMode::Augmented}) {
    for (std::optional<bool> s : {std::optional<bool>{}, std::optional<bool>{false},
                                  std::optional<bool>{true}}) {
      for (auto dyn : {Dyn::None, Dyn::Valid0, Dyn::Valid1, Dyn::Expired}) {
        if (mode == CellMode::Normal && dyn != Dyn::None) continue;
        for (bool ovr : {false, true}) {
          CellState c{Technology::Aug8T, mode, s, std::nullopt};
          if (dyn != Dyn::None) {
            const TimeNs w = dyn == Dyn::Expired ? 0 : now - 100;
            c.dynamic = DynamicDatum{dyn == Dyn::Valid1, w, 10000.0};
          }
          const bool live = dyn == Dyn::Valid0 || dyn == Dyn::Valid1;

          std::optional<ErrorCode> want_err;
          if (mode == CellMode::Augmented && !ovr) want_err = ErrorCode::WrongMode;
          else if (!s) want_err = ErrorCode::EmptyCell;

          if (want_err) {
            EXPECT_EQ(error_of([&] { read_sram_pulsed(c, now, ovr); }), *want_err);
          } else {
            auto r = read_sram_pulsed(c, now, ovr);
            EXPECT_EQ(r.value, *s);
            EXPECT_EQ(r.cell.static_bit, s);
            EXPECT_FALSE(r.cell.dynamic);
            CellEvents want;
            if (live) want.push_back({CellEventKind::DramDestroyedBySramAccess, now});
            want.push_back({CellEventKind::PulsedCopyOverwrite, now});
            EXPECT_EQ(r.events, want);
            EXPECT_TRUE(r.cell.satisfies_invariants());
          }
          ++checked;
        }
      }
    }
  }
  EXPECT_EQ(checked, 6 + 24);
}

TEST(WriteDram, CoexistsWithStatic) {
  const auto c = aug8t_with(true, false);
  EXPECT_EQ(c.static_bit, true);
  ASSERT_TRUE(c.dynamic);
  EXPECT_EQ(std::get<bool>(c.dynamic->payload), false);
}

TEST(WriteDram, NormalModeRefused) {
  const auto c = new_cell(Technology::Aug8T, CellMode::Normal);
  EXPECT_EQ(error_of([&] { write_dram_bit(c, true, 0, k8T85); }), ErrorCode::WrongMode);
}

TEST(ReadDram, RoundTripAndNonDestructive) {
  for (bool b : {false, true}) {
    auto c = aug8t_with(std::nullopt, b, 7);
    auto r1 = read_dram_bit(c, 7);
    auto r2 = read_dram_bit(r1.cell, 7);
    EXPECT_EQ(r1.value, b);
    EXPECT_EQ(r2.value, b);
    EXPECT_EQ(r2.cell, c);
    EXPECT_TRUE(r2.events.empty());
  }
}

TEST(ReadDram, RetentionWindow) {
  const auto c = aug8t_with(std::nullopt, true, 0);
  EXPECT_TRUE(read_dram_bit(c, 24000).value);
  EXPECT_TRUE(read_dram_bit(c, 24999).value);
  EXPECT_EQ(error_of([&] { read_dram_bit(c, 25000); }), ErrorCode::ExpiredRead);
  EXPECT_EQ(error_of([&] { read_dram_bit(c, 26000); }), ErrorCode::ExpiredRead);
}

TEST(ReadDram, SilentDecayReadsZero) {
  auto r = read_dram_bit(aug8t_with(std::nullopt, true, 0), 26000, true);
  EXPECT_FALSE(r.value);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].kind, CellEventKind::SilentDecayAlias);
}

TEST(ReadDram, Empty) {
  const auto c = aug8t_with(true, std::nullopt);
  EXPECT_EQ(error_of([&] { read_dram_bit(c, 0); }), ErrorCode::EmptyCell);
}

TEST(Refresh, RestartsWindow) {
  auto c = refresh_dram_bit(aug8t_with(std::nullopt, true, 0), 20000, k8T85);
  EXPECT_EQ(c.dynamic->written_at, 20000);
  EXPECT_TRUE(read_dram_bit(c, 44999).value);
  EXPECT_EQ(error_of([&] { read_dram_bit(c, 45000); }), ErrorCode::ExpiredRead);
}

TEST(Refresh, TooLate) {
  const auto c = aug8t_with(std::nullopt, true, 0);
  EXPECT_EQ(error_of([&] { refresh_dram_bit(c, 27500, k8T85); }), ErrorCode::ExpiredRead);
}

// Replays a refresh every 20 us and checks at each step that the datum the
// previous step left behind is still valid.
TEST(Refresh, ChainSustainsData) {
  auto c = aug8t_with(std::nullopt, false, 0);
  TimeNs last = 0;
  for (TimeNs t = 20000; t <= 20000 * 500; t += 20000) {
    ASSERT_LT(t - last, 25000);
    ASSERT_TRUE(c.has_valid_dynamic(t));
    c = refresh_dram_bit(c, t, k8T85);
    last = t;
  }
  EXPECT_FALSE(read_dram_bit(c, last + 24999).value);
}

TEST(Trit, NodeEncoding) {
  EXPECT_EQ(encode(Trit::PlusOne), (NodePair{false, true}));
  EXPECT_EQ(encode(Trit::MinusOne), (NodePair{true, false}));
  EXPECT_EQ(encode(Trit::Zero), (NodePair{false, false}));
  EXPECT_FALSE(decode({true, true}));
  for (auto t : {Trit::MinusOne, Trit::Zero, Trit::PlusOne}) EXPECT_EQ(decode(encode(t)), t);
}

TEST(Trit, RoundTrip) {
  for (auto t : {Trit::MinusOne, Trit::Zero, Trit::PlusOne}) {
    auto c = write_trit(new_cell(Technology::Aug7T, CellMode::Augmented), t, 100, k7T85);
    EXPECT_EQ(read_trit(c, 100).value, t);
    EXPECT_EQ(read_trit(c, 3999 + 100).value, t);
  }
}

TEST(Trit, WriteBackRestartsWindow) {
  auto c = write_trit(new_cell(Technology::Aug7T, CellMode::Augmented), Trit::MinusOne, 0, k7T85);
  auto r = read_trit(c, 3000);
  EXPECT_EQ(r.cell.dynamic->written_at, 3000);
  EXPECT_EQ(read_trit(r.cell, 6500).value, Trit::MinusOne);
}

TEST(Trit, SilentDecayAliasesToZero) {
  for (auto t : {Trit::MinusOne, Trit::PlusOne}) {
    auto c = write_trit(new_cell(Technology::Aug7T, CellMode::Augmented), t, 0, k7T85);
    auto r = read_trit(c, 4000, true);
    EXPECT_EQ(r.value, Trit::Zero);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].kind, CellEventKind::SilentDecayAlias);
    EXPECT_EQ(error_of([&] { read_trit(c, 4000); }), ErrorCode::ExpiredRead);
  }
}

TEST(Trit, ZeroOutlivesNonZero) {
  auto c = write_trit(new_cell(Technology::Aug7T, CellMode::Augmented), Trit::Zero, 0, k7T85);
  EXPECT_EQ(c.dynamic->retention_ns, 16000.0);
  EXPECT_EQ(read_trit(c, 15999).value, Trit::Zero);
}

TEST(Trit, WrongMode) {
  const auto c = new_cell(Technology::Aug7T, CellMode::Normal);
  EXPECT_EQ(error_of([&] { write_trit(c, Trit::Zero, 0, k7T85); }), ErrorCode::WrongMode);
  const auto e = new_cell(Technology::Aug8T, CellMode::Augmented);
  EXPECT_EQ(error_of([&] { read_trit(e, 0); }), ErrorCode::WrongMode);
}

TEST(SetMode, EightTFlushesDramKeepsStatic) {
  auto t = set_cell_mode(aug8t_with(true, false, 0), CellMode::Normal, 10);
  EXPECT_EQ(t.cell.static_bit, true);
  EXPECT_FALSE(t.cell.dynamic);
  ASSERT_EQ(t.events.size(), 1u);
  EXPECT_EQ(t.events[0].kind, CellEventKind::ModeFlush);
  EXPECT_TRUE(t.cell.satisfies_invariants());
}

TEST(SetMode, SevenTLosesStatic) {
  auto c = write_sram_bit(new_cell(Technology::Aug7T, CellMode::Normal), true, 0).cell;
  auto t = set_cell_mode(c, CellMode::Augmented, 5);
  EXPECT_FALSE(t.cell.static_bit);
  EXPECT_EQ(t.events.size(), 1u);
  EXPECT_TRUE(t.cell.satisfies_invariants());
}

TEST(SetMode, NoOp) {
  const auto c = aug8t_with(true, true);
  auto t = set_cell_mode(c, CellMode::Augmented, 1);
  EXPECT_EQ(t.cell, c);
  EXPECT_TRUE(t.events.empty());
}

TEST(Invariants, Predicate) {
  CellState c{Technology::Aug8T, CellMode::Normal, true, DynamicDatum{true, 0, 10.0}};
  EXPECT_FALSE(c.satisfies_invariants());
  CellState d{Technology::Aug7T, CellMode::Augmented, true, std::nullopt};
  EXPECT_FALSE(d.satisfies_invariants());
  CellState e{Technology::Aug8T, CellMode::Augmented, true, DynamicDatum{Trit::Zero, 0, 10.0}};
  EXPECT_FALSE(e.satisfies_invariants());
}

// Random operation sequences: every successful transition must satisfy the
// invariants, and a failing one must not be observable.
TEST(Invariants, RandomSequences) {
  std::mt19937_64 rng(42);
  const CellMode modes[] = {CellMode::Normal, CellMode::Augmented, CellMode::PowerGated};
  for (int run = 0; run < 200; ++run) {
    const auto tech = static_cast<Technology>(run % 3);
    CellState c = new_cell(tech, CellMode::Normal);
    TimeNs now = 0;
    for (int step = 0; step < 300; ++step) {
      now += static_cast<TimeNs>(rng() % 3000);
      const CellState before = c;
      const bool bit = rng() & 1;
      const auto trit = static_cast<Trit>(static_cast<int>(rng() % 3) - 1);
      try {
        switch (rng() % 9) {
          case 0: c = write_sram_bit(c, bit, now).cell; break;
          case 1: c = read_sram_bit(c, now).cell; break;
          case 2: c = read_sram_pulsed(c, now, rng() & 1).cell; break;
          case 3: c = write_dram_bit(c, bit, now, k8T85); break;
          case 4: c = read_dram_bit(c, now, rng() & 1).cell; break;
          case 5: c = refresh_dram_bit(c, now, tech == Technology::Aug7T ? k7T85 : k8T85); break;
          case 6: c = write_trit(c, trit, now, k7T85); break;
          case 7: c = read_trit(c, now, rng() & 1).cell; break;
          default: c = set_cell_mode(c, modes[rng() % 3], now).cell; break;
        }
      } catch (const Error&) {
        ASSERT_EQ(c, before);
      }
      ASSERT_TRUE(c.satisfies_invariants()) << "run " << run << " step " << step;
    }
  }
}

}  // namespace
}  // namespace amcsim
