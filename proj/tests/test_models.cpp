#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amcsim/error.hpp"
#include "amcsim/models.hpp"

namespace amcsim {
namespace {

const ModelParams& M() {
  static const ModelParams m = ModelParams::defaults();
  return m;
}

constexpr BiasConfig kUnder{-100, 0};
constexpr BiasConfig kNone{0, 0};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

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

TEST(Retention, Anchors) {
  const auto& r = M().retention;
  EXPECT_EQ(r.retention_time(Technology::Aug8T, 85, kUnder), 25000.0);
  EXPECT_EQ(r.retention_time(Technology::Aug8T, 25, kNone), 250000.0);
  EXPECT_EQ(r.retention_time(Technology::Aug8T, 25, kUnder), 1000000.0);
  EXPECT_EQ(r.retention_time(Technology::Aug7T, 85, kNone), 4000.0);
  EXPECT_EQ(r.retention_time(Technology::Aug7T, 25, kNone), 50000.0);
}

TEST(Retention, BoostDoesNotSelectAnchors) {
  EXPECT_EQ(M().retention.retention_time(Technology::Aug8T, 85, {-100, 200}), 25000.0);
}

// Log-linear interpolation written out independently: at the midpoint the
// result is the geometric mean of the two anchors.
TEST(Retention, MidpointIsGeometricMean) {
  const double lo = 250000.0, hi = 6250.0;  // 25 C and 85 C at 0 mV
  const double oracle = std::sqrt(lo * hi);
  EXPECT_NEAR(oracle, 39528.470752104744, 1e-9);
  EXPECT_NEAR(M().retention.retention_time(Technology::Aug8T, 55, kNone), oracle, oracle * 1e-12);
}

TEST(Retention, InterpolationClosedForm) {
  for (double t = -50; t <= 125; t += 7.5) {
    const double frac = (t - 25.0) / 60.0;
    const double oracle = 1000000.0 * std::pow(25000.0 / 1000000.0, frac);
    EXPECT_NEAR(M().retention.retention_time(Technology::Aug8T, t, kUnder), oracle, oracle * 1e-12)
        << t;
  }
}

TEST(Retention, MonotoneInTemperature) {
  double prev = INFINITY;
  for (double t = -50; t <= 125; t += 1) {
    const double r = M().retention.retention_time(Technology::Aug7T, t, kNone);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Retention, Errors) {
  const auto& r = M().retention;
  EXPECT_EQ(error_of([&] { r.retention_time(Technology::Aug7T, 60, kUnder); }),
            ErrorCode::NoAnchor);
  EXPECT_EQ(error_of([&] { r.retention_time(Technology::Aug8T, 126, kUnder); }),
            ErrorCode::OutOfRange);
  EXPECT_EQ(error_of([&] { r.retention_time(Technology::Std6T, 25, kNone); }),
            ErrorCode::NoAnchor);
}

TEST(Retention, SingleAnchorOnlyAtItsTemperature) {
  RetentionTable t;
  t.add({Technology::Aug8T, 40, -50, 123.0});
  EXPECT_EQ(t.retention_time(Technology::Aug8T, 40, {-50, 0}), 123.0);
  EXPECT_EQ(error_of([&] { t.retention_time(Technology::Aug8T, 41, {-50, 0}); }),
            ErrorCode::NoAnchor);
}

TEST(Retention, ValidateRejectsBadTables) {
  RetentionTable up;
  up.add({Technology::Aug8T, 25, 0, 10.0});
  up.add({Technology::Aug8T, 85, 0, 20.0});
  EXPECT_EQ(error_of([&] { up.validate(); }), ErrorCode::ConfigError);
  RetentionTable dup;
  dup.add({Technology::Aug8T, 25, 0, 10.0});
  dup.add({Technology::Aug8T, 25, 0, 9.0});
  EXPECT_EQ(error_of([&] { dup.validate(); }), ErrorCode::ConfigError);
}

TEST(Variation, SigmaZeroIsNominal) {
  for (std::uint64_t id = 0; id < 1000; id += 37) {
    EXPECT_EQ(sample_cell_retention(25000.0, id, 9, 0.0), 25000.0);
  }
}

TEST(Variation, Deterministic) {
  EXPECT_EQ(sample_cell_retention(25000.0, cell_key(1, 2, 3), 7, 0.2),
            sample_cell_retention(25000.0, cell_key(1, 2, 3), 7, 0.2));
  EXPECT_NE(sample_cell_retention(25000.0, cell_key(1, 2, 3), 7, 0.2),
            sample_cell_retention(25000.0, cell_key(1, 2, 3), 8, 0.2));
}

// Empirical median of 1e5 lognormal samples sits within 1% of nominal, and
// the log-samples have the configured spread.
TEST(Variation, MedianAndSpread) {
  constexpr std::size_t n = 100000;
  std::vector<double> s(n);
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = sample_cell_retention(25000.0, i, 1, 0.1);
    const double l = std::log(s[i] / 25000.0);
    sum += l;
    sum2 += l * l;
  }
  std::nth_element(s.begin(), s.begin() + n / 2, s.end());
  EXPECT_NEAR(s[n / 2], 25000.0, 250.0);
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_NEAR(sd, 0.1, 0.002);
}

TEST(Energy, TableValues) {
  EXPECT_EQ(M().op_energy(Technology::Std6T, CellMode::Normal, OpKind::SramRead), 1.83);
  EXPECT_EQ(M().op_energy(Technology::Std6T, CellMode::Normal, OpKind::SramWrite), 2.07);
  EXPECT_EQ(M().op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::DramWrite), 8.32);
  EXPECT_EQ(M().op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::DramRead), 3.37);
  EXPECT_EQ(M().op_energy(Technology::Aug7T, CellMode::Augmented, OpKind::TritWrite), 0.99);
  EXPECT_EQ(M().op_energy(Technology::Aug7T, CellMode::Augmented, OpKind::TritRead), 3.12);
  EXPECT_EQ(M().op_energy(Technology::Aug7T, CellMode::Normal, OpKind::SramRead), 3.53);
  EXPECT_EQ(M().op_energy(Technology::Aug7T, CellMode::Normal, OpKind::SramWrite), 2.02);
}

TEST(Energy, EightTStaticPlaneFallsBackTo6T) {
  EXPECT_EQ(M().op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::SramRead), 1.83);
  EXPECT_EQ(M().op_energy(Technology::Aug8T, CellMode::Normal, OpKind::SramWrite), 2.07);
}

TEST(Energy, RefreshIsReadPlusWrite) {
  EXPECT_EQ(M().op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::Refresh), 3.37 + 8.32);
  EXPECT_EQ(M().op_energy(Technology::Aug7T, CellMode::Augmented, OpKind::Refresh), 3.12 + 0.99);
}

TEST(Energy, HoldPower) {
  EXPECT_EQ(M().energy.hold_power(Technology::Std6T, CellMode::Normal), 0.448);
  EXPECT_EQ(M().energy.hold_power(Technology::Aug8T, CellMode::Augmented), 0.603);
  EXPECT_EQ(M().energy.hold_power(Technology::Aug7T, CellMode::Normal), 0.430);
  EXPECT_EQ(M().energy.hold_power(Technology::Aug7T, CellMode::Augmented), 0.59);
  EXPECT_LT(M().energy.hold_power(Technology::Aug7T, CellMode::PowerGated), 0.430);
}

TEST(Energy, MissingEntry) {
  EXPECT_EQ(error_of([] { M().op_energy(Technology::Std6T, CellMode::Normal, OpKind::DramRead); }),
            ErrorCode::MissingEntry);
  EXPECT_EQ(error_of([] { M().energy.hold_power(Technology::Std6T, CellMode::Augmented); }),
            ErrorCode::MissingEntry);
}

TEST(Delay, TableValues) {
  EXPECT_EQ(M().op_delay(Technology::Aug8T, CellMode::Augmented, OpKind::DramRead), 15.0);
  EXPECT_EQ(M().op_delay(Technology::Aug8T, CellMode::Augmented, OpKind::DramWrite), 1.0);
  EXPECT_EQ(M().op_delay(Technology::Aug7T, CellMode::Augmented, OpKind::TritRead,
                         DataPattern::Zero), 0.4);
  EXPECT_EQ(M().op_delay(Technology::Aug7T, CellMode::Augmented, OpKind::TritRead,
                         pattern_of(Trit::PlusOne)), 1.5);
  EXPECT_EQ(M().op_delay(Technology::Aug7T, CellMode::Augmented, OpKind::TritWrite,
                         pattern_of(Trit::MinusOne)), 0.5);
  EXPECT_EQ(M().op_delay(Technology::Aug7T, CellMode::Augmented, OpKind::TritWrite,
                         DataPattern::Zero), 0.4);
}

TEST(Delay, PatternMissingWithoutAnyRow) {
  EXPECT_EQ(error_of([] {
              M().op_delay(Technology::Aug7T, CellMode::Augmented, OpKind::TritRead);
            }),
            ErrorCode::MissingEntry);
}

TEST(ModelFile, BuiltinMatchesShippedFile) {
  EXPECT_EQ(read_file(AMCSIM_SOURCE_DIR "/data/default_model.toml"), default_model_text());
  EXPECT_EQ(ModelParams::load(AMCSIM_SOURCE_DIR "/data/default_model.toml").checksum,
            M().checksum);
}

TEST(ModelFile, Provenance) {
  const auto& e = M().energy.op_entries();
  EXPECT_EQ(e.at({Technology::Aug8T, CellMode::Augmented, OpKind::SramReadPulsed}).origin,
            Origin::Assumed);
  EXPECT_EQ(e.at({Technology::Aug8T, CellMode::Augmented, OpKind::DramWrite}).origin,
            Origin::Measured);
  int lower = 0;
  for (const auto& a : M().retention.anchors()) lower += a.origin == Origin::LowerBound;
  EXPECT_EQ(lower, 1);
}

TEST(ModelFile, Sha256) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(M().checksum, sha256_hex(default_model_text()));
}

TEST(ModelFile, OverrideAndBoost) {
  std::string text(default_model_text());
  text.replace(text.find("energy_fJ = 0.0"), 15, "energy_fJ = 0.5");
  const auto m = ModelParams::parse(text);
  EXPECT_EQ(m.op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::DramWrite), 8.82);
  EXPECT_EQ(m.op_energy(Technology::Aug8T, CellMode::Augmented, OpKind::DramRead), 3.37);
  EXPECT_NE(m.checksum, M().checksum);
}

TEST(ModelFile, RejectsIncompleteOrMalformed) {
  std::string text(default_model_text());
  const auto line = text.find("aug8t.augmented.dram_write");
  std::string missing = text;
  missing.erase(line, text.find('\n', line) - line);
  EXPECT_EQ(error_of([&] { ModelParams::parse(missing); }), ErrorCode::ConfigError);

  EXPECT_EQ(error_of([&] { ModelParams::parse(text + "\n[op_energy_fJ]\nstd6t.normal.teleport = 1\n"); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(error_of([&] { ModelParams::parse(text + "\n[retention]\nvariation_sigma = abc\n"); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(error_of([&] { ModelParams::load("/nonexistent/model.toml"); }),
            ErrorCode::ConfigError);
}

TEST(ModelFile, EveryReachableOpPriced) {
  for (auto tech : {Technology::Std6T, Technology::Aug8T, Technology::Aug7T}) {
    for (auto mode : {CellMode::Normal, CellMode::Augmented, CellMode::PowerGated}) {
      if (!is_legal(tech, mode)) continue;
      for (auto op : reachable_ops(tech, mode)) {
        EXPECT_GT(M().op_energy(tech, mode, op), 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace amcsim
