#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "synth.hpp"
#include "tabaudit/confound.hpp"
#include "tabaudit/error.hpp"

using namespace tabaudit;
using confound::VerdictLevel;

namespace {

ingest::DatasetFile parse(const std::vector<std::string>& rows, const std::string& name = "f.csv") {
  return ingest::parse_dataset_file(synth::to_text(rows), ingest::ParseConfig{}, name);
}

confound::Verdict verdict_for(double llm, double copy, double dup,
                              const confound::Thresholds& th = {}) {
  scoring::DatasetScore s;
  s.dataset_mean = llm;
  confound::ConfoundProfile p;
  p.copy_baseline_mean = copy;
  p.duplicate_row_fraction = dup;
  return confound::memorization_verdict(s, p, th);
}

bool has_note(const confound::Verdict& v, std::string_view needle) {
  return std::any_of(v.notes.begin(), v.notes.end(),
                     [&](const std::string& n) { return n.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Verdict, Examples) {
  auto v = verdict_for(1.0, 0.3, 0.0);
  EXPECT_EQ(v.level, VerdictLevel::kStrongEvidence);
  EXPECT_DOUBLE_EQ(v.margin, 0.7);

  v = verdict_for(0.93, 0.91, 0.8);
  EXPECT_EQ(v.level, VerdictLevel::kConfounded);
  EXPECT_TRUE(has_note(v, "duplicate_row_fraction"));

  v = verdict_for(0.4, 0.5, 0.1);
  EXPECT_EQ(v.level, VerdictLevel::kNoEvidence);
  EXPECT_TRUE(has_note(v, confound::kAbsenceCaveat));

  v = verdict_for(0.5, 0.45, 0.0);
  EXPECT_EQ(v.level, VerdictLevel::kWeakEvidence);
  EXPECT_FALSE(has_note(v, confound::kAbsenceCaveat));
}

TEST(Verdict, BoundariesAreInclusiveWhereDocumented) {
  EXPECT_EQ(verdict_for(0.9, 0.9, 0.0).level, VerdictLevel::kNoEvidence);
  EXPECT_EQ(verdict_for(0.75, 0.5, 0.0, {.margin_min = 0.25}).level,
            VerdictLevel::kStrongEvidence);
  EXPECT_EQ(verdict_for(1.0, 0.0, 0.5).level, VerdictLevel::kConfounded);
}

TEST(Verdict, NamesRoundTrip) {
  for (auto l : {VerdictLevel::kStrongEvidence, VerdictLevel::kWeakEvidence,
                 VerdictLevel::kConfounded, VerdictLevel::kNoEvidence}) {
    EXPECT_EQ(confound::parse_verdict_level(confound::to_string(l)), l);
  }
  EXPECT_THROW(confound::parse_verdict_level("maybe"), Error);
}

// Property: every input lands in exactly one level, matching the rule.
TEST(VerdictProperty, TotalAndMatchesRule) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double llm = u(rng), copy = u(rng), dup = u(rng);
    const auto v = verdict_for(llm, copy, dup);
    VerdictLevel expected;
    if (dup >= 0.5) expected = VerdictLevel::kConfounded;
    else if (llm - copy >= 0.10) expected = VerdictLevel::kStrongEvidence;
    else if (llm - copy > 0.0) expected = VerdictLevel::kWeakEvidence;
    else expected = VerdictLevel::kNoEvidence;
    ASSERT_EQ(v.level, expected) << llm << " " << copy << " " << dup;
    EXPECT_EQ(v.llm_score, llm);
    EXPECT_EQ(v.copy_baseline, copy);
  }
}

TEST(Thresholds, Validate) {
  EXPECT_NO_THROW(confound::Thresholds{}.validate());
  EXPECT_THROW((confound::Thresholds{.margin_min = -0.1}).validate(), Error);
  EXPECT_THROW((confound::Thresholds{.confound_dup = 1.5}).validate(), Error);
  EXPECT_THROW((confound::Thresholds{.min_run = 0}).validate(), Error);
}

TEST(CopyBaseline, IdenticalRowsGiveOne) {
  const auto file = parse(std::vector<std::string>(200, "1,2,3"));
  const auto plan = sampling::build_trial_plan(file, {});
  const auto cb = confound::copy_baseline(plan, file);
  ASSERT_EQ(cb.per_trial.size(), 25u);
  EXPECT_EQ(cb.mean, 1.0);
  EXPECT_EQ(cb.best_mean, 1.0);
}

TEST(CopyBaseline, MatchesOracleOnDistinctRows) {
  const auto file = parse(synth::distinct_rows(1000, 3, 5));
  const auto plan = sampling::build_trial_plan(file, {});
  const auto cb = confound::copy_baseline(plan, file);
  std::vector<double> expected;
  for (const auto& t : plan.trials) {
    expected.push_back(oracle::ratio(t.test.target_row, t.test.prefix_rows.back()));
  }
  ASSERT_EQ(cb.per_trial.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(cb.per_trial[i], expected[i]);
  EXPECT_NEAR(cb.mean, oracle::mean(expected), 1e-12);
  EXPECT_GE(cb.best_mean, cb.mean);
}

TEST(CopyBaseline, DisjointRowsScoreLow) {
  // Neighbouring rows share no characters and differ in length.
  std::vector<std::string> rows;
  for (int i = 0; i < 300; ++i) rows.push_back(i % 2 ? "aaaa,bbbb" : "cc;dd");
  const auto file = ingest::parse_dataset_file(synth::to_text(rows),
                                               ingest::ParseConfig{.delimiter = '\t'}, "d");
  const auto cb = confound::copy_baseline(sampling::build_trial_plan(file, {}), file);
  EXPECT_LT(cb.mean, 0.5);
  for (double r : cb.per_trial) EXPECT_EQ(r, oracle::ratio("aaaa,bbbb", "cc;dd"));
}

TEST(DuplicateProfile, Examples) {
  auto p = confound::duplicate_profile(parse(std::vector<std::string>(40, "5,5")));
  EXPECT_DOUBLE_EQ(p.duplicate_row_fraction, 39.0 / 40.0);
  EXPECT_EQ(p.run_length_histogram, (std::map<std::size_t, std::size_t>{{40, 1}}));

  p = confound::duplicate_profile(parse(synth::distinct_rows(100, 2, 1)));
  EXPECT_EQ(p.duplicate_rows, 0u);
  EXPECT_EQ(p.duplicate_row_fraction, 0.0);
  EXPECT_EQ(p.run_length_histogram, (std::map<std::size_t, std::size_t>{{1, 100}}));
}

TEST(DuplicateProfile, ConstructedFractionIsRecovered) {
  const auto p = confound::duplicate_profile(parse(synth::duplicated_rows(20000, 0.3, 4)));
  EXPECT_NEAR(p.duplicate_row_fraction, 0.3, 0.01);
}

// Property: the histogram accounts for every row and the duplicate count.
TEST(DuplicateProfileProperty, HistogramIsConsistent) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng() % 300;
    const double d = static_cast<double>(rng() % 101) / 100.0;
    const auto p = confound::duplicate_profile(parse(synth::duplicated_rows(n, d, rng())));
    std::size_t rows = 0, runs = 0;
    for (const auto& [len, count] : p.run_length_histogram) {
      rows += len * count;
      runs += count;
    }
    EXPECT_EQ(rows, n);
    EXPECT_EQ(p.duplicate_rows, n - runs);
  }
}

TEST(StuckColumns, Examples) {
  std::vector<std::string> rows;
  for (int i = 0; i < 100; ++i) rows.push_back(std::to_string(i * 15) + ",7," + std::to_string(i % 3));
  auto stuck = confound::detect_stuck_columns(parse(rows, "s.csv"));
  ASSERT_EQ(stuck.size(), 1u);
  EXPECT_EQ(stuck[0], (confound::StuckColumn{"s.csv", 1, 100}));

  // Inject a 25-row run into the third column.
  for (int i = 30; i < 55; ++i) rows[i] = std::to_string(i * 15) + ",7,9";
  stuck = confound::detect_stuck_columns(parse(rows, "s.csv"));
  ASSERT_EQ(stuck.size(), 2u);
  EXPECT_EQ(stuck[1], (confound::StuckColumn{"s.csv", 2, 25}));

  EXPECT_TRUE(confound::detect_stuck_columns(parse(rows, "s.csv"), 101).empty());
}

TEST(StuckColumns, IncreasingTimestampIsNotStuck) {
  std::vector<std::string> rows;
  for (int i = 0; i < 500; ++i) rows.push_back(std::to_string(1000 + i));
  EXPECT_TRUE(confound::detect_stuck_columns(parse(rows)).empty());
}

TEST(ClassifyColumns, SensorLayout) {
  const auto file = parse(synth::sensor_rows(2000, 3, 21), "imu.csv");
  const auto cols = confound::classify_predictable_columns(file);
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[0], (confound::PredictableColumn{"imu.csv", 0, confound::ColumnClass::kConstant}));
  EXPECT_EQ(cols[1].column_class, confound::ColumnClass::kFixedIncrementTimestamp);
  EXPECT_EQ(cols[2].column_class, confound::ColumnClass::kLowCardinalityLabel);
}

TEST(ClassifyColumns, IrregularIncrementsAreNotTimestamps) {
  std::vector<std::string> rows;
  long t = 0;
  for (int i = 0; i < 200; ++i) rows.push_back(std::to_string(t += 1 + i % 3));
  EXPECT_TRUE(confound::classify_predictable_columns(parse(rows)).empty());
}

TEST(ClassifyColumns, NamesRoundTrip) {
  for (auto c : {confound::ColumnClass::kConstant, confound::ColumnClass::kFixedIncrementTimestamp,
                 confound::ColumnClass::kLowCardinalityLabel}) {
    EXPECT_EQ(confound::parse_column_class(confound::to_string(c)), c);
  }
}

TEST(ProfileConfounds, AveragesPerFileThenAcrossFiles) {
  const auto a = parse(std::vector<std::string>(100, "1,1"), "a.csv");
  const auto b = parse(synth::distinct_rows(100, 2, 3), "b.csv");
  const auto pa = sampling::build_trial_plan(a, {.n_trials = 2});
  const auto pb = sampling::build_trial_plan(b, {.n_trials = 6});
  const std::vector<confound::FileAudit> files{{a, pa}, {b, pb}};
  const auto p = confound::profile_confounds(files);
  const double mb = confound::copy_baseline(pb, b).mean;
  EXPECT_EQ(p.per_file_copy.at("a.csv"), 1.0);
  EXPECT_EQ(p.per_file_copy.at("b.csv"), mb);
  EXPECT_DOUBLE_EQ(p.copy_baseline_mean, (1.0 + mb) / 2.0);
  EXPECT_EQ(p.per_trial_copy.size(), 8u);
  EXPECT_DOUBLE_EQ(p.duplicate_row_fraction, 99.0 / 200.0);
  EXPECT_EQ(p.per_file_duplicates.size(), 2u);
}
