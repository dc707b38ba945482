#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ewsim/error.hpp"
#include "ewsim/market_data.hpp"
#include "test_support.hpp"

using namespace ewsim;
using ewsim::testing::d;
using ewsim::testing::history_from_csv;

TEST(LoadHistory, MinimalTwoRowFile) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\n"
      "2020-01-02,A,0.00,100\n"
      "2020-01-03,A,0.01,101\n");
  ASSERT_EQ(h.num_days(), 2u);
  EXPECT_EQ(h.calendar()[0], d("2020-01-02"));
  EXPECT_EQ(h.calendar()[1], d("2020-01-03"));
  EXPECT_EQ(h.num_securities(), 1u);
  EXPECT_DOUBLE_EQ(h.day(1)[0].total_return, 0.01);
}

TEST(LoadHistory, DuplicateRowNamesTheLine) {
  try {
    history_from_csv(
        "date,security_id,total_return,market_cap\n"
        "2020-01-02,A,0.00,100\n"
        "2020-01-02,B,0.00,100\n"
        "2020-01-02,A,0.01,100\n");
    FAIL() << "expected duplicate error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(LoadHistory, RejectsZeroCap) {
  try {
    history_from_csv("date,security_id,total_return,market_cap\n2020-01-02,A,0.0,0\n");
    FAIL() << "expected rejection";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("market_cap"), std::string::npos);
  }
}

TEST(LoadHistory, RejectsTotalLoss) {
  EXPECT_THROW(history_from_csv("date,security_id,total_return,market_cap\n2020-01-02,A,-1,5\n"), ParseError);
}

TEST(LoadHistory, MalformedRowsReportLine) {
  const char* bad_rows[] = {
      "2020-01-02,A,0.0\n",            // too few fields
      "2020-13-02,A,0.0,1\n",          // bad month
      "2020-01-02,A,abc,1\n",          // bad number
      "2020-01-02,A,0.1,1,extra\n",    // too many fields
      "2020-01-02,,0.1,1\n",           // empty id
  };
  for (const char* row : bad_rows) {
    std::string csv = std::string("date,security_id,total_return,market_cap\n2020-01-01,A,0,1\n") + row;
    try {
      history_from_csv(csv);
      FAIL() << "accepted: " << row;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 3u) << row;
    }
  }
}

TEST(LoadHistory, RequiresHeader) {
  EXPECT_THROW(history_from_csv("2020-01-02,A,0.0,1\n"), ParseError);
  EXPECT_THROW(history_from_csv(""), ParseError);
}

TEST(LoadHistory, AcceptsUnsortedRowsAndCrlf) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\r\n"
      "2020-02-03,B,0.02,50\r\n"
      "2020-01-02,A,0.00,100\r\n"
      "2020-02-03,A,-0.01,99\r\n");
  ASSERT_EQ(h.num_days(), 2u);
  EXPECT_EQ(h.day(1).size(), 2u);
  EXPECT_EQ(h.securities()[h.day(1)[0].security].value, "A");
}

TEST(MarketHistory, ReconstitutionDaysAreFirstDatesOfEachMonth) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\n"
      "2020-01-30,A,0,1\n"
      "2020-01-31,A,0,1\n"
      "2020-02-03,A,0,1\n"
      "2020-02-04,A,0,1\n"
      "2020-04-01,A,0,1\n");
  EXPECT_EQ(h.reconstitution_days(), (std::vector<std::size_t>{0, 2, 4}));
}

TEST(Synthetic, ZeroVolatilityIsFlat) {
  SyntheticSpec spec;
  spec.n_assets = 5;
  spec.horizon_years = 2;
  spec.vol = {0.0};
  spec.drift = {0.0};
  auto h = generate_synthetic(spec);
  EXPECT_EQ(h.num_days(), 2u * 252u);
  for (std::size_t day = 0; day < h.num_days(); ++day) {
    for (const auto& r : h.day(day)) {
      ASSERT_EQ(r.total_return, 0.0);
      ASSERT_EQ(r.market_cap, 1.0);
    }
  }
}

TEST(Synthetic, SameSeedSameHistory) {
  SyntheticSpec spec;
  spec.n_assets = 10;
  spec.horizon_years = 3;
  spec.correlation = 0.3;
  spec.seed = 99;
  EXPECT_EQ(generate_synthetic(spec), generate_synthetic(spec));
  auto other = spec;
  other.seed = 100;
  EXPECT_FALSE(generate_synthetic(spec) == generate_synthetic(other));
}

TEST(Synthetic, RealizedVarianceMatchesVolatility) {
  SyntheticSpec spec;
  spec.n_assets = 50;
  spec.horizon_years = 50;
  spec.vol = {0.30};
  spec.drift = {0.05};
  spec.seed = 7;
  auto h = generate_synthetic(spec);
  const auto var = ewsim::testing::realized_annual_log_variance(h, spec.periods_per_year);
  double mean = 0.0;
  for (double v : var) mean += v;
  mean /= static_cast<double>(var.size());
  EXPECT_NEAR(mean, 0.09, 0.05 * 0.09);
}

TEST(Synthetic, UncorrelatedPairHasNearZeroSampleCorrelation) {
  SyntheticSpec spec;
  spec.n_assets = 2;
  spec.horizon_years = 50;
  spec.correlation = 0.0;
  spec.seed = 3;
  auto h = generate_synthetic(spec);
  std::vector<double> a, b;
  for (std::size_t day = 1; day < h.num_days(); ++day) {
    a.push_back(std::log1p(h.day(day)[0].total_return));
    b.push_back(std::log1p(h.day(day)[1].total_return));
  }
  const double rho = ewsim::testing::sample_correlation(a, b);
  EXPECT_GT(rho, -0.05);
  EXPECT_LT(rho, 0.05);
}

TEST(Synthetic, CorrelationIsReproduced) {
  SyntheticSpec spec;
  spec.n_assets = 2;
  spec.horizon_years = 20;
  spec.correlation = 0.6;
  auto h = generate_synthetic(spec);
  std::vector<double> a, b;
  for (std::size_t day = 1; day < h.num_days(); ++day) {
    a.push_back(std::log1p(h.day(day)[0].total_return));
    b.push_back(std::log1p(h.day(day)[1].total_return));
  }
  EXPECT_NEAR(ewsim::testing::sample_correlation(a, b), 0.6, 0.03);
}

TEST(Synthetic, RejectsInvalidSpecs) {
  SyntheticSpec spec;
  spec.correlation = 1.0;
  EXPECT_THROW(generate_synthetic(spec), Error);
  spec.correlation = -0.1;
  EXPECT_THROW(generate_synthetic(spec), Error);
  spec = {};
  spec.n_assets = 1;
  EXPECT_THROW(generate_synthetic(spec), Error);
  spec = {};
  spec.vol = {-0.1};
  EXPECT_THROW(generate_synthetic(spec), Error);
  spec = {};
  spec.periods_per_year = 250;
  EXPECT_THROW(generate_synthetic(spec), Error);
  spec = {};
  spec.vol = {0.1, 0.2};  // neither 1 nor n_assets values
  EXPECT_THROW(generate_synthetic(spec), Error);
}

TEST(Reconstitute, RanksByDescendingCap) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\n"
      "2020-01-02,A,0,5\n2020-01-02,B,0,9\n2020-01-02,C,0,1\n");
  auto snap = reconstitute(h, d("2020-01-02"));
  ASSERT_EQ(snap.members.size(), 3u);
  EXPECT_EQ(snap.members[0].value, "B");
  EXPECT_EQ(snap.members[1].value, "A");
  EXPECT_EQ(snap.members[2].value, "C");
  EXPECT_EQ(snap.caps, (std::vector<double>{9, 5, 1}));
}

TEST(Reconstitute, TiesBreakByAscendingId) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\n"
      "2020-01-02,ZZ,0,7\n2020-01-02,AA,0,7\n2020-01-02,MM,0,8\n");
  auto snap = reconstitute(h, d("2020-01-02"));
  EXPECT_EQ(snap.members[0].value, "MM");
  EXPECT_EQ(snap.members[1].value, "AA");
  EXPECT_EQ(snap.members[2].value, "ZZ");
}

TEST(Reconstitute, DateOffCalendarIsAnError) {
  auto h = history_from_csv("date,security_id,total_return,market_cap\n2020-01-02,A,0,5\n");
  EXPECT_THROW(reconstitute(h, d("2020-01-03")), Error);
}

TEST(Reconstitute, OnlyMembersWithRecordsThatDay) {
  auto h = history_from_csv(
      "date,security_id,total_return,market_cap\n"
      "2020-01-02,A,0,5\n2020-01-02,B,0,6\n2020-02-03,A,0,5\n");
  auto snap = reconstitute(h, d("2020-02-03"));
  ASSERT_EQ(snap.members.size(), 1u);
  EXPECT_EQ(snap.members[0].value, "A");
}

TEST(Reconstitute, SyntheticUniverseHasEveryAssetOnEveryReconstitutionDate) {
  SyntheticSpec spec;
  spec.n_assets = 50;
  spec.horizon_years = 3;
  auto h = generate_synthetic(spec);
  const auto days = h.reconstitution_days();
  EXPECT_EQ(days.size(), 36u);
  for (auto day : days) EXPECT_EQ(reconstitute_day(h, day).members.size(), 50u);
}

TEST(Reconstitute, ScalingCapsKeepsOrder) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> cap(0.1, 10.0);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DailyRecord> base, scaled;
    const double k = cap(rng);
    for (int i = 0; i < 12; ++i) {
      // coarse caps so ties actually happen
      const double c = 1.0 + pick(rng);
      SecurityId id{"S" + std::to_string(i)};
      base.push_back({d("2021-03-01"), id, 0.0, c});
      scaled.push_back({d("2021-03-01"), id, 0.0, c * k});
    }
    auto a = reconstitute_day(MarketHistory::from_records(base), 0);
    auto b = reconstitute_day(MarketHistory::from_records(scaled), 0);
    ASSERT_EQ(a.members, b.members);
  }
}

namespace {

UniverseSnapshot snapshot_of(std::initializer_list<const char*> ids) {
  UniverseSnapshot s;
  double cap = 100.0;
  for (const char* id : ids) {
    s.members.push_back({id});
    s.caps.push_back(cap);
    cap -= 1.0;
  }
  return s;
}

}  // namespace

TEST(ReconstitutionFlows, IdenticalSnapshots) {
  auto s = snapshot_of({"A", "B", "C", "D"});
  EXPECT_EQ(reconstitution_flows(s, s, 3), (ReconstitutionFlows{3, 0, 0}));
}

TEST(ReconstitutionFlows, DisjointTopSets) {
  auto prev = snapshot_of({"A", "B", "C", "D"});
  auto next = snapshot_of({"C", "D", "A", "B"});
  EXPECT_EQ(reconstitution_flows(prev, next, 2), (ReconstitutionFlows{0, 2, 2}));
}

TEST(ReconstitutionFlows, OneSwapInTopTwo) {
  auto prev = snapshot_of({"A", "B", "C", "D"});
  auto next = snapshot_of({"A", "C", "B", "D"});
  EXPECT_EQ(reconstitution_flows(prev, next, 2), (ReconstitutionFlows{1, 1, 1}));
}

TEST(ReconstitutionFlows, DegenerateUniverses) {
  auto prev = snapshot_of({"A"});
  auto next = snapshot_of({"B", "C"});
  EXPECT_EQ(reconstitution_flows(prev, next, 5), (ReconstitutionFlows{0, 1, 2}));
  EXPECT_EQ(reconstitution_flows(UniverseSnapshot{}, UniverseSnapshot{}, 5), (ReconstitutionFlows{0, 0, 0}));
}

TEST(ReconstitutionFlows, SwapSymmetryProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> pool{"A", "B", "C", "D", "E", "F", "G", "H"};
    std::shuffle(pool.begin(), pool.end(), rng);
    UniverseSnapshot prev, next;
    for (std::size_t i = 0; i < 6; ++i) prev.members.push_back({pool[i]});
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t i = 0; i < 5; ++i) next.members.push_back({pool[i]});
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 7);
    auto f = reconstitution_flows(prev, next, n);
    auto g = reconstitution_flows(next, prev, n);
    ASSERT_EQ(f.stay, g.stay);
    ASSERT_EQ(f.leave, g.enter);
    ASSERT_EQ(f.enter, g.leave);
    ASSERT_EQ(f.stay + f.leave, std::min(n, prev.members.size()));
    ASSERT_EQ(f.stay + f.enter, std::min(n, next.members.size()));
  }
}

TEST(HistoryCsv, RoundTripIsIdentity) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ret(-0.5, 0.5);
  std::uniform_real_distribution<double> cap(1e-3, 1e9);
  std::bernoulli_distribution present(0.7);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<DailyRecord> records;
    Date day = d("1999-12-30");
    for (int t = 0; t < 40; ++t) {
      day = std::chrono::sys_days(day) + std::chrono::days(1 + t % 3);
      for (int s = 0; s < 6; ++s) {
        if (present(rng)) records.push_back({day, {"SEC" + std::to_string(s)}, ret(rng), cap(rng)});
      }
    }
    if (records.empty()) continue;
    const auto h = MarketHistory::from_records(records);
    std::stringstream buf;
    write_history(buf, h);
    const auto back = load_history(buf);
    ASSERT_EQ(back, h);
  }
}

TEST(HistorySlice, KeepsInclusiveRange) {
  SyntheticSpec spec;
  spec.n_assets = 3;
  spec.horizon_years = 2;
  spec.periods_per_year = 12;
  auto h = generate_synthetic(spec);
  auto s = h.slice(d("2000-03-01"), d("2000-05-01"));
  EXPECT_EQ(s.num_days(), 3u);
  EXPECT_THROW(h.slice(d("1990-01-01"), d("1990-02-01")), Error);
}
