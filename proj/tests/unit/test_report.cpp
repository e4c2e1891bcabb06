#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "tmc/error.hpp"
#include "tmc/report.hpp"

using namespace tmc;
using namespace tmc::report;
using intersection::Approach;
using intersection::kApproaches;
using intersection::kMovements;
using intersection::Movement;

namespace {

TmcTable nb_fixture() { return load_ground_truth(std::string(TMC_DATA_DIR) + "/ground_truth_nb_bin0.csv"); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TmcTable random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(0, 9);
  TmcTable t(300.0, 0.0, 1140.0);
  for (int b = 0; b < t.num_bins(); ++b) {
    for (auto a : kApproaches) {
      for (auto m : kMovements) {
        for (int c = 1; c <= 6; ++c) {
          t.set(b, a, m, c, n(rng));
        }
      }
    }
  }
  return t;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no tmc::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(GroundTruth, FixtureCells) {
  const auto gt = nb_fixture();
  EXPECT_EQ(gt.num_bins(), 1);
  EXPECT_EQ(gt.at(0, Approach::NB, Movement::Left, 3), 3);
  EXPECT_EQ(gt.at(0, Approach::NB, Movement::Thru, 3), 38);
  EXPECT_EQ(gt.at(0, Approach::NB, Movement::Right, 3), 6);
  EXPECT_EQ(gt.at(0, Approach::NB, Movement::UTurn, 3), 2);
  EXPECT_EQ(gt.at(0, Approach::SB, Movement::Thru, 3), 0);
}

TEST(GroundTruth, HeaderOnlyIsAllZero) {
  const auto t = table_from_csv("bin_start,approach,class,left,thru,right,uturn\n");
  EXPECT_EQ(t.grand_total(), 0);
}

TEST(GroundTruth, NegativeCountRejected) {
  EXPECT_EQ(kind_of([] {
              table_from_csv("bin_start,approach,class,left,thru,right,uturn\n0,NB,3,-1,0,0,0\n");
            }),
            ErrorKind::NegativeCount);
}

TEST(GroundTruth, SchemaErrors) {
  EXPECT_THROW(table_from_csv("bin,approach,class,left,thru,right,uturn\n"), Error);
  EXPECT_THROW(table_from_csv("bin_start,approach,class,left,thru,right,uturn\n0,NE,3,1,0,0,0\n"),
               Error);
  EXPECT_THROW(table_from_csv("bin_start,approach,class,left,thru,right,uturn\n0,NB,9,1,0,0,0\n"),
               Error);
  EXPECT_THROW(table_from_csv("bin_start,approach,class,left,thru,right,uturn\n0,NB,3,1,0\n"),
               Error);
}

TEST(GroundTruth, SparseRowsAreZero) {
  const auto t = table_from_csv(
      "bin_start,approach,class,left,thru,right,uturn\n0,WB,2,0,1,0,0\n600,EB,5,0,0,2,0\n");
  EXPECT_EQ(t.bin_seconds(), 600.0);
  EXPECT_EQ(t.num_bins(), 2);
  EXPECT_EQ(t.at(0, Approach::WB, Movement::Thru, 2), 1);
  EXPECT_EQ(t.at(1, Approach::EB, Movement::Right, 5), 2);
  EXPECT_EQ(t.grand_total(), 3);
}

TEST(TableCsv, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    TmcTable t = random_table(rng);
    const auto text = table_to_csv(t);
    EXPECT_EQ(table_from_csv(text), t);
    EXPECT_EQ(table_to_csv(table_from_csv(text)), text);
  }
}

TEST(Aggregate, ClassThreeRowOverMovements) {
  const auto m = aggregate(nb_fixture(), {Dim::Approach, Dim::Class});
  EXPECT_EQ(m.cells.at({static_cast<int>(Approach::NB), 3}), 49);
  EXPECT_EQ(m.cells.at({static_cast<int>(Approach::NB), 4}), 15);
}

TEST(Aggregate, KeepAllIsIdentity) {
  std::mt19937_64 rng(6);
  const auto t = random_table(rng);
  const auto m = aggregate(t, {Dim::Time, Dim::Approach, Dim::Movement, Dim::Class});
  EXPECT_EQ(m.cells.at({2, 1, 3, 4}), t.at(2, Approach::SB, Movement::UTurn, 4));
  EXPECT_EQ(m.cells.size(), 4u * 4u * 4u * 6u);
}

TEST(Aggregate, EveryMarginalPreservesTotalAndIsLinear) {
  std::mt19937_64 rng(7);
  const std::vector<Dim> all{Dim::Time, Dim::Approach, Dim::Movement, Dim::Class};
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_table(rng);
    const auto b = random_table(rng);
    for (unsigned mask = 1; mask < 16; ++mask) {
      std::set<Dim> keep;
      for (unsigned i = 0; i < 4; ++i) {
        if (mask & (1u << i)) {
          keep.insert(all[i]);
        }
      }
      EXPECT_EQ(aggregate(a, keep).total(), a.grand_total());
      const auto sum = aggregate(a + b, keep);
      const auto ma = aggregate(a, keep);
      const auto mb = aggregate(b, keep);
      for (const auto& [key, v] : sum.cells) {
        EXPECT_EQ(v, ma.cells.at(key) + mb.cells.at(key));
      }
    }
  }
  EXPECT_THROW(aggregate(TmcTable{}, {}), Error);
}

TEST(Compare, IdenticalTablesHaveZeroError) {
  std::mt19937_64 rng(8);
  const auto t = random_table(rng);
  for (const auto& keep : {std::set<Dim>{}, std::set<Dim>{Dim::Approach, Dim::Movement},
                           std::set<Dim>{Dim::Time, Dim::Class}}) {
    const auto r = compare(t, t, keep);
    for (const auto& row : r.rows) {
      EXPECT_EQ(row.abs_error, 0) << row.group;
      if (row.pct_error) {
        EXPECT_EQ(*row.pct_error, 0.0) << row.group;
      }
    }
  }
}

TEST(Compare, ThruFortyVersusThirtyEight) {
  TmcTable est(300.0, 0.0, 300.0);
  TmcTable gt(300.0, 0.0, 300.0);
  est.set(0, Approach::NB, Movement::Thru, 3, 40);
  gt.set(0, Approach::NB, Movement::Thru, 3, 38);
  const auto r = compare(est, gt, {Dim::Approach, Dim::Movement});
  const auto it = std::find_if(r.rows.begin(), r.rows.end(),
                               [](const ErrorRow& row) { return row.group == "NB/Thru"; });
  ASSERT_NE(it, r.rows.end());
  EXPECT_EQ(it->abs_error, 2);
  ASSERT_TRUE(it->pct_error);
  EXPECT_NEAR(*it->pct_error, 5.263157894736842, 1e-9);
}

TEST(Compare, ZeroGroundTruthHasNoPercent) {
  TmcTable est(300.0, 0.0, 300.0);
  est.set(0, Approach::WB, Movement::UTurn, 2, 3);
  const auto r = compare(est, TmcTable(300.0, 0.0, 300.0), {});
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].abs_error, 3);
  EXPECT_FALSE(r.rows[0].pct_error);
  EXPECT_NE(render_report(r, Format::Csv).find(",3,0,3,n/a\n"), std::string::npos);
}

TEST(Compare, IncompatibleBinning) {
  EXPECT_EQ(kind_of([] { compare(TmcTable(300.0, 0.0, 1140.0), TmcTable(600.0, 0.0, 1140.0), {}); }),
            ErrorKind::IncompatibleBinning);
  EXPECT_EQ(kind_of([] { compare(TmcTable(300.0, 0.0, 600.0), TmcTable(300.0, 0.0, 1140.0), {}); }),
            ErrorKind::IncompatibleBinning);
}

TEST(Compare, SharesSumToHundred) {
  std::mt19937_64 rng(9);
  const auto a = random_table(rng);
  const auto b = random_table(rng);
  const auto r = compare(a, b, {Dim::Class});
  double se = 0.0;
  double sg = 0.0;
  for (const auto& s : r.shares) {
    se += s.estimated_pct.value();
    sg += s.ground_truth_pct.value();
  }
  EXPECT_NEAR(se, 100.0, 1e-9);
  EXPECT_NEAR(sg, 100.0, 1e-9);

  const auto fx = compare(nb_fixture(), nb_fixture(), {});
  EXPECT_NEAR(fx.shares[2].ground_truth_pct.value(), 49.0 / 64.0 * 100.0, 1e-9);
  const auto empty = compare(TmcTable{}, TmcTable{}, {});
  EXPECT_FALSE(empty.shares[0].estimated_pct);
}

TEST(Render, EmptyReportIsHeaderOnly) {
  EXPECT_EQ(render_report(ErrorReport{}, Format::Csv),
            "group,estimated,ground_truth,abs_error,pct_error\n");
}

TEST(Render, PerturbedFixtureMatchesGolden) {
  const auto gt = nb_fixture();
  auto est = gt;
  est.set(0, Approach::NB, Movement::Thru, 3, 40);
  est.set(0, Approach::NB, Movement::Right, 4, 0);
  est.set(0, Approach::SB, Movement::Left, 3, 3);
  const auto r = compare(est, gt, parse_dims("approach,movement"));
  const auto csv = render_report(r, Format::Csv);
  EXPECT_EQ(csv, slurp(std::string(TMC_TEST_DATA_DIR) + "/report_nb_perturbed.csv"));
  EXPECT_EQ(render_report(r, Format::Csv), csv);
  EXPECT_EQ(render_report(r, Format::Text), render_report(r, Format::Text));
}

TEST(Dims, Parse) {
  EXPECT_EQ(parse_dims("class, time"), (std::set<Dim>{Dim::Time, Dim::Class}));
  EXPECT_TRUE(parse_dims("").empty());
  EXPECT_THROW(parse_dims("lane"), Error);
}
