#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "tmc/classify.hpp"
#include "tmc/error.hpp"

using namespace tmc;
using namespace tmc::classify;

TEST(Classify, TableExamples) {
  EXPECT_EQ(classify_by_length(0.8).id, 1);
  EXPECT_EQ(classify_by_length(4.5).id, 3);
  EXPECT_EQ(classify_by_length(12.0).id, 6);
}

TEST(Classify, BoundariesBelongToUpperClass) {
  EXPECT_EQ(classify_by_length(1.0).id, 2);
  EXPECT_EQ(classify_by_length(2.2).id, 3);
  EXPECT_EQ(classify_by_length(5.0).id, 4);
  EXPECT_EQ(classify_by_length(7.0).id, 5);
  EXPECT_EQ(classify_by_length(std::nextafter(12.0, 0.0)).id, 5);
  EXPECT_EQ(classify_by_length(std::nextafter(1.0, 0.0)).id, 1);
}

TEST(Classify, SweepIsTotalAndMonotone) {
  int prev = 0;
  for (int cm = 1; cm <= 6000; ++cm) {
    const double len = cm / 100.0;
    const auto& c = classify_by_length(len);
    EXPECT_TRUE(len >= c.lower && len < c.upper) << len;
    EXPECT_GE(c.id, prev) << len;
    prev = c.id;
  }
  EXPECT_EQ(prev, 6);
}

TEST(Classify, NonpositiveLength) {
  for (double bad : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity()}) {
    try {
      classify_by_length(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NonpositiveLength);
    }
  }
}

TEST(Fhwa, Groups) {
  const auto& t = ClassTable::standard();
  EXPECT_TRUE(fhwa_classes(t.by_id(1)).empty());
  EXPECT_EQ(fhwa_classes(t.by_id(4)),
            (std::vector<std::string>{"FHWA Class 2 (Trailer)", "FHWA Class 3"}));
  EXPECT_EQ(fhwa_classes(t.by_id(5)),
            (std::vector<std::string>{"FHWA Class 4", "FHWA Class 5", "FHWA Class 6",
                                      "FHWA Class 7"}));
  EXPECT_EQ(fhwa_classes(t.by_id(6)),
            (std::vector<std::string>{"FHWA Class 8", "FHWA Class 9", "FHWA Class 10"}));
}

TEST(ClassTable, CustomPartitionValidated) {
  const double inf = std::numeric_limits<double>::infinity();
  const ClassTable two({{1, "short", 0.0, 6.0, {}}, {2, "long", 6.0, inf, {}}});
  EXPECT_EQ(two.classify(5.99).id, 1);
  EXPECT_EQ(two.classify(6.0).id, 2);
  EXPECT_EQ(two.size(), 2);

  EXPECT_THROW(ClassTable({{1, "a", 0.0, 5.0, {}}, {2, "b", 6.0, inf, {}}}), Error);  // gap
  EXPECT_THROW(ClassTable({{1, "a", 0.0, 5.0, {}}, {2, "b", 4.0, inf, {}}}), Error);  // overlap
  EXPECT_THROW(ClassTable({{1, "a", 0.0, 5.0, {}}, {2, "b", 5.0, 9.0, {}}}), Error);  // bounded
  EXPECT_THROW(ClassTable({{2, "a", 0.0, inf, {}}}), Error);                         // ids
  EXPECT_THROW(ClassTable({}), Error);
}
