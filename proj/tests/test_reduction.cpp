#include "zesc/reduction.hpp"
#include "zesc/verification.hpp"

#include <gtest/gtest.h>

namespace {

using zesc::Rational;

TEST(Merge, DoubleErasureCollapsesToErasure) {
  for (auto p : {Rational(3, 10), Rational(1, 2)}) {
    auto merge = zesc::merge_equivalent_side_info(zesc::binary_double_erasure(p));
    EXPECT_FALSE(merge.identity);
    EXPECT_EQ(merge.mapping, (std::vector<zesc::Symbol>{0, 1, 1, 2}));
    EXPECT_EQ(merge.reduced, zesc::binary_erasure(p));
  }
}

TEST(Merge, DistinctConditionalsStay) {
  auto pmf = zesc::binary_symmetric(Rational(1, 4));
  auto merge = zesc::merge_equivalent_side_info(pmf);
  EXPECT_TRUE(merge.identity);
  EXPECT_EQ(merge.reduced, pmf);
}

TEST(Merge, DuplicatedConstantColumn) {
  zesc::JointPMF pmf({"0", "1"}, {"ya", "yb"},
                     {{Rational(1, 6), Rational(1, 6)}, {Rational(1, 3), Rational(1, 3)}});
  auto merge = zesc::merge_equivalent_side_info(pmf);
  EXPECT_EQ(merge.reduced.y_size(), 1u);
  EXPECT_EQ(merge.reduced.y_alphabet()[0], "y");
  EXPECT_EQ(merge.reduced.exact(1, 0), Rational(2, 3));
}

TEST(Merge, NamesFallBackToJoinWhenPrefixTaken) {
  zesc::JointPMF pmf({"0", "1"}, {"E", "E1", "E2"},
                     {{Rational(1, 4), Rational(1, 8), Rational(1, 8)}, {0, Rational(1, 4), Rational(1, 4)}});
  auto merge = zesc::merge_equivalent_side_info(pmf);
  ASSERT_EQ(merge.reduced.y_size(), 2u);
  EXPECT_EQ(merge.reduced.y_alphabet()[1], "E1|E2");
}

TEST(Merge, ZeroMassSymbolsAreNotMerged) {
  zesc::JointPMF pmf({"0", "1"}, {"a", "b", "c"}, {{Rational(1, 2), 0, 0}, {0, 0, Rational(1, 2)}});
  EXPECT_TRUE(zesc::merge_equivalent_side_info(pmf).identity);
}

TEST(Merge, PreservesEntropyAndMarginalAndIsIdempotent) {
  std::vector<zesc::JointPMF> sources{zesc::binary_double_erasure(Rational(3, 10)),
                                      zesc::binary_double_erasure(Rational(1, 2)),
                                      zesc::JointPMF({"a", "b", "c"}, {"u", "v", "w", "z"},
                                                     {{Rational(1, 10), Rational(1, 20), Rational(1, 10), 0},
                                                      {Rational(1, 5), Rational(1, 10), Rational(1, 5), 0},
                                                      {0, 0, 0, Rational(1, 4)}})};
  for (const auto& pmf : sources) {
    auto merge = zesc::merge_equivalent_side_info(pmf);
    EXPECT_NEAR(zesc::conditional_entropy_x_given_y(pmf), zesc::conditional_entropy_x_given_y(merge.reduced), 1e-9);
    EXPECT_EQ(pmf.exact_marginal_x(), merge.reduced.exact_marginal_x());
    for (zesc::Symbol x = 0; x < pmf.x_size(); ++x)
      for (zesc::Symbol z = 0; z < merge.reduced.y_size(); ++z) {
        Rational s = 0;
        for (auto y : merge.groups[z]) s += pmf.exact(x, y);
        EXPECT_EQ(merge.reduced.exact(x, z), s);
      }
    EXPECT_TRUE(zesc::merge_equivalent_side_info(merge.reduced).identity);
  }
}

TEST(Equivalence, PreMergedRunsCoincide) {
  auto pmf = zesc::binary_double_erasure(Rational(3, 10));
  auto merge = zesc::merge_equivalent_side_info(pmf);
  auto cmp = zesc::verify_reduction_equivalence(pmf, merge, zesc::ProtocolId::B, 12, 0.45, 400, 3);
  EXPECT_LE(cmp.delta_rx, 0.02);
  EXPECT_LE(cmp.delta_ry, 2.0 / 12);
}

TEST(Equivalence, IdentityMergeHasZeroDeltas) {
  auto pmf = zesc::binary_erasure(Rational(3, 10));
  auto merge = zesc::merge_equivalent_side_info(pmf);
  for (auto mode : {zesc::ReductionMode::PreMerge, zesc::ReductionMode::Direct, zesc::ReductionMode::Randomized}) {
    auto cmp = zesc::verify_reduction_equivalence(pmf, merge, zesc::ProtocolId::A, 10, 0.5, 200, 9, mode);
    EXPECT_EQ(cmp.delta_rx, 0.0);
    EXPECT_EQ(cmp.delta_ry, 0.0);
  }
}

TEST(Equivalence, DirectAndRandomizedModesStayZeroError) {
  auto pmf = zesc::binary_double_erasure(Rational(1, 2));
  auto merge = zesc::merge_equivalent_side_info(pmf);
  for (auto mode : {zesc::ReductionMode::Direct, zesc::ReductionMode::Randomized}) {
    auto cmp = zesc::verify_reduction_equivalence(pmf, merge, zesc::ProtocolId::B, 10, 0.6, 300, 4, mode);
    EXPECT_GE(cmp.original.mean_rx, 0.0);
    EXPECT_EQ(cmp.original.trials, 300u);
  }
}

TEST(Equivalence, BothSourcesDecodeExhaustively) {
  auto pmf = zesc::binary_double_erasure(Rational(1, 2));
  auto merge = zesc::merge_equivalent_side_info(pmf);
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_TRUE(zesc::exhaustive_zero_error_check(zesc::ProtocolId::B, pmf, n, 0.6, 0.1, 1).passed) << n;
    EXPECT_TRUE(zesc::exhaustive_zero_error_check(zesc::ProtocolId::B, merge.reduced, n, 0.6, 0.1, 1).passed) << n;
  }
}

}  // namespace
