#include "fixtures.hpp"
#include "zesc/zesc.hpp"

#include <gtest/gtest.h>

namespace {

using zesc::BitString;
using zesc::Rational;
using zesc::Sequence;
using zesc::SequencePair;
using zesc::Tag;

const zesc::JointPMF& bec() {
  static const auto pmf = zesc::binary_erasure(Rational(3, 10));
  return pmf;
}

std::uint64_t sum_bits(const zesc::Transcript& t, zesc::Direction d) {
  std::uint64_t s = 0;
  for (const auto& m : t.messages)
    if (m.direction == d) s += m.bits.size();
  return s;
}

void expect_well_formed(const zesc::Transcript& t, const zesc::InteractiveCode& code) {
  EXPECT_EQ(t.decoded, t.truth);
  EXPECT_EQ(t.forward_bits, sum_bits(t, zesc::Direction::Forward));
  EXPECT_EQ(t.backward_bits, sum_bits(t, zesc::Direction::Backward));
  for (std::size_t k = 0; k < t.messages.size(); ++k) {
    EXPECT_EQ(t.messages[k].direction, zesc::direction_of(k));
    EXPECT_EQ(t.messages[k].round, zesc::round_of(k));
  }
  EXPECT_TRUE(zesc::transcript_parse_roundtrip(t, code));
}

TEST(BitFraming, FieldsRoundTrip) {
  BitString b;
  b.append(5, 3);
  b.push(false);
  b.append(0, 0);
  b.append(1023, 10);
  EXPECT_EQ(b.str(), "10101111111111");
  zesc::BitReader r(b);
  EXPECT_EQ(r.read(3), 5u);
  EXPECT_FALSE(r.read_bit());
  EXPECT_EQ(r.read(10), 1023u);
  EXPECT_TRUE(r.at_end());
  EXPECT_THROW(r.read_bit(), zesc::ProtocolViolation);
  EXPECT_THROW(b.append(4, 2), std::invalid_argument);
}

TEST(BinningProtocol, EscapeOnAtypicalSource) {
  auto code = zesc::BinningProtocol::build(bec(), 8, 0.5, 0.1, 17);
  SequencePair pair{{0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0}};
  auto t = zesc::run_protocol(*code, pair);
  ASSERT_EQ(t.messages.size(), 1u);
  EXPECT_EQ(t.messages[0].tag, Tag::EscapeRaw);
  EXPECT_EQ(t.forward_bits, 1u + 8u);
  EXPECT_EQ(t.backward_bits, 0u);
  expect_well_formed(t, *code);
}

// Finds a (seed, pair) where `accept` holds for the transcript; pairs are
// drawn i.i.d. so every candidate lies in the support.
template <class Build, class Accept>
std::pair<std::unique_ptr<zesc::InteractiveCode>, zesc::Transcript> search(Build build, std::size_t n,
                                                                           Accept accept) {
  for (std::uint64_t seed = 1; seed < 200; ++seed) {
    auto code = build(seed);
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 400; ++trial) {
      auto pair = zesc::sample_iid(bec(), n, rng);
      auto t = zesc::run_protocol(*code, pair);
      if (accept(*code, pair, t)) return {std::move(code), std::move(t)};
    }
  }
  return {nullptr, {}};
}

TEST(BinningProtocol, SuccessPath) {
  auto [code, t] = search([](std::uint64_t s) { return zesc::BinningProtocol::build(bec(), 10, 0.6, 0.1, s); }, 10,
                          [](const auto& c, const auto&, const auto& t) { return c.is_success_path(t.messages); });
  ASSERT_TRUE(code);
  ASSERT_EQ(t.messages.size(), 3u);
  EXPECT_EQ(t.messages[2].bits, BitString("1"));
  const auto& a = static_cast<const zesc::BinningProtocol&>(*code);
  EXPECT_EQ(t.messages[0].bits.size(), 1u + a.bins().bin_id_bits());
  expect_well_formed(t, *code);
}

TEST(BinningProtocol, MismatchFallsBackToRawSource) {
  // the smallest-index jointly typical member is some other sequence
  auto [code, t] = search(
      [](std::uint64_t s) { return zesc::BinningProtocol::build(bec(), 10, 0.2, 0.2, s); }, 10,
      [](const auto&, const auto&, const auto& t) {
        return t.messages.size() == 3 && t.messages[1].tag == Tag::IntraBinIndex && t.messages[2].tag == Tag::EscapeRaw;
      });
  ASSERT_TRUE(code);
  EXPECT_EQ(t.messages[2].bits.size(), 1u + 10u);
  expect_well_formed(t, *code);
}

TEST(BinningProtocol, DecoderRejectsForeignTranscripts) {
  auto code = zesc::BinningProtocol::build(bec(), 8, 0.5, 0.1, 17);
  std::vector<zesc::Message> none;
  EXPECT_THROW(code->decode(none, Sequence(8, 0)), zesc::ProtocolViolation);
  EXPECT_THROW(code->parse(BitString("0101")), zesc::ProtocolViolation);
  EXPECT_THROW(code->parse(BitString("")), zesc::ProtocolViolation);
}

TEST(TypeBinningProtocol, AtypicalSideInformationFallsBack) {
  auto code = zesc::TypeBinningProtocol::build(bec(), 8, 0.5, 0.1, 3);
  SequencePair pair{{0, 1, 0, 1, 0, 1, 0, 1}, {1, 1, 1, 1, 1, 1, 1, 1}};  // y all erasures
  auto t = zesc::run_protocol(*code, pair);
  ASSERT_EQ(t.messages.size(), 3u);
  EXPECT_EQ(t.messages[0].tag, Tag::TypeDescriptor);
  EXPECT_EQ(t.messages[0].bits.size(), code->type_bits());
  EXPECT_EQ(t.messages[1].bits, BitString("0"));
  EXPECT_EQ(t.messages[2].tag, Tag::EscapeRaw);
  EXPECT_EQ(t.messages[2].bits.size(), 8u);
  expect_well_formed(t, *code);
}

TEST(TypeBinningProtocol, SuccessPathBitCounts) {
  auto [code, t] = search([](std::uint64_t s) { return zesc::TypeBinningProtocol::build(bec(), 12, 0.6, 0.1, s); },
                          12, [](const auto& c, const auto&, const auto& t) { return c.is_success_path(t.messages); });
  ASSERT_TRUE(code);
  const auto& b = static_cast<const zesc::TypeBinningProtocol&>(*code);
  EXPECT_EQ(t.backward_bits, 2u);
  EXPECT_EQ(t.forward_bits, b.type_bits() + zesc::ceil_log2(zesc::bin_count_for(12, 0.6)));
  expect_well_formed(t, *code);
}

TEST(TypeBinningProtocol, AmbiguousBinSendsRawSource) {
  auto [code, t] = search([](std::uint64_t s) { return zesc::TypeBinningProtocol::build(bec(), 10, 0.2, 0.2, s); },
                          10, [](const auto&, const auto&, const auto& t) { return t.messages.size() == 5; });
  ASSERT_TRUE(code);
  EXPECT_EQ(t.messages[3].bits, BitString("0"));
  EXPECT_EQ(t.messages[4].tag, Tag::EscapeRaw);
  expect_well_formed(t, *code);
}

TEST(TypeBinningProtocol, VerdictMatchesDirectJointTypicality) {
  // on a cycle-free support the verdict from types equals the direct test
  auto code = zesc::TypeBinningProtocol::build(bec(), 6, 0.5, 0.2, 1);
  zesc::for_each_pair(bec(), 6, false, [&](const SequencePair& p) {
    const bool from_types = code->joint_typicality_verdict(zesc::empirical_type(p.x, 2), zesc::empirical_type(p.y, 3));
    const bool direct = zesc::is_strongly_typical(p.x, bec().marginal_x(), 0.2) &&
                        zesc::is_strongly_typical(p.y, bec().marginal_y(), 0.2) &&
                        zesc::is_jointly_typical(p.x, p.y, bec(), 0.2);
    ASSERT_EQ(from_types, direct);
  });
}

TEST(ColoringProtocol, IdentityChannelNeedsOnlyTheFlag) {
  auto pmf = zesc::identity_channel();
  zesc::ProtocolParams params;
  params.n = 6;
  params.rate = 0.5;
  auto code = zesc::build_protocol(zesc::ProtocolId::C, pmf, params);
  const auto& c = static_cast<const zesc::ColoringProtocol&>(*code);
  EXPECT_EQ(c.coloring().color_count(), 1u);
  SequencePair pair{{0, 1, 1, 0, 1, 0}, {0, 1, 1, 0, 1, 0}};
  auto t = zesc::run_protocol(*code, pair);
  expect_well_formed(t, *code);
  EXPECT_LE(t.forward_bits, 1u + c.inner().bins().bin_id_bits() + 1u);
}

TEST(ColoringProtocol, BijectiveColoringReproducesBinningProtocol) {
  zesc::ProtocolParams params;
  params.n = 8;
  params.rate = 0.5;
  params.bin_seed = 99;
  auto a = zesc::build_protocol(zesc::ProtocolId::A, bec(), params);
  auto c = zesc::build_protocol(zesc::ProtocolId::C, bec(), params);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    auto pair = zesc::sample_iid(bec(), 8, rng);
    auto ta = zesc::run_protocol(*a, pair);
    auto tc = zesc::run_protocol(*c, pair);
    ASSERT_EQ(ta.messages, tc.messages);
    EXPECT_EQ(tc.decoded, pair.x);
  }
}

TEST(ColoringProtocol, TwoColorSourceDecodesEverySupportPair) {
  // a and b are never confusable, c is confusable with both
  zesc::JointPMF pmf({"a", "b", "c"}, {"u", "v"},
                     {{Rational(1, 3), 0}, {0, Rational(1, 3)}, {Rational(1, 6), Rational(1, 6)}});
  zesc::ProtocolParams params;
  params.n = 4;
  params.rate = 0.8;
  auto code = zesc::build_protocol(zesc::ProtocolId::C, pmf, params);
  const auto& c = static_cast<const zesc::ColoringProtocol&>(*code);
  EXPECT_EQ(c.coloring().color_count(), 2u);
  EXPECT_EQ(c.coloring().color_of[0], c.coloring().color_of[1]);
  auto check = zesc::exhaustive_zero_error_check(*code, pmf);
  EXPECT_TRUE(check.passed);
  EXPECT_GT(check.pairs_checked, 0u);
}

TEST(ColoringProtocol, RejectsInvalidColoring) {
  zesc::ZeroErrorColoring bad;
  bad.n = 1;
  bad.color_of = {0, 0};
  bad.color_distribution = {1.0};
  EXPECT_THROW(zesc::ColoringProtocol(bec(), bad, 4, 0.5, 0.1, 1), zesc::InvalidColoring);
}

TEST(Engine, ForwardMessageIgnoresTamperedSideInformation) {
  for (auto id : {zesc::ProtocolId::A, zesc::ProtocolId::B, zesc::ProtocolId::C}) {
    zesc::ProtocolParams params;
    params.n = 8;
    auto code = zesc::build_protocol(id, bec(), params);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      auto pair = zesc::sample_iid(bec(), 8, rng);
      auto tampered = pair;
      for (auto& y : tampered.y) y = (y + 1) % 3;
      auto t1 = zesc::run_protocol(*code, pair);
      auto t2 = zesc::run_protocol(*code, tampered);
      EXPECT_EQ(t1.messages[0], t2.messages[0]);
    }
  }
}

TEST(Engine, RejectsWrongBlocklength) {
  auto code = zesc::BinningProtocol::build(bec(), 8, 0.5, 0.1, 1);
  EXPECT_THROW(zesc::run_protocol(*code, SequencePair{{0, 1}, {0, 1}}), zesc::BlocklengthMismatch);
}

TEST(Engine, TranscriptsRoundTripAndRejectDeletions) {
  auto code = zesc::TypeBinningProtocol::build(bec(), 6, 0.5, 0.1, 2);
  std::size_t checked = 0;
  zesc::for_each_pair(bec(), 6, false, [&](const SequencePair& p) {
    auto t = zesc::run_protocol(*code, p);
    ASSERT_TRUE(zesc::transcript_parse_roundtrip(t, *code));
    auto shortened = t.messages;
    auto& last = shortened.back().bits;
    BitString cut(last.str().substr(0, last.size() - 1));
    last = cut;
    ASSERT_FALSE(zesc::transcript_parse_roundtrip(shortened, *code));
    ++checked;
  });
  EXPECT_GT(checked, 100u);
  EXPECT_FALSE(zesc::transcript_parse_roundtrip(std::vector<zesc::Message>{}, *code));
}

TEST(MonteCarlo, IdentityChannelFeedbackIsAtMostTwoBits) {
  for (std::size_t n : {4, 8, 16}) {
    auto r = zesc::monte_carlo_rates(zesc::ProtocolId::B, zesc::identity_channel(), n, 0.5, 0.1, 300, 7);
    EXPECT_LE(r.mean_ry, 2.0 / static_cast<double>(n) + 1e-12);
    EXPECT_GE(r.success_fraction, 0.0);
    EXPECT_LE(r.success_fraction, 1.0);
  }
}

TEST(MonteCarlo, BinningFeedbackWithinProofBound) {
  const std::size_t n = 20;
  const double rate = 0.5, eps = 0.1;
  auto r = zesc::monte_carlo_rates(zesc::ProtocolId::A, bec(), n, rate, eps, 5000, 31);
  const double p = r.success_fraction;
  const double bound = p * (zesc::entropy_x(bec()) - rate + eps) + (1 - p) * (1.0 + n) / n + 0.15;
  EXPECT_LE(r.mean_ry, bound);
}

TEST(MonteCarlo, DeterministicPerSeed) {
  auto a = zesc::monte_carlo_rates(zesc::ProtocolId::A, bec(), 10, 0.5, 0.1, 200, 5);
  auto b = zesc::monte_carlo_rates(zesc::ProtocolId::A, bec(), 10, 0.5, 0.1, 200, 5);
  EXPECT_EQ(a.mean_rx, b.mean_rx);
  EXPECT_EQ(a.mean_ry, b.mean_ry);
  EXPECT_EQ(a.success_fraction, b.success_fraction);
  EXPECT_GT(a.ci_rx, 0.0);
}

TEST(MonteCarlo, WrongDecodeAborts) {
  zesc::ProtocolParams params;
  params.n = 2;
  params.bin_seed = 1;
  zesc::testing::CorruptedDecoder bad(zesc::build_protocol(zesc::ProtocolId::A, bec(), params), {0, 1}, 2);
  EXPECT_THROW(zesc::monte_carlo_rates(bad, bec(), 500, 1), zesc::ZeroErrorViolated);
}

}  // namespace
