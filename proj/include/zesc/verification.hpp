#ifndef ZESC_VERIFICATION_HPP
#define ZESC_VERIFICATION_HPP

#include "zesc/protocols.hpp"
#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace zesc {

inline constexpr std::uint64_t kMaxEnumeratedPairs = std::uint64_t{1} << 24;

/// Calls visit(pair) for every (x, y) in X^n x Y^n with positive probability,
/// or for every pair when `all_pairs` is set. x varies slowest; both
/// coordinates run in lexicographic order.
template <class Visitor>
void for_each_pair(const JointPMF& pmf, std::size_t n, bool all_pairs, Visitor&& visit) {
  auto xs = checked_power(pmf.x_size(), n, kMaxEnumeratedPairs);
  auto ys = checked_power(pmf.y_size(), n, kMaxEnumeratedPairs);
  if (!xs || !ys || *xs > kMaxEnumeratedPairs / *ys) throw TooLarge("|X|^n |Y|^n exceeds 2^24");

  std::vector<std::vector<Symbol>> compatible(pmf.x_size());
  for (Symbol x = 0; x < pmf.x_size(); ++x)
    for (Symbol y = 0; y < pmf.y_size(); ++y)
      if (all_pairs || pmf.positive(x, y)) compatible[x].push_back(y);

  SequenceCodec xcodec(pmf.x_size(), n, kMaxEnumeratedPairs);
  SequencePair pair;
  pair.y.assign(n, 0);
  std::vector<std::size_t> digit(n);
  for (std::uint64_t xc = 0; xc < xcodec.count(); ++xc) {
    xcodec.decode_into(xc, pair.x);
    bool empty = false;
    for (std::size_t i = 0; i < n; ++i) {
      digit[i] = 0;
      if (compatible[pair.x[i]].empty()) empty = true;
    }
    if (empty) continue;
    while (true) {
      for (std::size_t i = 0; i < n; ++i) pair.y[i] = compatible[pair.x[i]][digit[i]];
      visit(static_cast<const SequencePair&>(pair));
      std::size_t i = n;
      while (i > 0 && ++digit[i - 1] == compatible[pair.x[i - 1]].size()) digit[--i] = 0;
      if (i == 0) break;
    }
  }
}

struct ZeroErrorCheck {
  bool passed = true;
  std::optional<SequencePair> counterexample;
  Sequence decoded;     // what the decoder produced for the counterexample
  std::string failure;  // exception text when the run itself broke
  std::uint64_t pairs_checked = 0;
};

/// Runs the code on every enumerated pair; stops at the first wrong decode.
inline ZeroErrorCheck exhaustive_zero_error_check(const InteractiveCode& code, const JointPMF& pmf,
                                                  bool all_pairs = false) {
  ZeroErrorCheck out;
  for_each_pair(pmf, code.blocklength(), all_pairs, [&](const SequencePair& pair) {
    if (!out.passed) return;
    ++out.pairs_checked;
    try {
      auto t = run_protocol(code, pair);
      if (t.decoded == pair.x) return;
      out.decoded = t.decoded;
    } catch (const ProtocolViolation& e) {
      out.failure = e.what();
    }
    out.passed = false;
    out.counterexample = pair;
  });
  return out;
}

inline ZeroErrorCheck exhaustive_zero_error_check(ProtocolId id, const JointPMF& pmf, std::size_t n, double rate,
                                                  double epsilon, std::uint64_t seed, bool all_pairs = false) {
  ProtocolParams params;
  params.n = n;
  params.rate = rate;
  params.epsilon = epsilon;
  params.bin_seed = binning_seed_for(seed);
  return exhaustive_zero_error_check(*build_protocol(id, pmf, params), pmf, all_pairs);
}

/// Support pairs grouped by the full transcript bit string they produce.
struct TranscriptPartition {
  std::map<std::string, std::vector<std::pair<std::uint64_t, std::uint64_t>>> classes;  // (x code, y code)
};

struct RectangleCheck {
  bool passed = true;
  bool rectangles = true;  // (x1,y1), (x2,y2) in a class => (x1,y2) in it when a support pair
  bool singletons = true;  // every class is {x} x D_x
  std::size_t classes = 0;
  std::string violation;
};

inline TranscriptPartition transcript_partition(const InteractiveCode& code, const JointPMF& pmf) {
  TranscriptPartition part;
  SequenceCodec xcodec(pmf.x_size(), code.blocklength(), kMaxEnumeratedPairs);
  SequenceCodec ycodec(pmf.y_size(), code.blocklength(), kMaxEnumeratedPairs);
  for_each_pair(pmf, code.blocklength(), false, [&](const SequencePair& pair) {
    auto t = run_protocol(code, pair);
    part.classes[t.concatenated().str()].emplace_back(xcodec.encode(pair.x), ycodec.encode(pair.y));
  });
  return part;
}

inline RectangleCheck rectangle_structure_check(const InteractiveCode& code, const JointPMF& pmf) {
  const auto part = transcript_partition(code, pmf);
  const std::uint64_t ycount = *checked_power(pmf.y_size(), code.blocklength(), kMaxEnumeratedPairs);
  std::unordered_map<std::uint64_t, const std::string*> class_of;
  for (const auto& [key, members] : part.classes)
    for (const auto& [x, y] : members) class_of[x * ycount + y] = &key;

  RectangleCheck out;
  out.classes = part.classes.size();
  for (const auto& [key, members] : part.classes) {
    std::vector<std::uint64_t> xs, ys;
    for (const auto& [x, y] : members) {
      xs.push_back(x);
      ys.push_back(y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    if (xs.size() != 1 && out.singletons) {
      out.singletons = false;
      out.violation = "transcript " + key + " is shared by " + std::to_string(xs.size()) + " source sequences";
    }
    for (auto x : xs)
      for (auto y : ys) {
        auto it = class_of.find(x * ycount + y);
        if (it != class_of.end() && it->second != &key && out.rectangles) {
          out.rectangles = false;
          out.violation = "transcript class " + key + " is not closed under exchanging y";
        }
      }
  }
  out.passed = out.rectangles && out.singletons;
  return out;
}

inline RectangleCheck rectangle_structure_check(ProtocolId id, const JointPMF& pmf, std::size_t n, double rate,
                                                double epsilon, std::uint64_t seed) {
  ProtocolParams params;
  params.n = n;
  params.rate = rate;
  params.epsilon = epsilon;
  params.bin_seed = binning_seed_for(seed);
  return rectangle_structure_check(*build_protocol(id, pmf, params), pmf);
}

struct CausalityCheck {
  bool passed = true;
  std::string violation;
};

/// Each message must be a function of its sender's own sequence and the
/// messages it has received. Two runs that agree on those inputs must send
/// the same next message; a disagreement exposes hidden dependence on the
/// other terminal's source.
inline CausalityCheck causality_check(const InteractiveCode& code, const JointPMF& pmf) {
  CausalityCheck out;
  std::map<std::string, std::string> seen;  // (side, own sequence, history) -> next message
  for_each_pair(pmf, code.blocklength(), false, [&](const SequencePair& pair) {
    if (!out.passed) return;
    auto t = run_protocol(code, pair);
    std::string history;
    for (std::size_t k = 0; k < t.messages.size(); ++k) {
      const bool forward = t.messages[k].direction == Direction::Forward;
      std::string own;
      for (auto s : forward ? pair.x : pair.y) own += std::to_string(s) + ",";
      // the sender has seen the other side's messages, which are a prefix of the history
      std::string key = (forward ? "x|" : "y|") + own + "|" + history;
      auto [it, fresh] = seen.emplace(key, t.messages[k].bits.str());
      if (!fresh && it->second != t.messages[k].bits.str()) {
        out.passed = false;
        out.violation = std::string(forward ? "forward" : "backward") + " message " + std::to_string(k + 1) +
                        " depends on the other terminal's sequence";
        return;
      }
      history += t.messages[k].bits.str() + "/";
    }
  });
  return out;
}

enum class ConverseVerdict { Pass, Flag, Skipped };

inline const char* to_string(ConverseVerdict v) {
  switch (v) {
    case ConverseVerdict::Pass: return "pass";
    case ConverseVerdict::Flag: return "flag";
    case ConverseVerdict::Skipped: return "skipped";
  }
  return "?";
}

/// Any zero-error code on a full-support source spends at least H(X) bits per
/// symbol in total. Sums below H(X) - slack are flagged; sources without
/// full support are skipped.
inline ConverseVerdict sum_rate_converse_check(const RateReport& report, const JointPMF& pmf, double slack = 0.05) {
  if (!pmf.full_support()) return ConverseVerdict::Skipped;
  return report.mean_rx + report.mean_ry >= entropy_x(pmf) - slack ? ConverseVerdict::Pass : ConverseVerdict::Flag;
}

/// Re-parses the concatenated transcript with the code's shared tables only
/// and demands identical message boundaries, tags, directions and rounds.
inline bool transcript_parse_roundtrip(std::span<const Message> messages, const InteractiveCode& code) {
  if (messages.empty()) return false;
  BitString all;
  for (const auto& m : messages) all.append(m.bits);
  try {
    auto parsed = code.parse(all);
    return std::equal(parsed.begin(), parsed.end(), messages.begin(), messages.end());
  } catch (const ProtocolViolation&) {
    return false;
  }
}

inline bool transcript_parse_roundtrip(const Transcript& transcript, const InteractiveCode& code) {
  return transcript_parse_roundtrip(transcript.messages, code);
}

}  // namespace zesc

#endif  // ZESC_VERIFICATION_HPP
