#ifndef ZESC_PROTOCOLS_HPP
#define ZESC_PROTOCOLS_HPP

#include "zesc/binning.hpp"
#include "zesc/bits.hpp"
#include "zesc/graphs.hpp"
#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"
#include "zesc/typicality.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace zesc {

// ===========================================================================
// Messages and transcripts

enum class Direction { Forward, Backward };

enum class Tag { EscapeRaw, BinIndex, TypeDescriptor, Flag, IntraBinIndex, Ack };

inline const char* to_string(Tag tag) {
  switch (tag) {
    case Tag::EscapeRaw: return "escape-raw";
    case Tag::BinIndex: return "bin-index";
    case Tag::TypeDescriptor: return "type-descriptor";
    case Tag::Flag: return "flag";
    case Tag::IntraBinIndex: return "intra-bin-index";
    case Tag::Ack: return "ack";
  }
  return "?";
}

/// One transmission. Forward messages are f_1, f_2, ... from the encoder;
/// backward messages g_1, g_2, ... come from the side-informed decoder.
struct Message {
  Direction direction = Direction::Forward;
  unsigned round = 1;
  Tag tag = Tag::Flag;
  BitString bits;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Transcript {
  std::vector<Message> messages;  // f_1, g_1, f_2, g_2, ...
  std::uint64_t forward_bits = 0;
  std::uint64_t backward_bits = 0;
  Sequence decoded;
  Sequence truth;
  bool success_path = false;

  BitString concatenated() const {
    BitString all;
    for (const auto& m : messages) all.append(m.bits);
    return all;
  }
};

/// Direction and round of the k-th message (0-based) under strict alternation.
inline Direction direction_of(std::size_t k) { return k % 2 == 0 ? Direction::Forward : Direction::Backward; }
inline unsigned round_of(std::size_t k) { return static_cast<unsigned>(k / 2 + 1); }

// ===========================================================================
// Terminals and the engine

/// The encoder's state machine. It sees its own source sequence (fixed at
/// construction) and the backward messages received so far, nothing else.
class XTerminal {
 public:
  virtual ~XTerminal() = default;
  /// Next forward message, or nullopt when the exchange is over.
  virtual std::optional<Message> next(std::span<const Message> received) = 0;
};

/// The decoder's state machine: its side information plus forward messages.
class YTerminal {
 public:
  virtual ~YTerminal() = default;
  virtual std::optional<Message> next(std::span<const Message> received) = 0;
};

/// A deterministic interactive code over blocks of `blocklength()` symbols,
/// with a decoder h(f_1, g_1, ..., y) and a framing parser driven only by
/// the shared tables.
class InteractiveCode {
 public:
  virtual ~InteractiveCode() = default;

  virtual std::string name() const = 0;
  virtual std::size_t blocklength() const = 0;
  virtual std::unique_ptr<XTerminal> x_terminal(Sequence x) const = 0;
  virtual std::unique_ptr<YTerminal> y_terminal(Sequence y) const = 0;

  /// Splits a concatenated transcript back into messages.
  /// Throws ProtocolViolation when the bits are not a transcript this code emits.
  virtual std::vector<Message> parse(const BitString& bits) const = 0;

  /// Recovers x from the messages and y. Throws ProtocolViolation on
  /// transcripts the code never emits.
  virtual Sequence decode(std::span<const Message> messages, const Sequence& y) const = 0;

  virtual bool is_success_path(std::span<const Message> messages) const = 0;
};

/// Alternates the two terminals until one of them ends the exchange, then
/// decodes. Each terminal only ever sees the other's messages.
inline Transcript run_protocol(const InteractiveCode& code, const SequencePair& pair) {
  constexpr std::size_t kMaxMessages = 64;
  if (pair.x.size() != code.blocklength() || pair.y.size() != code.blocklength())
    throw BlocklengthMismatch("sequence length does not match the code blocklength");

  auto sender = code.x_terminal(pair.x);
  auto receiver = code.y_terminal(pair.y);
  std::vector<Message> forward, backward;
  Transcript t;

  auto stamp = [&](Message m) {
    m.direction = direction_of(t.messages.size());
    m.round = round_of(t.messages.size());
    (m.direction == Direction::Forward ? t.forward_bits : t.backward_bits) += m.bits.size();
    t.messages.push_back(m);
    return m;
  };

  while (t.messages.size() < kMaxMessages) {
    auto f = sender->next(backward);
    if (!f) break;
    forward.push_back(stamp(std::move(*f)));
    auto g = receiver->next(forward);
    if (!g) break;
    backward.push_back(stamp(std::move(*g)));
  }
  if (t.messages.empty()) throw ProtocolViolation("encoder sent nothing");

  t.truth = pair.x;
  t.decoded = code.decode(t.messages, pair.y);
  t.success_path = code.is_success_path(t.messages);
  return t;
}

namespace detail {

inline Message make_message(Tag tag, BitString bits) { return Message{Direction::Forward, 0, tag, std::move(bits)}; }

inline void append_raw(BitString& out, const Sequence& x, unsigned symbol_bits) {
  for (auto s : x) out.append(s, symbol_bits);
}

inline Sequence read_raw(BitReader& in, std::size_t n, std::size_t radix, unsigned symbol_bits) {
  Sequence x(n);
  for (auto& s : x) {
    auto v = in.read(symbol_bits);
    if (v >= radix) throw ProtocolViolation("raw symbol outside the alphabet");
    s = static_cast<Symbol>(v);
  }
  return x;
}

inline void expect_end(const BitReader& in) {
  if (!in.at_end()) throw ProtocolViolation("trailing bits in message");
}

inline Message parsed(std::size_t k, Tag tag, const BitReader& in, std::size_t start) {
  return Message{direction_of(k), round_of(k), tag, in.slice(start)};
}

}  // namespace detail

// ===========================================================================
// Protocol A: typical-set binning with an index echo

/// Encoder escapes with the raw sequence when x is atypical, otherwise sends
/// its bin. The decoder answers with the index of the smallest-index bin
/// member jointly typical with y (or 0 if there is none), and the encoder
/// confirms with a single 1 or falls back to the raw sequence.
///
///   f_1 = 0.x | 1.bin        g_1 = 0 | 1.index        f_2 = 1 | 0.x
class BinningProtocol final : public InteractiveCode {
 public:
  BinningProtocol(JointPMF pmf, std::size_t n, double epsilon, std::shared_ptr<const BinAssignment> bins)
      : pmf_(std::move(pmf)),
        n_(n),
        epsilon_(epsilon),
        bins_(std::move(bins)),
        codec_(pmf_.x_size(), n),
        x_window_(pmf_.marginal_x(), n, epsilon),
        y_window_(pmf_.marginal_y(), n, epsilon),
        symbol_bits_(ceil_log2(pmf_.x_size())) {
    if (!bins_ || bins_->blocklength() != n) throw std::invalid_argument("bin assignment blocklength mismatch");
  }

  /// Enumerates A_eps(X) at blocklength n and bins it at rate R.
  static std::unique_ptr<BinningProtocol> build(const JointPMF& pmf, std::size_t n, double rate, double epsilon,
                                                std::uint64_t bin_seed) {
    auto typical = enumerate_typical_set(pmf.marginal_x(), n, epsilon);
    auto bins = std::make_shared<const BinAssignment>(random_binning(std::move(typical), rate, n, bin_seed));
    return std::make_unique<BinningProtocol>(pmf, n, epsilon, std::move(bins));
  }

  std::string name() const override { return "A"; }
  std::size_t blocklength() const override { return n_; }
  const JointPMF& pmf() const { return pmf_; }
  const BinAssignment& bins() const { return *bins_; }
  double epsilon() const { return epsilon_; }
  unsigned raw_bits() const { return static_cast<unsigned>(n_) * symbol_bits_; }

  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override {
    return std::make_unique<Sender>(*this, std::move(x));
  }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override {
    return std::make_unique<Receiver>(*this, std::move(y));
  }

  std::vector<Message> parse(const BitString& bits) const override {
    BitReader in(bits);
    std::vector<Message> out;
    std::size_t start = 0;
    if (!in.read_bit()) {
      detail::read_raw(in, n_, pmf_.x_size(), symbol_bits_);
      out.push_back(detail::parsed(0, Tag::EscapeRaw, in, start));
      detail::expect_end(in);
      return out;
    }
    const auto bin = read_bin(in);
    out.push_back(detail::parsed(0, Tag::BinIndex, in, start));

    start = in.position();
    bool g = in.read_bit();
    if (g) in.read(ceil_log2(bins_->bin_size(bin)));
    out.push_back(detail::parsed(1, g ? Tag::IntraBinIndex : Tag::Flag, in, start));

    start = in.position();
    bool ack = in.read_bit();
    if (ack && !g) throw ProtocolViolation("acknowledgement without a proposed index");
    if (!ack) detail::read_raw(in, n_, pmf_.x_size(), symbol_bits_);
    out.push_back(detail::parsed(2, ack ? Tag::Ack : Tag::EscapeRaw, in, start));
    detail::expect_end(in);
    return out;
  }

  Sequence decode(std::span<const Message> messages, const Sequence& /*y*/) const override {
    if (messages.empty()) throw ProtocolViolation("empty transcript");
    BitReader f1(messages[0].bits);
    if (!f1.read_bit()) {
      if (messages.size() != 1) throw ProtocolViolation("messages after an escape");
      auto x = detail::read_raw(f1, n_, pmf_.x_size(), symbol_bits_);
      detail::expect_end(f1);
      return x;
    }
    const auto bin = read_bin(f1);
    if (messages.size() != 3) throw ProtocolViolation("binned transcript must have three messages");
    BitReader g1(messages[1].bits);
    BitReader f2(messages[2].bits);
    const bool proposed = g1.read_bit();
    if (f2.read_bit()) {
      if (!proposed) throw ProtocolViolation("acknowledgement without a proposed index");
      const auto members = bins_->members(bin);
      const auto index = g1.read(ceil_log2(members.size()));
      if (index >= members.size()) throw ProtocolViolation("intra-bin index out of range");
      return codec_.decode(members[index]);
    }
    auto x = detail::read_raw(f2, n_, pmf_.x_size(), symbol_bits_);
    detail::expect_end(f2);
    return x;
  }

  bool is_success_path(std::span<const Message> messages) const override {
    return messages.size() == 3 && messages[0].tag == Tag::BinIndex && messages[1].tag == Tag::IntraBinIndex &&
           messages[2].tag == Tag::Ack;
  }

 private:
  std::uint64_t read_bin(BitReader& in) const {
    const auto bin = in.read(bins_->bin_id_bits()) + 1;
    if (bin > bins_->bin_count()) throw ProtocolViolation("bin id out of range");
    return bin;
  }

  class Sender final : public XTerminal {
   public:
    Sender(const BinningProtocol& code, Sequence x) : code_(code), x_(std::move(x)) {}

    std::optional<Message> next(std::span<const Message> received) override {
      if (sent_ == 0) {
        ++sent_;
        BitString bits;
        if (!code_.x_window_.admits(empirical_type(x_, code_.pmf_.x_size()))) {
          bits.push(false);
          detail::append_raw(bits, x_, code_.symbol_bits_);
          return detail::make_message(Tag::EscapeRaw, std::move(bits));
        }
        const auto code = code_.codec_.encode(x_);
        const auto bin = code_.bins_->bin_of(code);
        if (!bin) throw std::logic_error("typical sequence missing from the bin assignment");
        bits.push(true);
        bits.append(*bin - 1, code_.bins_->bin_id_bits());
        return detail::make_message(Tag::BinIndex, std::move(bits));
      }
      if (sent_ == 1 && received.size() == 1) {
        ++sent_;
        BitReader g1(received[0].bits);
        if (g1.read_bit()) {
          const auto code = code_.codec_.encode(x_);
          const auto own = code_.bins_->index_in_bin(code);
          const auto width = ceil_log2(code_.bins_->bin_size(*code_.bins_->bin_of(code)));
          if (own && g1.read(width) + 1 == *own) {
            BitString ack;
            ack.push(true);
            return detail::make_message(Tag::Ack, std::move(ack));
          }
        }
        BitString bits;
        bits.push(false);
        detail::append_raw(bits, x_, code_.symbol_bits_);
        return detail::make_message(Tag::EscapeRaw, std::move(bits));
      }
      return std::nullopt;
    }

   private:
    const BinningProtocol& code_;
    Sequence x_;
    int sent_ = 0;
  };

  class Receiver final : public YTerminal {
   public:
    Receiver(const BinningProtocol& code, Sequence y)
        : code_(code), y_(std::move(y)), probe_(code.pmf_, code.n_, code.epsilon_) {}

    std::optional<Message> next(std::span<const Message> received) override {
      if (received.size() != 1) return std::nullopt;
      BitReader f1(received[0].bits);
      if (!f1.read_bit()) return std::nullopt;
      const auto bin = code_.read_bin(f1);
      BitString bits;
      if (code_.y_window_.admits(empirical_type(y_, code_.pmf_.y_size()))) {
        auto found = jointly_typical_members(*code_.bins_, bin, y_, probe_, 1);
        if (!found.empty()) {
          bits.push(true);
          bits.append(found.front().first - 1, ceil_log2(code_.bins_->bin_size(bin)));
          return detail::make_message(Tag::IntraBinIndex, std::move(bits));
        }
      }
      bits.push(false);
      return detail::make_message(Tag::Flag, std::move(bits));
    }

   private:
    const BinningProtocol& code_;
    Sequence y_;
    JointTypicalityProbe probe_;
  };

  JointPMF pmf_;
  std::size_t n_;
  double epsilon_;
  std::shared_ptr<const BinAssignment> bins_;
  SequenceCodec codec_;
  TypicalityWindow x_window_;
  TypicalityWindow y_window_;
  unsigned symbol_bits_;
};

// ===========================================================================
// Protocol B: type first, then bin

/// The encoder first sends the empirical type of x. From that type and its
/// own y the decoder decides whether (x, y) is jointly typical; for
/// cycle-free supports the joint type is forced by the two marginal types.
/// On a yes the encoder sends the bin, and the decoder reports whether
/// exactly one bin member is jointly typical with y. Any failure ends with
/// the raw sequence.
///
///   f_1 = type(x)   g_1 = 1|0   f_2 = bin | x   g_2 = 1|0 (after a bin)   f_3 = x (after g_2 = 0)
class TypeBinningProtocol final : public InteractiveCode {
 public:
  TypeBinningProtocol(JointPMF pmf, std::size_t n, double epsilon, std::shared_ptr<const BinAssignment> bins)
      : pmf_(std::move(pmf)),
        n_(n),
        epsilon_(epsilon),
        bins_(std::move(bins)),
        codec_(pmf_.x_size(), n),
        support_(build_connectivity_graph(pmf_)),
        cycle_free_(is_cycle_free(support_)),
        x_window_(pmf_.marginal_x(), n, epsilon),
        y_window_(pmf_.marginal_y(), n, epsilon),
        xy_window_(pmf_.cells(), n, epsilon),
        symbol_bits_(ceil_log2(pmf_.x_size())),
        count_bits_(ceil_log2(n + 1)) {
    if (!bins_ || bins_->blocklength() != n) throw std::invalid_argument("bin assignment blocklength mismatch");
  }

  static std::unique_ptr<TypeBinningProtocol> build(const JointPMF& pmf, std::size_t n, double rate,
                                                    double epsilon, std::uint64_t bin_seed) {
    auto typical = enumerate_typical_set(pmf.marginal_x(), n, epsilon);
    auto bins = std::make_shared<const BinAssignment>(random_binning(std::move(typical), rate, n, bin_seed));
    return std::make_unique<TypeBinningProtocol>(pmf, n, epsilon, std::move(bins));
  }

  std::string name() const override { return "B"; }
  std::size_t blocklength() const override { return n_; }
  const JointPMF& pmf() const { return pmf_; }
  const BinAssignment& bins() const { return *bins_; }
  bool cycle_free() const { return cycle_free_; }
  unsigned type_bits() const { return static_cast<unsigned>(pmf_.x_size()) * count_bits_; }
  unsigned raw_bits() const { return static_cast<unsigned>(n_) * symbol_bits_; }

  /// The decoder's g_1 verdict: x typical (read off its type), y typical, and
  /// every joint type consistent with both marginals and the support typical.
  bool joint_typicality_verdict(const TypeClass& qx, const TypeClass& qy) const {
    if (!x_window_.admits(qx) || !y_window_.admits(qy)) return false;
    if (cycle_free_) {
      auto inferred = infer_joint_type(qx, qy, support_);
      return inferred.status == InferenceStatus::Unique && xy_window_.admits(*inferred.joint);
    }
    auto all = consistent_joint_types(qx, qy, support_);
    return !all.empty() && std::all_of(all.begin(), all.end(), [&](const auto& t) { return xy_window_.admits(t); });
  }

  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override {
    return std::make_unique<Sender>(*this, std::move(x));
  }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override {
    return std::make_unique<Receiver>(*this, std::move(y));
  }

  std::vector<Message> parse(const BitString& bits) const override {
    BitReader in(bits);
    std::vector<Message> out;
    read_type(in);
    out.push_back(detail::parsed(0, Tag::TypeDescriptor, in, 0));

    std::size_t start = in.position();
    const bool g1 = in.read_bit();
    out.push_back(detail::parsed(1, Tag::Flag, in, start));

    start = in.position();
    if (!g1) {
      detail::read_raw(in, n_, pmf_.x_size(), symbol_bits_);
      out.push_back(detail::parsed(2, Tag::EscapeRaw, in, start));
      detail::expect_end(in);
      return out;
    }
    read_bin(in);
    out.push_back(detail::parsed(2, Tag::BinIndex, in, start));

    start = in.position();
    const bool g2 = in.read_bit();
    out.push_back(detail::parsed(3, Tag::Flag, in, start));
    if (!g2) {
      start = in.position();
      detail::read_raw(in, n_, pmf_.x_size(), symbol_bits_);
      out.push_back(detail::parsed(4, Tag::EscapeRaw, in, start));
    }
    detail::expect_end(in);
    return out;
  }

  Sequence decode(std::span<const Message> messages, const Sequence& y) const override {
    if (messages.size() < 3) throw ProtocolViolation("type-binning transcript too short");
    BitReader g1(messages[1].bits);
    BitReader f2(messages[2].bits);
    if (!g1.read_bit()) {
      if (messages.size() != 3) throw ProtocolViolation("messages after the raw fallback");
      auto x = detail::read_raw(f2, n_, pmf_.x_size(), symbol_bits_);
      detail::expect_end(f2);
      return x;
    }
    const auto bin = read_bin(f2);
    if (messages.size() < 4) throw ProtocolViolation("missing uniqueness verdict");
    BitReader g2(messages[3].bits);
    if (g2.read_bit()) {
      if (messages.size() != 4) throw ProtocolViolation("messages after a successful stop");
      JointTypicalityProbe probe(pmf_, n_, epsilon_);
      auto found = jointly_typical_members(*bins_, bin, y, probe, 2);
      if (found.size() != 1) throw ProtocolViolation("stop signalled without a unique candidate");
      return codec_.decode(found.front().second);
    }
    if (messages.size() != 5) throw ProtocolViolation("missing raw sequence after a failed bin");
    BitReader f3(messages[4].bits);
    auto x = detail::read_raw(f3, n_, pmf_.x_size(), symbol_bits_);
    detail::expect_end(f3);
    return x;
  }

  bool is_success_path(std::span<const Message> messages) const override {
    return messages.size() == 4 && messages[2].tag == Tag::BinIndex && messages[3].bits == BitString("1");
  }

 private:
  TypeClass read_type(BitReader& in) const {
    TypeClass t{std::vector<std::uint32_t>(pmf_.x_size(), 0), static_cast<std::uint32_t>(n_)};
    std::uint64_t total = 0;
    for (auto& c : t.counts) {
      c = static_cast<std::uint32_t>(in.read(count_bits_));
      total += c;
    }
    if (total != n_) throw ProtocolViolation("type counts do not sum to the blocklength");
    return t;
  }

  std::uint64_t read_bin(BitReader& in) const {
    const auto bin = in.read(bins_->bin_id_bits()) + 1;
    if (bin > bins_->bin_count()) throw ProtocolViolation("bin id out of range");
    return bin;
  }

  class Sender final : public XTerminal {
   public:
    Sender(const TypeBinningProtocol& code, Sequence x) : code_(code), x_(std::move(x)) {}

    std::optional<Message> next(std::span<const Message> received) override {
      BitString bits;
      if (sent_ == 0) {
        ++sent_;
        for (auto c : empirical_type(x_, code_.pmf_.x_size()).counts) bits.append(c, code_.count_bits_);
        return detail::make_message(Tag::TypeDescriptor, std::move(bits));
      }
      if (sent_ == 1 && received.size() == 1) {
        ++sent_;
        if (received[0].bits == BitString("1")) {
          auto bin = code_.bins_->bin_of(code_.codec_.encode(x_));
          if (!bin) throw ProtocolViolation("decoder accepted an atypical sequence");
          binned_ = true;
          bits.append(*bin - 1, code_.bins_->bin_id_bits());
          return detail::make_message(Tag::BinIndex, std::move(bits));
        }
        detail::append_raw(bits, x_, code_.symbol_bits_);
        return detail::make_message(Tag::EscapeRaw, std::move(bits));
      }
      if (sent_ == 2 && binned_ && received.size() == 2 && received[1].bits == BitString("0")) {
        ++sent_;
        detail::append_raw(bits, x_, code_.symbol_bits_);
        return detail::make_message(Tag::EscapeRaw, std::move(bits));
      }
      return std::nullopt;
    }

   private:
    const TypeBinningProtocol& code_;
    Sequence x_;
    int sent_ = 0;
    bool binned_ = false;
  };

  class Receiver final : public YTerminal {
   public:
    Receiver(const TypeBinningProtocol& code, Sequence y)
        : code_(code), y_(std::move(y)), probe_(code.pmf_, code.n_, code.epsilon_) {}

    std::optional<Message> next(std::span<const Message> received) override {
      BitString bits;
      if (received.size() == 1) {
        BitReader f1(received[0].bits);
        const auto qx = code_.read_type(f1);
        accepted_ = code_.joint_typicality_verdict(qx, empirical_type(y_, code_.pmf_.y_size()));
        bits.push(accepted_);
        return detail::make_message(Tag::Flag, std::move(bits));
      }
      if (received.size() == 2 && accepted_) {
        BitReader f2(received[1].bits);
        const auto bin = code_.read_bin(f2);
        auto found = jointly_typical_members(*code_.bins_, bin, y_, probe_, 2);
        bits.push(found.size() == 1);
        return detail::make_message(Tag::Flag, std::move(bits));
      }
      return std::nullopt;
    }

   private:
    const TypeBinningProtocol& code_;
    Sequence y_;
    JointTypicalityProbe probe_;
    bool accepted_ = false;
  };

  JointPMF pmf_;
  std::size_t n_;
  double epsilon_;
  std::shared_ptr<const BinAssignment> bins_;
  SequenceCodec codec_;
  ConnectivityGraph support_;
  bool cycle_free_;
  TypicalityWindow x_window_;
  TypicalityWindow y_window_;
  TypicalityWindow xy_window_;
  unsigned symbol_bits_;
  unsigned count_bits_;
};

// ===========================================================================
// Protocol C: binning applied to the colors of a zero-error coloring

/// Joint distribution of (c(X^k), Y^k) for a coloring of X^k. Y blocks are
/// named by joining their symbols with '.'.
inline JointPMF color_source(const JointPMF& pmf, const ZeroErrorColoring& coloring) {
  const std::size_t k = coloring.n;
  SequenceCodec xblocks(pmf.x_size(), k, std::uint64_t{1} << 16);
  SequenceCodec yblocks(pmf.y_size(), k, std::uint64_t{1} << 16);
  if (xblocks.count() * yblocks.count() > (std::uint64_t{1} << 16))
    throw TooLarge("block alphabet too large for the color source");
  if (coloring.color_of.size() != xblocks.count()) throw InvalidColoring("coloring does not cover X^k");

  std::vector<std::string> colors, ynames;
  for (std::size_t c = 0; c < coloring.color_count(); ++c) colors.push_back("c" + std::to_string(c));
  Sequence xs, ys;
  for (std::uint64_t yb = 0; yb < yblocks.count(); ++yb) {
    yblocks.decode_into(yb, ys);
    std::string name;
    for (std::size_t i = 0; i < k; ++i) name += (i ? "." : "") + pmf.y_alphabet()[ys[i]];
    ynames.push_back(name);
  }
  std::vector<std::vector<Rational>> joint(colors.size(), std::vector<Rational>(ynames.size(), Rational(0)));
  for (std::uint64_t xb = 0; xb < xblocks.count(); ++xb) {
    xblocks.decode_into(xb, xs);
    for (std::uint64_t yb = 0; yb < yblocks.count(); ++yb) {
      yblocks.decode_into(yb, ys);
      Rational p = 1;
      for (std::size_t i = 0; i < k && p != 0; ++i) p *= pmf.exact(xs[i], ys[i]);
      joint[coloring.color_of[xb]][yb] += p;
    }
  }
  return JointPMF(std::move(colors), std::move(ynames), std::move(joint));
}

/// Runs the binning protocol on the color sequence c(x_1 block), c(x_2 block),
/// ... against y blocks; the decoder recovers the colors, then each x block
/// as the unique member of its color class compatible with its y block.
class ColoringProtocol final : public InteractiveCode {
 public:
  /// `rate` is in bits per source symbol; `outer_n` counts blocks.
  ColoringProtocol(const JointPMF& pmf, ZeroErrorColoring coloring, std::size_t outer_n, double rate,
                   double epsilon, std::uint64_t bin_seed)
      : pmf_(pmf),
        coloring_(std::move(coloring)),
        k_(coloring_.n),
        outer_n_(outer_n),
        xblocks_(pmf.x_size(), k_, std::uint64_t{1} << 16),
        yblocks_(pmf.y_size(), k_, std::uint64_t{1} << 16) {
    ConfusabilityGraph graph(pmf_, k_);
    if (auto conflict = find_coloring_conflict(graph, coloring_))
      throw InvalidColoring("confusable blocks " + std::to_string(conflict->first) + " and " +
                            std::to_string(conflict->second) + " share a color");
    inner_ = BinningProtocol::build(color_source(pmf_, coloring_), outer_n, rate * static_cast<double>(k_),
                                    epsilon, bin_seed);

    // inverse_[c * |Y^k| + yb]: the x block of color c compatible with yb
    inverse_.assign(coloring_.color_count() * yblocks_.count(), kNone);
    fallback_.assign(coloring_.color_count(), kNone);
    Sequence xs, ys;
    for (std::uint64_t xb = 0; xb < xblocks_.count(); ++xb) {
      const auto c = coloring_.color_of[xb];
      if (fallback_[c] == kNone) fallback_[c] = xb;
      xblocks_.decode_into(xb, xs);
      for (std::uint64_t yb = 0; yb < yblocks_.count(); ++yb) {
        yblocks_.decode_into(yb, ys);
        bool ok = true;
        for (std::size_t i = 0; i < k_ && ok; ++i) ok = pmf_.positive(xs[i], ys[i]);
        if (ok) inverse_[c * yblocks_.count() + yb] = xb;
      }
    }
  }

  std::string name() const override { return "C"; }
  std::size_t blocklength() const override { return outer_n_ * k_; }
  const ZeroErrorColoring& coloring() const { return coloring_; }
  const BinningProtocol& inner() const { return *inner_; }

  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override { return inner_->x_terminal(colors_of(x)); }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override { return inner_->y_terminal(blocks_of(y)); }
  std::vector<Message> parse(const BitString& bits) const override { return inner_->parse(bits); }
  bool is_success_path(std::span<const Message> m) const override { return inner_->is_success_path(m); }

  Sequence decode(std::span<const Message> messages, const Sequence& y) const override {
    const auto colors = inner_->decode(messages, blocks_of(y));
    const auto yb = blocks_of(y);
    Sequence x;
    x.reserve(blocklength());
    Sequence block;
    for (std::size_t b = 0; b < outer_n_; ++b) {
      auto xb = inverse_[colors[b] * yblocks_.count() + yb[b]];
      if (xb == kNone) xb = fallback_[colors[b]];  // y block incompatible with every member
      xblocks_.decode_into(xb, block);
      x.insert(x.end(), block.begin(), block.end());
    }
    return x;
  }

 private:
  static constexpr std::uint64_t kNone = ~std::uint64_t{0};

  Sequence colors_of(const Sequence& x) const {
    if (x.size() != blocklength()) throw BlocklengthMismatch("sequence length does not match the code");
    Sequence out;
    for (std::size_t b = 0; b < outer_n_; ++b) {
      Sequence block(x.begin() + static_cast<std::ptrdiff_t>(b * k_),
                     x.begin() + static_cast<std::ptrdiff_t>((b + 1) * k_));
      out.push_back(coloring_.color_of[xblocks_.encode(block)]);
    }
    return out;
  }

  Sequence blocks_of(const Sequence& y) const {
    if (y.size() != blocklength()) throw BlocklengthMismatch("sequence length does not match the code");
    Sequence out;
    for (std::size_t b = 0; b < outer_n_; ++b) {
      Sequence block(y.begin() + static_cast<std::ptrdiff_t>(b * k_),
                     y.begin() + static_cast<std::ptrdiff_t>((b + 1) * k_));
      out.push_back(static_cast<Symbol>(yblocks_.encode(block)));
    }
    return out;
  }

  JointPMF pmf_;
  ZeroErrorColoring coloring_;
  std::size_t k_;
  std::size_t outer_n_;
  SequenceCodec xblocks_;
  SequenceCodec yblocks_;
  std::unique_ptr<BinningProtocol> inner_;
  std::vector<std::uint64_t> inverse_;
  std::vector<std::uint64_t> fallback_;
};

// ===========================================================================
// Construction by id

enum class ProtocolId { A, B, C };

inline ProtocolId parse_protocol_id(std::string_view s) {
  if (s == "A" || s == "a") return ProtocolId::A;
  if (s == "B" || s == "b") return ProtocolId::B;
  if (s == "C" || s == "c") return ProtocolId::C;
  throw std::invalid_argument("protocol must be A, B or C");
}

inline const char* to_string(ProtocolId id) {
  switch (id) {
    case ProtocolId::A: return "A";
    case ProtocolId::B: return "B";
    case ProtocolId::C: return "C";
  }
  return "?";
}

struct ProtocolParams {
  std::size_t n = 8;       // source symbols per run (for C: outer blocks * inner_n)
  double rate = 0.5;       // bits per source symbol
  double epsilon = 0.1;
  std::uint64_t bin_seed = 1;
  std::size_t inner_n = 1;  // coloring blocklength for C
  std::uint64_t coloring_budget = std::uint64_t{1} << 20;
};

inline std::unique_ptr<InteractiveCode> build_protocol(ProtocolId id, const JointPMF& pmf,
                                                       const ProtocolParams& params) {
  switch (id) {
    case ProtocolId::A:
      return BinningProtocol::build(pmf, params.n, params.rate, params.epsilon, params.bin_seed);
    case ProtocolId::B:
      return TypeBinningProtocol::build(pmf, params.n, params.rate, params.epsilon, params.bin_seed);
    case ProtocolId::C: {
      if (params.inner_n == 0 || params.n % params.inner_n != 0)
        throw std::invalid_argument("blocklength must be a multiple of the coloring blocklength");
      auto coloring = min_entropy_coloring(pmf, params.inner_n, params.coloring_budget);
      return std::make_unique<ColoringProtocol>(pmf, std::move(coloring), params.n / params.inner_n, params.rate,
                                                params.epsilon, params.bin_seed);
    }
  }
  throw std::invalid_argument("unknown protocol");
}

// ===========================================================================
// Monte Carlo rate estimation

struct RateReport {
  std::string protocol;
  std::size_t n = 0;
  double rate = 0.0;
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean_rx = 0.0;           // forward bits per source symbol
  double mean_ry = 0.0;           // backward bits per source symbol
  double success_fraction = 0.0;  // share of runs on the success path
  double ci_rx = 0.0;             // 95% half-widths
  double ci_ry = 0.0;
};

/// Hook applied to each sampled pair before the run, e.g. to merge side
/// information symbols. Receives the trial's own random stream.
using PairTransform = std::function<void(SequencePair&, std::mt19937_64&)>;

/// Averages per-symbol rates over i.i.d. blocks drawn from `source`. Trial t
/// uses the stream derive_seed(master_seed, t), so results do not depend on
/// evaluation order. Any decoding error aborts with ZeroErrorViolated.
inline RateReport monte_carlo_rates(const InteractiveCode& code, const JointPMF& source, std::size_t trials,
                                    std::uint64_t master_seed, const PairTransform& transform = {}) {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  const double n = static_cast<double>(code.blocklength());
  double sum_x = 0, sum_x2 = 0, sum_y = 0, sum_y2 = 0;
  std::size_t successes = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(derive_seed(master_seed, t));
    auto pair = sample_iid(source, code.blocklength(), rng);
    if (transform) transform(pair, rng);
    auto transcript = run_protocol(code, pair);
    if (transcript.decoded != transcript.truth)
      throw ZeroErrorViolated("protocol " + code.name() + " decoded trial " + std::to_string(t) + " incorrectly");
    const double rx = static_cast<double>(transcript.forward_bits) / n;
    const double ry = static_cast<double>(transcript.backward_bits) / n;
    sum_x += rx;
    sum_x2 += rx * rx;
    sum_y += ry;
    sum_y2 += ry * ry;
    successes += transcript.success_path ? 1 : 0;
  }
  const double k = static_cast<double>(trials);
  auto halfwidth = [&](double s, double s2) {
    if (trials < 2) return 0.0;
    const double var = std::max(0.0, (s2 - s * s / k) / (k - 1));
    return 1.96 * std::sqrt(var / k);
  };
  RateReport r;
  r.protocol = code.name();
  r.n = code.blocklength();
  r.trials = trials;
  r.seed = master_seed;
  r.mean_rx = sum_x / k;
  r.mean_ry = sum_y / k;
  r.success_fraction = static_cast<double>(successes) / k;
  r.ci_rx = halfwidth(sum_x, sum_x2);
  r.ci_ry = halfwidth(sum_y, sum_y2);
  return r;
}

/// Shared-table seed used when a run is described by a single master seed.
inline std::uint64_t binning_seed_for(std::uint64_t master_seed) { return derive_seed(master_seed, 0xb1a5b1a5ULL); }

inline RateReport monte_carlo_rates(ProtocolId id, const JointPMF& pmf, std::size_t n, double rate, double epsilon,
                                    std::size_t trials, std::uint64_t master_seed, std::size_t inner_n = 1) {
  ProtocolParams params;
  params.n = n;
  params.rate = rate;
  params.epsilon = epsilon;
  params.bin_seed = binning_seed_for(master_seed);
  params.inner_n = inner_n;
  auto code = build_protocol(id, pmf, params);
  auto report = monte_carlo_rates(*code, pmf, trials, master_seed);
  report.rate = rate;
  report.epsilon = epsilon;
  return report;
}

}  // namespace zesc

#endif  // ZESC_PROTOCOLS_HPP
