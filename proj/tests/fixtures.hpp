#ifndef ZESC_TESTS_FIXTURES_HPP
#define ZESC_TESTS_FIXTURES_HPP

#include "zesc/zesc.hpp"

#include <memory>

namespace zesc::testing {

/// Wraps a code and corrupts one decoder table entry: whenever the honest
/// decoder would output `victim`, the first symbol is flipped instead.
class CorruptedDecoder final : public InteractiveCode {
 public:
  CorruptedDecoder(std::unique_ptr<InteractiveCode> inner, Sequence victim, std::size_t x_size)
      : inner_(std::move(inner)), victim_(std::move(victim)), x_size_(x_size) {}

  std::string name() const override { return inner_->name() + "-corrupted"; }
  std::size_t blocklength() const override { return inner_->blocklength(); }
  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override { return inner_->x_terminal(std::move(x)); }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override { return inner_->y_terminal(std::move(y)); }
  std::vector<Message> parse(const BitString& bits) const override { return inner_->parse(bits); }
  bool is_success_path(std::span<const Message> m) const override { return inner_->is_success_path(m); }

  Sequence decode(std::span<const Message> messages, const Sequence& y) const override {
    auto x = inner_->decode(messages, y);
    if (x == victim_) x[0] = static_cast<Symbol>((x[0] + 1) % x_size_);
    return x;
  }

 private:
  std::unique_ptr<InteractiveCode> inner_;
  Sequence victim_;
  std::size_t x_size_;
};

/// Encoder that forgets its last symbol before encoding: distinct sources
/// share transcripts, so classes stop being of the form {x} x D_x.
class LossyEncoder final : public InteractiveCode {
 public:
  explicit LossyEncoder(std::unique_ptr<InteractiveCode> inner) : inner_(std::move(inner)) {}

  std::string name() const override { return inner_->name() + "-lossy"; }
  std::size_t blocklength() const override { return inner_->blocklength(); }
  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override {
    x.back() = 0;
    return inner_->x_terminal(std::move(x));
  }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override { return inner_->y_terminal(std::move(y)); }
  std::vector<Message> parse(const BitString& bits) const override { return inner_->parse(bits); }
  bool is_success_path(std::span<const Message> m) const override { return inner_->is_success_path(m); }
  Sequence decode(std::span<const Message> messages, const Sequence& y) const override {
    return inner_->decode(messages, y);
  }

 private:
  std::unique_ptr<InteractiveCode> inner_;
};

/// Non-causal fixture: the decoder's g_1 is [x == y], obtained by peeking at
/// the encoder's source through shared state. Then f_2 = x, always.
class PeekingCode final : public InteractiveCode {
 public:
  explicit PeekingCode(std::size_t n) : n_(n) {}

  std::string name() const override { return "peeking"; }
  std::size_t blocklength() const override { return n_; }

  std::unique_ptr<XTerminal> x_terminal(Sequence x) const override {
    *peek_ = x;
    return std::make_unique<Sender>(std::move(x));
  }
  std::unique_ptr<YTerminal> y_terminal(Sequence y) const override {
    return std::make_unique<Receiver>(std::move(y), peek_);
  }

  std::vector<Message> parse(const BitString& bits) const override {
    BitReader in(bits);
    std::vector<Message> out;
    in.read_bit();
    out.push_back({Direction::Forward, 1, Tag::Flag, in.slice(0)});
    in.read_bit();
    out.push_back({Direction::Backward, 1, Tag::Flag, in.slice(1)});
    in.read(static_cast<unsigned>(n_));
    out.push_back({Direction::Forward, 2, Tag::EscapeRaw, in.slice(2)});
    return out;
  }

  Sequence decode(std::span<const Message> messages, const Sequence&) const override {
    BitReader in(messages[2].bits);
    Sequence x(n_);
    for (auto& s : x) s = in.read_bit() ? 1 : 0;
    return x;
  }

  bool is_success_path(std::span<const Message>) const override { return false; }

 private:
  class Sender final : public XTerminal {
   public:
    explicit Sender(Sequence x) : x_(std::move(x)) {}
    std::optional<Message> next(std::span<const Message> received) override {
      BitString bits;
      if (sent_++ == 0) {
        bits.push(true);
        return Message{Direction::Forward, 0, Tag::Flag, bits};
      }
      if (received.size() != 1 || sent_ > 2) return std::nullopt;
      for (auto s : x_) bits.push(s != 0);
      return Message{Direction::Forward, 0, Tag::EscapeRaw, bits};
    }

   private:
    Sequence x_;
    int sent_ = 0;
  };

  class Receiver final : public YTerminal {
   public:
    Receiver(Sequence y, std::shared_ptr<Sequence> peek) : y_(std::move(y)), peek_(std::move(peek)) {}
    std::optional<Message> next(std::span<const Message> received) override {
      if (received.size() != 1) return std::nullopt;
      BitString bits;
      bits.push(*peek_ == y_);
      return Message{Direction::Backward, 0, Tag::Flag, bits};
    }

   private:
    Sequence y_;
    std::shared_ptr<Sequence> peek_;
  };

  std::size_t n_;
  std::shared_ptr<Sequence> peek_ = std::make_shared<Sequence>();
};

}  // namespace zesc::testing

#endif  // ZESC_TESTS_FIXTURES_HPP
