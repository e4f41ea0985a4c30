#ifndef ZESC_BITS_HPP
#define ZESC_BITS_HPP

#include "zesc/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace zesc {

/// Finite bit string, most significant bit of every field first.
class BitString {
 public:
  BitString() = default;
  explicit BitString(const std::string& text) {
    for (char c : text) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit strings use only '0' and '1'");
      bits_.push_back(c == '1');
    }
  }

  void push(bool bit) { bits_.push_back(bit); }

  void append(std::uint64_t value, unsigned width) {
    if (width < 64 && (value >> width) != 0) throw std::invalid_argument("value does not fit in field width");
    for (unsigned i = width; i-- > 0;) bits_.push_back(((value >> i) & 1U) != 0);
  }

  void append(const BitString& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }

  std::string str() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

/// Sequential reader; running past the end is a framing error.
class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::size_t start = 0) : bits_(bits), pos_(start) {}

  bool read_bit() {
    if (pos_ >= bits_.size()) throw ProtocolViolation("transcript ended mid-field");
    return bits_[pos_++];
  }

  std::uint64_t read(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (read_bit() ? 1U : 0U);
    return v;
  }

  /// The bits consumed since `from`.
  BitString slice(std::size_t from) const {
    BitString out;
    for (std::size_t i = from; i < pos_; ++i) out.push(bits_[i]);
    return out;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_.size() - pos_; }
  bool at_end() const { return pos_ == bits_.size(); }

 private:
  const BitString& bits_;
  std::size_t pos_;
};

}  // namespace zesc

#endif  // ZESC_BITS_HPP
