#ifndef ZESC_SEQUENCES_HPP
#define ZESC_SEQUENCES_HPP

#include "zesc/errors.hpp"
#include "zesc/source_model.hpp"

#include <cstdint>
#include <limits>
#include <string>

namespace zesc {

/// Bits needed to write any of `count` distinct values (0 when count <= 1).
inline unsigned ceil_log2(std::uint64_t count) {
  unsigned bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < count) ++bits;
  return bits;
}

/// radix^n, or nullopt when it exceeds `limit`.
inline std::optional<std::uint64_t> checked_power(std::uint64_t radix, std::size_t n,
                                                  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (radix != 0 && v > limit / radix) return std::nullopt;
    v *= radix;
  }
  if (v > limit) return std::nullopt;
  return v;
}

/// Bijection between X^n and [0, radix^n). The first symbol is the most
/// significant digit, so numeric order of codes is lexicographic order.
class SequenceCodec {
 public:
  SequenceCodec(std::size_t radix, std::size_t n, std::uint64_t limit = std::uint64_t{1} << 40)
      : radix_(radix), n_(n) {
    if (radix == 0 || n == 0) throw std::invalid_argument("codec needs radix >= 1 and n >= 1");
    auto count = checked_power(radix, n, limit);
    if (!count)
      throw TooLarge(std::to_string(radix) + "^" + std::to_string(n) + " sequences exceed the enumeration limit");
    count_ = *count;
  }

  std::size_t radix() const { return radix_; }
  std::size_t length() const { return n_; }
  std::uint64_t count() const { return count_; }

  std::uint64_t encode(const Sequence& seq) const {
    if (seq.size() != n_) throw std::invalid_argument("sequence length does not match codec");
    std::uint64_t code = 0;
    for (auto s : seq) {
      if (s >= radix_) throw UnknownSymbol("symbol index out of range");
      code = code * radix_ + s;
    }
    return code;
  }

  Sequence decode(std::uint64_t code) const {
    Sequence seq(n_);
    decode_into(code, seq);
    return seq;
  }

  void decode_into(std::uint64_t code, Sequence& seq) const {
    seq.resize(n_);
    for (std::size_t i = n_; i-- > 0;) {
      seq[i] = static_cast<Symbol>(code % radix_);
      code /= radix_;
    }
  }

 private:
  std::size_t radix_;
  std::size_t n_;
  std::uint64_t count_ = 0;
};

/// p(x^n) under the i.i.d. marginal.
inline double sequence_probability(const Sequence& seq, std::span<const double> marginal) {
  double p = 1.0;
  for (auto s : seq) p *= marginal[s];
  return p;
}

}  // namespace zesc

#endif  // ZESC_SEQUENCES_HPP
