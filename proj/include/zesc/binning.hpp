#ifndef ZESC_BINNING_HPP
#define ZESC_BINNING_HPP

#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"
#include "zesc/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace zesc {

/// ceil(2^{nR}), guarded so bin ids fit comfortably in 64 bits.
inline std::uint64_t bin_count_for(std::size_t n, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate target must be positive");
  const long double exponent = static_cast<long double>(n) * rate;
  if (exponent > 62.0L) throw TooLarge("2^{nR} bins do not fit in 64 bits");
  const long double v = std::exp2(exponent);
  return static_cast<std::uint64_t>(std::ceil(v - v * 1e-12L));
}

/// Random partition of a set of sequences (the typical set) into M bins, with
/// members of each bin numbered 1..|bin| in lexicographic order.
///
/// A member's bin is a hash of (seed, sequence), so either terminal rebuilds
/// the identical partition from the shared seed alone.
class BinAssignment {
 public:
  BinAssignment(std::vector<std::uint64_t> domain, double rate, std::size_t n, std::uint64_t seed)
      : rate_(rate), n_(n), seed_(seed), bin_count_(bin_count_for(n, rate)) {
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    if (bin_count_ <= kMaxDenseBins) {
      // counting sort by bin; the ascending input keeps each bin lexicographic
      offsets_.assign(bin_count_ + 1, 0);
      std::vector<std::uint32_t> bin_index(domain.size());
      for (std::size_t i = 0; i < domain.size(); ++i) {
        bin_index[i] = static_cast<std::uint32_t>(hashed_bin(domain[i]) - 1);
        ++offsets_[bin_index[i] + 1];
      }
      for (std::uint64_t b = 0; b < bin_count_; ++b) offsets_[b + 1] += offsets_[b];
      members_.resize(domain.size());
      std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
      for (std::size_t i = 0; i < domain.size(); ++i) members_[cursor[bin_index[i]]++] = domain[i];
    } else {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
      keyed.reserve(domain.size());
      for (auto code : domain) keyed.emplace_back(hashed_bin(code), code);
      std::sort(keyed.begin(), keyed.end());
      members_.reserve(keyed.size());
      for (const auto& kv : keyed) members_.push_back(kv.second);
    }
  }

  double rate_target() const { return rate_; }
  std::size_t blocklength() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t bin_count() const { return bin_count_; }
  std::size_t domain_size() const { return members_.size(); }
  unsigned bin_id_bits() const { return ceil_log2(bin_count_); }

  /// Bin id in 1..M that `code` would occupy, whether or not it is a member.
  std::uint64_t hashed_bin(std::uint64_t code) const {
    const std::uint64_t h = splitmix64(splitmix64(seed_) ^ splitmix64(code ^ 0xa0761d6478bd642fULL));
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * bin_count_) >> 64) + 1;
  }

  /// Members of bin `bin_id`, in numbering order.
  std::span<const std::uint64_t> members(std::uint64_t bin_id) const {
    if (bin_id < 1 || bin_id > bin_count_) throw std::out_of_range("bin id out of range");
    if (!offsets_.empty())
      return std::span<const std::uint64_t>(members_).subspan(offsets_[bin_id - 1],
                                                              offsets_[bin_id] - offsets_[bin_id - 1]);
    auto first = std::partition_point(members_.begin(), members_.end(),
                                      [&](std::uint64_t c) { return hashed_bin(c) < bin_id; });
    auto last = std::partition_point(first, members_.end(),
                                     [&](std::uint64_t c) { return hashed_bin(c) == bin_id; });
    return {first, last};
  }

  std::size_t bin_size(std::uint64_t bin_id) const { return members(bin_id).size(); }

  std::optional<std::uint64_t> bin_of(std::uint64_t code) const {
    if (!index_in_bin(code)) return std::nullopt;
    return hashed_bin(code);
  }

  /// 1-based rank of `code` inside its bin; nullopt outside the domain.
  std::optional<std::uint32_t> index_in_bin(std::uint64_t code) const {
    auto bin = members(hashed_bin(code));
    auto it = std::lower_bound(bin.begin(), bin.end(), code);
    if (it == bin.end() || *it != code) return std::nullopt;
    return static_cast<std::uint32_t>(it - bin.begin()) + 1;
  }

  /// Every (bin, index, code) triple, for exhaustive checks.
  template <class Visitor>
  void for_each(Visitor&& visit) const {
    std::uint64_t current = 0;
    std::uint32_t index = 0;
    for (auto code : members_) {
      auto b = hashed_bin(code);
      index = b == current ? index + 1 : 1;
      current = b;
      visit(b, index, code);
    }
  }

  friend bool operator==(const BinAssignment& a, const BinAssignment& b) {
    return a.rate_ == b.rate_ && a.n_ == b.n_ && a.seed_ == b.seed_ && a.members_ == b.members_;
  }

 private:
  static constexpr std::uint64_t kMaxDenseBins = std::uint64_t{1} << 22;

  double rate_;
  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t bin_count_;
  std::vector<std::uint64_t> members_;  // sorted by (bin, code)
  std::vector<std::uint64_t> offsets_;  // bin b occupies [offsets_[b-1], offsets_[b]) when dense
};

/// The typical set may be empty at tiny n; the assignment is then empty too.
inline BinAssignment random_binning(std::vector<std::uint64_t> typical_set, double rate, std::size_t n,
                                    std::uint64_t shared_seed) {
  return BinAssignment(std::move(typical_set), rate, n, shared_seed);
}

/// Joint typicality of candidate codes against a fixed y, reusing buffers.
class JointTypicalityProbe {
 public:
  JointTypicalityProbe(const JointPMF& pmf, std::size_t n, double epsilon)
      : window_(pmf.cells(), n, epsilon),
        codec_(pmf.x_size(), n, std::uint64_t{1} << 40),
        y_size_(pmf.y_size()),
        counts_(pmf.x_size() * pmf.y_size()) {}

  const SequenceCodec& codec() const { return codec_; }

  bool operator()(std::uint64_t x_code, std::span<const Symbol> y) {
    std::fill(counts_.begin(), counts_.end(), 0);
    const auto radix = codec_.radix();
    for (std::size_t i = y.size(); i-- > 0;) {
      ++counts_[(x_code % radix) * y_size_ + y[i]];
      x_code /= radix;
    }
    return window_.admits(counts_);
  }

 private:
  TypicalityWindow window_;
  SequenceCodec codec_;
  std::size_t y_size_;
  std::vector<std::uint32_t> counts_;
};

/// Up to `limit` members of a bin jointly typical with y, as (index, code) in
/// index order.
inline std::vector<std::pair<std::uint32_t, std::uint64_t>> jointly_typical_members(
    const BinAssignment& assignment, std::uint64_t bin_id, std::span<const Symbol> y,
    JointTypicalityProbe& probe, std::size_t limit) {
  std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
  auto bin = assignment.members(bin_id);
  for (std::size_t i = 0; i < bin.size() && out.size() < limit; ++i)
    if (probe(bin[i], y)) out.emplace_back(static_cast<std::uint32_t>(i + 1), bin[i]);
  return out;
}

/// Smallest-index member of the bin jointly typical with y, if any.
inline std::optional<std::uint64_t> min_index_candidate(const BinAssignment& assignment, std::uint64_t bin_id,
                                                        std::span<const Symbol> y, const JointPMF& pmf,
                                                        double epsilon) {
  JointTypicalityProbe probe(pmf, y.size(), epsilon);
  auto found = jointly_typical_members(assignment, bin_id, y, probe, 1);
  if (found.empty()) return std::nullopt;
  return found.front().second;
}

}  // namespace zesc

#endif  // ZESC_BINNING_HPP
