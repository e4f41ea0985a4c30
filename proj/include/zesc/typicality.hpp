#ifndef ZESC_TYPICALITY_HPP
#define ZESC_TYPICALITY_HPP

#include "zesc/graphs.hpp"
#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace zesc {

/// Occurrence counts over an alphabet (or over row-major X x Y cells for a
/// joint type) of a length-n sequence. Probabilities are counts / n, exact.
struct TypeClass {
  std::vector<std::uint32_t> counts;
  std::uint32_t n = 0;

  Rational probability(std::size_t i) const { return Rational(counts.at(i), n); }

  bool valid() const {
    return n > 0 && std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == n;
  }

  friend bool operator==(const TypeClass&, const TypeClass&) = default;
  friend auto operator<=>(const TypeClass&, const TypeClass&) = default;
};

using EmpiricalType = TypeClass;
using TypeClassDescriptor = TypeClass;

inline TypeClass empirical_type(std::span<const Symbol> seq, std::size_t alphabet_size) {
  if (seq.empty()) throw std::invalid_argument("empirical type of an empty sequence");
  TypeClass t{std::vector<std::uint32_t>(alphabet_size, 0), static_cast<std::uint32_t>(seq.size())};
  for (auto s : seq) {
    if (s >= alphabet_size) throw UnknownSymbol("symbol " + std::to_string(s) + " outside the alphabet");
    ++t.counts[s];
  }
  return t;
}

/// Pair counts N((a, b), (x, y)), row-major over X x Y.
inline TypeClass joint_empirical_type(std::span<const Symbol> x, std::span<const Symbol> y,
                                      std::size_t x_size, std::size_t y_size) {
  if (x.size() != y.size()) throw BlocklengthMismatch("joint type of sequences with different lengths");
  if (x.empty()) throw std::invalid_argument("empirical type of an empty sequence");
  TypeClass t{std::vector<std::uint32_t>(x_size * y_size, 0), static_cast<std::uint32_t>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= x_size || y[i] >= y_size) throw UnknownSymbol("symbol outside the alphabet");
    ++t.counts[x[i] * y_size + y[i]];
  }
  return t;
}

/// Additive strong typicality: |N(a)/n - p(a)| <= eps for every a, and
/// N(a) = 0 whenever p(a) = 0. Precomputes the admissible count range per
/// symbol for one blocklength so the hot loops compare integers only.
class TypicalityWindow {
 public:
  // Absorbs rounding in (p +- eps) * n without admitting any extra count.
  static constexpr double kSlack = 1e-12;

  TypicalityWindow(std::span<const double> reference, std::size_t n, double epsilon) : n_(n) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const double dn = static_cast<double>(n);
    for (double p : reference) {
      if (p <= 0.0) {
        lo_.push_back(0);
        hi_.push_back(0);
        continue;
      }
      double lo = std::ceil((p - epsilon - kSlack) * dn);
      double hi = std::floor((p + epsilon + kSlack) * dn);
      if (hi < lo || hi < 0.0 || lo > dn) empty_ = true;
      lo_.push_back(static_cast<std::uint32_t>(std::clamp(lo, 0.0, dn)));
      hi_.push_back(static_cast<std::uint32_t>(std::clamp(hi, 0.0, dn)));
    }
  }

  std::size_t blocklength() const { return n_; }
  std::size_t size() const { return lo_.size(); }
  std::uint32_t low(std::size_t i) const { return lo_[i]; }
  std::uint32_t high(std::size_t i) const { return hi_[i]; }

  bool admits(std::span<const std::uint32_t> counts) const {
    if (empty_ || counts.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] < lo_[i] || counts[i] > hi_[i]) return false;
    return true;
  }
  bool admits(const TypeClass& t) const { return t.n == n_ && admits(std::span<const std::uint32_t>(t.counts)); }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> lo_;
  std::vector<std::uint32_t> hi_;
  bool empty_ = false;
};

inline bool is_strongly_typical(const TypeClass& type, std::span<const double> reference, double epsilon) {
  return TypicalityWindow(reference, type.n, epsilon).admits(type);
}

inline bool is_strongly_typical(std::span<const Symbol> seq, std::span<const double> reference,
                                double epsilon) {
  return is_strongly_typical(empirical_type(seq, reference.size()), reference, epsilon);
}

/// (x, y) in A_eps(X, Y): pair counts checked against p_XY.
inline bool is_jointly_typical(std::span<const Symbol> x, std::span<const Symbol> y, const JointPMF& pmf,
                               double epsilon) {
  return is_strongly_typical(joint_empirical_type(x, y, pmf.x_size(), pmf.y_size()), pmf.cells(), epsilon);
}

/// Codes (see SequenceCodec) of every eps-typical sequence in X^n, ascending,
/// which is lexicographic order.
inline std::vector<std::uint64_t> enumerate_typical_set(std::span<const double> marginal, std::size_t n,
                                                        double epsilon) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 26;
  SequenceCodec codec(marginal.size(), n, kLimit);
  TypicalityWindow window(marginal, n, epsilon);
  const std::size_t radix = marginal.size();

  std::vector<std::uint64_t> out;
  std::vector<Symbol> digits(n, 0);
  std::vector<std::uint32_t> counts(radix, 0);
  counts[0] = static_cast<std::uint32_t>(n);
  for (std::uint64_t code = 0; code < codec.count(); ++code) {
    if (window.admits(counts)) out.push_back(code);
    // odometer increment, last digit least significant
    for (std::size_t i = n; i-- > 0;) {
      --counts[digits[i]];
      if (++digits[i] < radix) {
        ++counts[digits[i]];
        break;
      }
      digits[i] = 0;
      ++counts[0];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint types from marginal types

enum class InferenceStatus { Unique, NotUnique, Inconsistent };

struct JointTypeInference {
  InferenceStatus status = InferenceStatus::Inconsistent;
  std::optional<TypeClass> joint;  // set iff status == Unique
};

namespace detail {

inline void check_marginals(const TypeClass& qx, const TypeClass& qy, const ConnectivityGraph& support) {
  if (qx.n != qy.n) throw BlocklengthMismatch("marginal types have different blocklengths");
  if (qx.counts.size() != support.x_size() || qy.counts.size() != support.y_size())
    throw std::invalid_argument("marginal type does not match the support alphabets");
}

}  // namespace detail

/// Every joint type on `support` whose marginals are qx and qy.
///
/// Walks the support cells in order, bounding each count by what its row and
/// column still need, and forcing the value on a row's or column's last cell.
inline std::vector<TypeClass> consistent_joint_types(const TypeClass& qx, const TypeClass& qy,
                                                     const ConnectivityGraph& support) {
  detail::check_marginals(qx, qy, support);
  const auto& edges = support.edges();
  const std::size_t ys = support.y_size();
  std::vector<bool> last_in_row(edges.size()), last_in_col(edges.size());
  {
    std::vector<int> row_last(support.x_size(), -1), col_last(ys, -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      row_last[edges[e].first] = static_cast<int>(e);
      col_last[edges[e].second] = static_cast<int>(e);
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      last_in_row[e] = row_last[edges[e].first] == static_cast<int>(e);
      last_in_col[e] = col_last[edges[e].second] == static_cast<int>(e);
    }
    // a symbol with positive count but no support cell can never be matched
    for (std::size_t x = 0; x < support.x_size(); ++x)
      if (row_last[x] < 0 && qx.counts[x] > 0) return {};
    for (std::size_t y = 0; y < ys; ++y)
      if (col_last[y] < 0 && qy.counts[y] > 0) return {};
  }

  std::vector<TypeClass> out;
  std::vector<std::uint32_t> rem_x = qx.counts, rem_y = qy.counts;
  TypeClass current{std::vector<std::uint32_t>(support.x_size() * ys, 0), qx.n};

  auto recurse = [&](auto&& self, std::size_t e) -> void {
    if (e == edges.size()) {
      out.push_back(current);
      return;
    }
    auto [x, y] = edges[e];
    const std::uint32_t cap = std::min(rem_x[x], rem_y[y]);
    std::uint32_t lo = 0, hi = cap;
    if (last_in_row[e]) lo = hi = rem_x[x];
    if (last_in_col[e]) {
      if (last_in_row[e] && rem_x[x] != rem_y[y]) return;
      lo = hi = rem_y[y];
    }
    if (hi > cap) return;
    for (std::uint32_t c = lo; c <= hi; ++c) {
      rem_x[x] -= c;
      rem_y[y] -= c;
      current.counts[x * ys + y] = c;
      self(self, e + 1);
      rem_x[x] += c;
      rem_y[y] += c;
    }
    current.counts[x * ys + y] = 0;
  };
  recurse(recurse, 0);
  return out;
}

/// Brute force: every assignment of 0..n to each support cell, kept when it
/// sums to n and reproduces both marginals. Independent of the inference
/// routine; guarded at (n+1)^cells <= 2^24.
inline std::vector<TypeClass> joint_type_uniqueness_oracle(const TypeClass& qx, const TypeClass& qy,
                                                           const ConnectivityGraph& support) {
  detail::check_marginals(qx, qy, support);
  const auto& edges = support.edges();
  const std::uint32_t n = qx.n;
  if (!checked_power(n + 1, edges.size(), std::uint64_t{1} << 24))
    throw TooLarge("oracle enumeration exceeds 2^24 assignments");
  const std::size_t ys = support.y_size();

  std::vector<TypeClass> out;
  std::vector<std::uint32_t> value(edges.size(), 0);
  std::vector<std::uint32_t> row(support.x_size()), col(ys);
  for (;;) {
    std::uint64_t total = 0;
    for (auto v : value) total += v;
    if (total == n) {
      std::fill(row.begin(), row.end(), 0);
      std::fill(col.begin(), col.end(), 0);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        row[edges[e].first] += value[e];
        col[edges[e].second] += value[e];
      }
      if (row == qx.counts && col == qy.counts) {
        TypeClass t{std::vector<std::uint32_t>(support.x_size() * ys, 0), n};
        for (std::size_t e = 0; e < edges.size(); ++e) t.counts[edges[e].first * ys + edges[e].second] = value[e];
        out.push_back(std::move(t));
      }
    }
    std::size_t i = 0;
    for (; i < value.size(); ++i) {
      if (++value[i] <= n) break;
      value[i] = 0;
    }
    if (i == value.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Joint type on `support` implied by the marginal types qx and qy.
///
/// For a cycle-free support the answer is forced: strip the lowest-indexed
/// vertex of degree one, give its single edge all of that vertex's remaining
/// mass, subtract it from the neighbour, and repeat. Cyclic supports fall back
/// to enumerating every consistent joint type.
inline JointTypeInference infer_joint_type(const TypeClass& qx, const TypeClass& qy,
                                           const ConnectivityGraph& support) {
  detail::check_marginals(qx, qy, support);
  if (!is_cycle_free(support)) {
    auto all = consistent_joint_types(qx, qy, support);
    if (all.empty()) return {InferenceStatus::Inconsistent, std::nullopt};
    if (all.size() > 1) return {InferenceStatus::NotUnique, std::nullopt};
    return {InferenceStatus::Unique, std::move(all.front())};
  }

  const std::size_t xs = support.x_size(), ys = support.y_size();
  const std::size_t vcount = xs + ys;
  std::vector<std::int64_t> mass(vcount);
  for (std::size_t x = 0; x < xs; ++x) mass[x] = qx.counts[x];
  for (std::size_t y = 0; y < ys; ++y) mass[xs + y] = qy.counts[y];

  const auto& edges = support.edges();
  std::vector<bool> alive(edges.size(), true);
  std::vector<std::size_t> degree(vcount, 0);
  for (auto [x, y] : edges) {
    ++degree[x];
    ++degree[xs + y];
  }
  TypeClass joint{std::vector<std::uint32_t>(xs * ys, 0), qx.n};

  for (;;) {
    std::size_t leaf = vcount;
    for (std::size_t v = 0; v < vcount; ++v)
      if (degree[v] == 1) {
        leaf = v;
        break;
      }
    if (leaf == vcount) break;
    std::size_t e = 0;
    for (; e < edges.size(); ++e)
      if (alive[e] && (edges[e].first == leaf || xs + edges[e].second == leaf)) break;
    const std::size_t other = leaf < xs ? xs + edges[e].second : edges[e].first;
    const std::int64_t c = mass[leaf];
    if (c < 0 || c > mass[other]) return {InferenceStatus::Inconsistent, std::nullopt};
    joint.counts[edges[e].first * ys + edges[e].second] = static_cast<std::uint32_t>(c);
    mass[leaf] = 0;
    mass[other] -= c;
    alive[e] = false;
    --degree[leaf];
    --degree[other];
  }
  for (auto m : mass)
    if (m != 0) return {InferenceStatus::Inconsistent, std::nullopt};
  return {InferenceStatus::Unique, std::move(joint)};
}

}  // namespace zesc

#endif  // ZESC_TYPICALITY_HPP
