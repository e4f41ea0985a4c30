#ifndef ZESC_SOURCE_MODEL_HPP
#define ZESC_SOURCE_MODEL_HPP

#include "zesc/errors.hpp"
#include "zesc/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zesc {

/// Index of a symbol within its alphabet.
using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

/// A finite joint distribution p(x, y) over X x Y.
///
/// Cells are held as exact rationals with a cached double copy. Support tests
/// (p > 0) always read the exact value; entropies read the doubles.
class JointPMF {
 public:
  JointPMF(std::vector<std::string> x_alphabet, std::vector<std::string> y_alphabet,
           std::vector<std::vector<Rational>> joint)
      : x_alphabet_(std::move(x_alphabet)), y_alphabet_(std::move(y_alphabet)) {
    check_alphabet(x_alphabet_, "x");
    check_alphabet(y_alphabet_, "y");
    if (joint.size() != x_alphabet_.size())
      throw std::invalid_argument("joint matrix must have one row per x symbol");
    Rational total = 0;
    for (const auto& row : joint) {
      if (row.size() != y_alphabet_.size())
        throw std::invalid_argument("joint matrix must have one column per y symbol");
      for (const auto& cell : row) {
        if (cell < 0) throw NonStochastic("negative probability");
        exact_.push_back(cell);
        total += cell;
      }
    }
    if (std::abs(to_double(total) - 1.0) > 1e-12)
      throw NonStochastic("joint probabilities sum to " + std::to_string(to_double(total)));
    if (total != 1)
      for (auto& cell : exact_) cell /= total;
    prob_.reserve(exact_.size());
    for (const auto& cell : exact_) prob_.push_back(to_double(cell));
  }

  /// p(x, y) = p_x(x) * p(y | x). Sums are checked to within 1e-9.
  static JointPMF from_channel(std::vector<std::string> x_alphabet,
                               std::vector<std::string> y_alphabet,
                               const std::vector<Rational>& p_x,
                               const std::vector<std::vector<Rational>>& p_y_given_x) {
    if (p_x.size() != x_alphabet.size() || p_y_given_x.size() != x_alphabet.size())
      throw std::invalid_argument("channel dimensions do not match the x alphabet");
    auto check_sum = [](const auto& values, const char* what) {
      Rational sum = 0;
      for (const auto& v : values) {
        if (v < 0) throw NonStochastic(std::string(what) + " has a negative entry");
        sum += v;
      }
      if (std::abs(to_double(sum) - 1.0) > 1e-9)
        throw NonStochastic(std::string(what) + " sums to " + std::to_string(to_double(sum)));
      return sum;
    };
    // Sums within tolerance are renormalized exactly.
    const Rational px_sum = check_sum(p_x, "p_x");
    std::vector<std::vector<Rational>> joint;
    for (std::size_t x = 0; x < p_x.size(); ++x) {
      if (p_y_given_x[x].size() != y_alphabet.size())
        throw std::invalid_argument("channel row width does not match the y alphabet");
      const Rational row_sum = check_sum(p_y_given_x[x], "channel row");
      std::vector<Rational> row;
      for (const auto& q : p_y_given_x[x]) row.push_back(p_x[x] / px_sum * (q / row_sum));
      joint.push_back(std::move(row));
    }
    return JointPMF(std::move(x_alphabet), std::move(y_alphabet), std::move(joint));
  }

  const std::vector<std::string>& x_alphabet() const { return x_alphabet_; }
  const std::vector<std::string>& y_alphabet() const { return y_alphabet_; }
  std::size_t x_size() const { return x_alphabet_.size(); }
  std::size_t y_size() const { return y_alphabet_.size(); }

  double p(Symbol x, Symbol y) const { return prob_[x * y_size() + y]; }
  const Rational& exact(Symbol x, Symbol y) const { return exact_[x * y_size() + y]; }
  bool positive(Symbol x, Symbol y) const { return exact_[x * y_size() + y] > 0; }

  /// Row-major cell probabilities.
  std::span<const double> cells() const { return prob_; }

  std::vector<Rational> exact_marginal_x() const {
    std::vector<Rational> m(x_size(), Rational(0));
    for (Symbol x = 0; x < x_size(); ++x)
      for (Symbol y = 0; y < y_size(); ++y) m[x] += exact(x, y);
    return m;
  }
  std::vector<Rational> exact_marginal_y() const {
    std::vector<Rational> m(y_size(), Rational(0));
    for (Symbol x = 0; x < x_size(); ++x)
      for (Symbol y = 0; y < y_size(); ++y) m[y] += exact(x, y);
    return m;
  }
  std::vector<double> marginal_x() const { return as_doubles(exact_marginal_x()); }
  std::vector<double> marginal_y() const { return as_doubles(exact_marginal_y()); }

  bool full_support() const {
    return std::all_of(exact_.begin(), exact_.end(), [](const Rational& r) { return r > 0; });
  }

  std::optional<Symbol> x_index(std::string_view name) const { return find(x_alphabet_, name); }
  std::optional<Symbol> y_index(std::string_view name) const { return find(y_alphabet_, name); }

  friend bool operator==(const JointPMF& a, const JointPMF& b) {
    return a.x_alphabet_ == b.x_alphabet_ && a.y_alphabet_ == b.y_alphabet_ && a.exact_ == b.exact_;
  }

 private:
  static void check_alphabet(const std::vector<std::string>& alphabet, const char* which) {
    if (alphabet.empty()) throw std::invalid_argument(std::string(which) + " alphabet is empty");
    std::set<std::string> seen(alphabet.begin(), alphabet.end());
    if (seen.size() != alphabet.size())
      throw std::invalid_argument(std::string(which) + " alphabet has duplicate symbols");
  }
  static std::vector<double> as_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(to_double(r));
    return out;
  }
  static std::optional<Symbol> find(const std::vector<std::string>& alphabet, std::string_view name) {
    auto it = std::find(alphabet.begin(), alphabet.end(), name);
    if (it == alphabet.end()) return std::nullopt;
    return static_cast<Symbol>(it - alphabet.begin());
  }

  std::vector<std::string> x_alphabet_;
  std::vector<std::string> y_alphabet_;
  std::vector<Rational> exact_;
  std::vector<double> prob_;
};

/// An observed block (x^n, y^n) as symbol indices.
struct SequencePair {
  Sequence x;
  Sequence y;

  std::size_t size() const { return x.size(); }

  void validate(const JointPMF& pmf) const {
    if (x.empty() || x.size() != y.size())
      throw std::invalid_argument("sequence pair must have equal, positive length");
    for (auto s : x)
      if (s >= pmf.x_size()) throw UnknownSymbol("x symbol index out of range");
    for (auto s : y)
      if (s >= pmf.y_size()) throw UnknownSymbol("y symbol index out of range");
  }

  friend bool operator==(const SequencePair&, const SequencePair&) = default;
};

// ---------------------------------------------------------------------------
// Entropies (bits)

inline double entropy(std::span<const double> pmf) {
  double h = 0.0;
  for (double q : pmf)
    if (q > 0.0) h -= q * std::log2(q);
  return h;
}

inline double entropy_x(const JointPMF& pmf) { return entropy(pmf.marginal_x()); }
inline double entropy_y(const JointPMF& pmf) { return entropy(pmf.marginal_y()); }

/// H(X|Y) = sum_y p(y) H(X | Y = y); zero-mass columns contribute nothing.
inline double conditional_entropy_x_given_y(const JointPMF& pmf) {
  double h = 0.0;
  auto py = pmf.marginal_y();
  for (Symbol y = 0; y < pmf.y_size(); ++y) {
    if (py[y] <= 0.0) continue;
    std::vector<double> column;
    for (Symbol x = 0; x < pmf.x_size(); ++x) column.push_back(pmf.p(x, y) / py[y]);
    h += py[y] * entropy(column);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Built-in sources

inline JointPMF binary_erasure(const Rational& p) {
  const Rational half(1, 2);
  return JointPMF::from_channel({"0", "1"}, {"0", "E", "1"}, {half, half},
                                {{1 - p, p, Rational(0)}, {Rational(0), p, 1 - p}});
}

inline JointPMF binary_symmetric(const Rational& p) {
  const Rational half(1, 2);
  return JointPMF::from_channel({"0", "1"}, {"0", "1"}, {half, half}, {{1 - p, p}, {p, 1 - p}});
}

/// Erasure channel whose erasure mass is split evenly over two symbols E1, E2.
inline JointPMF binary_double_erasure(const Rational& p) {
  const Rational half(1, 2);
  const Rational e = p / 2;
  return JointPMF::from_channel({"0", "1"}, {"0", "E1", "E2", "1"}, {half, half},
                                {{1 - p, e, e, Rational(0)}, {Rational(0), e, e, 1 - p}});
}

/// Uniform X over k symbols observed perfectly at the decoder.
inline JointPMF identity_channel(std::size_t k = 2) {
  if (k == 0) throw std::invalid_argument("identity channel needs at least one symbol");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back(std::to_string(i));
  std::vector<std::vector<Rational>> joint(k, std::vector<Rational>(k, Rational(0)));
  for (std::size_t i = 0; i < k; ++i) joint[i][i] = Rational(1, static_cast<long>(k));
  return JointPMF(names, names, std::move(joint));
}

/// Resolves "bec:p", "bsc:p", "bec2:p", "identity" or "identity:k".
/// Returns nullopt when the name is not a built-in.
inline std::optional<JointPMF> builtin_source(std::string_view name) {
  auto colon = name.find(':');
  auto kind = name.substr(0, colon);
  std::optional<Rational> param;
  if (colon != std::string_view::npos) {
    param = parse_rational(name.substr(colon + 1));
    if (!param) throw std::invalid_argument("bad parameter in source name '" + std::string(name) + "'");
  }
  auto need_p = [&]() -> const Rational& {
    if (!param || *param < 0 || *param > 1)
      throw std::invalid_argument("source '" + std::string(kind) + "' needs a parameter in [0, 1]");
    return *param;
  };
  if (kind == "bec") return binary_erasure(need_p());
  if (kind == "bsc") return binary_symmetric(need_p());
  if (kind == "bec2") return binary_double_erasure(need_p());
  if (kind == "identity") {
    if (!param) return identity_channel();
    if (denominator(*param) != 1 || *param < 1)
      throw std::invalid_argument("identity:k needs a positive integer k");
    return identity_channel(numerator(*param).convert_to<std::size_t>());
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for item `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Draws n i.i.d. pairs by inverse CDF over the row-major positive cells.
inline SequencePair sample_iid(const JointPMF& pmf, std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw std::invalid_argument("blocklength must be positive");
  std::vector<std::pair<double, std::size_t>> cdf;
  double acc = 0.0;
  for (std::size_t c = 0; c < pmf.cells().size(); ++c) {
    if (pmf.cells()[c] <= 0.0) continue;
    acc += pmf.cells()[c];
    cdf.emplace_back(acc, c);
  }
  SequencePair out;
  out.x.reserve(n);
  out.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u,
                               [](double v, const auto& entry) { return v < entry.first; });
    std::size_t cell = it == cdf.end() ? cdf.back().second : it->second;
    out.x.push_back(static_cast<Symbol>(cell / pmf.y_size()));
    out.y.push_back(static_cast<Symbol>(cell % pmf.y_size()));
  }
  return out;
}

}  // namespace zesc

#endif  // ZESC_SOURCE_MODEL_HPP
