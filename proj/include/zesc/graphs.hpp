#ifndef ZESC_GRAPHS_HPP
#define ZESC_GRAPHS_HPP

#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace zesc {

using Edge = std::pair<Symbol, Symbol>;

/// Bipartite support graph on X u Y: one edge per positive cell (x, y).
/// Vertex ids put X first: x -> x, y -> x_size + y.
class ConnectivityGraph {
 public:
  ConnectivityGraph(std::size_t x_size, std::size_t y_size, std::vector<Edge> edges)
      : x_size_(x_size), y_size_(y_size), edges_(std::move(edges)), cells_(x_size * y_size, false) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (auto [x, y] : edges_) {
      if (x >= x_size_ || y >= y_size_) throw std::invalid_argument("edge outside the alphabets");
      cells_[x * y_size_ + y] = true;
    }
  }

  std::size_t x_size() const { return x_size_; }
  std::size_t y_size() const { return y_size_; }
  std::size_t vertex_count() const { return x_size_ + y_size_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(Symbol x, Symbol y) const { return cells_[x * y_size_ + y]; }

 private:
  std::size_t x_size_;
  std::size_t y_size_;
  std::vector<Edge> edges_;
  std::vector<bool> cells_;
};

inline ConnectivityGraph build_connectivity_graph(const JointPMF& pmf) {
  std::vector<Edge> edges;
  for (Symbol x = 0; x < pmf.x_size(); ++x)
    for (Symbol y = 0; y < pmf.y_size(); ++y)
      if (pmf.positive(x, y)) edges.emplace_back(x, y);
  return ConnectivityGraph(pmf.x_size(), pmf.y_size(), std::move(edges));
}

/// Forest test by repeatedly deleting vertices of degree <= 1. The graph is
/// acyclic iff this peels away every edge.
inline bool is_cycle_free(const ConnectivityGraph& g) {
  const std::size_t v_count = g.vertex_count();
  std::vector<std::vector<std::size_t>> incident(v_count);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].first].push_back(e);
    incident[g.x_size() + edges[e].second].push_back(e);
  }
  std::vector<std::size_t> degree(v_count);
  for (std::size_t v = 0; v < v_count; ++v) degree[v] = incident[v].size();
  std::vector<bool> edge_alive(edges.size(), true);
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < v_count; ++v)
    if (degree[v] == 1) stack.push_back(v);
  std::size_t removed = 0;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (degree[v] != 1) continue;
    for (auto e : incident[v]) {
      if (!edge_alive[e]) continue;
      edge_alive[e] = false;
      ++removed;
      --degree[v];
      std::size_t other = edges[e].first == v && v < g.x_size() ? g.x_size() + edges[e].second
                                                                 : edges[e].first;
      if (--degree[other] == 1) stack.push_back(other);
      break;
    }
  }
  return removed == edges.size();
}

/// Single-letter relation: a and b share some y with positive probability on
/// both. Reflexive on symbols of positive mass.
class SingleLetterConfusability {
 public:
  explicit SingleLetterConfusability(const JointPMF& pmf)
      : size_(pmf.x_size()), related_(size_ * size_, false) {
    for (Symbol a = 0; a < size_; ++a)
      for (Symbol b = 0; b < size_; ++b)
        for (Symbol y = 0; y < pmf.y_size(); ++y)
          if (pmf.positive(a, y) && pmf.positive(b, y)) {
            related_[a * size_ + b] = true;
            break;
          }
  }
  std::size_t size() const { return size_; }
  bool operator()(Symbol a, Symbol b) const { return related_[a * size_ + b]; }

 private:
  std::size_t size_;
  std::vector<bool> related_;
};

/// Unordered pairs a < b of X symbols that some y with positive probability
/// cannot tell apart.
inline std::vector<std::pair<Symbol, Symbol>> confusable_singles(const JointPMF& pmf) {
  SingleLetterConfusability rel(pmf);
  std::vector<std::pair<Symbol, Symbol>> out;
  for (Symbol a = 0; a < pmf.x_size(); ++a)
    for (Symbol b = a + 1; b < pmf.x_size(); ++b)
      if (rel(a, b)) out.emplace_back(a, b);
  return out;
}

/// Confusability over X^n, kept implicit: x ~ x' iff x != x' and every
/// coordinate pair is related by the single-letter relation.
class ConfusabilityGraph {
 public:
  static constexpr std::uint64_t kMaxVertices = std::uint64_t{1} << 16;

  ConfusabilityGraph(const JointPMF& pmf, std::size_t n)
      : single_(pmf), codec_(pmf.x_size(), n, kMaxVertices) {}

  std::size_t blocklength() const { return codec_.length(); }
  std::uint64_t vertex_count() const { return codec_.count(); }
  const SequenceCodec& codec() const { return codec_; }
  const SingleLetterConfusability& single_letter() const { return single_; }

  bool adjacent(std::uint64_t a, std::uint64_t b) const {
    if (a == b) return false;
    const auto radix = codec_.radix();
    for (std::size_t i = 0; i < codec_.length(); ++i) {
      if (!single_(static_cast<Symbol>(a % radix), static_cast<Symbol>(b % radix))) return false;
      a /= radix;
      b /= radix;
    }
    return true;
  }

 private:
  SingleLetterConfusability single_;
  SequenceCodec codec_;
};

/// A coloring c of X^n in which confusable sequences get distinct colors.
struct ZeroErrorColoring {
  std::size_t n = 1;
  std::vector<std::uint32_t> color_of;     // indexed by sequence code
  std::vector<double> color_distribution;  // P(c(X^n) = k)
  bool exact = false;                      // true when the search was exhaustive

  std::size_t color_count() const { return color_distribution.size(); }
  double entropy() const { return zesc::entropy(color_distribution); }
  /// H(c(X^n)) / n, an upper bound on the no-feedback zero-error rate.
  double bound_per_symbol() const { return entropy() / static_cast<double>(n); }
};

/// First pair of confusable sequences sharing a color, if any.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> find_coloring_conflict(
    const ConfusabilityGraph& graph, const ZeroErrorColoring& coloring) {
  if (coloring.color_of.size() != graph.vertex_count())
    throw InvalidColoring("coloring does not cover X^n");
  std::vector<std::vector<std::uint64_t>> classes(coloring.color_count());
  for (std::uint64_t v = 0; v < graph.vertex_count(); ++v) {
    auto c = coloring.color_of[v];
    if (c >= classes.size()) throw InvalidColoring("color index out of range");
    classes[c].push_back(v);
  }
  for (const auto& cls : classes)
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j)
        if (graph.adjacent(cls[i], cls[j])) return std::make_pair(cls[i], cls[j]);
  return std::nullopt;
}

namespace detail {

inline std::vector<double> class_masses(const std::vector<std::uint32_t>& color_of,
                                        const std::vector<double>& prob, std::size_t colors) {
  std::vector<double> mass(colors, 0.0);
  for (std::size_t v = 0; v < color_of.size(); ++v) mass[color_of[v]] += prob[v];
  return mass;
}

// Exhaustive search over colorings of the positive-probability vertices.
// Vertices are placed in decreasing probability order; a vertex joins an
// existing compatible class or opens the next one, so each partition is
// visited once and the first leaf is the greedy first-fit coloring.
class MinEntropySearch {
 public:
  MinEntropySearch(const ConfusabilityGraph& graph, std::vector<std::uint64_t> order,
                   const std::vector<double>& prob, std::uint64_t budget)
      : graph_(graph), order_(std::move(order)), budget_(budget), assignment_(order_.size()) {
    for (auto v : order_) weight_.push_back(prob[v]);
    suffix_.assign(order_.size() + 1, 0.0);
    for (std::size_t i = order_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + weight_[i];
    if (order_.size() <= 4096) {
      adjacency_.assign(order_.size() * order_.size(), false);
      for (std::size_t i = 0; i < order_.size(); ++i)
        for (std::size_t j = i + 1; j < order_.size(); ++j)
          if (graph_.adjacent(order_[i], order_[j]))
            adjacency_[i * order_.size() + j] = adjacency_[j * order_.size() + i] = true;
    }
  }

  void run() { descend(0); }
  bool exhausted() const { return !aborted_; }
  const std::vector<std::uint32_t>& best() const { return best_; }

 private:
  bool adjacent(std::size_t i, std::size_t j) const {
    if (!adjacency_.empty()) return adjacency_[i * order_.size() + j];
    return graph_.adjacent(order_[i], order_[j]);
  }

  // Entropy of the best completion: all remaining mass on the heaviest class.
  // That completion majorizes every other one, so this is a valid bound.
  double completion_bound(std::size_t next) const {
    if (masses_.empty()) return 0.0;
    std::vector<double> m = masses_;
    *std::max_element(m.begin(), m.end()) += suffix_[next];
    return zesc::entropy(m);
  }

  void descend(std::size_t i) {
    if (aborted_) return;
    if (i == order_.size()) {
      if (leaves_ == budget_) {
        aborted_ = true;
        return;
      }
      ++leaves_;
      double h = zesc::entropy(masses_);
      if (best_.empty() || h < best_entropy_ - 1e-12) {
        best_entropy_ = h;
        best_ = assignment_;
      }
      return;
    }
    if (!best_.empty() && completion_bound(i) >= best_entropy_ - 1e-12) return;
    for (std::uint32_t c = 0; c <= members_.size(); ++c) {
      if (c == members_.size()) {
        members_.emplace_back();
        masses_.push_back(0.0);
      } else {
        bool ok = true;
        for (auto j : members_[c])
          if (adjacent(i, j)) {
            ok = false;
            break;
          }
        if (!ok) continue;
      }
      members_[c].push_back(i);
      masses_[c] += weight_[i];
      assignment_[i] = c;
      descend(i + 1);
      members_[c].pop_back();
      masses_[c] -= weight_[i];
      if (members_[c].empty()) {
        members_.pop_back();
        masses_.pop_back();
      }
      if (aborted_) return;
    }
  }

  const ConfusabilityGraph& graph_;
  std::vector<std::uint64_t> order_;
  std::uint64_t budget_;
  std::vector<double> weight_;
  std::vector<double> suffix_;
  std::vector<bool> adjacency_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<double> masses_;
  std::vector<std::uint32_t> assignment_;
  std::vector<std::uint32_t> best_;
  double best_entropy_ = 0.0;
  std::uint64_t leaves_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

/// Greedy first-fit coloring in decreasing-probability order (ties by code).
inline ZeroErrorColoring greedy_coloring(const JointPMF& pmf, std::size_t n) {
  ConfusabilityGraph graph(pmf, n);
  const auto marginal = pmf.marginal_x();
  std::vector<double> prob(graph.vertex_count());
  Sequence seq;
  for (std::uint64_t v = 0; v < graph.vertex_count(); ++v) {
    graph.codec().decode_into(v, seq);
    prob[v] = sequence_probability(seq, marginal);
  }
  std::vector<std::uint64_t> order(graph.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return prob[a] > prob[b]; });

  ZeroErrorColoring out;
  out.n = n;
  out.color_of.assign(graph.vertex_count(), 0);
  std::vector<std::vector<std::uint64_t>> classes;
  for (auto v : order) {
    std::uint32_t chosen = static_cast<std::uint32_t>(classes.size());
    if (prob[v] > 0.0) {
      for (std::uint32_t c = 0; c < classes.size(); ++c) {
        bool ok = std::none_of(classes[c].begin(), classes[c].end(),
                               [&](auto u) { return graph.adjacent(u, v); });
        if (ok) {
          chosen = c;
          break;
        }
      }
    } else if (!classes.empty()) {
      chosen = 0;  // unreachable sequences have no constraints
    }
    if (chosen == classes.size()) classes.emplace_back();
    classes[chosen].push_back(v);
    out.color_of[v] = chosen;
  }
  out.color_distribution = detail::class_masses(out.color_of, prob, classes.size());
  return out;
}

/// Minimum-entropy zero-error coloring of the n-fold confusability graph.
///
/// Searches exhaustively while at most `budget` complete colorings are
/// examined; the result is then marked exact. Otherwise the best coloring
/// seen (never worse than greedy first-fit) is returned as a heuristic bound.
inline ZeroErrorColoring min_entropy_coloring(const JointPMF& pmf, std::size_t n,
                                              std::uint64_t budget = std::uint64_t{1} << 20) {
  ConfusabilityGraph graph(pmf, n);
  const auto marginal = pmf.marginal_x();
  std::vector<double> prob(graph.vertex_count());
  Sequence seq;
  std::vector<std::uint64_t> order;
  for (std::uint64_t v = 0; v < graph.vertex_count(); ++v) {
    graph.codec().decode_into(v, seq);
    prob[v] = sequence_probability(seq, marginal);
    if (prob[v] > 0.0) order.push_back(v);
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return prob[a] > prob[b]; });

  ZeroErrorColoring out;
  out.n = n;
  out.color_of.assign(graph.vertex_count(), 0);
  if (order.empty()) {
    out.color_distribution = {1.0};
    out.exact = true;
    return out;
  }

  detail::MinEntropySearch search(graph, order, prob, std::max<std::uint64_t>(budget, 1));
  search.run();
  std::size_t colors = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.color_of[order[i]] = search.best()[i];
    colors = std::max<std::size_t>(colors, search.best()[i] + 1);
  }
  out.color_distribution = detail::class_masses(out.color_of, prob, colors);
  out.exact = search.exhausted();
  return out;
}

/// Smallest per-symbol coloring bound over inner blocklengths 1..n_max, where
/// n_max is the largest n with |X|^n <= max_vertices.
struct HzBound {
  std::size_t n = 1;
  double bound = 0.0;
  bool exact = false;
};

inline HzBound best_hz_upper_bound(const JointPMF& pmf, std::uint64_t max_vertices = 256,
                                   std::uint64_t budget = std::uint64_t{1} << 18) {
  HzBound best;
  bool have = false;
  for (std::size_t n = 1;; ++n) {
    auto count = checked_power(pmf.x_size(), n, max_vertices);
    if (!count && n > 1) break;
    auto coloring = min_entropy_coloring(pmf, n, budget);
    if (!have || coloring.bound_per_symbol() < best.bound - 1e-12) {
      best = {n, coloring.bound_per_symbol(), coloring.exact};
      have = true;
    }
    if (!count) break;
  }
  return best;
}

}  // namespace zesc

#endif  // ZESC_GRAPHS_HPP
