#ifndef ZESC_REDUCTION_HPP
#define ZESC_REDUCTION_HPP

#include "zesc/protocols.hpp"
#include "zesc/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace zesc {

/// A map f from the Y alphabet onto a reduced alphabet Z, with the induced
/// distribution of (X, f(Y)).
struct SymbolMerge {
  std::vector<Symbol> mapping;             // y -> z
  std::vector<std::vector<Symbol>> groups;  // z -> the y symbols merged into it
  JointPMF reduced;
  bool identity = true;

  Sequence apply(const Sequence& y) const {
    Sequence z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = mapping.at(y[i]);
    return z;
  }
};

namespace detail {

inline bool same_conditional(const JointPMF& pmf, Symbol a, Symbol b, const std::vector<Rational>& py) {
  if (py[a] == 0 || py[b] == 0) return false;
  for (Symbol x = 0; x < pmf.x_size(); ++x)
    if (pmf.exact(x, a) * py[b] != pmf.exact(x, b) * py[a]) return false;
  return true;
}

/// Longest common prefix of the merged names when it is a fresh name,
/// otherwise the names joined with '|'.
inline std::string merged_name(const std::vector<std::string>& names, const std::vector<std::string>& taken) {
  std::string prefix = names.front();
  for (const auto& s : names) {
    std::size_t k = 0;
    while (k < prefix.size() && k < s.size() && prefix[k] == s[k]) ++k;
    prefix.resize(k);
  }
  if (!prefix.empty() && std::find(taken.begin(), taken.end(), prefix) == taken.end()) return prefix;
  std::string joined;
  for (const auto& s : names) joined += (joined.empty() ? "" : "|") + s;
  return joined;
}

}  // namespace detail

/// Merges every maximal group of y symbols sharing the same conditional
/// p(x | y). Groups keep the order of their first member; zero-mass symbols
/// are never merged. H(X|Y) is unchanged by construction and re-checked.
inline SymbolMerge merge_equivalent_side_info(const JointPMF& pmf) {
  const auto py = pmf.exact_marginal_y();
  struct {
    std::vector<Symbol> mapping;
    std::vector<std::vector<Symbol>> groups;
    bool identity = true;
  } merge;
  merge.mapping.assign(pmf.y_size(), 0);
  std::vector<bool> placed(pmf.y_size(), false);
  for (Symbol y = 0; y < pmf.y_size(); ++y) {
    if (placed[y]) continue;
    std::vector<Symbol> group{y};
    placed[y] = true;
    for (Symbol other = y + 1; other < pmf.y_size(); ++other)
      if (!placed[other] && detail::same_conditional(pmf, y, other, py)) {
        group.push_back(other);
        placed[other] = true;
      }
    for (auto member : group) merge.mapping[member] = static_cast<Symbol>(merge.groups.size());
    merge.identity = merge.identity && group.size() == 1;
    merge.groups.push_back(std::move(group));
  }

  std::vector<std::string> names;
  for (const auto& group : merge.groups) {
    std::vector<std::string> members;
    for (auto y : group) members.push_back(pmf.y_alphabet()[y]);
    if (members.size() == 1) {
      names.push_back(members.front());
      continue;
    }
    std::vector<std::string> taken = pmf.y_alphabet();
    taken.insert(taken.end(), names.begin(), names.end());
    // a member's own name is free once the group absorbs it
    for (const auto& m : members) taken.erase(std::find(taken.begin(), taken.end(), m));
    names.push_back(detail::merged_name(members, taken));
  }

  std::vector<std::vector<Rational>> joint(pmf.x_size(), std::vector<Rational>(merge.groups.size(), Rational(0)));
  for (Symbol x = 0; x < pmf.x_size(); ++x)
    for (Symbol y = 0; y < pmf.y_size(); ++y) joint[x][merge.mapping[y]] += pmf.exact(x, y);
  SymbolMerge out{std::move(merge.mapping), std::move(merge.groups),
                  JointPMF(pmf.x_alphabet(), std::move(names), std::move(joint)), merge.identity};

  if (std::abs(conditional_entropy_x_given_y(pmf) - conditional_entropy_x_given_y(out.reduced)) > 1e-9)
    throw std::logic_error("merge changed H(X|Y)");
  return out;
}

enum class ReductionMode {
  PreMerge,    // E_y maps its y through f before the run; both sides run the reduced code
  Direct,      // the original side runs a code built for the original pmf
  Randomized,  // the reduced side regenerates y' from p(y | f(y)) and runs the original code
};

struct ReductionComparison {
  ReductionMode mode = ReductionMode::PreMerge;
  RateReport original;
  RateReport reduced;
  double delta_rx = 0.0;
  double delta_ry = 0.0;
};

/// Coupled Monte Carlo over the original and reduced sources: both sides
/// share the master seed, hence the per-trial streams and the bin seed.
inline ReductionComparison verify_reduction_equivalence(const JointPMF& pmf, const SymbolMerge& merge,
                                                        ProtocolId protocol, std::size_t n, double rate,
                                                        std::size_t trials, std::uint64_t seed,
                                                        ReductionMode mode = ReductionMode::PreMerge,
                                                        double epsilon = 0.1) {
  if (merge.mapping.size() != pmf.y_size()) throw std::invalid_argument("merge does not belong to this pmf");
  ProtocolParams params;
  params.n = n;
  params.rate = rate;
  params.epsilon = epsilon;
  params.bin_seed = binning_seed_for(seed);

  auto reduced_code = build_protocol(protocol, merge.reduced, params);
  ReductionComparison out;
  out.mode = mode;

  switch (mode) {
    case ReductionMode::PreMerge: {
      out.original = monte_carlo_rates(*reduced_code, pmf, trials, seed,
                                       [&](SequencePair& pair, std::mt19937_64&) { pair.y = merge.apply(pair.y); });
      out.reduced = monte_carlo_rates(*reduced_code, merge.reduced, trials, seed);
      break;
    }
    case ReductionMode::Direct: {
      auto original_code = build_protocol(protocol, pmf, params);
      out.original = monte_carlo_rates(*original_code, pmf, trials, seed);
      out.reduced = monte_carlo_rates(*reduced_code, merge.reduced, trials, seed);
      break;
    }
    case ReductionMode::Randomized: {
      auto original_code = build_protocol(protocol, pmf, params);
      // y' ~ p(y | z): within group z, proportional to p_Y(y)
      const auto py = pmf.exact_marginal_y();
      std::vector<std::vector<double>> cdf(merge.groups.size());
      for (std::size_t z = 0; z < merge.groups.size(); ++z) {
        Rational total = 0;
        for (auto y : merge.groups[z]) total += py[y];
        Rational run = 0;
        for (auto y : merge.groups[z]) {
          run += py[y];
          cdf[z].push_back(total == 0 ? 1.0 : to_double(run / total));
        }
      }
      out.original = monte_carlo_rates(*original_code, merge.reduced, trials, seed,
                                       [&](SequencePair& pair, std::mt19937_64& rng) {
                                         for (auto& z : pair.y) {
                                           const double u = uniform01(rng);
                                           std::size_t k = 0;
                                           while (k + 1 < cdf[z].size() && u >= cdf[z][k]) ++k;
                                           z = merge.groups[z][k];
                                         }
                                       });
      out.reduced = monte_carlo_rates(*reduced_code, merge.reduced, trials, seed);
      break;
    }
  }
  for (auto* r : {&out.original, &out.reduced}) {
    r->rate = rate;
    r->epsilon = epsilon;
  }
  out.delta_rx = std::abs(out.original.mean_rx - out.reduced.mean_rx);
  out.delta_ry = std::abs(out.original.mean_ry - out.reduced.mean_ry);
  return out;
}

}  // namespace zesc

#endif  // ZESC_REDUCTION_HPP
