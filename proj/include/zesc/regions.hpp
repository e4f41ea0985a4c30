#ifndef ZESC_REGIONS_HPP
#define ZESC_REGIONS_HPP

#include "zesc/graphs.hpp"
#include "zesc/reduction.hpp"
#include "zesc/source_model.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace zesc {

/// Forward and backward rates in bits per source symbol.
struct RatePoint {
  double rx = 0.0;
  double ry = 0.0;
};

enum class ConstraintKind { RX, RY, Sum };

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::RX: return "rx";
    case ConstraintKind::RY: return "ry";
    case ConstraintKind::Sum: return "rx+ry";
  }
  return "?";
}

/// One half-plane: value(kind) >= threshold.
struct Constraint {
  ConstraintKind kind = ConstraintKind::RX;
  double threshold = 0.0;

  double value(const RatePoint& p) const {
    switch (kind) {
      case ConstraintKind::RX: return p.rx;
      case ConstraintKind::RY: return p.ry;
      case ConstraintKind::Sum: return p.rx + p.ry;
    }
    return 0.0;
  }
};

enum class Exactness { Exact, InnerBound };

inline const char* to_string(Exactness e) { return e == Exactness::Exact ? "exact" : "inner-bound"; }

/// Intersection of half-planes of the forms rx >= a, ry >= b, rx + ry >= c.
/// Every such region is upward closed.
struct RateRegion {
  std::vector<Constraint> constraints;
  std::string provenance;
  Exactness exactness = Exactness::Exact;
  std::string note;

  std::optional<double> threshold(ConstraintKind kind) const {
    for (const auto& c : constraints)
      if (c.kind == kind) return c.threshold;
    return std::nullopt;
  }
};

inline bool contains(const RateRegion& region, const RatePoint& point, double slack = 1e-9) {
  for (const auto& c : region.constraints)
    if (c.value(point) < c.threshold - slack) return false;
  return true;
}

/// Achievable with a zero-error coloring of blocks plus binning:
/// rx >= H(X|Y), rx + ry >= hz_upper, where hz_upper bounds H_Z(X|Y) from above.
inline RateRegion coloring_inner_bound_region(const JointPMF& pmf, double hz_upper) {
  const double a = conditional_entropy_x_given_y(pmf);
  if (hz_upper < a - 1e-9) throw std::invalid_argument("coloring bound below H(X|Y)");
  return {{{ConstraintKind::RX, a}, {ConstraintKind::Sum, hz_upper}},
          "coloring-inner-bound",
          Exactness::InnerBound,
          "sum threshold is the coloring bound on H_Z(X|Y); the achievability argument alone also supports H(X)"};
}

/// Exact region when every cell is positive: rx >= H(X|Y), rx + ry >= H(X).
inline RateRegion full_support_region(const JointPMF& pmf) {
  if (!pmf.full_support()) throw NotFullSupport("some p(x, y) is zero");
  return {{{ConstraintKind::RX, conditional_entropy_x_given_y(pmf)}, {ConstraintKind::Sum, entropy_x(pmf)}},
          "full-support",
          Exactness::Exact,
          ""};
}

/// Exact region when the connectivity graph is a forest: rx >= H(X|Y), ry >= 0.
inline RateRegion cycle_free_region(const JointPMF& pmf) {
  if (!is_cycle_free(build_connectivity_graph(pmf))) throw NotCycleFree("connectivity graph has a cycle");
  return {{{ConstraintKind::RX, conditional_entropy_x_given_y(pmf)}, {ConstraintKind::RY, 0.0}},
          "cycle-free",
          Exactness::Exact,
          ""};
}

inline std::string describe_merge(const JointPMF& pmf, const SymbolMerge& merge) {
  std::ostringstream out;
  bool first = true;
  for (std::size_t z = 0; z < merge.groups.size(); ++z) {
    if (merge.groups[z].size() < 2) continue;
    out << (first ? "" : ", ");
    first = false;
    for (std::size_t i = 0; i < merge.groups[z].size(); ++i)
      out << (i ? "+" : "") << pmf.y_alphabet()[merge.groups[z][i]];
    out << "->" << merge.reduced.y_alphabet()[z];
  }
  return first ? "identity" : out.str();
}

/// Merges equivalent side-information symbols, then takes the cycle-free or
/// full-support region of the reduced source, which is the same region.
inline RateRegion region_via_reduction(const JointPMF& pmf) {
  const auto merge = merge_equivalent_side_info(pmf);
  std::optional<RateRegion> region;
  if (is_cycle_free(build_connectivity_graph(merge.reduced)))
    region = cycle_free_region(merge.reduced);
  else if (merge.reduced.full_support())
    region = full_support_region(merge.reduced);
  else
    throw NoApplicableTheorem("reduced source is neither cycle-free nor full-support");
  region->provenance = "reduction+" + region->provenance;
  region->note = "merge: " + describe_merge(pmf, merge);
  return *region;
}

/// Every region that applies to `pmf`. The coloring bound uses the smallest
/// per-symbol bound found over feasible coloring blocklengths.
inline std::vector<RateRegion> applicable_regions(const JointPMF& pmf, std::optional<HzBound> hz = std::nullopt) {
  std::vector<RateRegion> out;
  if (!hz) hz = best_hz_upper_bound(pmf);
  out.push_back(coloring_inner_bound_region(pmf, std::max(hz->bound, conditional_entropy_x_given_y(pmf))));
  out.back().note += "; coloring blocklength " + std::to_string(hz->n) + (hz->exact ? " (exact)" : " (heuristic)");
  if (pmf.full_support()) out.push_back(full_support_region(pmf));
  if (is_cycle_free(build_connectivity_graph(pmf))) out.push_back(cycle_free_region(pmf));
  if (!merge_equivalent_side_info(pmf).identity) {
    try {
      out.push_back(region_via_reduction(pmf));
    } catch (const NoApplicableTheorem&) {
    }
  }
  return out;
}

/// k x k membership grid over [0, span]^2 as CSV: rx,ry then one 0/1 column per region.
inline std::string membership_grid_csv(const std::vector<RateRegion>& regions, std::size_t k, double span) {
  std::ostringstream out;
  out << "rx,ry";
  for (const auto& r : regions) out << ',' << r.provenance;
  out << '\n';
  const double step = k > 1 ? span / static_cast<double>(k - 1) : 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const RatePoint p{step * static_cast<double>(i), step * static_cast<double>(j)};
      out << p.rx << ',' << p.ry;
      for (const auto& r : regions) out << ',' << (contains(r, p) ? 1 : 0);
      out << '\n';
    }
  return out.str();
}

}  // namespace zesc

#endif  // ZESC_REGIONS_HPP
