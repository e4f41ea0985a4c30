#ifndef ZESC_IO_HPP
#define ZESC_IO_HPP

// JSON loading and serialization. Requires nlohmann/json.

#include "zesc/graphs.hpp"
#include "zesc/protocols.hpp"
#include "zesc/rational.hpp"
#include "zesc/reduction.hpp"
#include "zesc/regions.hpp"
#include "zesc/source_model.hpp"
#include "zesc/verification.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace zesc {

using Json = nlohmann::json;

namespace detail {

inline Rational json_probability(const Json& v) {
  if (v.is_number()) return rational_from_double(v.get<double>());
  if (v.is_string()) {
    if (auto r = parse_rational(v.get<std::string>())) return *r;
    throw std::invalid_argument("not a probability: " + v.get<std::string>());
  }
  throw std::invalid_argument("probabilities must be numbers or strings such as \"3/20\"");
}

inline std::vector<std::string> json_alphabet(const Json& doc, const char* key, std::size_t size) {
  if (doc.contains(key)) return doc.at(key).get<std::vector<std::string>>();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < size; ++i) names.push_back(std::to_string(i));
  return names;
}

inline std::vector<std::vector<Rational>> json_matrix(const Json& m) {
  std::vector<std::vector<Rational>> out;
  for (const auto& row : m) {
    out.emplace_back();
    for (const auto& v : row) out.back().push_back(json_probability(v));
  }
  return out;
}

}  // namespace detail

/// Accepts {"x": [...], "y": [...], "joint": [[...]]} or a channel form
/// {"px": [...], "py_given_x": [[...]]}. Alphabets default to 0, 1, ...
inline JointPMF pmf_from_json(const Json& doc) {
  if (doc.contains("joint")) {
    auto joint = detail::json_matrix(doc.at("joint"));
    if (joint.empty()) throw std::invalid_argument("joint matrix is empty");
    auto xs = detail::json_alphabet(doc, "x", joint.size());
    auto ys = detail::json_alphabet(doc, "y", joint[0].size());
    return JointPMF(std::move(xs), std::move(ys), std::move(joint));
  }
  if (doc.contains("px") && doc.contains("py_given_x")) {
    std::vector<Rational> px;
    for (const auto& v : doc.at("px")) px.push_back(detail::json_probability(v));
    auto channel = detail::json_matrix(doc.at("py_given_x"));
    if (channel.empty()) throw std::invalid_argument("channel matrix is empty");
    return JointPMF::from_channel(detail::json_alphabet(doc, "x", px.size()),
                                  detail::json_alphabet(doc, "y", channel[0].size()), px, channel);
  }
  throw std::invalid_argument("pmf JSON needs \"joint\" or \"px\" with \"py_given_x\"");
}

/// A built-in name (bec:0.3, bsc:1/4, bec2:0.5, identity[:k]) or a JSON file path.
inline JointPMF load_source(const std::string& spec) {
  if (auto builtin = builtin_source(spec)) return *builtin;
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("unknown source '" + spec + "' (not a built-in name or readable file)");
  return pmf_from_json(Json::parse(in));
}

inline Json to_json(const JointPMF& pmf) {
  Json joint = Json::array();
  for (Symbol x = 0; x < pmf.x_size(); ++x) {
    Json row = Json::array();
    for (Symbol y = 0; y < pmf.y_size(); ++y) row.push_back(to_string(pmf.exact(x, y)));
    joint.push_back(row);
  }
  return {{"x", pmf.x_alphabet()}, {"y", pmf.y_alphabet()}, {"joint", joint}};
}

inline Json to_json(const RateReport& r) {
  return {{"protocol", r.protocol},       {"n", r.n},
          {"rate", r.rate},               {"epsilon", r.epsilon},
          {"trials", r.trials},           {"seed", r.seed},
          {"mean_rx", r.mean_rx},         {"mean_ry", r.mean_ry},
          {"success_fraction", r.success_fraction}, {"ci_rx", r.ci_rx},
          {"ci_ry", r.ci_ry}};
}

inline Json to_json(const RateRegion& region) {
  Json constraints = Json::array();
  for (const auto& c : region.constraints)
    constraints.push_back({{"lhs", to_string(c.kind)}, {"threshold", c.threshold}});
  Json out = {{"provenance", region.provenance}, {"exactness", to_string(region.exactness)},
              {"constraints", constraints}};
  if (!region.note.empty()) out["note"] = region.note;
  return out;
}

inline Json to_json(const JointPMF& original, const SymbolMerge& merge) {
  Json mapping = Json::object();
  for (Symbol y = 0; y < original.y_size(); ++y)
    mapping[original.y_alphabet()[y]] = merge.reduced.y_alphabet()[merge.mapping[y]];
  return {{"identity", merge.identity}, {"mapping", mapping}, {"reduced", to_json(merge.reduced)}};
}

inline Json sequence_json(const Sequence& s, const std::vector<std::string>& alphabet) {
  Json out = Json::array();
  for (auto v : s) out.push_back(alphabet.at(v));
  return out;
}

inline Json to_json(const JointPMF& pmf, const ZeroErrorCheck& check) {
  Json out = {{"passed", check.passed}, {"pairs_checked", check.pairs_checked}};
  if (check.counterexample) {
    out["x"] = sequence_json(check.counterexample->x, pmf.x_alphabet());
    out["y"] = sequence_json(check.counterexample->y, pmf.y_alphabet());
    if (!check.decoded.empty()) out["decoded"] = sequence_json(check.decoded, pmf.x_alphabet());
    if (!check.failure.empty()) out["failure"] = check.failure;
  }
  return out;
}

}  // namespace zesc

#endif  // ZESC_IO_HPP
