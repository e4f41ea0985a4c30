#include "zesc/io.hpp"
#include "zesc/zesc.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using zesc::Json;

struct SimulateArgs {
  std::string pmf;
  std::string protocol = "A";
  std::size_t n = 16;
  double rate = 0.5;
  double epsilon = 0.1;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t inner_n = 1;
  std::string out;
  std::string csv;
};

int simulate(const SimulateArgs& a) {
  const auto pmf = zesc::load_source(a.pmf);
  zesc::RateReport report;
  try {
    report = zesc::monte_carlo_rates(zesc::parse_protocol_id(a.protocol), pmf, a.n, a.rate, a.epsilon, a.trials,
                                     a.seed, a.inner_n);
  } catch (const zesc::ZeroErrorViolated& e) {
    std::cerr << "zero-error violated: " << e.what() << '\n';
    return 3;
  }
  const auto json = zesc::to_json(report).dump(2);
  if (a.out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream(a.out) << json << '\n';
  }
  const std::string csv = !a.csv.empty() ? a.csv : (a.out.empty() ? std::string("rates.csv") : a.out + ".csv");
  const bool fresh = !std::filesystem::exists(csv);
  std::ofstream rows(csv, std::ios::app);
  if (fresh) rows << "protocol,n,R,epsilon,trials,seed,mean_RX,mean_RY,P_n,ci_RX,ci_RY\n";
  rows << report.protocol << ',' << report.n << ',' << report.rate << ',' << report.epsilon << ',' << report.trials
       << ',' << report.seed << ',' << report.mean_rx << ',' << report.mean_ry << ',' << report.success_fraction
       << ',' << report.ci_rx << ',' << report.ci_ry << '\n';
  return 0;
}

int region(const std::string& spec, std::size_t grid) {
  const auto pmf = zesc::load_source(spec);
  const auto regions = zesc::applicable_regions(pmf);
  Json out = Json::array();
  for (const auto& r : regions) out.push_back(zesc::to_json(r));
  std::cout << out.dump(2) << '\n';
  if (grid > 0) {
    const double span = std::max(1.0, std::ceil(std::log2(static_cast<double>(pmf.x_size())))) * 1.25;
    std::cout << zesc::membership_grid_csv(regions, grid, span);
  }
  return 0;
}

int hz(const std::string& spec, std::size_t n) {
  const auto pmf = zesc::load_source(spec);
  zesc::HzBound bound;
  std::size_t colors = 0;
  if (n == 0) {
    bound = zesc::best_hz_upper_bound(pmf);
    colors = zesc::min_entropy_coloring(pmf, bound.n, std::uint64_t{1} << 18).color_count();
  } else {
    auto c = zesc::min_entropy_coloring(pmf, n);
    bound = {n, c.bound_per_symbol(), c.exact};
    colors = c.color_count();
  }
  Json out = {{"n", bound.n},
              {"search", bound.exact ? "exact" : "heuristic"},
              {"colors", colors},
              {"bound_per_symbol", bound.bound},
              {"lower_bound", zesc::conditional_entropy_x_given_y(pmf)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int reduce(const std::string& spec) {
  const auto pmf = zesc::load_source(spec);
  std::cout << zesc::to_json(pmf, zesc::merge_equivalent_side_info(pmf)).dump(2) << '\n';
  return 0;
}

int verify(const std::string& spec, const std::string& protocol, std::size_t n, double rate, double epsilon,
           std::uint64_t seed, std::size_t inner_n, bool all_pairs) {
  const auto pmf = zesc::load_source(spec);
  zesc::ProtocolParams params;
  params.n = n;
  params.rate = rate > 0 ? rate : zesc::conditional_entropy_x_given_y(pmf) + 0.1;
  params.epsilon = epsilon;
  params.bin_seed = zesc::binning_seed_for(seed);
  params.inner_n = inner_n;
  auto code = zesc::build_protocol(zesc::parse_protocol_id(protocol), pmf, params);
  auto check = zesc::exhaustive_zero_error_check(*code, pmf, all_pairs);
  std::cout << zesc::to_json(pmf, check).dump(2) << '\n';
  return check.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-error source coding with feedback and decoder side information"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Monte Carlo rates of one protocol");
  s->add_option("--pmf", sim.pmf, "built-in name or JSON file")->required();
  s->add_option("--protocol", sim.protocol, "A, B or C")->check(CLI::IsMember({"A", "B", "C"}));
  s->add_option("--n", sim.n, "source symbols per block");
  s->add_option("--rate", sim.rate, "binning rate, bits per symbol");
  s->add_option("--epsilon", sim.epsilon, "typicality tolerance");
  s->add_option("--trials", sim.trials);
  s->add_option("--seed", sim.seed);
  s->add_option("--inner-n", sim.inner_n, "coloring blocklength for protocol C");
  s->add_option("--out", sim.out, "JSON report path");
  s->add_option("--csv", sim.csv, "CSV file to append to (default <out>.csv)");

  std::string pmf;
  std::size_t grid = 0;
  auto* r = app.add_subcommand("region", "Rate regions that apply to a source");
  r->add_option("--pmf", pmf)->required();
  r->add_option("--grid", grid, "also print a k x k membership grid as CSV");

  std::size_t hz_n = 0;
  auto* h = app.add_subcommand("hz", "Coloring upper bound on the no-feedback rate");
  h->add_option("--pmf", pmf)->required();
  h->add_option("--n", hz_n, "coloring blocklength (default: best feasible)");

  auto* d = app.add_subcommand("reduce", "Merge equivalent side-information symbols");
  d->add_option("--pmf", pmf)->required();

  std::string protocol = "A";
  std::size_t n = 4, inner_n = 1;
  double rate = 0, epsilon = 0.1;
  std::uint64_t seed = 1;
  bool all_pairs = false;
  auto* v = app.add_subcommand("verify", "Exhaustive zero-error check");
  v->add_option("--pmf", pmf)->required();
  v->add_option("--protocol", protocol)->check(CLI::IsMember({"A", "B", "C"}));
  v->add_option("--n", n);
  v->add_option("--rate", rate, "binning rate (default H(X|Y) + 0.1)");
  v->add_option("--epsilon", epsilon);
  v->add_option("--seed", seed);
  v->add_option("--inner-n", inner_n);
  v->add_flag("--all-pairs", all_pairs, "include zero-probability pairs");

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) return simulate(sim);
    if (r->parsed()) return region(pmf, grid);
    if (h->parsed()) return hz(pmf, hz_n);
    if (d->parsed()) return reduce(pmf);
    if (v->parsed()) return verify(pmf, protocol, n, rate, epsilon, seed, inner_n, all_pairs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
