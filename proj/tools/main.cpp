#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "app.hpp"

namespace {

void add_common(CLI::App* sub, weightlab::app::RunConfig& c) {
  sub->add_option("--n", c.n, "Dimension (1 or 2)")->capture_default_str();
  sub->add_option("--resolution", c.resolution, "Grid cells per axis")->capture_default_str();
  sub->add_option("--depth", c.depth, "Depth of the dyadic cube family")->capture_default_str();
  sub->add_option("--box", c.box, "Half side of the ambient box")->capture_default_str();
  sub->add_option("--tol", c.tol, "Tail truncation tolerance")->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for random weights and subsets")->capture_default_str();
  sub->add_option("--out", c.out, "Output path; JSON goes to stdout when empty");
  sub->add_option("--format", c.format, "json, csv or both")->capture_default_str();
  sub->add_option("--p", c.p, "Exponents p")->delimiter(',');
  sub->add_option("--q", c.q, "Exponents q")->delimiter(',');
  sub->add_option("--s", c.s, "Dilation factors s")->delimiter(',');
  sub->add_option("--r", c.r, "Reverse Hoelder exponents r")->delimiter(',');
  sub->add_option("--weight", c.weight_specs, "Weight spec (JSON text or @file); repeatable");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace weightlab::app;
  RunConfig config;
  std::string suite = "all";

  CLI::App app{"weightlab: numerical verification of C_p weight estimates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* constants = app.add_subcommand("constants", "Estimate [w]_Ainf, [w]_Cp, [w]_Cp,s and RH constants");
  add_common(constants, config);

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  add_common(verify, config);
  std::string suites_help = "Suite: all";
  for (const auto& s : verify_suites()) suites_help += ", " + s;
  verify->add_option("suite", suite, suites_help)->capture_default_str();
  verify->add_option("--weights", config.weights, "Built-in weights: gallery, random, all or none")
      ->capture_default_str();
  verify->add_option("--random", config.random_weights, "Number of random grid weights")->capture_default_str();
  verify->add_option("--eps", config.eps, "Epsilons for the power sweep")->delimiter(',');

  auto* cfi = app.add_subcommand("cfi", "Maximal Hilbert transform ratio and good-lambda measurement");
  add_common(cfi, config);
  cfi->add_option("--signal", config.signal, "Signal spec (JSON text or @file)")->capture_default_str();
  cfi->add_option("--gammas", config.gammas, "Good-lambda gammas")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "Sweep [w]_Cp over |x|^{n(p-1-eps)}");
  add_common(sweep, config);
  sweep->add_option("--eps", config.eps, "Epsilons")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CommandResult result;
    if (*constants) {
      result = cmd_constants(config);
    } else if (*verify) {
      result = cmd_verify(suite, config);
    } else if (*cfi) {
      result = cmd_cfi(config);
    } else {
      result = cmd_sweep(config);
    }
    write_outputs(result, config, std::cout);
    for (const auto& line : result.summary) std::cerr << line << "\n";
    return result.exit_code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
