// acgeo — batch experiment runner for the asymptotically conical geometry
// verification suite. Each subcommand runs one experiment family (or `all`),
// writes the machine-readable results to a JSON/CSV file, prints a one-line
// human summary per experiment, and exits 0 iff every experiment passed.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "acgeo/experiments.hpp"

namespace {

struct CliState {
  acgeo::RunOptions opts;
  std::string radii_text;
  std::string params_path;
  std::string output;
  std::string format = "json";
};

std::vector<double> parse_radii(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      text.find(':', second + 1) != std::string::npos)
    throw acgeo::CodedError("InvalidOption",
                            "--radii expects lo:hi:count, e.g. 10:1e4:12");
  try {
    const double lo = std::stod(text.substr(0, first));
    const double hi = std::stod(text.substr(first + 1, second - first - 1));
    const int count = std::stoi(text.substr(second + 1));
    return acgeo::geometric_grid(lo, hi, count);
  } catch (const acgeo::CodedError&) {
    throw;
  } catch (const std::exception&) {
    throw acgeo::CodedError("InvalidOption",
                            "--radii expects lo:hi:count, e.g. 10:1e4:12");
  }
}

nlohmann::json load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw acgeo::CodedError("InvalidOption",
                            "cannot read parameter file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw acgeo::CodedError("InvalidOption", "parameter file '" + path +
                                                 "' is not valid JSON: " +
                                                 e.what());
  }
}

std::filesystem::path resolve_output(const std::string& requested,
                                     const std::string& family,
                                     const std::string& format) {
  std::filesystem::path path;
  if (requested.empty()) {
    path = family + "_results." + format;
  } else {
    path = requested;
  }
  if (path.is_relative()) {
    if (const char* dir = std::getenv("ACGEO_OUTPUT_DIR"); dir && *dir)
      path = std::filesystem::path(dir) / path;
  }
  return path;
}

void add_common_options(CLI::App* sub, CliState& state) {
  sub->add_option("--n", state.opts.n, "ambient dimension override (0 = family default)");
  sub->add_option("--radii", state.radii_text, "radius grid as lo:hi:count");
  sub->add_option("--directions", state.opts.directions,
                  "random sample directions per radius");
  sub->add_option("--seed", state.opts.seed, "base random seed");
  sub->add_option("--epsilon", state.opts.epsilon,
                  "slack for rate-iteration schedules");
  sub->add_option("--params", state.params_path,
                  "JSON file with family parameter overrides");
  sub->add_option("--output", state.output,
                  "result file (default <family>_results.<format> inside "
                  "ACGEO_OUTPUT_DIR)");
  sub->add_option("--format", state.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--jobs", state.opts.jobs, "max concurrent experiments");
  sub->add_flag("--timings", state.opts.timings,
                "record wall-clock runtimes (breaks bit-identical output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification suite for asymptotically conical geometry "
               "computations"};
  app.require_subcommand(1);
  CliState state;

  std::vector<std::string> families = acgeo::experiment_families();
  families.push_back("all");
  for (const auto& family : families) {
    CLI::App* sub = app.add_subcommand(
        family, family == "all" ? "run every experiment family"
                                : "run the " + family + " experiments");
    add_common_options(sub, state);
    if (family == "flags")
      sub->add_option("--range", state.opts.flags_range,
                      "inclusive n range for the Grassmannian table, e.g. 2..12");
    if (family == "weights")
      sub->add_option("--flat", state.opts.flat_m,
                      "real dimension m for the flat model weight set");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    bool unknown_subcommand = argc > 1 && argv[1][0] != '-';
    if (unknown_subcommand)
      for (const auto& family : families)
        if (family == argv[1]) unknown_subcommand = false;
    std::cerr << (unknown_subcommand ? "UnknownSubcommand" : "InvalidOption")
              << ": " << e.what() << '\n';
    return 2;
  }

  const std::string family = app.get_subcommands().front()->get_name();
  try {
    if (!state.radii_text.empty())
      state.opts.radii = parse_radii(state.radii_text);
    if (!state.params_path.empty())
      state.opts.params = load_params(state.params_path);

    const auto results = acgeo::run_family(family, state.opts);

    const auto out_path = resolve_output(state.output, family, state.format);
    if (out_path.has_parent_path())
      std::filesystem::create_directories(out_path.parent_path());
    if (state.format == "csv")
      acgeo::write_results_csv(out_path.string(), results);
    else
      acgeo::write_results_json(out_path.string(), results);

    int passed = 0;
    for (const auto& r : results) {
      passed += r.pass ? 1 : 0;
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
      if (!r.pass) {
        std::cout << "  (";
        if (!r.error.empty()) {
          std::cout << r.error;
        } else {
          std::cout << "measured";
          for (double v : r.measured) std::cout << ' ' << v;
          std::cout << " vs expected";
          for (double v : r.expected) std::cout << ' ' << v;
          std::cout << " tol " << r.tolerance;
        }
        std::cout << ')';
      }
      std::cout << '\n';
    }
    std::cout << "passed " << passed << '/' << results.size()
              << "; results written to " << out_path.string() << '\n';
    return acgeo::all_pass(results) ? 0 : 1;
  } catch (const acgeo::CodedError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << '\n';
    return 2;
  }
}
