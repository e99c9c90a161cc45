/*
 * experiments.hpp — the named, seeded, machine-checkable experiment registry
 * behind the CLI. Every experiment produces one ExperimentResult: a measured
 * value vector, an expected vector with a provenance tag, a tolerance, and a
 * pass flag meaning |measured − expected| ≤ tolerance componentwise.
 *
 * Provenance tags: "exact" (integer/combinatorial identity), "analytic"
 * (closed-form target), "asserted" (asymptotic rate band).
 *
 * Determinism: each experiment derives its own seed from the base seed and
 * its name, so results are independent of dispatch order and job count;
 * runtime_ms is reported as 0 unless timings are requested, keeping repeated
 * JSON output bit-identical.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acgeo/numerics.hpp"

namespace acgeo {

struct ExperimentResult {
  std::string name;
  std::string claim;               // what is being checked, in words
  std::vector<double> measured;
  std::vector<double> expected;
  std::string provenance;          // "exact" | "analytic" | "asserted"
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::string error;               // populated when an exception was mapped

  nlohmann::json to_json() const;
};

struct RunOptions {
  int n = 0;                      // 0 → family default
  std::vector<double> radii;      // empty → family default grid
  int directions = 3;
  std::uint64_t seed = 1138;
  double epsilon = 0.01;
  nlohmann::json params;          // optional parameter-file overrides
  int jobs = 1;
  bool timings = false;
  std::string flags_range = "2..12";
  int flat_m = 6;
};

/** Families, in the order the `all` subcommand runs them. */
std::vector<std::string> experiment_families();

/**
 * Run one family ("weights", "flags", "stenzel", "calabi", "cubic",
 * "quadrics", "odp") or "all". Module errors are mapped to failed results;
 * the suite always completes. Results are sorted by name.
 */
std::vector<ExperimentResult> run_family(const std::string& family,
                                         const RunOptions& options);

bool all_pass(const std::vector<ExperimentResult>& results);

/** Top-level JSON list of result records. */
nlohmann::json results_to_json(const std::vector<ExperimentResult>& results);

void write_results_json(const std::string& path,
                        const std::vector<ExperimentResult>& results);
void write_results_csv(const std::string& path,
                       const std::vector<ExperimentResult>& results);

}  // namespace acgeo
