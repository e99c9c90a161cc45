#include "acgeo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "acgeo/charts.hpp"
#include "acgeo/cone.hpp"
#include "acgeo/flags.hpp"
#include "acgeo/profiles.hpp"
#include "acgeo/projection.hpp"
#include "acgeo/weights.hpp"

namespace acgeo {

namespace {

using Clock = std::chrono::steady_clock;

struct ExperimentSpec {
  std::string name;
  std::string claim;
  std::string provenance;  // "exact" | "analytic" | "asserted"
  double tolerance;
  std::function<void(ExperimentResult&, const RunOptions&)> run;
};

ExperimentResult finish(ExperimentResult r) {
  r.pass = r.error.empty() && !r.measured.empty() &&
           r.measured.size() == r.expected.size();
  if (r.pass) {
    for (std::size_t i = 0; i < r.measured.size(); ++i) {
      if (!std::isfinite(r.measured[i]) ||
          std::abs(r.measured[i] - r.expected[i]) > r.tolerance) {
        r.pass = false;
        break;
      }
    }
  }
  return r;
}

std::vector<double> default_radii(const RunOptions& o, double lo, double hi,
                                  int count) {
  return o.radii.empty() ? geometric_grid(lo, hi, count) : o.radii;
}

int option_int(const RunOptions& o, const char* key, int fallback) {
  if (o.params.is_object() && o.params.contains(key))
    return o.params.at(key).get<int>();
  return fallback;
}

double option_double(const RunOptions& o, const char* key, double fallback) {
  if (o.params.is_object() && o.params.contains(key))
    return o.params.at(key).get<double>();
  return fallback;
}

std::vector<cplx> option_complex_list(const RunOptions& o, const char* key) {
  std::vector<cplx> out;
  if (o.params.is_object() && o.params.contains(key))
    for (double v : o.params.at(key)) out.emplace_back(v, 0.0);
  return out;
}

std::vector<std::tuple<int, int, cplx>> option_quadratic_list(
    const RunOptions& o, const char* key) {
  std::vector<std::tuple<int, int, cplx>> out;
  if (o.params.is_object() && o.params.contains(key))
    for (const auto& row : o.params.at(key))
      out.emplace_back(row.at(0).get<int>(), row.at(1).get<int>(),
                       cplx(row.at(2).get<double>(), 0.0));
  return out;
}

AffineConeSpec cubic_spec_from(const RunOptions& o) {
  return make_cubic_spec(option_complex_list(o, "t_linear"),
                         option_quadratic_list(o, "t_quadratic"));
}

AffineConeSpec quadric_spec_from(const RunOptions& o) {
  return make_quadric_pair_spec(option_complex_list(o, "lambda"),
                                option_complex_list(o, "t_linear"));
}

/** Worst relative violation of radius(ν_t z) = t·radius(z), t ∈ {2,4,8}. */
double radius_scaling_defect(const AffineConeSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    VecC z = place_at_radius(spec, random_cone_point(spec, rng), 3.0);
    const double r0 = radius(spec, z);
    for (double t : {2.0, 4.0, 8.0}) {
      const double rt = radius(spec, scaling_map(spec, z, t));
      worst = std::max(worst, std::abs(rt - t * r0) / (t * r0));
    }
  }
  return worst;
}

/** Fitted growth exponent of Σ|z_k|^degree along the scaling ray. */
double monomial_homogeneity_exponent(const AffineConeSpec& spec, int degree,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VecC unit = random_cone_point(spec, rng);
  auto field = [degree](const VecC& z) {
    double total = 0.0;
    for (int k = 0; k < z.size(); ++k)
      total += std::pow(std::abs(z[k]), degree);
    return total;
  };
  RateFit fit =
      homogeneity_degree(spec, field, unit, geometric_grid(1.0, 64.0, 9));
  return fit.exponent;
}

/** Slope of the per-sample ratio |Φ*J−J₀| / |Φ*Ω−Ω₀| against radius. */
double ratio_slope(const RateReport& report) {
  std::vector<double> radii, ratios;
  for (const auto& sample : report.samples) {
    if (sample.ratio > 0.0) {
      radii.push_back(sample.radius);
      ratios.push_back(sample.ratio);
    }
  }
  return fit_rate(radii, ratios, false).exponent;
}

// ── weights family ──────────────────────────────────────────────────────────

void run_flat_set(ExperimentResult& r, int m) {
  WeightSet ws = exceptional_weights(m, sphere_eigenvalues(m, 10));
  std::vector<double> expected_weights;
  for (int k = 0; k <= 10; ++k) {
    expected_weights.push_back(k);
    expected_weights.push_back(2.0 - m - k);
  }
  std::sort(expected_weights.begin(), expected_weights.end());
  double worst = 0.0;
  if (ws.weights.size() != expected_weights.size()) {
    worst = 1.0;
  } else {
    for (std::size_t i = 0; i < ws.weights.size(); ++i)
      worst = std::max(worst,
                       std::abs(ws.weights[i].value - expected_weights[i]));
  }
  r.measured = {worst, static_cast<double>(ws.weights.size())};
  r.expected = {0.0, 22.0};
}

std::vector<ExperimentSpec> weights_specs(const RunOptions& opts) {
  const int m = opts.flat_m;
  std::vector<ExperimentSpec> specs;
  specs.push_back(
      {"weights_flat_set_m4",
       "flat 4-space exceptional set is the two integer rays 0,1,2,... and "
       "-2,-3,...",
       "exact", 1e-12,
       [](ExperimentResult& r, const RunOptions&) { run_flat_set(r, 4); }});
  specs.push_back(
      {"weights_flat_set_m6",
       "flat 6-space exceptional set is 0,1,2,... and -4,-5,...", "exact",
       1e-12,
       [](ExperimentResult& r, const RunOptions&) { run_flat_set(r, 6); }});
  specs.push_back(
      {"weights_flat_set_m8",
       "flat 8-space exceptional set is 0,1,2,... and -6,-7,...", "exact",
       1e-12,
       [](ExperimentResult& r, const RunOptions&) { run_flat_set(r, 8); }});
  specs.push_back(
      {"weights_symmetry",
       "the exceptional set is symmetric about (2-m)/2", "exact", 1e-12,
       [m](ExperimentResult& r, const RunOptions&) {
         WeightSet ws = exceptional_weights(m, sphere_eigenvalues(m, 12));
         double worst = 0.0;
         for (const auto& entry : ws.weights) {
           const double mirror = (2.0 - m) - entry.value;
           double best = 1e300;
           for (const auto& other : ws.weights)
             best = std::min(best, std::abs(other.value - mirror));
           worst = std::max(worst, best);
         }
         r.measured = {worst};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"weights_round_trip",
       "every nonnegative weight w satisfies w(w+m-2) = source eigenvalue",
       "exact", 1e-10,
       [m](ExperimentResult& r, const RunOptions&) {
         auto mus = sphere_eigenvalues(m, 12);
         WeightSet ws = exceptional_weights(m, mus);
         double worst = 0.0;
         for (const auto& entry : ws.weights) {
           if (entry.value < -1e-12) continue;
           const double mu = entry.value * (entry.value + m - 2.0);
           double best = 1e300;
           for (double candidate : mus)
             best = std::min(best, std::abs(candidate - mu));
           worst = std::max(worst, best);
         }
         r.measured = {worst};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"weights_fredholm_band",
       "the Laplacian is Fredholm at -3 and fails exactly at -2 and -8 on "
       "flat 6-space",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         WeightSet ws = exceptional_weights(6, sphere_eigenvalues(6, 10));
         r.measured = {is_fredholm(ws, -3.0) ? 1.0 : 0.0,
                       is_fredholm(ws, -2.0) ? 1.0 : 0.0,
                       is_fredholm(ws, -8.0) ? 1.0 : 0.0};
         r.expected = {1.0, 0.0, 0.0};
       }});
  specs.push_back(
      {"weights_obata_gap",
       "with the Lichnerowicz bound, no weight lies in [1-m,1] besides 2-m, "
       "0 and the boundary value 1",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         WeightSet ws = exceptional_weights(8, sphere_eigenvalues(8, 12));
         ObataGapReport report = obata_gap_check(ws, true);
         r.measured = {report.gap_holds ? 1.0 : 0.0,
                       static_cast<double>(report.count_in_1_2)};
         r.expected = {1.0, 0.0};
       }});
  specs.push_back(
      {"weights_obata_interval",
       "an eigenvalue at 8.25 places the unique weight 1.5 in the open "
       "interval (1,2)",
       "analytic", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         WeightSet ws = exceptional_weights(6, {0.0, 5.0, 8.25});
         ObataGapReport report = obata_gap_check(ws, true);
         r.measured = {report.weight_in_1_2 ? *report.weight_in_1_2 : -1.0,
                       static_cast<double>(report.count_in_1_2)};
         r.expected = {1.5, 1.0};
       }});
  specs.push_back(
      {"weights_rate_iteration_examples",
       "doubling schedule: -1.5 terminates in one step at -3; -0.6 with "
       "slack 0.01 terminates in two steps at -2.39",
       "exact", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         RateIterationTrace a = rate_iteration(-1.5, 0.01);
         RateIterationTrace b = rate_iteration(-0.6, 0.01);
         r.measured = {static_cast<double>(a.step_count), a.terminal_rate,
                       static_cast<double>(b.step_count), b.terminal_rate};
         r.expected = {1.0, -3.0, 2.0, -2.39};
       }});
  specs.push_back(
      {"weights_rate_iteration_random",
       "1000 random schedules double exactly first, then double plus at most "
       "the slack, ending strictly below -2",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions& o) {
         std::mt19937_64 rng(r.seed);
         std::uniform_real_distribution<double> draw(-2.0 + 1e-9, -1e-9);
         int violations = 0;
         for (int trial = 0; trial < 1000; ++trial) {
           const double beta0 = draw(rng);
           RateIterationTrace trace = rate_iteration(beta0, o.epsilon);
           if (trace.steps.size() < 2 ||
               trace.steps[1] != 2.0 * trace.steps[0])
             ++violations;
           for (std::size_t i = 2; i < trace.steps.size(); ++i) {
             const double slack =
                 trace.steps[i] - 2.0 * trace.steps[i - 1];
             if (slack < -1e-15 || slack > o.epsilon + 1e-15) ++violations;
           }
           if (!(trace.terminal_rate < -2.0)) ++violations;
           if (trace.steps[trace.steps.size() - 2] < -2.0) ++violations;
         }
         r.measured = {static_cast<double>(violations)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"weights_radial_mode_solve",
       "the radial mode with source exponent -4 on flat 6-space is "
       "-r^{-2}/4, with vanishing substitution residual",
       "analytic", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         RadialModeSolution sol = radial_mode_solve(6, 0.0, -4.0, -1.0);
         r.measured = {sol.coefficient, sol.exponent, sol.residual};
         r.expected = {-0.25, -2.0, 0.0};
       }});
  specs.push_back(
      {"weights_radial_mode_resonant",
       "source exponent hitting the Green's-function root returns the log "
       "marker instead of a coefficient",
       "exact", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         RadialModeSolution sol = radial_mode_solve(6, 0.0, -6.0, -1.0);
         r.measured = {sol.resonant ? 1.0 : 0.0,
                       sol.log_solution ? 1.0 : 0.0, sol.residual};
         r.expected = {1.0, 1.0, 0.0};
       }});
  specs.push_back(
      {"weights_radial_mode_decaying",
       "source exponent -8 on flat 6-space: coefficient 1/12, growing root 0 "
       "suppressed, decaying root -4 kept",
       "analytic", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         RadialModeSolution sol = radial_mode_solve(6, 0.0, -8.0, -1.0);
         r.measured = {sol.coefficient, sol.suppressed_root, sol.kept_root,
                       sol.residual};
         r.expected = {1.0 / 12.0, 0.0, -4.0, 0.0};
       }});
  specs.push_back(
      {"weights_lens_sublattice",
       "the order-2 diagonal quotient of the 3-sphere keeps exactly the "
       "even-degree harmonics",
       "exact", 1e-12,
       [](ExperimentResult& r, const RunOptions&) {
         auto mus = lens_eigenvalues(4, 2, 10);
         std::vector<double> expected_mus;
         for (int k = 0; k <= 10; k += 2)
           expected_mus.push_back(static_cast<double>(k) * (k + 2.0));
         double worst = mus.size() == expected_mus.size() ? 0.0 : 1.0;
         for (std::size_t i = 0; worst == 0.0 && i < mus.size(); ++i)
           worst = std::max(worst, std::abs(mus[i] - expected_mus[i]));
         r.measured = {worst, static_cast<double>(mus.size())};
         r.expected = {0.0, 6.0};
       }});
  specs.push_back(
      {"weights_json_round_trip",
       "serializing and re-deriving a weight set reproduces it exactly",
       "exact", 0.0,
       [m](ExperimentResult& r, const RunOptions&) {
         WeightSet ws = exceptional_weights(m, sphere_eigenvalues(m, 8));
         WeightSet back = WeightSet::from_json(ws.to_json());
         double worst = ws.weights.size() == back.weights.size() ? 0.0 : 1.0;
         for (std::size_t i = 0; worst == 0.0 && i < ws.weights.size(); ++i)
           worst = std::max(worst, std::abs(ws.weights[i].value -
                                            back.weights[i].value));
         r.measured = {worst};
         r.expected = {0.0};
       }});
  return specs;
}

// ── flags family ────────────────────────────────────────────────────────────

void enumerate_compositions(int total, std::vector<std::vector<int>>& out) {
  for (unsigned mask = 0; mask < (1u << (total - 1)); ++mask) {
    std::vector<int> parts;
    int run = 1;
    for (int cut = 0; cut < total - 1; ++cut) {
      if (mask >> cut & 1u) {
        parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.push_back(run);
    if (parts.size() >= 2) out.push_back(std::move(parts));
  }
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos)
    throw CodedError("InvalidOption", "range must look like 2..12");
  try {
    return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 2))};
  } catch (const std::exception&) {
    throw CodedError("InvalidOption", "range must look like 2..12");
  }
}

std::vector<ExperimentSpec> flags_specs(const RunOptions& opts) {
  const auto [range_lo, range_hi] = parse_range(opts.flags_range);
  std::vector<ExperimentSpec> specs;
  specs.push_back(
      {"flags_su2_root_sum",
       "the full flag of SU(2) has normalized weight vector (2,0), divisible "
       "by 2",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         FlagPartition flag = flag_c1({1, 1});
         r.measured = {static_cast<double>(flag.c1_coefficients[0]),
                       static_cast<double>(flag.c1_coefficients[1]),
                       static_cast<double>(flag.divisibility)};
         r.expected = {2.0, 0.0, 2.0};
       }});
  specs.push_back(
      {"flags_root_sum_family",
       "partitions (1,k-1,n+1-k) normalize to (n+k, n,...,n, 0,...,0)",
       "exact", 0.0,
       [range_lo, range_hi](ExperimentResult& r, const RunOptions&) {
         int violations = 0;
         for (int n = std::max(2, range_lo); n <= range_hi; ++n) {
           for (int k = 2; k <= n; ++k) {
             FlagPartition flag = flag_c1({1, k - 1, n + 1 - k});
             std::vector<int> want(n + 1, 0);
             want[0] = n + k;
             for (int i = 1; i < k; ++i) want[i] = n;
             if (flag.c1_coefficients != want) ++violations;
           }
         }
         r.measured = {static_cast<double>(violations)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"flags_maximal_divisibility",
       "the full flag variety weight vector is divisible by exactly 2 for "
       "every rank",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         r.measured = {static_cast<double>(maximal_flag_divisibility(1)),
                       static_cast<double>(maximal_flag_divisibility(2)),
                       static_cast<double>(maximal_flag_divisibility(5)),
                       static_cast<double>(maximal_flag_divisibility(9))};
         r.expected = {2.0, 2.0, 2.0, 2.0};
       }});
  specs.push_back(
      {"flags_duality_reversal",
       "reversing an ordered partition preserves the lattice divisibility",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         int violations = 0;
         for (int total = 2; total <= 8; ++total) {
           std::vector<std::vector<int>> compositions;
           enumerate_compositions(total, compositions);
           for (const auto& parts : compositions) {
             std::vector<int> reversed(parts.rbegin(), parts.rend());
             if (flag_c1(parts).divisibility !=
                 flag_c1(reversed).divisibility)
               ++violations;
           }
         }
         r.measured = {static_cast<double>(violations)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"flags_grassmannian_cross_check",
       "the explicit divisibility table matches the generic rank/Chern "
       "criterion, and existence matches twist integrality",
       "exact", 0.0,
       [range_lo, range_hi](ExperimentResult& r, const RunOptions&) {
         int violations = 0;
         const int c1_bundle[4] = {+1, -1, -1, +1};
         for (int n = std::max(2, range_lo); n <= range_hi; ++n) {
           for (int k = 2; k <= n; ++k) {
             auto records = grassmannian_small_resolutions(k, n);
             for (int b = 0; b < 4; ++b) {
               const auto& rec = records[b];
               if (rec.exists != (rec.twist_power.denominator() == 1))
                 ++violations;
               const int rank = b < 2 ? k : n + 1 - k;
               if (rank < 2) continue;  // projectivization degenerates
               BundleCheck check = projective_bundle_c1_check(
                   rank, c1_bundle[b], -(n + 1), rank);
               if (check.divisible != rec.exists) ++violations;
               if (check.divisible && check.twist_power &&
                   *check.twist_power != rec.twist_power)
                 ++violations;
             }
           }
         }
         r.measured = {static_cast<double>(violations)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"flags_cotangent_projective_space",
       "over the projective space G(1,n+1) the dual quotient bundle always "
       "works with twist power 1",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         int violations = 0;
         for (int n = 1; n <= 12; ++n) {
           const auto recs = grassmannian_small_resolutions(1, n);
           if (!recs[3].exists || recs[3].twist_power != Rational(1))
             ++violations;
         }
         r.measured = {static_cast<double>(violations)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"flags_small_resolution_examples",
       "tautological bundle over G(2,5) twists by power 2; over G(3,5) only "
       "its dual and the quotient pair work (powers 2, 3, 2)",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         auto g24 = grassmannian_small_resolutions(2, 4);
         auto g34 = grassmannian_small_resolutions(3, 4);
         r.measured = {g24[0].exists ? 1.0 : 0.0,
                       to_double(g24[0].twist_power),
                       g34[0].exists ? 1.0 : 0.0,
                       to_double(g34[1].twist_power),
                       to_double(g34[2].twist_power),
                       to_double(g34[3].twist_power)};
         r.expected = {1.0, 2.0, 0.0, 2.0, 3.0, 2.0};
       }});
  specs.push_back(
      {"flags_fano_indices",
       "projective spaces have index n and the quadric has index n-1",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         auto rows = fano_index_table(6);
         auto find = [&rows](const std::string& space) {
           for (const auto& row : rows)
             if (row.space == space) return static_cast<double>(row.index);
           return -1.0;
         };
         r.measured = {find("Q^3"), find("P^2"), find("P^1")};
         r.expected = {3.0, 3.0, 2.0};
       }});
  specs.push_back(
      {"flags_projective_bundle_examples",
       "rank/Chern divisibility on a Picard-rank-1 base: (2,1,-5) divisible "
       "by 2 with twist 2; anything by 1; 3 does not divide 5",
       "exact", 0.0,
       [](ExperimentResult& r, const RunOptions&) {
         BundleCheck a = projective_bundle_c1_check(2, 1, -5, 2);
         BundleCheck b = projective_bundle_c1_check(2, 1, -5, 1);
         BundleCheck c = projective_bundle_c1_check(3, 1, -6, 3);
         r.measured = {a.divisible ? 1.0 : 0.0,
                       a.twist_power ? to_double(*a.twist_power) : -1.0,
                       b.divisible ? 1.0 : 0.0, c.divisible ? 1.0 : 0.0};
         r.expected = {1.0, 2.0, 1.0, 0.0};
       }});
  return specs;
}

// ── stenzel family ──────────────────────────────────────────────────────────

StenzelProfile profile_from(const RunOptions& o, int n) {
  return solve_stenzel_profile(n, option_double(o, "w_max", 30.0),
                               option_int(o, "grid_size", 3001));
}

std::vector<ExperimentSpec> stenzel_specs(const RunOptions&) {
  std::vector<ExperimentSpec> specs;
  for (int n : {3, 4}) {
    specs.push_back(
        {"stenzel_ode_residual_n" + std::to_string(n),
         "the solved profile satisfies (h'^n)' = sinh^{n-1} to 1e-9 relative",
         "analytic", 1e-9,
         [n](ExperimentResult& r, const RunOptions& o) {
           r.measured = {profile_from(o, n).ode_residual};
           r.expected = {0.0};
         }});
  }
  specs.push_back(
      {"stenzel_exact_n2",
       "the 2-dimensional profile is f = 2-sqrt(tau+1)... explicitly "
       "2(tau+1)^{1/2} - 2*2^{1/2}: constant, amplitude and values match",
       "analytic", 1e-6,
       [](ExperimentResult& r, const RunOptions& o) {
         StenzelProfile profile = profile_from(o, 2);
         const double dev_constant =
             std::abs(profile.c_infinity + 2.0 * std::sqrt(2.0));
         const double dev_amplitude = std::abs(profile.C_n_fitted - 2.0);
         const double tau = 5.0;
         const double dev_value = std::abs(
             profile.f(tau) -
             (2.0 * std::sqrt(tau + 1.0) - 2.0 * std::sqrt(2.0)));
         r.measured = {dev_constant, dev_amplitude, dev_value};
         r.expected = {0.0, 0.0, 0.0};
       }});
  for (int n : {3, 4}) {
    const double expected_rate = -2.0 * n / (n - 1.0);
    specs.push_back(
        {"stenzel_metric_rate_n" + std::to_string(n),
         "the smoothed metric approaches the cone metric at rate -2n/(n-1)",
         "asserted", 0.15,
         [n, expected_rate](ExperimentResult& r, const RunOptions& o) {
           MetricRateResult res = metric_rate_experiment(
               MetricFamily::stenzel, n, default_radii(o, 10.0, 1e4, 12),
               o.directions, r.seed);
           r.measured = {res.fit.exponent};
           r.expected = {expected_rate};
         }});
  }
  specs.push_back(
      {"stenzel_leading_term",
       "at tau = 1e6 the normalized metric difference is "
       "diag(0,0,1,-1,1,-1), trace-free and divergence-free to 1e-2",
       "analytic", 1e-2,
       [](ExperimentResult& r, const RunOptions&) {
         LeadingTermReport report = stenzel_leading_term(3, 1e6);
         Eigen::MatrixXd want = Eigen::MatrixXd::Zero(6, 6);
         want(2, 2) = 1.0;
         want(3, 3) = -1.0;
         want(4, 4) = 1.0;
         want(5, 5) = -1.0;
         const double entry_dev =
             (report.matrix - want).cwiseAbs().maxCoeff();
         r.measured = {entry_dev, std::abs(report.trace),
                       std::abs(report.bianchi_dr),
                       std::abs(report.bianchi_dcr)};
         r.expected = {0.0, 0.0, 0.0, 0.0};
       }});
  const struct {
    int n;
    double exponent;
    double log_power;
  } corrections[] = {{2, -1.0, 0.0}, {3, -2.0, 1.0}, {4, -2.0, 0.0}};
  for (const auto& row : corrections) {
    specs.push_back(
        {"stenzel_correction_n" + std::to_string(row.n),
         "the profile correction beyond the leading cone term has the "
         "predicted exponent and log power",
         "asserted", 0.25,
         [row](ExperimentResult& r, const RunOptions& o) {
           StenzelProfile profile = profile_from(o, row.n);
           r.measured = {profile.correction_fit.exponent,
                         static_cast<double>(profile.correction_fit.log_power)};
           r.expected = {row.exponent, row.log_power};
         }});
  }
  for (int n : {3, 4}) {
    specs.push_back(
        {"stenzel_ma_constancy_n" + std::to_string(n),
         "the Monge-Ampere residual of the smoothing potential is constant "
         "over 120 random points (stddev <= 1e-6)",
         "analytic", 1e-6,
         [n](ExperimentResult& r, const RunOptions& o) {
           StenzelProfile profile = profile_from(o, n);
           MAConstancyResult res = stenzel_ma_survey(profile, 120, r.seed);
           r.measured = {res.stddev};
           r.expected = {0.0};
         }});
  }
  specs.push_back(
      {"stenzel_ma_scaling",
       "scaling the potential by c shifts the residual by exactly n log c",
       "analytic", 1e-8,
       [](ExperimentResult& r, const RunOptions& o) {
         StenzelProfile profile = profile_from(o, 3);
         const double c = 1.7;
         MAConstancyResult base = stenzel_ma_survey(profile, 40, r.seed);
         MAConstancyResult scaled =
             stenzel_ma_survey(profile, 40, r.seed, c);
         r.measured = {std::abs((scaled.mean - base.mean) - 3.0 * std::log(c))};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"stenzel_amplitude_consistency",
       "the cone amplitude from the closed form, the profile fit and the "
       "Monge-Ampere recovery agree to 1e-4",
       "analytic", 1e-4,
       [](ExperimentResult& r, const RunOptions& o) {
         StenzelProfile profile = profile_from(o, 3);
         MAConstancyResult smooth = stenzel_ma_survey(profile, 80, r.seed);
         MAConstancyResult cone = cone_ma_survey(3, 80, r.seed + 1);
         const double recovered =
             std::exp((smooth.mean - cone.mean) / 3.0);
         r.measured = {profile.C_n_fitted - profile.C_n_closed,
                       recovered - profile.C_n_closed};
         r.expected = {0.0, 0.0};
       }});
  return specs;
}

// ── calabi family ───────────────────────────────────────────────────────────

std::vector<ExperimentSpec> calabi_specs(const RunOptions&) {
  std::vector<ExperimentSpec> specs;
  for (int n : {2, 3}) {
    specs.push_back(
        {"calabi_det_identity_n" + std::to_string(n),
         "the profile satisfies (u')^{n-1}(u' + t u'') = 1 identically",
         "analytic", 1e-12,
         [n](ExperimentResult& r, const RunOptions& o) {
           CalabiProfile profile{n, option_double(o, "calabi_c", 1.0)};
           double worst = 0.0;
           for (double t : geometric_grid(0.05, 50.0, 40))
             worst = std::max(worst,
                              std::abs(profile.det_identity_residual(t)));
           r.measured = {worst};
           r.expected = {0.0};
         }});
  }
  specs.push_back(
      {"calabi_metric_rate_n2",
       "the 4-dimensional resolution metric decays to its cone at rate -4",
       "asserted", 0.1,
       [](ExperimentResult& r, const RunOptions& o) {
         MetricRateResult res = metric_rate_experiment(
             MetricFamily::eguchi_hanson, 2, default_radii(o, 3.0, 100.0, 12),
             o.directions, r.seed);
         r.measured = {res.fit.exponent};
         r.expected = {-4.0};
       }});
  specs.push_back(
      {"calabi_metric_rate_n3",
       "the 6-dimensional resolution metric decays to its cone at rate -2n",
       "asserted", 0.2,
       [](ExperimentResult& r, const RunOptions& o) {
         MetricRateResult res = metric_rate_experiment(
             MetricFamily::calabi, 3, default_radii(o, 3.0, 100.0, 12),
             o.directions, r.seed);
         r.measured = {res.fit.exponent};
         r.expected = {-6.0};
       }});
  for (int n : {2, 3}) {
    specs.push_back(
        {"calabi_ma_constancy_n" + std::to_string(n),
         "the Monge-Ampere residual of the resolution potential is constant "
         "over 120 random points (stddev <= 1e-6)",
         "analytic", 1e-6,
         [n](ExperimentResult& r, const RunOptions& o) {
           MAConstancyResult res = calabi_ma_survey(
               n, option_double(o, "calabi_c", 1.0), 120, r.seed);
           r.measured = {res.stddev};
           r.expected = {0.0};
         }});
  }
  specs.push_back(
      {"calabi_ma_scaling",
       "scaling the potential by c shifts the residual by exactly n log c",
       "analytic", 1e-8,
       [](ExperimentResult& r, const RunOptions& o) {
         const double c = 2.3;
         const double cal_c = option_double(o, "calabi_c", 1.0);
         MAConstancyResult base = calabi_ma_survey(2, cal_c, 40, r.seed);
         MAConstancyResult scaled =
             calabi_ma_survey(2, cal_c, 40, r.seed, c);
         r.measured = {std::abs((scaled.mean - base.mean) - 2.0 * std::log(c))};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"calabi_profile_consistency",
       "the potential's numeric derivative matches the closed-form u' "
       "across the series/quadrature seam",
       "analytic", 1e-6,
       [](ExperimentResult& r, const RunOptions& o) {
         CalabiProfile profile{3, option_double(o, "calabi_c", 1.0)};
         FDPolicy fd;
         double worst = 0.0;
         for (double t : {0.5, 1.0, 2.5, 2.9, 3.0, 5.0, 20.0}) {
           const double h = fd.step_scale(t, false);
           const double numeric = d1_central(
               [&profile](double x) { return profile.u(x); }, t, h);
           worst = std::max(worst, std::abs(numeric - profile.u_prime(t)));
         }
         r.measured = {worst};
         r.expected = {0.0};
       }});
  return specs;
}

// ── deformation families (cubic / quadrics / odp) ───────────────────────────

void rate_experiment(ExperimentResult& r, const AffineConeSpec& spec,
                     const std::vector<double>& radii, int directions,
                     double expected_rate) {
  RateReport report = deformation_rate_scan(spec, radii, directions, r.seed);
  r.measured = {report.omega_fit.exponent, report.j_fit.exponent};
  r.expected = {expected_rate, expected_rate};
}

std::vector<ExperimentSpec> cubic_specs(const RunOptions&) {
  std::vector<ExperimentSpec> specs;
  specs.push_back(
      {"cubic_deformation_rates_default",
       "volume form and complex structure of the smoothed cubic cone decay "
       "at rate -9",
       "asserted", 0.3,
       [](ExperimentResult& r, const RunOptions& o) {
         rate_experiment(r, cubic_spec_from(o),
                         default_radii(o, 10.0, 1e4, 12), o.directions, -9.0);
       }});
  specs.push_back(
      {"cubic_deformation_rates_linear",
       "adding a linear deformation slows the decay to rate -6",
       "asserted", 0.3,
       [](ExperimentResult& r, const RunOptions& o) {
         AffineConeSpec spec =
             make_cubic_spec({cplx(0.3), cplx(-0.2), cplx(0.15), cplx(0.1)});
         rate_experiment(r, spec, default_radii(o, 10.0, 1e4, 12),
                         o.directions, -6.0);
       }});
  specs.push_back(
      {"cubic_deformation_rates_quadratic",
       "adding a quadratic deformation slows the decay to rate -3",
       "asserted", 0.3,
       [](ExperimentResult& r, const RunOptions& o) {
         AffineConeSpec spec =
             make_cubic_spec({}, {{0, 1, cplx(0.25)}, {2, 3, cplx(-0.15)}});
         rate_experiment(r, spec, default_radii(o, 10.0, 1e4, 12),
                         o.directions, -3.0);
       }});
  specs.push_back(
      {"cubic_alpha_exponent",
       "the projection coefficient decays like |z|^{-4}", "asserted", 0.05,
       [](ExperimentResult& r, const RunOptions& o) {
         RateReport report =
             deformation_rate_scan(make_cubic_spec(),
                                   default_radii(o, 10.0, 1e4, 12),
                                   o.directions, r.seed);
         r.measured = {report.coefficient_fit.exponent};
         r.expected = {-4.0};
       }});
  specs.push_back(
      {"cubic_alpha_identity",
       "the projection coefficient satisfies alpha*|z|^4*P(z) = 1 to 1e-10 "
       "at every sample",
       "analytic", 1e-10,
       [](ExperimentResult& r, const RunOptions& o) {
         AffineConeSpec spec = make_cubic_spec();
         ProjectionMap proj(spec);
         std::mt19937_64 rng(r.seed);
         double worst = 0.0;
         for (int d = 0; d < std::max(3, o.directions); ++d) {
           VecC unit = random_cone_point(spec, rng);
           for (double rad : geometric_grid(10.0, 1e4, 8)) {
             VecC z = place_at_radius(spec, unit, rad);
             ProjectionSolution sol = proj.solve(z);
             const cplx alpha = sol.coefficients(0);
             double s4 = 0.0;
             cplx s14 = 0.0, s6 = 0.0;
             for (int k = 0; k < z.size(); ++k) {
               const double m2 = std::norm(z[k]);
               s4 += m2 * m2;
               const cplx zb = std::conj(z[k]);
               s14 += z[k] * zb * zb * zb * zb;
               s6 += zb * zb * zb * zb * zb * zb;
             }
             const cplx identity =
                 alpha * (3.0 * s4 + 3.0 * alpha * s14 + alpha * alpha * s6) -
                 1.0;
             worst = std::max(worst, std::abs(identity));
           }
         }
         r.measured = {worst};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"cubic_j_omega_bound",
       "the ratio of complex-structure to volume-form differences is "
       "radius-independent (slope of the ratio <= 0.05)",
       "asserted", 0.05,
       [](ExperimentResult& r, const RunOptions& o) {
         RateReport report =
             deformation_rate_scan(make_cubic_spec(),
                                   default_radii(o, 10.0, 1e4, 12),
                                   o.directions, r.seed);
         if (!std::isfinite(report.lemma_constant))
           throw CodedError("DegenerateFit", "non-finite comparison constant");
         r.measured = {ratio_slope(report)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"cubic_radius_scaling",
       "the scaling map multiplies the cone radius exactly", "exact", 1e-10,
       [](ExperimentResult& r, const RunOptions& o) {
         r.measured = {radius_scaling_defect(cubic_spec_from(o), r.seed)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"cubic_homogeneity_degree",
       "cubic monomial magnitudes grow with the ninth power of the radius",
       "analytic", 1e-8,
       [](ExperimentResult& r, const RunOptions& o) {
         r.measured = {
             monomial_homogeneity_exponent(cubic_spec_from(o), 3, r.seed)};
         r.expected = {9.0};
       }});
  return specs;
}

std::vector<ExperimentSpec> quadrics_specs(const RunOptions&) {
  std::vector<ExperimentSpec> specs;
  specs.push_back(
      {"quadrics_deformation_rates_default",
       "volume form and complex structure of the smoothed quadric "
       "intersection decay at rate -6",
       "asserted", 0.3,
       [](ExperimentResult& r, const RunOptions& o) {
         rate_experiment(r, quadric_spec_from(o),
                         default_radii(o, 10.0, 200.0, 10), o.directions,
                         -6.0);
       }});
  specs.push_back(
      {"quadrics_deformation_rates_linear",
       "adding a linear deformation slows the decay to rate -3",
       "asserted", 0.3,
       [](ExperimentResult& r, const RunOptions& o) {
         AffineConeSpec spec = make_quadric_pair_spec(
             {}, {cplx(0.2), cplx(-0.1), cplx(0.15), cplx(0.05), cplx(0.1)});
         rate_experiment(r, spec, default_radii(o, 10.0, 200.0, 10),
                         o.directions, -3.0);
       }});
  specs.push_back(
      {"quadrics_radius_scaling",
       "the scaling map multiplies the cone radius exactly", "exact", 1e-10,
       [](ExperimentResult& r, const RunOptions& o) {
         r.measured = {radius_scaling_defect(quadric_spec_from(o), r.seed)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"quadrics_homogeneity_degree",
       "quadratic monomial magnitudes grow with the sixth power of the "
       "radius",
       "analytic", 1e-8,
       [](ExperimentResult& r, const RunOptions& o) {
         r.measured = {
             monomial_homogeneity_exponent(quadric_spec_from(o), 2, r.seed)};
         r.expected = {6.0};
       }});
  return specs;
}

std::vector<ExperimentSpec> odp_specs(const RunOptions& opts) {
  const int n = opts.n > 0 ? opts.n : 3;
  const double cone_rate = -2.0 * n / (n - 1.0);
  std::vector<ExperimentSpec> specs;
  specs.push_back(
      {"odp_projection_identity",
       "the projected point satisfies its quadric equation to machine "
       "precision, structurally at all radii and naively below radius 100",
       "analytic", 1e-12,
       [n](ExperimentResult& r, const RunOptions& o) {
         AffineConeSpec spec = make_odp_spec(n);
         ProjectionMap proj(spec);
         std::mt19937_64 rng(r.seed);
         double worst_structured = 0.0, worst_naive = 0.0;
         for (int d = 0; d < std::max(3, o.directions); ++d) {
           VecC unit = random_cone_point(spec, rng);
           for (double rad : geometric_grid(2.0, 1e4, 10)) {
             VecC z = place_at_radius(spec, unit, rad);
             ProjectionSolution sol = proj.solve(z);
             worst_structured =
                 std::max(worst_structured, sol.residual / 2.0);
             if (rad <= 100.0) {
               cplx total = 0.0;
               for (int k = 0; k < sol.point.size(); ++k)
                 total += sol.point[k] * sol.point[k];
               worst_naive =
                   std::max(worst_naive, std::abs(total - 1.0) /
                                             (1.0 + sol.point.squaredNorm()));
             }
           }
         }
         r.measured = {worst_structured, worst_naive};
         r.expected = {0.0, 0.0};
       }});
  specs.push_back(
      {"odp_deformation_rates",
       "volume form and complex structure of the smoothed quadric cone "
       "decay at rate -2n/(n-1)",
       "asserted", 0.3,
       [n, cone_rate](ExperimentResult& r, const RunOptions& o) {
         rate_experiment(r, make_odp_spec(n), default_radii(o, 10.0, 1e4, 12),
                         o.directions, cone_rate);
       }});
  specs.push_back(
      {"odp_metric_rate",
       "the smoothed metric approaches the cone metric at rate -2n/(n-1)",
       "asserted", 0.15,
       [n, cone_rate](ExperimentResult& r, const RunOptions& o) {
         MetricRateResult res = metric_rate_experiment(
             MetricFamily::stenzel, n, default_radii(o, 10.0, 1e4, 12),
             o.directions, r.seed);
         r.measured = {res.fit.exponent};
         r.expected = {cone_rate};
       }});
  specs.push_back(
      {"odp_j_omega_bound",
       "the ratio of complex-structure to volume-form differences is "
       "radius-independent (slope of the ratio <= 0.05)",
       "asserted", 0.05,
       [n](ExperimentResult& r, const RunOptions& o) {
         RateReport report =
             deformation_rate_scan(make_odp_spec(n),
                                   default_radii(o, 10.0, 1e4, 12),
                                   o.directions, r.seed);
         if (!std::isfinite(report.lemma_constant))
           throw CodedError("DegenerateFit", "non-finite comparison constant");
         r.measured = {ratio_slope(report)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"odp_cone_ma_constancy",
       "the cone potential's Monge-Ampere residual is constant over 120 "
       "random points (stddev <= 1e-6)",
       "analytic", 1e-6,
       [n](ExperimentResult& r, const RunOptions&) {
         MAConstancyResult res = cone_ma_survey(n, 120, r.seed);
         r.measured = {res.stddev};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"odp_radius_scaling",
       "the scaling map multiplies the cone radius exactly", "exact", 1e-10,
       [n](ExperimentResult& r, const RunOptions&) {
         r.measured = {radius_scaling_defect(make_odp_spec(n), r.seed)};
         r.expected = {0.0};
       }});
  specs.push_back(
      {"odp_newton_contraction",
       "the projection solve converges in two steps with decreasing "
       "corrections",
       "exact", 0.0,
       [n](ExperimentResult& r, const RunOptions&) {
         AffineConeSpec spec = make_odp_spec(n);
         ProjectionMap proj(spec);
         std::mt19937_64 rng(r.seed);
         VecC z = place_at_radius(spec, random_cone_point(spec, rng), 50.0);
         ProjectionSolution sol = proj.solve(z);
         int violations = 0;
         for (std::size_t i = 1; i < sol.step_norms.size(); ++i)
           if (sol.step_norms[i] >= sol.step_norms[i - 1]) ++violations;
         r.measured = {static_cast<double>(sol.iterations),
                       static_cast<double>(violations)};
         r.expected = {2.0, 0.0};
       }});
  return specs;
}

// ── dispatch ────────────────────────────────────────────────────────────────

std::vector<ExperimentSpec> specs_for(const std::string& family,
                                      const RunOptions& opts) {
  if (family == "weights") return weights_specs(opts);
  if (family == "flags") return flags_specs(opts);
  if (family == "stenzel") return stenzel_specs(opts);
  if (family == "calabi") return calabi_specs(opts);
  if (family == "cubic") return cubic_specs(opts);
  if (family == "quadrics") return quadrics_specs(opts);
  if (family == "odp") return odp_specs(opts);
  throw CodedError("UnknownSubcommand", "no experiment family '" + family + "'");
}

std::vector<ExperimentResult> run_specs(std::vector<ExperimentSpec> specs,
                                        const RunOptions& opts) {
  std::vector<ExperimentResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= specs.size()) break;
      const ExperimentSpec& spec = specs[index];
      ExperimentResult r;
      r.name = spec.name;
      r.claim = spec.claim;
      r.provenance = spec.provenance;
      r.tolerance = spec.tolerance;
      r.seed = derive_seed(opts.seed, spec.name);
      const auto start = Clock::now();
      try {
        spec.run(r, opts);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (opts.timings)
        r.runtime_ms = std::chrono::duration<double, std::milli>(
                           Clock::now() - start)
                           .count();
      results[index] = finish(std::move(r));
    }
  };
  const int jobs =
      std::max(1, std::min<int>(opts.jobs, static_cast<int>(specs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(results.begin(), results.end(),
            [](const ExperimentResult& a, const ExperimentResult& b) {
              return a.name < b.name;
            });
  return results;
}

}  // namespace

std::vector<std::string> experiment_families() {
  return {"weights", "flags", "stenzel", "calabi", "cubic", "quadrics", "odp"};
}

std::vector<ExperimentResult> run_family(const std::string& family,
                                         const RunOptions& options) {
  std::vector<ExperimentSpec> specs;
  if (family == "all") {
    for (const auto& name : experiment_families()) {
      auto batch = specs_for(name, options);
      specs.insert(specs.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    }
  } else {
    specs = specs_for(family, options);
  }
  return run_specs(std::move(specs), options);
}

bool all_pass(const std::vector<ExperimentResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

nlohmann::json ExperimentResult::to_json() const {
  return nlohmann::json{{"name", name},
                        {"claim", claim},
                        {"measured", measured},
                        {"expected", expected},
                        {"provenance", provenance},
                        {"tolerance", tolerance},
                        {"pass", pass},
                        {"runtime_ms", runtime_ms},
                        {"seed", seed},
                        {"error", error}};
}

nlohmann::json results_to_json(const std::vector<ExperimentResult>& results) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : results) list.push_back(r.to_json());
  return list;
}

void write_results_json(const std::string& path,
                        const std::vector<ExperimentResult>& results) {
  std::ofstream out(path);
  if (!out) throw CodedError("IoError", "cannot open '" + path + "'");
  out << results_to_json(results).dump(2) << '\n';
}

void write_results_csv(const std::string& path,
                       const std::vector<ExperimentResult>& results) {
  std::ofstream out(path);
  if (!out) throw CodedError("IoError", "cannot open '" + path + "'");
  out << "name,claim,measured,expected,provenance,tolerance,pass,runtime_ms,"
         "seed,error\n";
  out << std::setprecision(17);
  auto join = [](const std::vector<double>& xs) {
    std::ostringstream s;
    s << std::setprecision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s << ';';
      s << xs[i];
    }
    return s.str();
  };
  auto quote = [](std::string text) {
    for (auto& ch : text)
      if (ch == ',') ch = ';';
    return text;
  };
  for (const auto& r : results) {
    out << r.name << ',' << quote(r.claim) << ',' << join(r.measured) << ','
        << join(r.expected) << ',' << r.provenance << ',' << r.tolerance
        << ',' << (r.pass ? 1 : 0) << ',' << r.runtime_ms << ',' << r.seed
        << ',' << quote(r.error) << '\n';
  }
}

}  // namespace acgeo
