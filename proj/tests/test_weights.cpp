#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <functional>

#include <nlohmann/json.hpp>

#include "acgeo/weights.hpp"

using namespace acgeo;

namespace {

std::string thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const CodedError& e) {
    return e.code();
  }
  return "";
}

WeightSet flat_weights(double m, int k_max) {
  return exceptional_weights(m, sphere_eigenvalues(m, k_max));
}

}  // namespace

TEST_CASE("flat m = 6 exceptional set is the two integer rays") {
  const WeightSet ws = flat_weights(6.0, 10);
  CHECK(ws.exact);
  // ℕ₀ ray and the 2−m−ℕ₀ ray.
  for (double w : {0.0, 1.0, 2.0, 7.0, 10.0}) CHECK(ws.contains(w));
  for (double w : {-4.0, -5.0, -9.0, -14.0}) CHECK(ws.contains(w));
  // Nothing fractional, and nothing strictly inside the forbidden band (−4,0).
  for (double w : {0.5, 1.5, -0.5, -1.0, -2.0, -3.0, -3.999}) CHECK(!ws.contains(w));

  CHECK(ws.next_above(0.0) == 1.0);
  CHECK(ws.next_above(-4.0) == 0.0);
  CHECK(ws.next_above(-4.5) == -4.0);
  CHECK(!ws.next_above(10.0).has_value());  // certified prefix ends at w₊ = 10

  CHECK(ws.certified_min == doctest::Approx(-14.0).epsilon(1e-12));
  CHECK(ws.certified_max == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("Fredholm queries follow the weight set and respect the band") {
  const WeightSet ws = flat_weights(6.0, 10);
  CHECK(is_fredholm(ws, -3.0));        // β+2 = −1 in the empty band
  CHECK(!is_fredholm(ws, -2.0));       // β+2 = 0 exceptional
  CHECK(!is_fredholm(ws, -8.0));       // β+2 = −6 on the lower ray
  CHECK(thrown_code([&] { is_fredholm(ws, 11.0); }) == "CutoffExceeded");
  CHECK(thrown_code([&] { is_fredholm(ws, -17.0); }) == "CutoffExceeded");
}

TEST_CASE("spectrum validation raises typed errors") {
  CHECK(thrown_code([] { exceptional_weights(2.0, {0.0, 5.0}); }) ==
        "BadDimension");
  CHECK(thrown_code([] { exceptional_weights(6.0, {0.0, 5.0, 3.0}); }) ==
        "UnsortedSpectrum");
  CHECK(thrown_code([] { exceptional_weights(6.0, {1.0, 2.0}); }) ==
        "UnsortedSpectrum");
  CHECK(thrown_code([] { exceptional_weights(6.0, {}); }) == "UnsortedSpectrum");
  CHECK(thrown_code([] { exceptional_weights(6.0, {0.0, 5.0}, {1}); }) ==
        "UnsortedSpectrum");
  CHECK(thrown_code([] { exceptional_weights(6.0, {0.0, 5.0}, {1, 0}); }) ==
        "UnsortedSpectrum");
}

TEST_CASE("Obata gap holds for round spheres, including the boundary pair") {
  const WeightSet ws = flat_weights(8.0, 8);
  const ObataGapReport rep = obata_gap_check(ws, /*ricci_nonneg=*/true);
  CHECK(rep.gap_holds);
  // μ₁ = m−1 exactly on the round sphere: weight 1 (and its mirror 1−m) is
  // attained, flagged as the Lichnerowicz equality case rather than a failure.
  CHECK(rep.boundary_case);
  CHECK(rep.violations.empty());
  CHECK(rep.smallest_positive == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.count_in_1_2 == 0);
  CHECK(!rep.weight_in_1_2.has_value());
}

TEST_CASE("Obata interval statistics catch the one weight in (1,2)") {
  // Custom link with μ₁ = 5, μ₂ = 8.25 on m = 4: w(w+2) = 5.25... pick m so a
  // weight lands inside (1,2): m = 8, μ = 8.25 gives w = −3 ± √(9+8.25) ∈
  // (1,2) branch: −3 + √17.25 ≈ 1.1533.
  const WeightSet ws = exceptional_weights(8.0, {0.0, 7.0, 8.25});
  const ObataGapReport rep = obata_gap_check(ws, /*ricci_nonneg=*/true);
  CHECK(rep.gap_holds);
  CHECK(rep.count_in_1_2 == 1);
  REQUIRE(rep.weight_in_1_2.has_value());
  CHECK(*rep.weight_in_1_2 ==
        doctest::Approx(-3.0 + std::sqrt(9.0 + 8.25)).epsilon(1e-12));

  CHECK(thrown_code([] {
          obata_gap_check(exceptional_weights(6.0, {0.0, 3.0}), true);
        }) == "HypothesisViolated");
}

TEST_CASE("rate iteration doubles exactly then descends below -2") {
  const RateIterationTrace a = rate_iteration(-1.5, 0.01);
  CHECK(a.step_count == 1);
  CHECK(a.steps.size() == 2u);
  CHECK(a.steps[0] == -1.5);
  CHECK(a.steps[1] == -3.0);  // first doubling is exact
  CHECK(a.terminal_rate == -3.0);

  const RateIterationTrace b = rate_iteration(-0.6, 0.01);
  CHECK(b.step_count == 2);
  REQUIRE(b.steps.size() == 3u);
  CHECK(b.steps[1] == doctest::Approx(-1.2).epsilon(1e-15));
  CHECK(b.steps[2] == doctest::Approx(-2.39).epsilon(1e-12));
  CHECK(b.terminal_rate < -2.0);

  CHECK(thrown_code([] { rate_iteration(-2.5, 0.01); }) == "BadInitialRate");
  CHECK(thrown_code([] { rate_iteration(-0.5, 0.3); }) == "BadInitialRate");
  CHECK(thrown_code([] { rate_iteration(-0.5, 0.0); }) == "BadInitialRate");
}

TEST_CASE("radial mode solver: generic, resonant, and no-branch cases") {
  // m = 6, μ = 0, s = −4: u = r^{−2}/((−2)(2) − 0) = −0.25·r^{−2}.
  const RadialModeSolution gen = radial_mode_solve(6.0, 0.0, -4.0, -1.0);
  CHECK(!gen.resonant);
  CHECK(gen.exponent == -2.0);
  CHECK(gen.coefficient == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(gen.root_plus == doctest::Approx(0.0));
  CHECK(gen.root_minus == doctest::Approx(-4.0));
  CHECK(gen.suppressed_root == doctest::Approx(0.0));
  CHECK(gen.kept_root == doctest::Approx(-4.0));
  CHECK(gen.residual < 1e-12);

  // s = −6 hits the lower indicial root −4: log solution with coefficient
  // 1/(2(s+2)+m−2) = 1/(−8+4) = −0.25.
  const RadialModeSolution res = radial_mode_solve(6.0, 0.0, -6.0, -1.0);
  CHECK(res.resonant);
  CHECK(res.log_solution);
  CHECK(res.exponent == -4.0);
  CHECK(res.coefficient == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(res.residual < 1e-10);

  // Decay target below both indicial roots: no homogeneous branch survives.
  const RadialModeSolution none = radial_mode_solve(6.0, 0.0, -8.0, -5.0);
  CHECK(std::isnan(none.kept_root));

  // Generic non-integer data still solves the ODE to near machine precision.
  const RadialModeSolution odd = radial_mode_solve(7.0, 3.1, -4.7, -1.0);
  CHECK(!odd.resonant);
  CHECK(odd.residual < 1e-12);

  CHECK(thrown_code([] { radial_mode_solve(2.0, 0.0, -4.0, -1.0); }) ==
        "BadDimension");
  CHECK(thrown_code([] { radial_mode_solve(6.0, -1.0, -4.0, -1.0); }) ==
        "UnsortedSpectrum");
}

TEST_CASE("spectrum generators produce the classical values") {
  const auto sphere = sphere_eigenvalues(5.0, 4);
  REQUIRE(sphere.size() == 5u);
  for (int k = 0; k <= 4; ++k)
    CHECK(sphere[k] == doctest::Approx(k * (k + 3.0)).epsilon(1e-15));

  // ℤ₃ quotient of S³ (m = 4): degree k survives iff some bidegree (a, b)
  // with a+b = k has 3 | a−b — everything except k = 1 up to k = 9.
  const auto lens3 = lens_eigenvalues(4, 3, 9);
  std::vector<double> expected;
  for (int k = 0; k <= 9; ++k)
    if (k != 1) expected.push_back(k * (k + 2.0));
  CHECK(lens3 == expected);

  // ℤ₂ keeps exactly the even degrees.
  const auto lens2 = lens_eigenvalues(4, 2, 10);
  REQUIRE(lens2.size() == 6u);
  for (std::size_t i = 0; i < lens2.size(); ++i) {
    const double k = 2.0 * static_cast<double>(i);
    CHECK(lens2[i] == doctest::Approx(k * (k + 2.0)).epsilon(1e-15));
  }

  CHECK(thrown_code([] { lens_eigenvalues(3, 2, 5); }) == "BadDimension");
  CHECK(thrown_code([] { lens_eigenvalues(4, 0, 5); }) == "UnsortedSpectrum");
}

TEST_CASE("weight sets survive JSON and CSV round trips") {
  const WeightSet ws = flat_weights(6.0, 5);
  const WeightSet back = WeightSet::from_json(ws.to_json());
  CHECK(back.m == ws.m);
  CHECK(back.eigenvalues == ws.eigenvalues);
  CHECK(back.multiplicities == ws.multiplicities);
  CHECK(back.exact == ws.exact);
  REQUIRE(back.weights.size() == ws.weights.size());
  for (std::size_t i = 0; i < ws.weights.size(); ++i) {
    CHECK(back.weights[i].value == ws.weights[i].value);
    CHECK(back.weights[i].multiplicity == ws.weights[i].multiplicity);
  }

  const std::string path = "test_weights_dump.csv";
  write_spectrum_csv(path, ws);
  const auto [eigs, mults] = read_spectrum_csv(path);
  CHECK(eigs == ws.eigenvalues);
  CHECK(mults == ws.multiplicities);
  std::remove(path.c_str());

  CHECK(thrown_code([] { read_spectrum_csv("definitely_missing_file.csv"); }) ==
        "IoError");
}
