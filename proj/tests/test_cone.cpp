#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <nlohmann/json.hpp>
#include <random>

#include "acgeo/cone.hpp"

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

double worst_equation_residual(const AffineConeSpec& spec, const VecC& z) {
  double worst = 0.0;
  for (const auto& f : spec.cone_polynomials)
    worst = std::max(worst, std::abs(f.eval(z)));
  return worst;
}

}  // namespace

TEST_CASE("builders produce consistent dimensions and exponents") {
  const auto odp = make_odp_spec(3);
  CHECK(odp.ambient_dim == 4);
  CHECK(odp.complex_dim == 3);
  CHECK(odp.num_equations() == 1);
  CHECK(odp.radius_exponent == Rational(3, 2));

  const auto cubic = make_cubic_spec();
  CHECK(cubic.ambient_dim == 4);
  CHECK(cubic.complex_dim == 3);
  CHECK(cubic.radius_exponent == Rational(3));

  const auto quad = make_quadric_pair_spec();
  CHECK(quad.ambient_dim == 5);
  CHECK(quad.complex_dim == 3);
  CHECK(quad.num_equations() == 2);
  CHECK(quad.radius_exponent == Rational(3));

  const auto flat = make_affine_space_spec(4);
  CHECK(flat.num_equations() == 0);
  CHECK(flat.radius_exponent == Rational(1));
}

TEST_CASE("cone equations are quasi-homogeneous for the declared weights") {
  for (const auto& spec :
       {make_odp_spec(4), make_cubic_spec(), make_quadric_pair_spec()}) {
    for (const auto& f : spec.cone_polynomials) {
      Rational deg;
      CHECK(f.is_quasi_homogeneous(spec.weights, &deg));
      CHECK(deg > Rational(0));
    }
  }
}

TEST_CASE("builder preconditions carry stable codes") {
  CHECK(thrown_code([] { make_odp_spec(1); }) == "BadConeSpec");
  CHECK(thrown_code([] { make_cubic_spec({cplx(1.0)}); }) == "BadConeSpec");
  // λ containing 1 makes the smoothing level set singular; duplicates collapse
  // the pencil.
  CHECK(thrown_code([] {
          make_quadric_pair_spec({cplx(0), cplx(1), cplx(6), cplx(9), cplx(12)});
        }) == "BadConeSpec");
  CHECK(thrown_code([] {
          make_quadric_pair_spec({cplx(0), cplx(3), cplx(3), cplx(9), cplx(12)});
        }) == "BadConeSpec");
}

TEST_CASE("random cone points sit exactly on the equations at unit scale") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const auto odp = make_odp_spec(3);
    VecC a = random_cone_point(odp, rng);
    CHECK(std::abs(a.norm() - 1.0) < 1e-14);
    // u ⊥ v construction: exact in exact arithmetic, rounding-level in floats.
    CHECK(worst_equation_residual(odp, a) < 1e-14);

    const auto cubic = make_cubic_spec();
    VecC b = random_cone_point(cubic, rng);
    CHECK(std::abs(b.norm() - 1.0) < 1e-14);
    CHECK(worst_equation_residual(cubic, b) == 0.0);  // exact by construction

    const auto quad = make_quadric_pair_spec();
    VecC c = random_cone_point(quad, rng);
    CHECK(std::abs(c.norm() - 1.0) < 1e-14);
    CHECK(worst_equation_residual(quad, c) < 1e-12);
  }
}

TEST_CASE("radius calculus: placement, scaling, errors") {
  std::mt19937_64 rng(77);
  for (const auto& spec :
       {make_odp_spec(3), make_cubic_spec(), make_quadric_pair_spec()}) {
    const VecC unit = random_cone_point(spec, rng);
    for (double r : {0.5, 1.0, 7.0, 250.0}) {
      const VecC z = place_at_radius(spec, unit, r);
      CHECK(radius(spec, z) == doctest::Approx(r).epsilon(1e-12));
    }
    const VecC z = place_at_radius(spec, unit, 3.0);
    for (double t : {0.5, 2.0, 10.0}) {
      const double scaled = radius(spec, scaling_map(spec, z, t));
      CHECK(scaled == doctest::Approx(3.0 * t).epsilon(1e-10));
    }
    // t = 1 is the identity.
    CHECK((scaling_map(spec, z, 1.0) - z).norm() == 0.0);
  }

  const auto odp = make_odp_spec(3);
  CHECK(thrown_code([&] { radius(odp, VecC::Zero(4)); }) == "ZeroPoint");
  VecC off(4);
  off << cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0);  // Σz² = 1 ≠ 0
  CHECK(thrown_code([&] { radius(odp, off); }) == "OffVariety");
}

TEST_CASE("radius matches |z|^{1/mu} on the nose") {
  std::mt19937_64 rng(5);
  const auto cubic = make_cubic_spec();
  const VecC z = place_at_radius(cubic, random_cone_point(cubic, rng), 100.0);
  // μ = 3 for the cubic: r = |z|^{1/3}, so |z| = 1e6 at r = 100.
  CHECK(z.norm() == doctest::Approx(1e6).epsilon(1e-12));
}

TEST_CASE("homogeneity_degree recovers scaling exponents of test fields") {
  std::mt19937_64 rng(11);
  const auto odp = make_odp_spec(3);
  const VecC unit = random_cone_point(odp, rng);
  // Σ|z_k|² scales as t^{2μ} = t³ along the flow.
  const auto field = [](const VecC& z) { return z.squaredNorm(); };
  RateFit fit = homogeneity_degree(odp, field, unit, geometric_grid(1.0, 64.0, 9));
  CHECK(fit.exponent == doctest::Approx(3.0).epsilon(1e-9));

  CHECK(thrown_code([&] {
          homogeneity_degree(odp, field, unit, geometric_grid(1.0, 8.0, 4));
        }) == "InsufficientSamples");
}

TEST_CASE("spec json round trip preserves the smoothing data") {
  const auto spec = make_cubic_spec({cplx(0.1), cplx(0.2), cplx(0.0), cplx(-0.3)},
                                    {{0, 2, cplx(0.5)}});
  const auto back = AffineConeSpec::from_json(spec.to_json());
  CHECK(back.name == spec.name);
  CHECK(back.ambient_dim == spec.ambient_dim);
  CHECK(back.radius_exponent == spec.radius_exponent);
  REQUIRE(back.smoothing_polynomials.size() == spec.smoothing_polynomials.size());
  VecC z(4);
  z << cplx(0.2, 0.4), cplx(-0.6, 0.1), cplx(0.3, -0.9), cplx(0.8, 0.5);
  for (std::size_t a = 0; a < spec.smoothing_polynomials.size(); ++a)
    CHECK(std::abs(spec.smoothing_polynomials[a].eval(z) -
                   back.smoothing_polynomials[a].eval(z)) < 1e-14);
  CHECK(back.smoothing_targets == spec.smoothing_targets);
}

TEST_CASE("deformation parameters land in the smoothing polynomials only") {
  const auto spec = make_cubic_spec({cplx(0.3), cplx(0), cplx(0), cplx(0)});
  VecC z(4);
  z << cplx(1.0), cplx(0.0), cplx(0.0), cplx(0.0);
  // Cone equation stays the Fermat cubic...
  CHECK(std::abs(spec.cone_polynomials[0].eval(z) - cplx(1.0)) < 1e-15);
  // ...while the smoothing gains the linear term: z³ + 0.3 z at z = e₁.
  CHECK(std::abs(spec.smoothing_polynomials[0].eval(z) - cplx(1.3)) < 1e-15);
}
