#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "acgeo/projection.hpp"

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

}  // namespace

TEST_CASE("ODP projection has the closed form y = 1/(2 tau)") {
  std::mt19937_64 rng(3);
  const auto spec = make_odp_spec(3);
  const ProjectionMap proj(spec);
  const VecC unit = random_cone_point(spec, rng);
  for (double r : {1.0, 5.0, 100.0, 1e4}) {
    const VecC z = place_at_radius(spec, unit, r);
    const double tau = z.squaredNorm();
    const ProjectionSolution sol = proj.solve(z);
    // G is exactly linear in y on the null quadric, so Newton lands on the
    // first step and spends the second verifying it.
    CHECK(sol.iterations == 2);
    REQUIRE(sol.coefficients.size() == 1);
    CHECK(std::abs(sol.coefficients(0) - cplx(1.0 / (2.0 * tau))) <
          1e-12 / (2.0 * tau));
    CHECK((sol.displacement - z.conjugate() / (2.0 * tau)).norm() <
          1e-12 * sol.displacement.norm());
    // Φ(z) satisfies the smoothing equation to machine precision.
    const cplx F = spec.smoothing_polynomials[0].eval(sol.point);
    CHECK(std::abs(F - cplx(1.0)) < 1e-12 * std::max(1.0, z.squaredNorm()));
  }
}

TEST_CASE("ODP differential matches its closed form on tangent directions") {
  std::mt19937_64 rng(17);
  const auto spec = make_odp_spec(3);
  const ProjectionMap proj(spec);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 7.0);
  const double tau = z.squaredNorm();
  const ProjectionSolution sol = proj.solve(z);
  const ProjectionDifferential diff = proj.differential(z, sol);
  CHECK((diff.base_point() - z).norm() == 0.0);

  const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
  for (const VecC& v : chart.tangent_basis) {
    // Tangent directions satisfy zᵀv = 0, for which the implicit derivative
    // collapses to  dΨ(v) = v̄/(2τ) − z̄·(z̄ᵀv + zᵀv̄)/(2τ²).
    const cplx zbar_v = (z.conjugate().transpose() * v).value();
    const cplx z_vbar = (z.transpose() * v.conjugate()).value();
    const double dtau = (zbar_v + z_vbar).real();
    const VecC expected =
        v.conjugate() / (2.0 * tau) - z.conjugate() * dtau / (2.0 * tau * tau);
    CHECK((diff.apply(v) - expected).norm() < 1e-12 * expected.norm());
  }
}

TEST_CASE("analytic differential agrees with the finite-difference diagnostic") {
  std::mt19937_64 rng(29);
  const auto spec = make_cubic_spec();
  const ProjectionMap proj(spec);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 5.0);
  const ProjectionSolution sol = proj.solve(z);
  const ProjectionDifferential diff = proj.differential(z, sol);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    VecC v(4);
    for (int k = 0; k < 4; ++k) v[k] = cplx(g(rng), g(rng));
    v /= v.norm();
    const VecC analytic = diff.apply(v);
    const VecC fd = proj.dpsi_finite_difference(z, v);
    CHECK((analytic - fd).norm() < 1e-5 * analytic.norm());
  }
}

TEST_CASE("displacement is scaling-equivariant on the ODP cone") {
  std::mt19937_64 rng(41);
  const auto spec = make_odp_spec(4);
  const ProjectionMap proj(spec);
  const double mu = to_double(spec.radius_exponent);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 6.0);
  const double base = proj.psi(z).norm();
  for (double t : {2.0, 5.0}) {
    const double scaled = proj.psi(scaling_map(spec, z, t)).norm();
    CHECK(scaled == doctest::Approx(std::pow(t, -mu) * base).epsilon(1e-12));
  }
}

TEST_CASE("Newton iteration contracts and reports its steps") {
  std::mt19937_64 rng(59);
  const auto spec = make_cubic_spec();
  const ProjectionMap proj(spec);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 3.0);
  const ProjectionSolution sol = proj.solve(z);
  REQUIRE(sol.iterations >= 2);
  REQUIRE(sol.step_norms.size() == static_cast<std::size_t>(sol.iterations));
  for (std::size_t i = 1; i < sol.step_norms.size(); ++i)
    CHECK(sol.step_norms[i] < sol.step_norms[i - 1]);

  // The projected point satisfies both smoothing equations even by naive
  // evaluation at this moderate radius.
  for (std::size_t a = 0; a < spec.smoothing_polynomials.size(); ++a) {
    const cplx F = spec.smoothing_polynomials[a].eval(sol.point);
    CHECK(std::abs(F - spec.smoothing_targets[a]) < 1e-10);
  }
}

TEST_CASE("projection failure modes carry stable codes") {
  const auto spec = make_odp_spec(3);
  const ProjectionMap proj(spec);
  CHECK(thrown_code([&] { proj.solve(VecC::Zero(4)); }) == "RankDeficient");

  std::mt19937_64 rng(61);
  const ProjectionMap strangled(make_cubic_spec(), ProjectionSettings{1e-13, 1});
  const VecC z = place_at_radius(make_cubic_spec(), random_cone_point(make_cubic_spec(), rng), 3.0);
  CHECK(thrown_code([&] { strangled.solve(z); }) == "NewtonDiverged");
}

TEST_CASE("structured volume difference equals the naive one where both work") {
  std::mt19937_64 rng(73);
  const auto spec = make_odp_spec(3);
  const ProjectionMap proj(spec);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 8.0);
  const ProjectionSolution sol = proj.solve(z);
  const ProjectionDifferential diff = proj.differential(z, sol);
  const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
  const VolumeComparison cmp = compare_volume_forms(proj, chart, sol, diff);

  REQUIRE(!cmp.tuples.empty());
  REQUIRE(cmp.omega0.size() == cmp.tuples.size());
  double max_omega0 = 0.0, max_diff = 0.0;
  for (std::size_t t = 0; t < cmp.tuples.size(); ++t) {
    max_omega0 = std::max(max_omega0, std::abs(cmp.omega0[t]));
    max_diff = std::max(max_diff, std::abs(cmp.difference[t]));
    const cplx naive = cmp.pullback[t] - cmp.omega0[t];
    CHECK(std::abs(cmp.difference[t] - naive) <
          1e-10 * std::max(std::abs(cmp.omega0[t]), std::abs(naive)));
  }
  CHECK(cmp.radius == doctest::Approx(8.0).epsilon(1e-10));
  // Proxy norms are the max tuple coefficient times the scale weight r^{n(mu-1)}.
  const double expected_weight = std::pow(8.0, 3.0 * (1.5 - 1.0));
  CHECK(cmp.weight == doctest::Approx(expected_weight).epsilon(1e-12));
  CHECK(cmp.omega0_proxy ==
        doctest::Approx(max_omega0 * cmp.weight).epsilon(1e-12));
  CHECK(cmp.difference_proxy ==
        doctest::Approx(max_diff * cmp.weight).epsilon(1e-12));
}

TEST_CASE("pulled-back complex structure squares to minus the identity") {
  std::mt19937_64 rng(83);
  const auto spec = make_cubic_spec();
  const ProjectionMap proj(spec);
  const VecC z = place_at_radius(spec, random_cone_point(spec, rng), 12.0);
  const ProjectionSolution sol = proj.solve(z);
  const ProjectionDifferential diff = proj.differential(z, sol);
  const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
  const JComparison cmp = compare_complex_structures(proj, chart, sol, diff);

  const int m = static_cast<int>(cmp.j0.rows());
  REQUIRE(m == 6);
  CHECK((cmp.j0 * cmp.j0 + Eigen::MatrixXd::Identity(m, m)).norm() < 1e-12);
  CHECK(cmp.j_square_defect < 1e-8);
  CHECK(cmp.tangency_residual < 1e-8);
  CHECK((cmp.pullback - cmp.j0 - cmp.difference).norm() <
        1e-10 * cmp.pullback.norm());
  CHECK(cmp.op_norm_difference > 0.0);
  CHECK(cmp.op_norm_difference < 1e-2);
}

TEST_CASE("deformation rate scan recovers the ODP decay exponent") {
  const auto spec = make_odp_spec(3);
  const RateReport report =
      deformation_rate_scan(spec, geometric_grid(10.0, 1e3, 8), 2, 424242);
  CHECK(std::abs(report.omega_fit.exponent + 3.0) < 0.3);
  CHECK(std::abs(report.j_fit.exponent + 3.0) < 0.3);
  CHECK(std::isfinite(report.lemma_constant));
  CHECK(report.lemma_constant > 0.0);
  CHECK(report.samples.size() == 16u);
  CHECK(report.inner_cutoff < 5.0);

  // Scan argument validation.
  CHECK(thrown_code([&] {
          deformation_rate_scan(spec, geometric_grid(10.0, 100.0, 8), 0, 1);
        }) == "InvalidOption");
  CHECK(thrown_code([&] { deformation_rate_scan(spec, {10.0}, 2, 1); }) ==
        "InsufficientSamples");
}

TEST_CASE("decay CSV dump carries the documented columns") {
  const auto spec = make_odp_spec(2);
  const RateReport report =
      deformation_rate_scan(spec, geometric_grid(10.0, 200.0, 7), 1, 7);
  const std::string path = "test_projection_dump.csv";
  write_decay_csv(path, report);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "radius,direction,omega_difference,j_difference,ratio,"
        "coefficient_abs,ambient_norm");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(report.samples.size()));
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("rate report serializes the fits it ran") {
  const auto spec = make_odp_spec(2);
  const RateReport report =
      deformation_rate_scan(spec, geometric_grid(10.0, 200.0, 7), 1, 7);
  const nlohmann::json j = report.to_json();
  CHECK(j.at("cone").get<std::string>() == spec.name);
  CHECK(std::abs(j.at("omega_fit").at("exponent").get<double>() -
                 report.omega_fit.exponent) < 1e-15);
  CHECK(j.at("samples").size() == report.samples.size());
}
