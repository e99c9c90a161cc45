#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "acgeo/profiles.hpp"

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

TEST_CASE("n = 2 profile matches the closed form 2*sqrt(2)*(cosh(w/2) - 1)") {
  const StenzelProfile p = solve_stenzel_profile(2);
  // S(w) = ∫₀ʷ sinh = cosh w − 1, in both the small-w quadrature regime and
  // the large-w closed-form regime.
  for (double w : {0.05, 0.3, 0.59, 0.61, 2.0, 10.0, 25.0}) {
    const double exact = std::cosh(w) - 1.0;
    CHECK(std::abs(p.S(w) - exact) < 1e-12 * std::max(1.0, exact));
    CHECK(std::abs(p.S_prime(w) - std::sinh(w)) < 1e-12 * std::cosh(w));
  }
  CHECK(p.C_n_closed == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(p.C_n_fitted - 2.0) < 1e-4);
  // f(τ) = 2√(τ+1) − 2√2, so f(5) = 2√6 − 2√2 and c∞ = −2√2.
  CHECK(std::abs(p.c_infinity + 2.0 * std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(p.f(5.0) - (2.0 * std::sqrt(6.0) - 2.0 * std::sqrt(2.0))) <
        1e-9);
  CHECK(std::abs(p.f(1.0)) < 1e-15);
}

TEST_CASE("n = 3 antiderivative matches sinh(2w)/4 - w/2") {
  const StenzelProfile p = solve_stenzel_profile(3);
  for (double w : {0.1, 0.45, 0.8, 3.0, 12.0, 28.0}) {
    const double exact = std::sinh(2.0 * w) / 4.0 - w / 2.0;
    CHECK(std::abs(p.S(w) - exact) < 1e-12 * std::max(1.0, exact));
  }
}

TEST_CASE("profile solves the ODE and fits its own leading constant") {
  for (int n : {2, 3, 4}) {
    const StenzelProfile p = solve_stenzel_profile(n);
    CHECK(p.ode_residual < 1e-9);
    CHECK(p.C_n_closed ==
          doctest::Approx(n * std::pow(n - 1.0, -(n + 1.0) / n)).epsilon(1e-14));
    CHECK(std::abs(p.C_n_fitted - p.C_n_closed) < 1e-4 * p.C_n_closed);
    CHECK(std::abs(p.h(0.0)) < 1e-15);
    CHECK(p.h(1.0) < p.h(2.0));
    CHECK(p.h(2.0) < p.h(3.0));
  }
}

TEST_CASE("correction term k(tau) decays at the dimension-dependent rate") {
  const StenzelProfile p2 = solve_stenzel_profile(2);
  CHECK(p2.correction_fit.log_power == 0);
  CHECK(std::abs(p2.correction_fit.exponent + 1.0) < 0.25);

  const StenzelProfile p3 = solve_stenzel_profile(3);
  CHECK(p3.correction_fit.log_power == 1);
  CHECK(std::abs(p3.correction_fit.exponent + 2.0) < 0.25);

  const StenzelProfile p4 = solve_stenzel_profile(4);
  CHECK(p4.correction_fit.log_power == 0);
  CHECK(std::abs(p4.correction_fit.exponent + 2.0) < 0.25);
}

TEST_CASE("profile preconditions carry stable codes") {
  CHECK(thrown_code([] { solve_stenzel_profile(1); }) == "BadDimension");
  CHECK(thrown_code([] { solve_stenzel_profile(3, 4.0); }) == "GridTooCoarse");
  CHECK(thrown_code([] { solve_stenzel_profile(3, 30.0, 50); }) ==
        "GridTooCoarse");
}

TEST_CASE("f derivatives agree with finite differences of f") {
  const StenzelProfile p = solve_stenzel_profile(3);
  for (double tau : {1.5, 3.0, 10.0}) {
    const double h = 1e-5 * tau;
    const double fd1 = (p.f(tau + h) - p.f(tau - h)) / (2.0 * h);
    CHECK(std::abs(p.f_prime(tau) - fd1) < 1e-7 * std::max(1.0, std::abs(fd1)));
    const double fd2 = (p.f(tau + h) - 2.0 * p.f(tau) + p.f(tau - h)) / (h * h);
    CHECK(std::abs(p.f_second(tau) - fd2) < 1e-4 * std::max(1.0, std::abs(fd2)));
  }
}

TEST_CASE("Calabi determinant identity holds pointwise to near machine") {
  for (int n : {2, 3}) {
    CalabiProfile cp;
    cp.n = n;
    cp.c = 1.0;
    for (double t : {0.05, 0.2, 1.0, 5.0, 50.0, 4000.0}) {
      CHECK(std::abs(cp.det_identity_residual(t)) < 1e-12);
      // Cancellation-free difference forms agree with the direct ones where
      // the direct ones are representable.
      if (t < 10.0) {
        CHECK(std::abs(cp.v_prime(t) - (cp.u_prime(t) - 1.0)) <
              1e-12 * std::max(1.0, cp.u_prime(t)));
      }
    }
    // Far field: u′ − 1 ≈ c·t^{-n}/n, far below double precision of u′ itself.
    const double t = 1e6;
    const double lead = cp.c * std::pow(t, -n) / n;
    CHECK(std::abs(cp.v_prime(t) - lead) < 1e-3 * lead);
    CHECK(std::abs(cp.u(t) - t) < 2.0 * lead * t / (n - 1.0 + 1e-9));
  }
}

TEST_CASE("calabi_profile_derivative matches finite differences and validates t") {
  const int n = 2;
  const double c = 1.7, t = 2.3;
  const auto u1 = [&](double s) { return calabi_profile_derivative(n, c, s, 1); };
  const double fd = (u1(t + 1e-6) - u1(t - 1e-6)) / 2e-6;
  CHECK(std::abs(calabi_profile_derivative(n, c, t, 2) - fd) < 1e-6);
  CHECK(thrown_code([&] { calabi_profile_derivative(n, c, 0.0); }) ==
        "NonpositiveT");
  CHECK(thrown_code([&] { calabi_profile_derivative(n, c, -1.0); }) ==
        "NonpositiveT");
}

TEST_CASE("leading term at large tau is diag(0,0,1,-1,...) in the radial frame") {
  CHECK(thrown_code([] { stenzel_leading_term(3, 10.0); }) == "FrameDegenerate");
  CHECK(thrown_code([] { stenzel_leading_term(2, 1e6); }) == "FrameDegenerate");

  const LeadingTermReport rep = stenzel_leading_term(3, 1e6);
  REQUIRE(rep.matrix.rows() == 6);
  Eigen::VectorXd expected(6);
  expected << 0.0, 0.0, 1.0, -1.0, 1.0, -1.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(std::abs(rep.matrix(i, j) - (i == j ? expected[i] : 0.0)) < 1e-2);
  CHECK(std::abs(rep.trace) < 1e-2);
  CHECK(std::abs(rep.bianchi_dr) < 1e-2);
  CHECK(std::abs(rep.bianchi_dcr) < 1e-2);
  CHECK(rep.frame_orthonormality_defect < 1e-6);
  CHECK(rep.matrix_symmetry_defect < 1e-6);
}

TEST_CASE("Monge-Ampere residual surveys are constant across sample points") {
  const StenzelProfile p3 = solve_stenzel_profile(3);
  const MAConstancyResult stenzel = stenzel_ma_survey(p3, 25, 11);
  CHECK(stenzel.sample_count == 25);
  CHECK(stenzel.samples.size() == 25u);
  CHECK(stenzel.stddev < 1e-6);

  const MAConstancyResult calabi = calabi_ma_survey(2, 1.0, 25, 12);
  CHECK(calabi.sample_count == 25);
  CHECK(calabi.stddev < 1e-6);

  const MAConstancyResult cone = cone_ma_survey(3, 20, 13);
  CHECK(cone.sample_count == 20);
  CHECK(cone.stddev < 1e-6);
}

TEST_CASE("potential scaling shifts the survey mean by n log of the scale") {
  const double scale = 1.7;
  const MAConstancyResult base = calabi_ma_survey(2, 1.0, 10, 21, 1.0);
  const MAConstancyResult scaled = calabi_ma_survey(2, 1.0, 10, 21, scale);
  CHECK(std::abs((scaled.mean - base.mean) - 2.0 * std::log(scale)) < 1e-8);
}

TEST_CASE("profile CSV dump has the documented shape") {
  const StenzelProfile p = solve_stenzel_profile(2, 6.0, 500);
  const std::string path = "test_profiles_dump.csv";
  write_profile_csv(path, p);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "w,h,h_prime,tau,f");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 500);
  in.close();
  std::remove(path.c_str());

  CHECK(thrown_code([&] { write_profile_csv("/nonexistent_dir_zz/x.csv", p); }) ==
        "IoError");
}
