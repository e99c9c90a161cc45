/*
 * profiles.hpp — explicit Ricci-flat Kähler profiles and their asymptotics.
 *
 * Stenzel family on {Σ z² = 1} ⊂ ℂ^{n+1}: the Kähler potential is f(τ) =
 * h(arccosh τ), τ = |z|², where h solves  (h′)ⁿ ′ = … equivalently
 * h′(w) = S(w)^{1/n} with S(w) = ∫₀ʷ sinh^{n−1}t dt and h′(0) = 0.  S has the
 * exact binomial antiderivative
 *   S(w) = 2^{-(n-1)} Σ_k (−1)^k C(n−1,k) · expm1((n−1−2k)w)/(n−1−2k)
 * (the n−1−2k = 0 term contributing (−1)^k C(n−1,k)·w), evaluated by a
 * 10-point Gauss–Legendre rule below w = 0.6 where the closed form loses
 * digits to cancellation.  h itself is a cumulative integral of h′ (grid
 * prefix sums + a Gauss–Legendre tail inside the current cell, so evaluation
 * is smooth enough to finite-difference).
 *
 * The profile approaches  f(τ) = C_n·τ^{1−1/n}·(1 + k(τ)) + c∞  with
 * C_n = n(n−1)^{−(n+1)/n} and an additive constant
 *   c∞ = ∫₀^∞ [h′(w) − A′(w)] dw,   A(w) = (n/(n−1))·S(w)^{1/n},
 * invisible to the metric but essential to remove before fitting k(τ); the
 * correction k decays like τ^{−1} (n=2), τ^{−2}·log τ (n=3), τ^{−2} (n≥4).
 *
 * Calabi family on ℂⁿ (Eguchi–Hanson at n=2): potential u(t), t = |z|²,
 * u′(t) = (tⁿ+c)^{1/n}/t, for which det of the complex Hessian is exactly 1:
 * (u′)^{n−1}(u′ + t·u″) ≡ 1.  Cancellation-free difference forms:
 *   u′−1        = expm1(log1p(c·t^{−n})/n)
 *   u′+t·u″−1   = expm1((1/n − 1)·log1p(c·t^{−n})).
 *
 * Metric decay experiments compare the smoothing metric (pulled back through
 * the cone-to-smoothing projection) with the cone metric in the g₀-operator
 * norm and fit the decay exponent vs the cone radius r:  −2n/(n−1) for
 * Stenzel, −2n for Calabi (−4 for Eguchi–Hanson).
 */
#pragma once

#include "acgeo/charts.hpp"

namespace acgeo {

// ── Stenzel profile ─────────────────────────────────────────────────────────

struct StenzelProfile {
  int n = 3;
  double w_max = 30.0;
  int grid_size = 3001;
  std::vector<double> grid_w, h_values, h_prime_values;
  double C_n_fitted = 0.0;
  double C_n_closed = 0.0;   // n·(n−1)^{−(n+1)/n}
  double c_infinity = 0.0;   // additive constant of h vs its leading asymptote
  double ode_residual = 0.0; // max relative residual of (h′ⁿ)′ = sinh^{n−1}
  RateFit correction_fit;    // fit of |k(τ)| with optional log factor

  double beta() const { return 1.0 - 1.0 / n; }
  double S(double w) const;        // ∫₀ʷ sinh^{n−1}
  double S_prime(double w) const;  // sinh^{n−1} w
  double h_prime(double w) const;  // S^{1/n}
  double h_second(double w) const; // S′/(n·h′^{n−1}), w > 0
  double h(double w) const;        // cumulative from the solved grid
  double f(double tau) const;      // h(arccosh τ), τ ≥ 1
  double f_prime(double tau) const;
  double f_second(double tau) const;
};

/**
 * Solve the profile on [0, w_max]. Preconditions: n ≥ 2 (BadDimension),
 * w_max ≥ 5 and grid_size ≥ 200 (GridTooCoarse). Throws GridTooCoarse when
 * the 6th-order interior ODE residual exceeds 1e-9 relative.
 */
StenzelProfile solve_stenzel_profile(int n, double w_max = 30.0,
                                     int grid_size = 3001);

// ── Calabi profile ──────────────────────────────────────────────────────────

struct CalabiProfile {
  int n = 2;
  double c = 1.0;
  double u_prime(double t) const;
  double u_second(double t) const;
  double v_prime(double t) const;        // u′ − 1, cancellation-free
  double radial_eigen_minus_one(double t) const;  // u′ + t·u″ − 1
  double u(double t) const;              // normalized so u(t) − t → 0
  double det_identity_residual(double t) const;   // (u′)^{n−1}(u′+tu″) − 1
};

/** u' or u'' (order ∈ {1,2}) at t > 0 (NonpositiveT). */
double calabi_profile_derivative(int n, double c, double t, int order = 1);

// ── metric decay experiments ────────────────────────────────────────────────

enum class MetricFamily { stenzel, calabi, eguchi_hanson };

struct MetricRateSample {
  double radius;
  int direction;
  double norm;  // |g − g₀| in the g₀ operator norm
};

struct MetricRateResult {
  MetricFamily family;
  int n;
  RateFit fit;
  std::vector<MetricRateSample> samples;
};

MetricRateResult metric_rate_experiment(MetricFamily family, int n,
                                        const std::vector<double>& radii,
                                        int directions, std::uint64_t seed);

// ── Stenzel leading term ────────────────────────────────────────────────────

/**
 * The normalized difference of the Stenzel and cone metrics at the distant
 * point p₀ = √τ·(1/√2, i/√2, 0,…,0), expressed in the g₀-orthonormal frame
 * (∂_r, J∂_r, X₃, Y₃, …, X_{n+1}, Y_{n+1}): matrix = τ·h(frame_i, frame_j),
 * expected diag(0, 0, 1, −1, …, 1, −1); trace = τ·tr_{g₀}h; and the
 * contracted second Bianchi residuals (div_{g₀} h paired with the unit ∂_r
 * and J∂_r, relative to the natural scale |h|_{g₀}/r), via numerically
 * differentiated Christoffel symbols in a holomorphic chart.
 */
struct LeadingTermReport {
  double tau = 0.0;
  Eigen::MatrixXd matrix;  // 2n × 2n
  double trace = 0.0;
  double bianchi_dr = 0.0;
  double bianchi_dcr = 0.0;
  double frame_orthonormality_defect = 0.0;
  double matrix_symmetry_defect = 0.0;
  nlohmann::json to_json() const;
};

/** Preconditions: n ≥ 3 and τ ≥ 1e3 (FrameDegenerate otherwise). */
LeadingTermReport stenzel_leading_term(int n, double tau);

// ── Monge–Ampère residual surveys ───────────────────────────────────────────

struct MAConstancyResult {
  double mean = 0.0;
  double stddev = 0.0;
  int sample_count = 0;
  std::vector<MASample> samples;
};

/** Stenzel potential on {Σz² = 1}: residual over `count` chart points. */
MAConstancyResult stenzel_ma_survey(const StenzelProfile& profile, int count,
                                    std::uint64_t seed, double potential_scale = 1.0);

/** Calabi potential on ℂⁿ: residual over `count` points. */
MAConstancyResult calabi_ma_survey(int n, double c, int count,
                                   std::uint64_t seed, double potential_scale = 1.0);

/** Cone potential τ^β on {Σz² = 0}: residual over `count` chart points. */
MAConstancyResult cone_ma_survey(int n, int count, std::uint64_t seed);

/** Profile CSV rows (w, h, h′, τ = cosh w, f(τ) = h(w)). */
void write_profile_csv(const std::string& path, const StenzelProfile& profile);

}  // namespace acgeo
