/*
 * weights.hpp — indicial-root calculus for the Laplacian on a Riemannian
 * cone C = ℝ⁺ × L of real dimension m.
 *
 * A homogeneous harmonic function r^w·φ(θ) with Δ_L φ = −μ φ exists exactly
 * when  w(w + m − 2) = μ,  i.e.  w = −(m−2)/2 ± √((m−2)²/4 + μ).  The weights
 * derived from the link spectrum form the exceptional set 𝒫: the weighted
 * Laplacian fails to be Fredholm at decay rate β precisely when β+2 ∈ 𝒫.
 * The μ=0 branch always contributes {0, 2−m} (constants and the Green's
 * function), and no weight ever falls strictly inside (2−m, 0).
 *
 * Spectra are caller-supplied finite prefixes; the derived set is certified
 * only inside the band [w₋(μ_max), w₊(μ_max)] — membership queries outside
 * that band raise CutoffExceeded rather than guessing. Built-in generators
 * cover round spheres (μ_k = k(k+m−2)) and diagonal cyclic quotients (the
 * character-invariant sublattice of the sphere spectrum).
 *
 * The module also houses two small scalar tools from the same circle of
 * ideas: the error-rate doubling schedule β → 2β → 4β+ε → …, stopped at the
 * first rate strictly below −2, and the radial separated-mode solver for
 * u″ + ((m−1)/r)u′ − (μ/r²)u = r^s, whose particular solution is
 * r^{s+2}/((s+2)(s+m) − μ) away from resonance and picks up a log factor
 * exactly when s+2 is an indicial root.
 */
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "acgeo/numerics.hpp"

namespace acgeo {

struct WeightEntry {
  double value = 0.0;
  int multiplicity = 1;  // collapsed duplicates across eigenvalues/branches
};

struct WeightSet {
  double m = 0.0;                    // real dimension of the cone
  std::vector<double> eigenvalues;   // increasing certified prefix, μ₀ = 0
  std::vector<int> multiplicities;   // parallel to eigenvalues
  std::vector<WeightEntry> weights;  // sorted ascending
  double certified_min = 0.0;        // membership decidable on [min, max]
  double certified_max = 0.0;
  bool exact = false;  // all weights integral ⇒ knife-edge tests are exact

  /** Membership with the documented 1e−12 tolerance. */
  bool contains(double value, double tol = 1e-12) const;
  /** Smallest weight strictly greater than `value` + tol (for band queries). */
  std::optional<double> next_above(double value, double tol = 1e-12) const;

  nlohmann::json to_json() const;
  static WeightSet from_json(const nlohmann::json& j);
};

/**
 * Derive the exceptional set from a link-spectrum prefix. The eigenvalue
 * list must increase strictly from 0; multiplicities default to 1.
 * Throws BadDimension (m ≤ 2) or UnsortedSpectrum.
 */
WeightSet exceptional_weights(double m, const std::vector<double>& eigenvalues,
                              const std::vector<int>& multiplicities = {});

/**
 * Fredholm test at decay rate β: true iff β+2 is NOT an exceptional weight.
 * Throws CutoffExceeded when β+2 lies outside the certified band.
 */
bool is_fredholm(const WeightSet& ws, double beta);

struct ObataGapReport {
  bool gap_holds = false;       // 𝒫 ∩ [1−m, 1] ⊆ {2−m, 0, 1}
  bool boundary_case = false;   // weight 1 attained (μ₁ = m−1 exactly)
  double smallest_positive = 0.0;
  std::vector<double> violations;          // weights in [1−m,1] \ {2−m,0,1}
  std::optional<double> weight_in_1_2;     // the at-most-one element of (1,2)
  int count_in_1_2 = 0;
  nlohmann::json to_json() const;
};

/**
 * Check the spectral-gap consequences of Ric_L ≥ (m−2)g_L: no exceptional
 * weight inside [1−m, 1] other than 2−m and 0 (weight 1 itself is the Obata
 * boundary case, attained only by linear functions on the round sphere), and
 * at most one exceptional weight in (1,2). With ricci_nonneg set, μ₁ < m−1
 * raises HypothesisViolated.
 */
ObataGapReport obata_gap_check(const WeightSet& ws, bool ricci_nonneg);

struct RateIterationTrace {
  double beta0 = 0.0;
  double epsilon = 0.0;
  std::vector<double> steps;    // β, 2β, 4β+ε, … (steps[0] = β)
  double terminal_rate = 0.0;   // first entry strictly below −2
  int step_count = 0;           // number of doublings = steps.size() − 1
  nlohmann::json to_json() const;
};

/**
 * Error-rate doubling schedule: the first step doubles exactly, every later
 * step doubles and adds a slack of at most ε (the slack is capped at half
 * the current magnitude so the schedule always descends); stops at the first
 * rate strictly below −2. β₀ must lie in (−2, 0), ε in (0, 0.1].
 */
RateIterationTrace rate_iteration(double beta0, double epsilon);

struct RadialModeSolution {
  bool resonant = false;      // s+2 hits an indicial root ⇒ log solution
  double exponent = 0.0;      // s+2
  double coefficient = 0.0;   // 1/((s+2)(s+m)−μ), or the log-coefficient
  bool log_solution = false;  // u = coefficient · r^{s+2} · log r
  double root_plus = 0.0;     // indicial roots w± of the homogeneous ODE
  double root_minus = 0.0;
  double suppressed_root = 0.0;  // NaN when no branch violates target_decay
  double kept_root = 0.0;        // NaN when no branch meets target_decay
  double residual = 0.0;         // relative ODE residual at r ∈ {1,10,100}
  nlohmann::json to_json() const;
};

/**
 * Particular solution of u″ + ((m−1)/r)u′ − (μ/r²)u = r^s and the indicial
 * bookkeeping: which homogeneous branch r^{w±} must be suppressed so the
 * full solution is O(r^{target_decay}). Resonance (s+2 ∈ {w₊, w₋}) returns
 * the log-solution marker instead of a spurious coefficient.
 */
RadialModeSolution radial_mode_solve(double m, double mu, double s,
                                     double target_decay);

// ── spectrum generators and I/O ─────────────────────────────────────────────

/** Round-sphere prefix μ_k = k(k+m−2), k = 0..k_max. */
std::vector<double> sphere_eigenvalues(double m, int k_max);

/**
 * Diagonal cyclic quotient S^{m−1}/ℤ_p (m even ≥ 4): the degrees k whose
 * harmonics contain a character-invariant vector, i.e. some bidegree (a,b),
 * a+b = k, with p | a−b. Returns the surviving μ_k = k(k+m−2), k ≤ k_max.
 */
std::vector<double> lens_eigenvalues(int m, int p, int k_max);

/** CSV rows "eigenvalue,multiplicity" (header line included). */
std::pair<std::vector<double>, std::vector<int>> read_spectrum_csv(
    const std::string& path);
void write_spectrum_csv(const std::string& path, const WeightSet& ws);

}  // namespace acgeo
