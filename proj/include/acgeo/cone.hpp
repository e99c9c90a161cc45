/*
 * cone.hpp — affine cone/smoothing pair descriptions and radius calculus.
 *
 * An AffineConeSpec bundles a quasi-homogeneous affine cone C = {f_a = 0} in
 * ℂ^N, a smoothing M = {F_a = target_a}, positive rational coordinate
 * weights, and the radius exponent μ relating the coordinate scale to the
 * cone metric's distance from the apex:  r(z) = |z|^{1/μ}.  The scaling flow
 * ν_t multiplies coordinates by t^{μ·w_i} so that r(ν_t z) = t·r(z).
 *
 * Families built here:
 *   • odp(n):        Σ z_i² = 0 in ℂ^{n+1},            μ = n/(n−1)
 *   • cubic:         z₁³+z₂³+z₃³+z₄³ = 0 in ℂ⁴ (n=3),  μ = 3
 *   • quadric_pair:  {Σ z² = 0, Σ λ_i z² = 0} in ℂ⁵,   μ = 3
 *   • affine_space:  ℂⁿ with no equations,             μ = 1
 *
 * Smoothing deformation parameters (linear t_i, quadratic t_{ij}, pencil λ)
 * are folded into the smoothing polynomials at build time.
 */
#pragma once

#include <optional>
#include <random>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "acgeo/polynomial.hpp"

namespace acgeo {

enum class ConeFamily { affine_space, odp, cubic, quadric_pair };

struct AffineConeSpec {
  std::string name;
  ConeFamily family = ConeFamily::affine_space;
  int ambient_dim = 0;   // N
  int complex_dim = 0;   // n = N − #equations
  std::vector<Polynomial> cone_polynomials;
  std::vector<Polynomial> smoothing_polynomials;
  std::vector<cplx> smoothing_targets;
  std::vector<Rational> weights;      // positive, one per coordinate
  Rational radius_exponent{1};        // μ

  int num_equations() const { return static_cast<int>(cone_polynomials.size()); }

  nlohmann::json to_json() const;
  static AffineConeSpec from_json(const nlohmann::json& j);
};

// ── builders ────────────────────────────────────────────────────────────────

AffineConeSpec make_odp_spec(int n);

/** Fermat cubic cone in ℂ⁴ with smoothing Σz³ + Σ t_{ij} z_i z_j + Σ t_i z_i = 1. */
AffineConeSpec make_cubic_spec(
    const std::vector<cplx>& t_linear = {},
    const std::vector<std::tuple<int, int, cplx>>& t_quadratic = {});

/**
 * Quadric-pair cone {Σz² = 0, Σλ_i z² = 0} in ℂ⁵ with smoothing targets (1,1)
 * and optional linear deformation Σ t_i z_i added to the first equation.
 * Default λ = (0,3,6,9,12); all λ_i must be pairwise distinct and ≠ 1, since
 * λ_i = 1 makes the target level set {Σz² = 1, Σλz² = 1} singular at ±e_i.
 */
AffineConeSpec make_quadric_pair_spec(const std::vector<cplx>& lambda = {},
                                      const std::vector<cplx>& t_linear = {});

AffineConeSpec make_affine_space_spec(int n);

// ── radius calculus ─────────────────────────────────────────────────────────

/**
 * r(z) = |z|^{1/μ}. Preconditions: z ≠ 0 (ZeroPoint) and |f_a(z)| ≤
 * 1e-10·max(1,|z|)^{deg f_a} for every cone equation (OffVariety).
 */
double radius(const AffineConeSpec& spec, const VecC& z);

/** ν_t(z): coordinate i scaled by t^{μ·w_i}; r(ν_t z) = t·r(z). */
VecC scaling_map(const AffineConeSpec& spec, const VecC& z, double t);

/**
 * Fit the growth exponent of |field| along the scaling ray through z_unit
 * (a cone point): samples field(ν_{r}(z_unit)) over the given radii (≥ 8,
 * InsufficientSamples) and returns the fitted rate vs r.
 */
RateFit homogeneity_degree(const AffineConeSpec& spec,
                           const std::function<double(const VecC&)>& field,
                           const VecC& z_unit, const std::vector<double>& radii);

// ── sampling ────────────────────────────────────────────────────────────────

/** Pseudo-random smooth cone point with |z| = 1, exactly on every equation. */
VecC random_cone_point(const AffineConeSpec& spec, std::mt19937_64& rng);

/** Cone point placed at cone radius r along the ray through unit_point. */
VecC place_at_radius(const AffineConeSpec& spec, const VecC& unit_point, double r);

}  // namespace acgeo
