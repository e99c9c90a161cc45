/*
 * projection.hpp — cone-to-smoothing projection maps, their differentials,
 * and decay-rate measurements for holomorphic volume forms and complex
 * structures.
 *
 * For a cone {f_a = 0} with smoothing {F_a = ε_a}, the projection moves a
 * cone point z along the fixed monic direction frame d_b(z) =
 * conj(∇f_b(z))/deg(f_b):  Φ(z) = z + Σ_b y_b·d_b(z), with y solved from
 * F_a(Φ(z)) = ε_a by Newton's method.
 *
 * Every quantity here is computed in *structured* form. The Newton residual
 * is  [f_a(z+Δ) − f_a(z)] + p_a(z+Δ) − ε_a  (p_a = F_a − f_a the lower-order
 * part), where the bracket is evaluated by the telescoped difference rule so
 * that each summand carries a factor of Δ; no term of size |z|^{deg} is ever
 * formed and then cancelled. Likewise dΨ is obtained analytically from the
 * implicit function theorem — dy = −(∂G/∂y)⁻¹·∂G/∂z with the z-derivative
 * assembled from gradient *differences* — rather than by finite differences,
 * whose off-cone displacement error would swamp the signal at large radius.
 *
 * Volume forms are compared through the completion-determinant representation
 * Ω(v₁…vₙ) = det[v | G]/det(J_F·G) with the fixed completion G =
 * [conj(∇f_c(z))]. The difference Φ*Ω − Ω₀ is expanded multilinearly so that
 * every term carries at least one small column (a dΨ-column or a gradient
 * difference); at the far end of the range the difference is ~36 orders of
 * magnitude below the individual forms, far beyond naive subtraction.
 *
 * Proxy norms: an n-form is measured by the maximum coefficient magnitude on
 * increasing n-tuples of the Euclidean-orthonormal tangent frame, times
 * r^{n(μ−1)}; the complex-structure difference by the operator norm on the
 * same frame. Both are scale-correct stand-ins for the cone-metric norms.
 */
#pragma once

#include <nlohmann/json.hpp>

#include "acgeo/charts.hpp"

namespace acgeo {

/** JSON rendering of a RateFit (exponent, amplitude, rms, range, ...). */
nlohmann::json rate_fit_json(const RateFit& fit);

struct ProjectionSettings {
  double tolerance = 1e-13;
  int max_iterations = 40;
};

struct ProjectionSolution {
  VecC coefficients;             // y
  VecC displacement;             // Ψ(z) = Σ y_b d_b(z)
  VecC point;                    // Φ(z) = z + Ψ(z)
  int iterations = 0;
  double residual = 0.0;         // final structured residual, max over equations
  std::vector<double> step_norms;  // Newton correction sizes, strictly decreasing
};

class ProjectionMap;

/** Cached analytic differential of Ψ at one point (implicit function theorem). */
class ProjectionDifferential {
 public:
  /** dΨ(v) for an ambient real direction v (ℝ-linear, not ℂ-linear). */
  VecC apply(const VecC& v) const;

  const VecC& base_point() const { return z_; }

 private:
  friend class ProjectionMap;
  VecC z_, y_;
  std::vector<VecC> dirs_;
  std::vector<MatC> hess_at_z_;  // per equation: ∂²f_b/∂z_k∂z_l at z
  std::vector<int> degrees_;
  MatC grads_w_;                 // rows: ∇F_a at w = Φ(z)
  MatC mixed_grads_;             // rows: [J_f(w) − J_f(z)] + J_p(w), structured
  Eigen::PartialPivLU<MatC> jacobian_lu_;  // ∂G/∂y at the solution
};

class ProjectionMap {
 public:
  explicit ProjectionMap(AffineConeSpec spec, ProjectionSettings settings = {});

  const AffineConeSpec& spec() const { return spec_; }

  /** Monic projection directions d_b(z) = conj(∇f_b(z))/deg f_b. */
  std::vector<VecC> directions(const VecC& z) const;

  /**
   * Newton solve of F(z + Σ y_b d_b) = ε in structured form. Throws
   * NewtonDiverged (no convergence / non-finite) or RankDeficient (singular
   * Newton matrix, e.g. at the apex).
   */
  ProjectionSolution solve(const VecC& z, const VecC* warm_start = nullptr) const;

  VecC psi(const VecC& z) const;
  VecC phi(const VecC& z) const;

  ProjectionDifferential differential(const VecC& z,
                                      const ProjectionSolution& sol) const;

  /**
   * Finite-difference dΨ(v), central + one Richardson level on re-solves of
   * Ψ. Diagnostic only: its accuracy degrades with |z| because displaced
   * evaluation points leave the cone; use differential() for measurements.
   */
  VecC dpsi_finite_difference(const VecC& z, const VecC& v,
                              const FDPolicy& fd = {}) const;

  /** Rows a = 1..s: ∇f_a evaluated at z (cone equations only). */
  MatC cone_gradients(const VecC& z) const;

  /** Rows: J_F(z+psi) − J_f(z), assembled without large-term cancellation. */
  MatC gradient_difference(const VecC& z, const VecC& psi) const;

 private:
  VecC structured_residual(const VecC& z, const VecC& y,
                           const std::vector<VecC>& dirs, VecC* point_out) const;

  AffineConeSpec spec_;
  ProjectionSettings settings_;
  std::vector<Polynomial> lower_parts_;                 // p_a = F_a − f_a
  std::vector<std::vector<Polynomial>> cone_grads_;     // ∂f_a/∂z_k
  std::vector<std::vector<Polynomial>> lower_grads_;    // ∂p_a/∂z_k
  std::vector<std::vector<std::vector<Polynomial>>> cone_hessians_;
  std::vector<int> degrees_;
};

// ── comparisons at a point ──────────────────────────────────────────────────

struct VolumeComparison {
  double radius = 0.0;
  double weight = 0.0;  // r^{n(μ−1)}
  std::vector<std::vector<int>> tuples;  // increasing index tuples into the frame
  std::vector<cplx> omega0;       // Ω₀ coefficients on the frame tuples
  std::vector<cplx> pullback;     // Φ*Ω coefficients
  std::vector<cplx> difference;   // structured Φ*Ω − Ω₀
  double omega0_proxy = 0.0;
  double pullback_proxy = 0.0;
  double difference_proxy = 0.0;
};

VolumeComparison compare_volume_forms(const ProjectionMap& proj,
                                      const ChartFrame& chart,
                                      const ProjectionSolution& sol,
                                      const ProjectionDifferential& diff);

struct JComparison {
  Eigen::MatrixXd j0;          // J₀ in the orthonormal tangent frame
  Eigen::MatrixXd pullback;    // Φ*J in the same frame
  Eigen::MatrixXd difference;  // structured Φ*J − J₀
  double op_norm_difference = 0.0;
  double j_square_defect = 0.0;     // max-entry |(Φ*J)² + I|
  double tangency_residual = 0.0;   // worst least-squares defect of dΦ⁻¹
};

JComparison compare_complex_structures(const ProjectionMap& proj,
                                       const ChartFrame& chart,
                                       const ProjectionSolution& sol,
                                       const ProjectionDifferential& diff);

// ── decay-rate scans ────────────────────────────────────────────────────────

struct DecaySample {
  double radius;
  int direction;
  double omega_difference;  // proxy norm of Φ*Ω − Ω₀
  double j_difference;      // operator norm of Φ*J − J₀
  double ratio;             // j_difference / omega_difference
  double coefficient_abs;   // |y₁|
  double ambient_norm;      // |z|
};

struct RateReport {
  std::string cone_name;
  RateFit omega_fit;
  RateFit j_fit;
  RateFit coefficient_fit;  // |y₁| against |z|
  double lemma_constant = 0.0;  // max over samples of j/ω
  double inner_cutoff = 0.0;    // smallest radius where the cold solve converges
  std::vector<DecaySample> samples;
  nlohmann::json descriptor;
  nlohmann::json to_json() const;
};

/**
 * Scan Φ*Ω − Ω₀ and Φ*J − J₀ along scaling rays through `directions` random
 * cone points, at the given cone radii (radii below twice the measured inner
 * cutoff are dropped). Rates are least-squares fits of log-magnitude against
 * log-radius pooled over directions.
 */
RateReport deformation_rate_scan(const AffineConeSpec& spec,
                                 const std::vector<double>& radii,
                                 int directions, std::uint64_t seed);

/** Smallest probe radius at which the cold Newton solve converges for all rays. */
double find_inner_cutoff(const ProjectionMap& proj,
                         const std::vector<VecC>& unit_points);

void write_decay_csv(const std::string& path, const RateReport& report);

}  // namespace acgeo
