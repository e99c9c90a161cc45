/*
 * charts.hpp — holomorphic coordinate charts on affine varieties.
 *
 * A chart at a smooth point splits the ambient coordinates into n free and
 * s dependent ones; the dependent block is recovered by Newton's method on
 * the defining equations (the s×s Jacobian minor must be well conditioned).
 * The chart map Z(ζ) is holomorphic, so the restricted complex Hessian obeys
 * the exact chain rule  H_chart = Jᵀ · H_ambient · J̄  with J = ∂Z/∂ζ, and the
 * coordinate tangent frame is  T_k = e_{free_k} − minor⁻¹·(∂F/∂ζ_k)  on the
 * dependent rows (columns of J).
 *
 * The holomorphic volume form on {F_a = c_a} is computed by the residue
 * formula  Ω = h·dζ₁∧…∧dζₙ  with  h = sign(σ)/det(∂F_a/∂z_{dep_b}),  σ the
 * permutation sorting (free…, dep…) into ambient order; equivalently
 * Ω(u₁,…,uₙ) = det[u | G]/det(J_F·G) for any completion columns G with
 * det(J_F·G) ≠ 0 — both conventions agree and are used interchangeably.
 *
 * Index convention throughout:  H[a][b] = ∂²φ/∂z_a∂z̄_b, pairing
 * value(u,v) = uᵀ·H·v̄;  E(H)(u,v) = Re(uᵀ·H·v̄) is the real form, written in
 * the interleaved real basis (x₁,y₁,…,xₙ,yₙ) by metric_as_real_form.
 */
#pragma once

#include "acgeo/cone.hpp"

namespace acgeo {

enum class WhichVariety { cone, smoothing };

/** The defining data a chart needs (copied, so charts own their equations). */
struct VarietyRef {
  std::vector<Polynomial> equations;
  std::vector<cplx> targets;  // level-set values, one per equation
  int ambient_dim = 0;
  int complex_dim = 0;
};

VarietyRef variety_of(const AffineConeSpec& spec, WhichVariety which);

struct ChartFrame {
  VarietyRef variety;
  VecC base_point;
  std::vector<int> free_indices;  // size n
  std::vector<int> dep_indices;   // size s
  double minor_condition = 1.0;
  std::vector<VecC> tangent_basis;      // 2n: T_1..T_n, i·T_1..i·T_n
  std::vector<VecC> orthonormal_basis;  // 2n, orthonormal for Re⟨·,·⟩
  std::string frame_kind = "proxy_euclidean";

  int n() const { return variety.complex_dim; }
  int s() const { return static_cast<int>(dep_indices.size()); }
  int N() const { return variety.ambient_dim; }
};

/** Chart at z0 with an automatically chosen best-conditioned dependent block. */
ChartFrame make_chart(const AffineConeSpec& spec, WhichVariety which,
                      const VecC& z0);

/** Chart at z0 with caller-specified free coordinates. */
ChartFrame make_chart(const AffineConeSpec& spec, WhichVariety which,
                      const VecC& z0, const std::vector<int>& free_indices);

/**
 * Evaluate the chart map: free coordinates set to zeta (absolute values, not
 * offsets), dependent coordinates solved by Newton warm-started from
 * dep_init (defaults to the base point's dependent block).
 */
VecC chart_point(const ChartFrame& chart, const VecC& zeta,
                 const VecC* dep_init = nullptr);

/** Coordinate tangent columns T_k = ∂Z/∂ζ_k at an arbitrary point z on the
 *  variety (IFT at z with the chart's free/dependent split). */
std::vector<VecC> chart_tangent_columns(const ChartFrame& chart, const VecC& z);

// ── Hermitian forms ─────────────────────────────────────────────────────────

struct HermitianForm {
  MatC matrix;                     // n×n, H[i][j] = ∂²φ/∂ζ_i∂ζ̄_j
  double hermiticity_defect = 0.0; // max |H − H†| entry before symmetrization
};

/**
 * Finite-difference complex Hessian of φ∘Z in the chart's free coordinates.
 * φ receives the full ambient point. Steps follow FDPolicy (second-derivative
 * steps with one Richardson level); throws StepUnderflow on degenerate steps.
 */
HermitianForm complex_hessian(const std::function<double(const VecC&)>& phi,
                              const ChartFrame& chart, const FDPolicy& fd = {});

/** Residue coefficient h with Ω = h·dζ₁∧…∧dζₙ on this chart (1 when s = 0). */
cplx residue_volume_form(const ChartFrame& chart);

/**
 * log det H − log |h|² for the FD Hessian of φ in this chart; constant on the
 * variety exactly when i∂∂̄φ is Ricci-flat. Throws NotPositiveDefinite when
 * the Hessian is not positive definite.
 */
double monge_ampere_residual(const std::function<double(const VecC&)>& phi,
                             const ChartFrame& chart, const FDPolicy& fd = {});

/** Real 2n×2n form E(H) in the interleaved basis (x₁,y₁,…,xₙ,yₙ). */
Eigen::MatrixXd metric_as_real_form(const HermitianForm& H);

/** Re(uᵀ H v̄) — the real pairing of ambient/chart vectors under H. */
double hermitian_pair(const MatC& H, const VecC& u, const VecC& v);

/** H_chart = Jᵀ·H_ambient·J̄ for the chart's holomorphic Jacobian at base. */
MatC restrict_hessian_to_chart(const MatC& H_ambient, const ChartFrame& chart);

/** Ambient Hessian of a radial potential: H[a][b] = P1·δ_ab + P2·z̄_a·z_b. */
MatC radial_ambient_hessian(const VecC& z, double P1, double P2);

// ── sample dumps ────────────────────────────────────────────────────────────

struct MASample {
  VecC point;
  double residual;
  double det_hessian;
  double habs2;
};

/** CSV with one row per sample: re/im of each coordinate, residual, det, |h|². */
void write_ma_csv(const std::string& path, const std::vector<MASample>& rows);

}  // namespace acgeo
