/*
 * polynomial.hpp — sparse multivariate polynomials over ℂ.
 *
 * Supports evaluation, gradients, formal partial derivatives, weighted
 * (quasi-homogeneous) degrees, and a cancellation-free difference evaluator
 *
 *     p(z + δ) − p(z) = Σ_terms Σ_k (Π_{l<k} w_l^{e_l}) · (w_k^{e_k} − z_k^{e_k})
 *                                 · (Π_{l>k} z_l^{e_l}),   w = z + δ,
 *     w_k^e − z_k^e = δ_k · Σ_{i<e} w_k^i z_k^{e−1−i},
 *
 * in which every summand carries an explicit δ factor, so tiny differences of
 * huge values are never formed by subtraction.
 */
#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "acgeo/numerics.hpp"

namespace acgeo {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

struct Monomial {
  std::vector<int> exponents;
  cplx coeff{0.0, 0.0};
};

class Polynomial {
 public:
  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /** Add coeff·z^exponents (merging with an existing identical monomial). */
  Polynomial& add_term(const std::vector<int>& exponents, cplx coeff);

  cplx eval(const VecC& z) const;

  /** p(z + delta) − p(z), cancellation-free (see file header). */
  cplx eval_difference(const VecC& z, const VecC& delta) const;

  /** Formal ∂p/∂z_k. */
  Polynomial derivative(int k) const;

  /** All first partials, ∂p/∂z_0 … ∂p/∂z_{n−1}. */
  std::vector<Polynomial> gradient() const;

  /** Gradient vector evaluated at z. */
  VecC gradient_at(const VecC& z) const;

  /** Maximum total degree over terms (0 for the zero polynomial). */
  int degree() const;

  /** Maximum weighted degree Σ w_i e_i over terms. */
  Rational weighted_degree(const std::vector<Rational>& weights) const;

  /** True iff every term has the same weighted degree (returned via out). */
  bool is_quasi_homogeneous(const std::vector<Rational>& weights,
                            Rational* degree_out = nullptr) const;

  nlohmann::json to_json() const;
  static Polynomial from_json(const nlohmann::json& j, int nvars);

 private:
  int nvars_;
  std::vector<Monomial> terms_;
};

/** z^e by repeated multiplication (e ≥ 0 small). */
cplx ipow(cplx z, int e);

}  // namespace acgeo
