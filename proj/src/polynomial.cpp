#include "acgeo/polynomial.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace acgeo {

cplx ipow(cplx z, int e) {
  cplx out{1.0, 0.0};
  for (int i = 0; i < e; ++i) out *= z;
  return out;
}

Polynomial& Polynomial::add_term(const std::vector<int>& exponents, cplx coeff) {
  if (static_cast<int>(exponents.size()) != nvars_)
    throw CodedError("BadPolynomial", "exponent tuple length != nvars");
  for (int e : exponents)
    if (e < 0) throw CodedError("BadPolynomial", "negative exponent");
  if (coeff == cplx(0.0, 0.0)) return *this;
  for (auto& t : terms_) {
    if (t.exponents == exponents) {
      t.coeff += coeff;
      return *this;
    }
  }
  terms_.push_back(Monomial{exponents, coeff});
  return *this;
}

cplx Polynomial::eval(const VecC& z) const {
  cplx acc{0.0, 0.0};
  for (const auto& t : terms_) {
    cplx v = t.coeff;
    for (int k = 0; k < nvars_; ++k)
      if (t.exponents[k] > 0) v *= ipow(z[k], t.exponents[k]);
    acc += v;
  }
  return acc;
}

cplx Polynomial::eval_difference(const VecC& z, const VecC& delta) const {
  VecC w = z + delta;
  cplx acc{0.0, 0.0};
  for (const auto& t : terms_) {
    // Telescope the monomial across coordinates; each summand carries δ_k.
    for (int k = 0; k < nvars_; ++k) {
      int e = t.exponents[k];
      if (e == 0 || delta[k] == cplx(0.0, 0.0)) continue;
      cplx prefix{1.0, 0.0};
      for (int l = 0; l < k; ++l)
        if (t.exponents[l] > 0) prefix *= ipow(w[l], t.exponents[l]);
      cplx suffix{1.0, 0.0};
      for (int l = k + 1; l < nvars_; ++l)
        if (t.exponents[l] > 0) suffix *= ipow(z[l], t.exponents[l]);
      // w_k^e − z_k^e = δ_k · Σ_{i<e} w_k^i z_k^{e−1−i}
      cplx geom{0.0, 0.0};
      for (int i = 0; i < e; ++i) geom += ipow(w[k], i) * ipow(z[k], e - 1 - i);
      acc += t.coeff * prefix * delta[k] * geom * suffix;
    }
  }
  return acc;
}

Polynomial Polynomial::derivative(int k) const {
  if (k < 0 || k >= nvars_)
    throw CodedError("BadPolynomial", "derivative index out of range");
  Polynomial out(nvars_);
  for (const auto& t : terms_) {
    if (t.exponents[k] == 0) continue;
    std::vector<int> e = t.exponents;
    cplx c = t.coeff * static_cast<double>(e[k]);
    e[k] -= 1;
    out.add_term(e, c);
  }
  return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> out;
  out.reserve(nvars_);
  for (int k = 0; k < nvars_; ++k) out.push_back(derivative(k));
  return out;
}

VecC Polynomial::gradient_at(const VecC& z) const {
  VecC g = VecC::Zero(nvars_);
  for (const auto& t : terms_) {
    for (int k = 0; k < nvars_; ++k) {
      if (t.exponents[k] == 0) continue;
      cplx v = t.coeff * static_cast<double>(t.exponents[k]);
      for (int l = 0; l < nvars_; ++l) {
        int e = t.exponents[l] - (l == k ? 1 : 0);
        if (e > 0) v *= ipow(z[l], e);
      }
      g[k] += v;
    }
  }
  return g;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int d = 0;
    for (int e : t.exponents) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

Rational Polynomial::weighted_degree(const std::vector<Rational>& weights) const {
  if (static_cast<int>(weights.size()) != nvars_)
    throw CodedError("BadPolynomial", "weight vector length != nvars");
  Rational best(0);
  bool first = true;
  for (const auto& t : terms_) {
    Rational d(0);
    for (int k = 0; k < nvars_; ++k) d += weights[k] * t.exponents[k];
    if (first || d > best) best = d;
    first = false;
  }
  return best;
}

bool Polynomial::is_quasi_homogeneous(const std::vector<Rational>& weights,
                                      Rational* degree_out) const {
  if (terms_.empty()) {
    if (degree_out) *degree_out = Rational(0);
    return true;
  }
  Rational common(0);
  bool first = true;
  for (const auto& t : terms_) {
    Rational d(0);
    for (int k = 0; k < nvars_; ++k) d += weights[k] * t.exponents[k];
    if (first) {
      common = d;
      first = false;
    } else if (d != common) {
      return false;
    }
  }
  if (degree_out) *degree_out = common;
  return true;
}

nlohmann::json Polynomial::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) {
    terms.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}},
                     {"exponents", t.exponents}});
  }
  return terms;
}

Polynomial Polynomial::from_json(const nlohmann::json& j, int nvars) {
  Polynomial p(nvars);
  if (!j.is_array())
    throw CodedError("BadPolynomial", "polynomial JSON must be a list of terms");
  for (const auto& term : j) {
    auto coeff = term.at("coeff");
    auto exps = term.at("exponents").get<std::vector<int>>();
    p.add_term(exps, cplx(coeff.at(0).get<double>(), coeff.at(1).get<double>()));
  }
  return p;
}

}  // namespace acgeo
