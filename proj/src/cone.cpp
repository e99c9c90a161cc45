#include "acgeo/cone.hpp"

#include <nlohmann/json.hpp>

namespace acgeo {

namespace {

const char* family_name(ConeFamily f) {
  switch (f) {
    case ConeFamily::affine_space: return "affine_space";
    case ConeFamily::odp: return "odp";
    case ConeFamily::cubic: return "cubic";
    case ConeFamily::quadric_pair: return "quadric_pair";
  }
  return "unknown";
}

ConeFamily family_from_name(const std::string& s) {
  if (s == "affine_space") return ConeFamily::affine_space;
  if (s == "odp") return ConeFamily::odp;
  if (s == "cubic") return ConeFamily::cubic;
  if (s == "quadric_pair") return ConeFamily::quadric_pair;
  throw CodedError("BadConeSpec", "unknown cone family '" + s + "'");
}

std::vector<int> unit_exps(int nvars, int k, int e) {
  std::vector<int> v(nvars, 0);
  v[k] = e;
  return v;
}

}  // namespace

// ── JSON ────────────────────────────────────────────────────────────────────

nlohmann::json AffineConeSpec::to_json() const {
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& p : cone_polynomials) polys.push_back(p.to_json());
  nlohmann::json smooth = nlohmann::json::array();
  for (const auto& p : smoothing_polynomials) smooth.push_back(p.to_json());
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : smoothing_targets) targets.push_back({t.real(), t.imag()});
  nlohmann::json w = nlohmann::json::array();
  for (const auto& wi : weights) w.push_back(format_rational(wi));
  return {{"name", name},
          {"family", family_name(family)},
          {"ambient_dim", ambient_dim},
          {"complex_dim", complex_dim},
          {"cone_polynomials", polys},
          {"smoothing_polynomials", smooth},
          {"smoothing_targets", targets},
          {"weights", w},
          {"radius_exponent", format_rational(radius_exponent)}};
}

AffineConeSpec AffineConeSpec::from_json(const nlohmann::json& j) {
  AffineConeSpec s;
  s.name = j.at("name").get<std::string>();
  s.family = family_from_name(j.at("family").get<std::string>());
  s.ambient_dim = j.at("ambient_dim").get<int>();
  s.complex_dim = j.at("complex_dim").get<int>();
  for (const auto& p : j.at("cone_polynomials"))
    s.cone_polynomials.push_back(Polynomial::from_json(p, s.ambient_dim));
  for (const auto& p : j.at("smoothing_polynomials"))
    s.smoothing_polynomials.push_back(Polynomial::from_json(p, s.ambient_dim));
  for (const auto& t : j.at("smoothing_targets"))
    s.smoothing_targets.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
  for (const auto& w : j.at("weights"))
    s.weights.push_back(parse_rational(w.get<std::string>()));
  s.radius_exponent = parse_rational(j.at("radius_exponent").get<std::string>());
  for (const auto& w : s.weights)
    if (w <= Rational(0)) throw CodedError("BadConeSpec", "weights must be positive");
  if (s.radius_exponent <= Rational(0))
    throw CodedError("BadConeSpec", "radius exponent must be positive");
  if (static_cast<int>(s.weights.size()) != s.ambient_dim)
    throw CodedError("BadConeSpec", "need one weight per coordinate");
  if (s.cone_polynomials.size() != s.smoothing_polynomials.size() ||
      s.cone_polynomials.size() != s.smoothing_targets.size())
    throw CodedError("BadConeSpec", "equation/target count mismatch");
  return s;
}

// ── builders ────────────────────────────────────────────────────────────────

AffineConeSpec make_odp_spec(int n) {
  if (n < 2) throw CodedError("BadConeSpec", "odp needs n >= 2");
  AffineConeSpec s;
  s.name = "odp_n" + std::to_string(n);
  s.family = ConeFamily::odp;
  s.ambient_dim = n + 1;
  s.complex_dim = n;
  Polynomial f(n + 1);
  for (int k = 0; k <= n; ++k) f.add_term(unit_exps(n + 1, k, 2), 1.0);
  s.cone_polynomials = {f};
  s.smoothing_polynomials = {f};
  s.smoothing_targets = {cplx(1.0, 0.0)};
  s.weights.assign(n + 1, Rational(1));
  s.radius_exponent = Rational(n, n - 1);
  return s;
}

AffineConeSpec make_cubic_spec(
    const std::vector<cplx>& t_linear,
    const std::vector<std::tuple<int, int, cplx>>& t_quadratic) {
  constexpr int N = 4;
  AffineConeSpec s;
  s.name = "cubic_surface_cone";
  s.family = ConeFamily::cubic;
  s.ambient_dim = N;
  s.complex_dim = 3;
  Polynomial f(N);
  for (int k = 0; k < N; ++k) f.add_term(unit_exps(N, k, 3), 1.0);
  s.cone_polynomials = {f};
  Polynomial F = f;
  if (!t_linear.empty()) {
    if (static_cast<int>(t_linear.size()) != N)
      throw CodedError("BadConeSpec", "cubic linear deformation needs 4 entries");
    for (int k = 0; k < N; ++k)
      if (t_linear[k] != cplx(0.0, 0.0)) F.add_term(unit_exps(N, k, 1), t_linear[k]);
  }
  for (const auto& [i, j, c] : t_quadratic) {
    if (i < 0 || j < 0 || i >= N || j >= N)
      throw CodedError("BadConeSpec", "cubic quadratic deformation index out of range");
    std::vector<int> e(N, 0);
    e[i] += 1;
    e[j] += 1;
    if (c != cplx(0.0, 0.0)) F.add_term(e, c);
  }
  s.smoothing_polynomials = {F};
  s.smoothing_targets = {cplx(1.0, 0.0)};
  s.weights.assign(N, Rational(1));
  s.radius_exponent = Rational(3);
  return s;
}

AffineConeSpec make_quadric_pair_spec(const std::vector<cplx>& lambda_in,
                                      const std::vector<cplx>& t_linear) {
  constexpr int N = 5;
  std::vector<cplx> lambda = lambda_in;
  if (lambda.empty()) lambda = {cplx(0), cplx(3), cplx(6), cplx(9), cplx(12)};
  if (static_cast<int>(lambda.size()) != N)
    throw CodedError("BadConeSpec", "quadric pair needs 5 pencil values");
  for (int i = 0; i < N; ++i) {
    if (lambda[i] == cplx(1.0, 0.0))
      throw CodedError("BadConeSpec",
                       "lambda_i = 1 makes the smoothing level set singular");
    for (int j = i + 1; j < N; ++j)
      if (lambda[i] == lambda[j])
        throw CodedError("BadConeSpec", "pencil values must be distinct");
  }
  AffineConeSpec s;
  s.name = "quadric_pair_cone";
  s.family = ConeFamily::quadric_pair;
  s.ambient_dim = N;
  s.complex_dim = 3;
  Polynomial f1(N), f2(N);
  for (int k = 0; k < N; ++k) {
    f1.add_term(unit_exps(N, k, 2), 1.0);
    if (lambda[k] != cplx(0.0, 0.0)) f2.add_term(unit_exps(N, k, 2), lambda[k]);
  }
  s.cone_polynomials = {f1, f2};
  Polynomial F1 = f1;
  if (!t_linear.empty()) {
    if (static_cast<int>(t_linear.size()) != N)
      throw CodedError("BadConeSpec", "quadric linear deformation needs 5 entries");
    for (int k = 0; k < N; ++k)
      if (t_linear[k] != cplx(0.0, 0.0)) F1.add_term(unit_exps(N, k, 1), t_linear[k]);
  }
  s.smoothing_polynomials = {F1, f2};
  s.smoothing_targets = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
  s.weights.assign(N, Rational(1));
  s.radius_exponent = Rational(3);
  return s;
}

AffineConeSpec make_affine_space_spec(int n) {
  if (n < 1) throw CodedError("BadConeSpec", "affine space needs n >= 1");
  AffineConeSpec s;
  s.name = "affine_space_n" + std::to_string(n);
  s.family = ConeFamily::affine_space;
  s.ambient_dim = n;
  s.complex_dim = n;
  s.weights.assign(n, Rational(1));
  s.radius_exponent = Rational(1);
  return s;
}

// ── radius calculus ─────────────────────────────────────────────────────────

double radius(const AffineConeSpec& spec, const VecC& z) {
  double nz = z.norm();
  if (!(nz > 0.0)) throw CodedError("ZeroPoint", "radius undefined at the apex");
  for (const auto& f : spec.cone_polynomials) {
    double scale = std::pow(std::max(1.0, nz), f.degree());
    if (std::abs(f.eval(z)) > 1e-10 * scale)
      throw CodedError("OffVariety", "point does not satisfy a cone equation");
  }
  return std::pow(nz, 1.0 / to_double(spec.radius_exponent));
}

VecC scaling_map(const AffineConeSpec& spec, const VecC& z, double t) {
  if (!(t > 0.0)) throw CodedError("BadConeSpec", "scaling parameter must be positive");
  double mu = to_double(spec.radius_exponent);
  VecC out = z;
  for (int k = 0; k < spec.ambient_dim; ++k)
    out[k] *= std::pow(t, mu * to_double(spec.weights[k]));
  return out;
}

RateFit homogeneity_degree(const AffineConeSpec& spec,
                           const std::function<double(const VecC&)>& field,
                           const VecC& z_unit, const std::vector<double>& radii) {
  if (radii.size() < 8)
    throw CodedError("InsufficientSamples",
                     "homogeneity degree needs at least 8 radii");
  std::vector<double> mags;
  mags.reserve(radii.size());
  double r0 = radius(spec, z_unit);
  for (double r : radii) mags.push_back(field(scaling_map(spec, z_unit, r / r0)));
  return fit_rate(radii, mags, /*allow_log=*/false);
}

// ── sampling ────────────────────────────────────────────────────────────────

namespace {

cplx gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return cplx(g(rng), g(rng));
}

/** Random point of {Σ z² = 0} ⊂ ℂ^N with |z| = 1: z = (u + iv)/√2·…,
 *  u ⊥ v real unit vectors — Σz² = (|u|²−|v|²)/2 + i⟨u,v⟩ = 0 exactly. */
VecC random_null_quadric_point(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd u(N), v(N);
  for (int k = 0; k < N; ++k) u[k] = g(rng);
  for (int k = 0; k < N; ++k) v[k] = g(rng);
  u.normalize();
  v -= u * u.dot(v);
  v.normalize();
  VecC z(N);
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < N; ++k) z[k] = cplx(s * u[k], s * v[k]);
  return z;
}

}  // namespace

VecC random_cone_point(const AffineConeSpec& spec, std::mt19937_64& rng) {
  const int N = spec.ambient_dim;
  switch (spec.family) {
    case ConeFamily::affine_space: {
      VecC z(N);
      for (int k = 0; k < N; ++k) z[k] = gaussian(rng);
      z.normalize();
      return z;
    }
    case ConeFamily::odp:
      return random_null_quadric_point(N, rng);
    case ConeFamily::cubic: {
      // Exact-negation pairs (a, -a, b, -b): the cubes cancel pairwise and in
      // order, so the Fermat cubic vanishes exactly in floating point, and
      // negation pairs survive normalization and radial scaling bit-exactly.
      // That exactness is what keeps the smoothing displacement measurable at
      // large radius, where any off-cone residue would swamp the signal.
      while (true) {
        VecC z(4);
        const cplx a = gaussian(rng), b = gaussian(rng);
        if (std::abs(a) < 1e-6 || std::abs(b) < 1e-6) continue;
        z[0] = a;
        z[1] = -a;
        z[2] = b;
        z[3] = -b;
        z /= z.norm();
        return z;
      }
    }
    case ConeFamily::quadric_pair: {
      // Solve the 2×2 linear system for (z₁², z₂²) given random z₃,z₄,z₅.
      const auto& f2 = spec.cone_polynomials[1];
      cplx l0{0.0, 0.0}, l1{0.0, 0.0};
      std::vector<cplx> lam(N, cplx(0.0, 0.0));
      for (const auto& t : f2.terms())
        for (int k = 0; k < N; ++k)
          if (t.exponents[k] == 2) lam[k] = t.coeff;
      l0 = lam[0];
      l1 = lam[1];
      cplx det = l1 - l0;
      if (std::abs(det) < 1e-12)
        throw CodedError("BadConeSpec", "pencil values 0,1 must differ");
      while (true) {
        VecC z(N);
        cplx q1{0.0, 0.0}, q2{0.0, 0.0};
        for (int k = 2; k < N; ++k) {
          z[k] = gaussian(rng);
          q1 += z[k] * z[k];
          q2 += lam[k] * z[k] * z[k];
        }
        // z₁² + z₂² = −q1,  λ₀z₁² + λ₁z₂² = −q2
        cplx a = (-q1 * l1 + q2) / det;   // z₁²
        cplx b = (-q2 + l0 * q1) / det;   // z₂²
        z[0] = std::sqrt(a);
        z[1] = std::sqrt(b);
        if (z.norm() < 1e-8) continue;
        // Smoothness guard: the 2×N Jacobian rows (2z_k), (2λ_k z_k) must be
        // independent; redraw in the measure-zero degenerate case.
        MatC J(2, N);
        for (int k = 0; k < N; ++k) {
          J(0, k) = 2.0 * z[k];
          J(1, k) = 2.0 * lam[k] * z[k];
        }
        Eigen::JacobiSVD<MatC> svd(J);
        if (svd.singularValues()(1) < 1e-6 * svd.singularValues()(0)) continue;
        z /= z.norm();
        return z;
      }
    }
  }
  throw CodedError("BadConeSpec", "unhandled cone family");
}

VecC place_at_radius(const AffineConeSpec& spec, const VecC& unit_point, double r) {
  double r0 = radius(spec, unit_point);
  return scaling_map(spec, unit_point, r / r0);
}

}  // namespace acgeo
