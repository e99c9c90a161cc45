#include "acgeo/profiles.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace acgeo {
namespace {

double binomial(int m, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (m - i) / (i + 1);
  return b;
}

// Exact antiderivative of sinh^{n-1}; cancellation-prone below w ≈ 0.6.
double stenzel_S_closed(int n, double w) {
  double sum = 0.0;
  double binom = 1.0;  // C(n-1, k)
  for (int k = 0; k <= n - 1; ++k) {
    const int e = n - 1 - 2 * k;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    if (e == 0)
      sum += sgn * binom * w;
    else
      sum += sgn * binom * std::expm1(e * w) / e;
    binom = binom * (n - 1 - k) / (k + 1);
  }
  return std::ldexp(sum, -(n - 1));
}

double sinh_power(int n, double t) { return std::pow(std::sinh(t), n - 1); }

// g₀-pair against a radial-type Hessian P1·I + P2·z̄zᵀ without forming it.
double radial_pair(const VecC& z, double p1, double p2, const VecC& u,
                   const VecC& v) {
  const cplx uzbar = u.transpose() * z.conjugate();
  const cplx zvbar = z.transpose() * v.conjugate();
  return std::real(p1 * (u.transpose() * v.conjugate())(0) + p2 * uzbar * zvbar);
}

// Projection of the null cone {Σz² = 0} onto {Σz² = 1}: Φ(z) = z + z̄/(2τ).
VecC odp_phi(const VecC& z) {
  const double tau = z.squaredNorm();
  return z + z.conjugate() / (2.0 * tau);
}

VecC odp_dphi(const VecC& z, const VecC& v) {
  const double tau = z.squaredNorm();
  const double dtau = 2.0 * std::real(z.dot(v));
  return v + v.conjugate() / (2.0 * tau) -
         z.conjugate() * (dtau / (2.0 * tau * tau));
}

void random_orthonormal_pair(int dim, std::mt19937_64& rng, Eigen::VectorXd& a,
                             Eigen::VectorXd& b) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  a.resize(dim);
  b.resize(dim);
  for (int i = 0; i < dim; ++i) a[i] = gauss(rng);
  a.normalize();
  for (int i = 0; i < dim; ++i) b[i] = gauss(rng);
  b -= a * a.dot(b);
  b.normalize();
}

}  // namespace

// ── StenzelProfile evaluators ───────────────────────────────────────────────

double StenzelProfile::S(double w) const {
  if (w < 0.0) throw CodedError("BadDomain", "S(w) requires w >= 0");
  if (w == 0.0) return 0.0;
  if (w < 0.6) {
    const int nn = n;
    return gauss_legendre_10([nn](double t) { return sinh_power(nn, t); }, 0.0,
                             w);
  }
  return stenzel_S_closed(n, w);
}

double StenzelProfile::S_prime(double w) const { return sinh_power(n, w); }

double StenzelProfile::h_prime(double w) const {
  return std::pow(S(w), 1.0 / n);
}

double StenzelProfile::h_second(double w) const {
  if (w < 1e-12) return std::pow(static_cast<double>(n), -1.0 / n);
  const double hp = h_prime(w);
  return S_prime(w) / (n * std::pow(hp, n - 1));
}

double StenzelProfile::h(double w) const {
  if (w < 0.0) throw CodedError("BadDomain", "h(w) requires w >= 0");
  const double dw = w_max / (grid_size - 1);
  if (w > w_max + 1e-9 * (1.0 + w_max))
    throw CodedError("GridRangeExceeded",
                     "h(w) requested beyond the solved range");
  const int cell = std::min<int>(static_cast<int>(w / dw), grid_size - 1);
  const double w_node = grid_w[cell];
  double value = h_values[cell];
  if (w > w_node) {
    value += gauss_legendre_10([this](double t) { return h_prime(t); }, w_node,
                               std::min(w, w_max));
  }
  return value;
}

double StenzelProfile::f(double tau) const {
  if (tau < 1.0) throw CodedError("BadDomain", "f(tau) requires tau >= 1");
  return h(std::acosh(tau));
}

double StenzelProfile::f_prime(double tau) const {
  if (tau <= 1.0) throw CodedError("BadDomain", "f'(tau) requires tau > 1");
  const double w = std::acosh(tau);
  const double sh = std::sqrt((tau - 1.0) * (tau + 1.0));
  return h_prime(w) / sh;
}

double StenzelProfile::f_second(double tau) const {
  if (tau <= 1.0) throw CodedError("BadDomain", "f''(tau) requires tau > 1");
  const double w = std::acosh(tau);
  const double sh = std::sqrt((tau - 1.0) * (tau + 1.0));
  return h_second(w) / (sh * sh) - h_prime(w) * tau / (sh * sh * sh);
}

// ── solver ──────────────────────────────────────────────────────────────────

StenzelProfile solve_stenzel_profile(int n, double w_max, int grid_size) {
  if (n < 2) throw CodedError("BadDimension", "Stenzel profile needs n >= 2");
  if (w_max < 5.0 || grid_size < 200)
    throw CodedError("GridTooCoarse",
                     "need w_max >= 5 and grid_size >= 200");

  StenzelProfile p;
  p.n = n;
  p.w_max = w_max;
  p.grid_size = grid_size;
  p.C_n_closed = n * std::pow(n - 1.0, -(n + 1.0) / n);

  const double dw = w_max / (grid_size - 1);
  p.grid_w.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) p.grid_w[i] = i * dw;

  std::vector<double> S_vals(grid_size);
  p.h_prime_values.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    S_vals[i] = p.S(p.grid_w[i]);
    p.h_prime_values[i] = std::pow(S_vals[i], 1.0 / n);
  }

  p.h_values.assign(grid_size, 0.0);
  for (int i = 0; i + 1 < grid_size; ++i) {
    p.h_values[i + 1] =
        p.h_values[i] + gauss_legendre_10([&p](double t) { return p.h_prime(t); },
                                          p.grid_w[i], p.grid_w[i + 1]);
  }

  // Interior ODE residual, 6th-order first-derivative stencil on S = (h')ⁿ
  // against sinh^{n-1}, relative to max(1, sinh^{n-1}).
  double worst = 0.0;
  for (int i = 3; i + 3 < grid_size; ++i) {
    const double d6 = (-S_vals[i - 3] + 9.0 * S_vals[i - 2] -
                       45.0 * S_vals[i - 1] + 45.0 * S_vals[i + 1] -
                       9.0 * S_vals[i + 2] + S_vals[i + 3]) /
                      (60.0 * dw);
    const double rhs = sinh_power(n, p.grid_w[i]);
    worst = std::max(worst, std::abs(d6 - rhs) / std::max(1.0, rhs));
  }
  p.ode_residual = worst;
  if (worst > 1e-9)
    throw CodedError("GridTooCoarse", "interior ODE residual " +
                                          std::to_string(worst) +
                                          " exceeds 1e-9");

  // Additive constant: c∞ = ∫₀^∞ [h'(w) − A'(w)] dw with
  // A'(w) = S^{1/n−1}·S'/(n−1). Written as S^{1/n−1}·(S − S'/(n−1)); the
  // plain difference S − S'/(n−1) loses all digits once e^{(n−1)w} dwarfs
  // the e^{(n−3)w}-sized result, so past w = 1 it is expanded binomially:
  // the k = 0 bracket collapses exactly to −1/(n−1), removing the growth.
  const auto stable_R = [n](double w) {
    double total = 0.0;
    for (int k = 0; k <= n - 1; ++k) {
      const double a = binomial(n - 1, k) * ((k % 2 == 0) ? 1.0 : -1.0);
      const int c = n - 1 - 2 * k;
      double bracket;
      if (k == 0)
        bracket = -1.0 / (n - 1.0);
      else if (c == 0)
        bracket = w - 1.0 / (n - 1.0);
      else
        bracket = std::expm1(c * w) / c - std::exp(c * w) / (n - 1.0);
      total += a * bracket;
    }
    return std::ldexp(total, -(n - 1));
  };
  const auto gap = [&p, &stable_R, n](double w) {
    const double S = p.S(w);
    const double R = w < 1.0 ? S - p.S_prime(w) / (n - 1.0) : stable_R(w);
    return std::pow(S, 1.0 / n - 1.0) * R;
  };
  const double a0 = 1e-7;
  const double g0 = -std::pow(static_cast<double>(n), 1.0 - 1.0 / n) / (n - 1.0);
  const double w_hi = std::min(60.0, 680.0 / (n - 1));
  p.c_infinity = g0 * a0 + adaptive_simpson(gap, a0, w_hi, 1e-14, 1e-13);

  // Amplitude of the leading power: fit over a far window.
  {
    const double hi = std::min(1e10, std::cosh(w_max - 0.5));
    const double lo = std::min(1e8, hi / 100.0);
    const auto taus = geometric_grid(lo, hi, 12);
    double acc = 0.0;
    for (double t : taus)
      acc += std::log(p.f(t) - p.c_infinity) - p.beta() * std::log(t);
    p.C_n_fitted = std::exp(acc / taus.size());
  }

  // Correction exponent: k(τ) = (f − c∞)/(C·τ^β) − 1 over a mid window.
  {
    const double hi = std::min(1e5, std::cosh(w_max - 1.0));
    const auto taus = geometric_grid(50.0, hi, 24);
    std::vector<double> mags(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double k = (p.f(taus[i]) - p.c_infinity) /
                           (p.C_n_closed * std::pow(taus[i], p.beta())) -
                       1.0;
      mags[i] = std::abs(k);
    }
    p.correction_fit = fit_rate(taus, mags, /*allow_log=*/true);
  }
  return p;
}

// ── Calabi profile ──────────────────────────────────────────────────────────

double CalabiProfile::u_prime(double t) const {
  if (t <= 0.0) throw CodedError("NonpositiveT", "u'(t) requires t > 0");
  return 1.0 + v_prime(t);
}

double CalabiProfile::v_prime(double t) const {
  if (t <= 0.0) throw CodedError("NonpositiveT", "v'(t) requires t > 0");
  return std::expm1(std::log1p(c * std::pow(t, -n)) / n);
}

double CalabiProfile::u_second(double t) const {
  if (t <= 0.0) throw CodedError("NonpositiveT", "u''(t) requires t > 0");
  return -c * std::pow(std::pow(t, n) + c, 1.0 / n - 1.0) / (t * t);
}

double CalabiProfile::radial_eigen_minus_one(double t) const {
  if (t <= 0.0) throw CodedError("NonpositiveT", "requires t > 0");
  return std::expm1((1.0 / n - 1.0) * std::log1p(c * std::pow(t, -n)));
}

double CalabiProfile::u(double t) const {
  if (t <= 0.0) throw CodedError("NonpositiveT", "u(t) requires t > 0");
  const double t_big = std::pow(25.0 * std::max(c, 1e-300), 1.0 / n);
  const auto series = [this](double s) {
    // u − t = Σ_{k≥1} C(1/n, k)·cᵏ·s^{1−nk}/(1−nk), convergent for sⁿ > c.
    double v = 0.0, bk = 1.0, ck = 1.0;
    for (int k = 1; k <= 20; ++k) {
      bk *= (1.0 / n - (k - 1)) / k;
      ck *= c;
      v += bk * ck * std::pow(s, 1.0 - n * k) / (1.0 - n * k);
    }
    return v;
  };
  if (t >= t_big) return t + series(t);
  const double head = series(t_big);
  const double mid = adaptive_simpson([this](double s) { return v_prime(s); },
                                      t, t_big, 1e-14, 1e-13);
  return t + head - mid;
}

double CalabiProfile::det_identity_residual(double t) const {
  const double up = u_prime(t);
  const double radial = 1.0 + radial_eigen_minus_one(t);
  return std::pow(up, n - 1) * radial - 1.0;
}

double calabi_profile_derivative(int n, double c, double t, int order) {
  if (n < 2) throw CodedError("BadDimension", "Calabi profile needs n >= 2");
  CalabiProfile p{n, c};
  if (order == 1) return p.u_prime(t);
  if (order == 2) return p.u_second(t);
  throw CodedError("BadOrder", "order must be 1 or 2");
}

// ── metric decay experiments ────────────────────────────────────────────────

MetricRateResult metric_rate_experiment(MetricFamily family, int n,
                                        const std::vector<double>& radii,
                                        int directions, std::uint64_t seed) {
  if (family == MetricFamily::eguchi_hanson) n = 2;
  if (n < 2) throw CodedError("BadDimension", "need n >= 2");
  if (directions < 1) throw CodedError("BadDirectionCount", "need >= 1");

  MetricRateResult out;
  out.family = family;
  out.n = n;
  std::mt19937_64 rng(seed);

  std::vector<double> rs, mags;
  if (family != MetricFamily::stenzel) {
    CalabiProfile prof{n, 1.0};
    for (double r : radii) {
      const double t = r * r;
      const double norm = std::max(std::abs(prof.v_prime(t)),
                                   std::abs(prof.radial_eigen_minus_one(t)));
      out.samples.push_back({r, 0, norm});
      rs.push_back(r);
      mags.push_back(norm);
    }
  } else {
    const AffineConeSpec spec = make_odp_spec(n);
    const double mu = n / (n - 1.0);
    const double r_max = *std::max_element(radii.begin(), radii.end());
    const double tau_max = std::pow(r_max, 2.0 * mu) * 1.5;
    const double w_need = std::max(16.0, std::acosh(tau_max) + 1.0);
    const StenzelProfile prof = solve_stenzel_profile(
        n, w_need, static_cast<int>(w_need * 100.0) + 1);
    const double C = prof.C_n_closed, beta = prof.beta();

    for (int d = 0; d < directions; ++d) {
      const VecC u = random_cone_point(spec, rng);
      for (double r : radii) {
        const VecC z = place_at_radius(spec, u, r);
        const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
        const double tau = z.squaredNorm();
        const VecC w_pt = odp_phi(z);
        const double tau_w = w_pt.squaredNorm();
        const double p1 = C * beta * std::pow(tau, beta - 1.0);
        const double p2 = C * beta * (beta - 1.0) * std::pow(tau, beta - 2.0);
        const double fp = prof.f_prime(tau_w), fs = prof.f_second(tau_w);

        const int dim = 2 * chart.n();
        Eigen::MatrixXd A(dim, dim), B(dim, dim);
        std::vector<VecC> push(dim);
        for (int a = 0; a < dim; ++a)
          push[a] = odp_dphi(z, chart.tangent_basis[a]);
        for (int a = 0; a < dim; ++a)
          for (int b = 0; b < dim; ++b) {
            const double gm = radial_pair(w_pt, fp, fs, push[a], push[b]);
            const double gc = radial_pair(z, p1, p2, chart.tangent_basis[a],
                                          chart.tangent_basis[b]);
            A(a, b) = gm - gc;
            B(a, b) = gc;
          }
        A = 0.5 * (A + A.transpose()).eval();
        B = 0.5 * (B + B.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
        const double norm = ges.eigenvalues().cwiseAbs().maxCoeff();
        out.samples.push_back({r, d, norm});
        rs.push_back(r);
        mags.push_back(norm);
      }
    }
  }
  out.fit = fit_rate(rs, mags, /*allow_log=*/false);
  return out;
}

// ── Stenzel leading term ────────────────────────────────────────────────────

nlohmann::json LeadingTermReport::to_json() const {
  nlohmann::json m = nlohmann::json::array();
  for (int i = 0; i < matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < matrix.cols(); ++j) row.push_back(matrix(i, j));
    m.push_back(row);
  }
  return nlohmann::json{{"tau", tau},
                        {"matrix", m},
                        {"trace", trace},
                        {"bianchi_dr", bianchi_dr},
                        {"bianchi_dcr", bianchi_dcr},
                        {"frame_orthonormality_defect",
                         frame_orthonormality_defect},
                        {"matrix_symmetry_defect", matrix_symmetry_defect}};
}

LeadingTermReport stenzel_leading_term(int n, double tau) {
  if (n < 3 || tau < 1e3)
    throw CodedError("FrameDegenerate",
                     "leading-term frame needs n >= 3 and tau >= 1e3");

  const AffineConeSpec spec = make_odp_spec(n);
  const int N = n + 1;
  const double w_need = std::acosh(2.0 * tau) + 2.0;
  const StenzelProfile prof =
      solve_stenzel_profile(n, std::max(16.0, w_need),
                            static_cast<int>(std::max(16.0, w_need) * 100.0) + 1);
  const double C = prof.C_n_closed, beta = prof.beta();

  VecC p0 = VecC::Zero(N);
  p0(0) = std::sqrt(tau / 2.0);
  p0(1) = cplx(0.0, 1.0) * std::sqrt(tau / 2.0);

  const auto cone_p1 = [&](double t) { return C * beta * std::pow(t, beta - 1.0); };
  const auto cone_p2 = [&](double t) {
    return C * beta * (beta - 1.0) * std::pow(t, beta - 2.0);
  };

  // g₀-orthonormal frame (∂_r, J∂_r, X_j, Y_j).
  std::vector<VecC> frame;
  frame.push_back(p0);
  frame.push_back(cplx(0.0, 1.0) * p0);
  for (int j = 2; j <= n; ++j) {
    VecC e = VecC::Zero(N);
    e(j) = 1.0;
    frame.push_back(e);
    frame.push_back(cplx(0.0, 1.0) * e);
  }
  const double p1 = cone_p1(tau), p2 = cone_p2(tau);
  for (auto& v : frame) v /= std::sqrt(radial_pair(p0, p1, p2, v, v));

  const int dim = 2 * n;
  LeadingTermReport rep;
  rep.tau = tau;

  Eigen::MatrixXd gram(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      gram(a, b) = radial_pair(p0, p1, p2, frame[a], frame[b]);
  rep.frame_orthonormality_defect =
      (gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();

  const VecC w0 = odp_phi(p0);
  const double tau_w = w0.squaredNorm();
  const double fp = prof.f_prime(tau_w), fs = prof.f_second(tau_w);

  Eigen::MatrixXd M(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const double gm = radial_pair(w0, fp, fs, odp_dphi(p0, frame[a]),
                                    odp_dphi(p0, frame[b]));
      M(a, b) = tau * (gm - gram(a, b));
    }
  rep.matrix_symmetry_defect = (M - M.transpose()).cwiseAbs().maxCoeff();
  M = 0.5 * (M + M.transpose()).eval();
  rep.matrix = M;
  rep.trace = M.trace();

  const double normh =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()
          .cwiseAbs()
          .maxCoeff() /
      tau;
  const double r_cone = std::sqrt(C) * std::pow(tau, beta / 2.0);

  // Contracted Bianchi residual via a holomorphic chart (dependent coord 0).
  std::vector<int> free_idx;
  for (int k = 1; k < N; ++k) free_idx.push_back(k);
  const ChartFrame chart = make_chart(spec, WhichVariety::cone, p0, free_idx);

  VecC zeta0(n);
  for (int k = 0; k < n; ++k) zeta0(k) = chart.base_point(free_idx[k]);

  const auto zeta_at = [&](const Eigen::VectorXd& xi) {
    VecC zeta = zeta0;
    for (int k = 0; k < n; ++k) zeta(k) += cplx(xi(2 * k), xi(2 * k + 1));
    return zeta;
  };

  const auto frames_at = [&](const VecC& Z) {
    const std::vector<VecC> T = chart_tangent_columns(chart, Z);
    std::vector<VecC> F(dim);
    for (int k = 0; k < n; ++k) {
      F[2 * k] = T[k];
      F[2 * k + 1] = cplx(0.0, 1.0) * T[k];
    }
    return F;
  };

  const auto g_matrix = [&](const Eigen::VectorXd& xi) {
    const VecC Z = chart_point(chart, zeta_at(xi));
    const double t = Z.squaredNorm();
    const auto F = frames_at(Z);
    Eigen::MatrixXd G(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        G(a, b) = radial_pair(Z, cone_p1(t), cone_p2(t), F[a], F[b]);
    return G;
  };
  const auto h_matrix = [&](const Eigen::VectorXd& xi) {
    const VecC Z = chart_point(chart, zeta_at(xi));
    const double t = Z.squaredNorm();
    const VecC W = odp_phi(Z);
    const double tw = W.squaredNorm();
    const double q1 = prof.f_prime(tw), q2 = prof.f_second(tw);
    const auto F = frames_at(Z);
    Eigen::MatrixXd H(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        H(a, b) = radial_pair(W, q1, q2, odp_dphi(Z, F[a]), odp_dphi(Z, F[b])) -
                  radial_pair(Z, cone_p1(t), cone_p2(t), F[a], F[b]);
    return H;
  };

  const FDPolicy fd;
  const Eigen::VectorXd xi0 = Eigen::VectorXd::Zero(dim);
  const auto matrix_derivative = [&](const auto& fun, int alpha) {
    const double scale = std::max(1.0, std::abs(zeta0(alpha / 2)));
    const double hstep = fd.step_scale(scale, false);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(alpha) = 1.0;
    const auto central = [&](double hh) {
      return ((fun((xi0 + hh * e).eval()) - fun((xi0 - hh * e).eval())) /
              (2.0 * hh))
          .eval();
    };
    return ((4.0 * central(hstep / 2.0) - central(hstep)) / 3.0).eval();
  };

  std::vector<Eigen::MatrixXd> dG(dim), dH(dim);
  for (int a = 0; a < dim; ++a) {
    dG[a] = matrix_derivative(g_matrix, a);
    dH[a] = matrix_derivative(h_matrix, a);
  }
  const Eigen::MatrixXd G0 = g_matrix(xi0);
  const Eigen::MatrixXd H0 = h_matrix(xi0);
  const Eigen::MatrixXd Ginv = G0.inverse();

  // Γ^δ_{αβ}
  std::vector<Eigen::MatrixXd> gamma(dim, Eigen::MatrixXd::Zero(dim, dim));
  for (int d = 0; d < dim; ++d)
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double s = 0.0;
        for (int q = 0; q < dim; ++q)
          s += Ginv(d, q) * (dG[a](b, q) + dG[b](a, q) - dG[q](a, b));
        gamma[d](a, b) = 0.5 * s;
      }

  Eigen::VectorXd divh = Eigen::VectorXd::Zero(dim);
  for (int b = 0; b < dim; ++b) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a)
      for (int g = 0; g < dim; ++g) {
        double term = dH[a](g, b);
        for (int d = 0; d < dim; ++d)
          term -= gamma[d](a, g) * H0(d, b) + gamma[d](a, b) * H0(g, d);
        s += Ginv(a, g) * term;
      }
    divh(b) = s;
  }

  // Express the unit radial directions in the chart coordinate frame.
  const auto embed_real = [&](const VecC& v) {
    Eigen::VectorXd r(2 * N);
    for (int k = 0; k < N; ++k) {
      r(2 * k) = v(k).real();
      r(2 * k + 1) = v(k).imag();
    }
    return r;
  };
  const auto F0 = frames_at(p0);
  Eigen::MatrixXd Fmat(2 * N, dim);
  for (int a = 0; a < dim; ++a) Fmat.col(a) = embed_real(F0[a]);
  const auto chart_components = [&](const VecC& v) {
    return Fmat.colPivHouseholderQr().solve(embed_real(v)).eval();
  };

  const double scale_div = normh / r_cone;
  rep.bianchi_dr = std::abs(divh.dot(chart_components(frame[0]))) / scale_div;
  rep.bianchi_dcr = std::abs(divh.dot(chart_components(frame[1]))) / scale_div;
  return rep;
}

// ── Monge–Ampère residual surveys ───────────────────────────────────────────

namespace {

MASample sample_residual(const std::function<double(const VecC&)>& phi,
                         const ChartFrame& chart) {
  const HermitianForm H = complex_hessian(phi, chart);
  Eigen::SelfAdjointEigenSolver<MatC> es(H.matrix);
  double logdet = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev <= 0.0)
      throw CodedError("NotPositiveDefinite",
                       "complex Hessian is not positive definite");
    logdet += std::log(ev);
  }
  const cplx res_form = residue_volume_form(chart);
  const double habs2 = std::norm(res_form);
  MASample s;
  s.point = chart.base_point;
  s.residual = logdet - std::log(habs2);
  s.det_hessian = std::exp(logdet);
  s.habs2 = habs2;
  return s;
}

MAConstancyResult summarize(std::vector<MASample> samples) {
  MAConstancyResult out;
  std::vector<double> res(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) res[i] = samples[i].residual;
  const auto [mean, sd] = mean_stddev(res);
  out.mean = mean;
  out.stddev = sd;
  out.sample_count = static_cast<int>(samples.size());
  out.samples = std::move(samples);
  return out;
}

}  // namespace

MAConstancyResult stenzel_ma_survey(const StenzelProfile& profile, int count,
                                    std::uint64_t seed, double potential_scale) {
  const int n = profile.n;
  const AffineConeSpec spec = make_odp_spec(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logtau(std::log(1.2), std::log(6.0));

  std::vector<MASample> samples;
  for (int i = 0; i < count; ++i) {
    const double tau = std::exp(logtau(rng));
    const double theta = 0.5 * std::acosh(tau);
    Eigen::VectorXd a, b;
    random_orthonormal_pair(n + 1, rng, a, b);
    VecC w(n + 1);
    for (int k = 0; k <= n; ++k)
      w(k) = cplx(std::cosh(theta) * a(k), std::sinh(theta) * b(k));
    const ChartFrame chart = make_chart(spec, WhichVariety::smoothing, w);
    const auto phi = [&profile, potential_scale](const VecC& Z) {
      return potential_scale * profile.f(Z.squaredNorm());
    };
    samples.push_back(sample_residual(phi, chart));
  }
  return summarize(std::move(samples));
}

MAConstancyResult calabi_ma_survey(int n, double c, int count,
                                   std::uint64_t seed, double potential_scale) {
  if (n < 2) throw CodedError("BadDimension", "Calabi survey needs n >= 2");
  const AffineConeSpec spec = make_affine_space_spec(n);
  const CalabiProfile prof{n, c};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rad(0.9, 2.5);

  std::vector<MASample> samples;
  for (int i = 0; i < count; ++i) {
    VecC z(n);
    for (int k = 0; k < n; ++k) z(k) = cplx(gauss(rng), gauss(rng));
    z *= rad(rng) / z.norm();
    const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
    const auto phi = [&prof, potential_scale](const VecC& Z) {
      return potential_scale * prof.u(Z.squaredNorm());
    };
    samples.push_back(sample_residual(phi, chart));
  }
  return summarize(std::move(samples));
}

MAConstancyResult cone_ma_survey(int n, int count, std::uint64_t seed) {
  if (n < 2) throw CodedError("BadDimension", "cone survey needs n >= 2");
  const AffineConeSpec spec = make_odp_spec(n);
  const double beta = 1.0 - 1.0 / n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logr(std::log(1.0), std::log(3.0));

  std::vector<MASample> samples;
  for (int i = 0; i < count; ++i) {
    const VecC u = random_cone_point(spec, rng);
    const VecC z = place_at_radius(spec, u, std::exp(logr(rng)));
    const ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
    const auto phi = [beta](const VecC& Z) {
      return std::pow(Z.squaredNorm(), beta);
    };
    samples.push_back(sample_residual(phi, chart));
  }
  return summarize(std::move(samples));
}

void write_profile_csv(const std::string& path, const StenzelProfile& profile) {
  std::ofstream out(path);
  if (!out) throw CodedError("IoError", "cannot open " + path);
  out.precision(17);
  out << "w,h,h_prime,tau,f\n";
  for (int i = 0; i < profile.grid_size; ++i) {
    const double w = profile.grid_w[i];
    out << w << ',' << profile.h_values[i] << ',' << profile.h_prime_values[i]
        << ',' << std::cosh(w) << ',' << profile.h_values[i] << '\n';
  }
}

}  // namespace acgeo
