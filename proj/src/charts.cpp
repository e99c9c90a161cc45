#include "acgeo/charts.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace acgeo {

VarietyRef variety_of(const AffineConeSpec& spec, WhichVariety which) {
  VarietyRef v;
  v.ambient_dim = spec.ambient_dim;
  v.complex_dim = spec.complex_dim;
  if (which == WhichVariety::cone) {
    v.equations = spec.cone_polynomials;
    v.targets.assign(spec.cone_polynomials.size(), cplx(0.0, 0.0));
  } else {
    v.equations = spec.smoothing_polynomials;
    v.targets = spec.smoothing_targets;
  }
  return v;
}

namespace {

// s×s Jacobian minor ∂F_a/∂z_{dep_b} at z.
MatC dependent_minor(const VarietyRef& v, const std::vector<int>& dep,
                     const VecC& z) {
  const int s = static_cast<int>(dep.size());
  MatC m(s, s);
  for (int a = 0; a < s; ++a) {
    VecC grad = v.equations[a].gradient_at(z);
    for (int b = 0; b < s; ++b) m(a, b) = grad[dep[b]];
  }
  return m;
}

double equation_scale(const VarietyRef& v, int a, const VecC& z) {
  return std::pow(std::max(1.0, z.norm()), v.equations[a].degree());
}

/**
 * Newton on the dependent coordinates of z (in place). Returns the final
 * residual max |F_a − c_a| / scale_a; throws NewtonDiverged when it fails to
 * reach 1e-12 relative residual within max_iter.
 */
double solve_dependent(const VarietyRef& v, const std::vector<int>& dep,
                       VecC& z, int max_iter = 50) {
  const int s = static_cast<int>(dep.size());
  if (s == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd R(s);
    double rel = 0.0;
    for (int a = 0; a < s; ++a) {
      R[a] = v.equations[a].eval(z) - v.targets[a];
      rel = std::max(rel, std::abs(R[a]) / equation_scale(v, a, z));
    }
    best = std::min(best, rel);
    if (rel <= 1e-14) return rel;
    MatC m = dependent_minor(v, dep, z);
    Eigen::PartialPivLU<MatC> lu(m);
    VecC delta = lu.solve(-R);
    if (!delta.allFinite())
      throw CodedError("NewtonDiverged", "dependent-coordinate update not finite");
    for (int b = 0; b < s; ++b) z[dep[b]] += delta[b];
    // Quadratic convergence stalls at roundoff; accept a stalled 1e-12.
    if (delta.norm() <= 1e-16 * (1.0 + z.norm())) break;
  }
  double rel = 0.0;
  for (int a = 0; a < s; ++a)
    rel = std::max(rel, std::abs(v.equations[a].eval(z) - v.targets[a]) /
                            equation_scale(v, a, z));
  if (rel > 1e-12)
    throw CodedError("NewtonDiverged",
                     "dependent coordinates failed to converge (residual " +
                         std::to_string(rel) + ")");
  return rel;
}

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

}  // namespace

ChartFrame make_chart(const AffineConeSpec& spec, WhichVariety which,
                      const VecC& z0) {
  VarietyRef v = variety_of(spec, which);
  const int N = v.ambient_dim, s = static_cast<int>(v.equations.size());
  if (s == 0) return make_chart(spec, which, z0, [&] {
    std::vector<int> all(N);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }());
  // Choose the dependent block with the largest |det minor|.
  double best_abs = -1.0;
  std::vector<int> best_dep;
  for (const auto& dep : increasing_tuples(N, s)) {
    double a = std::abs(dependent_minor(v, dep, z0).determinant());
    if (a > best_abs) {
      best_abs = a;
      best_dep = dep;
    }
  }
  std::vector<int> free;
  for (int k = 0; k < N; ++k)
    if (std::find(best_dep.begin(), best_dep.end(), k) == best_dep.end())
      free.push_back(k);
  return make_chart(spec, which, z0, free);
}

ChartFrame make_chart(const AffineConeSpec& spec, WhichVariety which,
                      const VecC& z0, const std::vector<int>& free_indices) {
  ChartFrame c;
  c.variety = variety_of(spec, which);
  const int N = c.variety.ambient_dim;
  const int n = c.variety.complex_dim;
  const int s = static_cast<int>(c.variety.equations.size());
  if (static_cast<int>(free_indices.size()) != n)
    throw CodedError("BadChart", "need exactly n free indices");
  c.free_indices = free_indices;
  for (int k = 0; k < N; ++k)
    if (std::find(free_indices.begin(), free_indices.end(), k) ==
        free_indices.end())
      c.dep_indices.push_back(k);
  if (static_cast<int>(c.dep_indices.size()) != s)
    throw CodedError("BadChart", "free indices out of range or repeated");

  c.base_point = z0;
  if (s > 0) {
    MatC m = dependent_minor(c.variety, c.dep_indices, z0);
    Eigen::JacobiSVD<MatC> svd(m);
    double smin = svd.singularValues()(s - 1);
    double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > 1e6)
      throw CodedError("SingularJacobianMinor",
                       "dependent Jacobian minor is singular or ill conditioned");
    c.minor_condition = smax / smin;
    solve_dependent(c.variety, c.dep_indices, c.base_point);
  }

  // Tangent frame via the implicit function theorem at the base point.
  std::vector<VecC> tang;
  if (s == 0) {
    for (int k = 0; k < n; ++k) {
      VecC t = VecC::Zero(N);
      t[k] = 1.0;
      tang.push_back(t);
    }
  } else {
    MatC minor = dependent_minor(c.variety, c.dep_indices, c.base_point);
    Eigen::PartialPivLU<MatC> lu(minor);
    for (int k = 0; k < n; ++k) {
      VecC rhs(s);
      for (int a = 0; a < s; ++a) {
        VecC grad = c.variety.equations[a].gradient_at(c.base_point);
        rhs[a] = grad[c.free_indices[k]];
      }
      VecC depcol = lu.solve(-rhs);
      VecC t = VecC::Zero(N);
      t[c.free_indices[k]] = 1.0;
      for (int b = 0; b < s; ++b) t[c.dep_indices[b]] = depcol[b];
      tang.push_back(t);
    }
  }
  for (int k = 0; k < n; ++k) tang.push_back(cplx(0.0, 1.0) * tang[k]);
  c.tangent_basis = tang;

  // Tangency check: every frame vector annihilates every differential.
  for (const auto& t : c.tangent_basis) {
    for (int a = 0; a < s; ++a) {
      VecC grad = c.variety.equations[a].gradient_at(c.base_point);
      double scale = std::max(1.0, grad.norm() * t.norm());
      if (std::abs(grad.dot(t.conjugate())) > 1e-10 * scale)
        throw CodedError("BadChart", "tangent frame fails the tangency check");
    }
  }

  // Real-orthonormalize (QR on the 2N-real embedding).
  Eigen::MatrixXd emb(2 * N, 2 * n);
  for (int j = 0; j < 2 * n; ++j)
    for (int a = 0; a < N; ++a) {
      emb(2 * a, j) = c.tangent_basis[j][a].real();
      emb(2 * a + 1, j) = c.tangent_basis[j][a].imag();
    }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(emb);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * N, 2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    VecC q(N);
    for (int a = 0; a < N; ++a) q[a] = cplx(Q(2 * a, j), Q(2 * a + 1, j));
    c.orthonormal_basis.push_back(q);
  }
  return c;
}

VecC chart_point(const ChartFrame& chart, const VecC& zeta, const VecC* dep_init) {
  const int n = chart.n(), s = chart.s();
  if (zeta.size() != n)
    throw CodedError("BadChart", "chart coordinates must have length n");
  VecC z = chart.base_point;
  for (int k = 0; k < n; ++k) z[chart.free_indices[k]] = zeta[k];
  if (dep_init != nullptr) {
    for (int b = 0; b < s; ++b) z[chart.dep_indices[b]] = (*dep_init)[b];
  }
  solve_dependent(chart.variety, chart.dep_indices, z);
  return z;
}

std::vector<VecC> chart_tangent_columns(const ChartFrame& chart, const VecC& z) {
  const int N = chart.N(), n = chart.n(), s = chart.s();
  std::vector<VecC> cols;
  if (s == 0) {
    for (int k = 0; k < n; ++k) {
      VecC t = VecC::Zero(N);
      t[chart.free_indices[k]] = 1.0;
      cols.push_back(t);
    }
    return cols;
  }
  MatC minor = dependent_minor(chart.variety, chart.dep_indices, z);
  Eigen::PartialPivLU<MatC> lu(minor);
  std::vector<VecC> grads;
  for (int a = 0; a < s; ++a)
    grads.push_back(chart.variety.equations[a].gradient_at(z));
  for (int k = 0; k < n; ++k) {
    VecC rhs(s);
    for (int a = 0; a < s; ++a) rhs[a] = grads[a][chart.free_indices[k]];
    VecC depcol = lu.solve(-rhs);
    VecC t = VecC::Zero(N);
    t[chart.free_indices[k]] = 1.0;
    for (int b = 0; b < s; ++b) t[chart.dep_indices[b]] = depcol[b];
    cols.push_back(t);
  }
  return cols;
}

// ── Hermitian forms ─────────────────────────────────────────────────────────

HermitianForm complex_hessian(const std::function<double(const VecC&)>& phi,
                              const ChartFrame& chart, const FDPolicy& fd) {
  const int n = chart.n();
  VecC zeta0(n);
  for (int k = 0; k < n; ++k) zeta0[k] = chart.base_point[chart.free_indices[k]];

  // Evaluate φ(Z(ζ)) with ζ given by real offsets in two coordinates.
  auto eval2 = [&](int i, double dx, double dy, int j, double du, double dv) {
    VecC zeta = zeta0;
    zeta[i] += cplx(dx, dy);
    zeta[j] += cplx(du, dv);
    return phi(chart_point(chart, zeta));
  };

  MatC H = MatC::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double h = fd.step_scale(std::abs(zeta0[i]), /*second=*/true);
    auto along_x = [&](double t) { return eval2(i, t, 0.0, i, 0.0, 0.0); };
    auto along_y = [&](double t) { return eval2(i, 0.0, t, i, 0.0, 0.0); };
    double dxx = d2_central(along_x, 0.0, h);
    double dyy = d2_central(along_y, 0.0, h);
    H(i, i) = 0.25 * (dxx + dyy);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double hi = fd.step_scale(std::abs(zeta0[i]), true);
      double hj = fd.step_scale(std::abs(zeta0[j]), true);
      auto mixed = [&](int ci, int cj) {
        // ci, cj ∈ {0,1}: 0 = real axis, 1 = imaginary axis.
        return d2_mixed(
            [&](double a, double b) {
              return eval2(i, ci == 0 ? a : 0.0, ci == 1 ? a : 0.0, j,
                           cj == 0 ? b : 0.0, cj == 1 ? b : 0.0);
            },
            0.0, 0.0, hi, hj);
      };
      double xx = mixed(0, 0), yy = mixed(1, 1), xy = mixed(0, 1), yx = mixed(1, 0);
      H(i, j) = 0.25 * cplx(xx + yy, xy - yx);
      H(j, i) = std::conj(H(i, j));
    }
  }
  HermitianForm out;
  out.matrix = H;
  out.hermiticity_defect = (H - H.adjoint()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (H + H.adjoint().eval());
  return out;
}

cplx residue_volume_form(const ChartFrame& chart) {
  const int s = chart.s();
  if (s == 0) return cplx(1.0, 0.0);
  MatC minor = dependent_minor(chart.variety, chart.dep_indices, chart.base_point);
  cplx det = minor.determinant();
  if (std::abs(det) == 0.0)
    throw CodedError("SingularJacobianMinor", "residue minor is singular");
  std::vector<int> perm = chart.free_indices;
  perm.insert(perm.end(), chart.dep_indices.begin(), chart.dep_indices.end());
  return static_cast<double>(permutation_sign(perm)) / det;
}

double monge_ampere_residual(const std::function<double(const VecC&)>& phi,
                             const ChartFrame& chart, const FDPolicy& fd) {
  HermitianForm H = complex_hessian(phi, chart, fd);
  Eigen::SelfAdjointEigenSolver<MatC> es(H.matrix);
  double logdet = 0.0;
  for (int i = 0; i < H.matrix.rows(); ++i) {
    double ev = es.eigenvalues()(i);
    if (!(ev > 0.0))
      throw CodedError("NotPositiveDefinite",
                       "complex Hessian is not positive definite");
    logdet += std::log(ev);
  }
  cplx h = residue_volume_form(chart);
  return logdet - 2.0 * std::log(std::abs(h));
}

Eigen::MatrixXd metric_as_real_form(const HermitianForm& H) {
  const int n = static_cast<int>(H.matrix.rows());
  Eigen::MatrixXd E(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = H.matrix(i, j).real(), im = H.matrix(i, j).imag();
      E(2 * i, 2 * j) = re;
      E(2 * i, 2 * j + 1) = im;
      E(2 * i + 1, 2 * j) = -im;
      E(2 * i + 1, 2 * j + 1) = re;
    }
  return E;
}

double hermitian_pair(const MatC& H, const VecC& u, const VecC& v) {
  return (u.transpose() * H * v.conjugate()).value().real();
}

MatC restrict_hessian_to_chart(const MatC& H_ambient, const ChartFrame& chart) {
  const int N = chart.N(), n = chart.n();
  MatC J(N, n);
  for (int k = 0; k < n; ++k) J.col(k) = chart.tangent_basis[k];
  return J.transpose() * H_ambient * J.conjugate();
}

MatC radial_ambient_hessian(const VecC& z, double P1, double P2) {
  const int N = static_cast<int>(z.size());
  MatC H = P1 * MatC::Identity(N, N);
  H += P2 * (z.conjugate() * z.transpose());
  return H;
}

// ── sample dumps ────────────────────────────────────────────────────────────

void write_ma_csv(const std::string& path, const std::vector<MASample>& rows) {
  std::ofstream out(path);
  if (!out) throw CodedError("BadOutput", "cannot open '" + path + "'");
  if (rows.empty()) return;
  const int N = static_cast<int>(rows.front().point.size());
  for (int a = 0; a < N; ++a) out << "re_z" << a << ",im_z" << a << ",";
  out << "residual,det_hessian,habs2\n";
  out.precision(17);
  for (const auto& r : rows) {
    for (int a = 0; a < N; ++a)
      out << r.point[a].real() << "," << r.point[a].imag() << ",";
    out << r.residual << "," << r.det_hessian << "," << r.habs2 << "\n";
  }
}

}  // namespace acgeo
