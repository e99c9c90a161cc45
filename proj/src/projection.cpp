#include "acgeo/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

namespace acgeo {

namespace {

/** Σ |coeff|·Π|z_k|^{e_k}: positive bound for the natural size of p(z). */
double eval_abs(const Polynomial& p, const VecC& z) {
  double total = 0.0;
  for (const auto& term : p.terms()) {
    double mag = std::abs(term.coeff);
    for (std::size_t k = 0; k < term.exponents.size(); ++k) {
      if (term.exponents[k] != 0)
        mag *= std::pow(std::abs(z[static_cast<int>(k)]), term.exponents[k]);
    }
    total += mag;
  }
  return total;
}

/** ∇F_a at w for the split representation F_a = f_a + p_a. */
VecC smoothing_gradient(const AffineConeSpec& spec,
                        const std::vector<Polynomial>& lower_parts, int a,
                        const VecC& w) {
  VecC g = spec.cone_polynomials[a].gradient_at(w);
  if (!lower_parts[a].empty()) g += lower_parts[a].gradient_at(w);
  return g;
}

Eigen::VectorXd embed_real(const VecC& v) {
  Eigen::VectorXd r(2 * v.size());
  r << v.real(), v.imag();
  return r;
}

}  // namespace

nlohmann::json rate_fit_json(const RateFit& fit) {
  return nlohmann::json{{"exponent", fit.exponent},
                        {"log_power", fit.log_power},
                        {"amplitude", fit.amplitude},
                        {"residual_rms", fit.residual_rms},
                        {"sample_count", fit.sample_count},
                        {"radius_range", {fit.radius_range[0], fit.radius_range[1]}}};
}

// ── ProjectionMap ───────────────────────────────────────────────────────────

ProjectionMap::ProjectionMap(AffineConeSpec spec, ProjectionSettings settings)
    : spec_(std::move(spec)), settings_(settings) {
  const int s = spec_.num_equations();
  const int N = spec_.ambient_dim;
  if (s == 0)
    throw CodedError("BadConeSpec",
                     "projection map requires at least one defining equation");
  if (static_cast<int>(spec_.smoothing_polynomials.size()) != s ||
      static_cast<int>(spec_.smoothing_targets.size()) != s)
    throw CodedError("BadConeSpec",
                     "cone and smoothing equation counts differ for '" +
                         spec_.name + "'");
  lower_parts_.reserve(s);
  cone_grads_.reserve(s);
  lower_grads_.reserve(s);
  cone_hessians_.reserve(s);
  degrees_.reserve(s);
  for (int a = 0; a < s; ++a) {
    const Polynomial& f = spec_.cone_polynomials[a];
    if (f.degree() < 1)
      throw CodedError("BadConeSpec", "cone equation of degree < 1");
    degrees_.push_back(f.degree());
    Polynomial p = spec_.smoothing_polynomials[a];
    for (const auto& term : f.terms()) p.add_term(term.exponents, -term.coeff);
    std::vector<Polynomial> gf, gp;
    gf.reserve(N);
    gp.reserve(N);
    std::vector<std::vector<Polynomial>> hf;
    hf.reserve(N);
    for (int k = 0; k < N; ++k) {
      gf.push_back(f.derivative(k));
      gp.push_back(p.derivative(k));
    }
    for (int k = 0; k < N; ++k) {
      std::vector<Polynomial> row;
      row.reserve(N);
      for (int l = 0; l < N; ++l) row.push_back(gf[k].derivative(l));
      hf.push_back(std::move(row));
    }
    lower_parts_.push_back(std::move(p));
    cone_grads_.push_back(std::move(gf));
    lower_grads_.push_back(std::move(gp));
    cone_hessians_.push_back(std::move(hf));
  }
}

std::vector<VecC> ProjectionMap::directions(const VecC& z) const {
  const int s = spec_.num_equations();
  std::vector<VecC> dirs(s);
  for (int a = 0; a < s; ++a) {
    VecC g = spec_.cone_polynomials[a].gradient_at(z);
    dirs[a] = g.conjugate() / static_cast<double>(degrees_[a]);
  }
  return dirs;
}

VecC ProjectionMap::structured_residual(const VecC& z, const VecC& y,
                                        const std::vector<VecC>& dirs,
                                        VecC* point_out) const {
  const int s = spec_.num_equations();
  VecC psi = VecC::Zero(z.size());
  for (int b = 0; b < s; ++b) psi += y(b) * dirs[b];
  VecC w = z + psi;
  VecC G(s);
  for (int a = 0; a < s; ++a) {
    cplx value = spec_.cone_polynomials[a].eval_difference(z, psi);
    if (!lower_parts_[a].empty()) value += lower_parts_[a].eval(w);
    G(a) = value - spec_.smoothing_targets[a];
  }
  if (point_out) *point_out = w;
  return G;
}

ProjectionSolution ProjectionMap::solve(const VecC& z,
                                        const VecC* warm_start) const {
  const int s = spec_.num_equations();
  const auto dirs = directions(z);
  ProjectionSolution sol;
  VecC y = (warm_start != nullptr && warm_start->size() == s)
               ? *warm_start
               : VecC(VecC::Zero(s));
  bool converged = false;
  for (int iter = 1; iter <= settings_.max_iterations; ++iter) {
    VecC w;
    VecC G = structured_residual(z, y, dirs, &w);
    if (!G.allFinite())
      throw CodedError("NewtonDiverged",
                       "non-finite projection residual for '" + spec_.name + "'");
    MatC jac(s, s);
    for (int a = 0; a < s; ++a) {
      VecC gw = smoothing_gradient(spec_, lower_parts_, a, w);
      for (int b = 0; b < s; ++b) jac(a, b) = gw.cwiseProduct(dirs[b]).sum();
    }
    Eigen::FullPivLU<MatC> lu(jac);
    if (lu.rank() < s)
      throw CodedError("RankDeficient",
                       "singular projection Newton matrix for '" + spec_.name +
                           "' (point near the apex or a branch locus)");
    VecC step = lu.solve(-G);
    if (!step.allFinite())
      throw CodedError("NewtonDiverged",
                       "non-finite Newton step for '" + spec_.name + "'");
    y += step;
    const double step_norm = step.norm();
    sol.step_norms.push_back(step_norm);
    sol.iterations = iter;
    if (step_norm == 0.0 ||
        (iter >= 2 && step_norm <= 1e-14 * std::max(y.norm(), 1e-300))) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw CodedError("NewtonDiverged",
                     "projection Newton did not converge in " +
                         std::to_string(settings_.max_iterations) +
                         " iterations for '" + spec_.name + "'");
  VecC w;
  VecC G = structured_residual(z, y, dirs, &w);
  VecC psi = VecC::Zero(z.size());
  for (int b = 0; b < s; ++b) psi += y(b) * dirs[b];
  double residual = 0.0;
  for (int a = 0; a < s; ++a) {
    // Rounding floor of the telescoped difference f(z+ψ) − f(z): each of its
    // terms is bounded by |∂f(z)|·|ψ| (plus the lower-order parts), so the
    // achievable residual scales with that travel, not with the target alone.
    const VecC grad = spec_.cone_polynomials[a].gradient_at(z);
    double travel = 0.0;
    for (int k = 0; k < grad.size(); ++k)
      travel += std::abs(grad(k)) * std::abs(psi(k));
    const double scale = 1.0 + std::abs(spec_.smoothing_targets[a]) +
                         eval_abs(lower_parts_[a], w) + travel;
    const double value = std::abs(G(a));
    if (value > 1e3 * settings_.tolerance * scale)
      throw CodedError("NewtonDiverged",
                       "projection Newton stalled above tolerance for '" +
                           spec_.name + "'");
    residual = std::max(residual, value);
  }
  sol.coefficients = y;
  sol.displacement = psi;
  sol.point = w;
  sol.residual = residual;
  return sol;
}

VecC ProjectionMap::psi(const VecC& z) const { return solve(z).displacement; }

VecC ProjectionMap::phi(const VecC& z) const { return solve(z).point; }

ProjectionDifferential ProjectionMap::differential(
    const VecC& z, const ProjectionSolution& sol) const {
  const int s = spec_.num_equations();
  const int N = spec_.ambient_dim;
  ProjectionDifferential d;
  d.z_ = z;
  d.y_ = sol.coefficients;
  d.dirs_ = directions(z);
  d.degrees_ = degrees_;
  d.hess_at_z_.resize(s);
  for (int b = 0; b < s; ++b) {
    MatC H(N, N);
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) H(k, l) = cone_hessians_[b][k][l].eval(z);
    d.hess_at_z_[b] = std::move(H);
  }
  const VecC& w = sol.point;
  d.grads_w_.resize(s, N);
  for (int a = 0; a < s; ++a)
    d.grads_w_.row(a) =
        smoothing_gradient(spec_, lower_parts_, a, w).transpose();
  d.mixed_grads_ = gradient_difference(z, sol.displacement);
  MatC jac(s, s);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      jac(a, b) = d.grads_w_.row(a).transpose().cwiseProduct(d.dirs_[b]).sum();
  d.jacobian_lu_.compute(jac);
  return d;
}

VecC ProjectionDifferential::apply(const VecC& v) const {
  const int s = static_cast<int>(dirs_.size());
  VecC du = VecC::Zero(z_.size());
  for (int b = 0; b < s; ++b) {
    VecC hv = hess_at_z_[b] * v;
    du += (y_(b) / static_cast<double>(degrees_[b])) * hv.conjugate();
  }
  VecC dG = grads_w_ * du + mixed_grads_ * v;
  VecC dy = jacobian_lu_.solve(dG);
  VecC out = du;
  for (int b = 0; b < s; ++b) out -= dy(b) * dirs_[b];
  return out;
}

VecC ProjectionMap::dpsi_finite_difference(const VecC& z, const VecC& v,
                                           const FDPolicy& fd) const {
  ProjectionSolution center = solve(z);
  const double magnitude = std::max(1.0, z.cwiseAbs().maxCoeff());
  const double h = fd.step_scale(magnitude, false);
  auto psi_at = [&](double t) {
    VecC displaced = z + t * v;
    ProjectionSolution s = solve(displaced, &center.coefficients);
    return VecC(s.displacement);
  };
  auto central = [&](double step) {
    return VecC(((psi_at(step) - psi_at(-step)) / (2.0 * step)).eval());
  };
  VecC coarse = central(h);
  VecC fine = central(h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

MatC ProjectionMap::cone_gradients(const VecC& z) const {
  const int s = spec_.num_equations();
  const int N = spec_.ambient_dim;
  MatC rows(s, N);
  for (int a = 0; a < s; ++a)
    rows.row(a) = spec_.cone_polynomials[a].gradient_at(z).transpose();
  return rows;
}

MatC ProjectionMap::gradient_difference(const VecC& z, const VecC& psi) const {
  const int s = spec_.num_equations();
  const int N = spec_.ambient_dim;
  VecC w = z + psi;
  MatC rows(s, N);
  for (int a = 0; a < s; ++a) {
    for (int k = 0; k < N; ++k) {
      cplx value = cone_grads_[a][k].eval_difference(z, psi);
      if (!lower_grads_[a][k].empty()) value += lower_grads_[a][k].eval(w);
      rows(a, k) = value;
    }
  }
  return rows;
}

// ── volume-form comparison ──────────────────────────────────────────────────

VolumeComparison compare_volume_forms(const ProjectionMap& proj,
                                      const ChartFrame& chart,
                                      const ProjectionSolution& sol,
                                      const ProjectionDifferential& diff) {
  const AffineConeSpec& spec = proj.spec();
  const int N = spec.ambient_dim;
  const int s = spec.num_equations();
  const int n = N - s;
  const VecC& z = diff.base_point();

  MatC grads_z = proj.cone_gradients(z);
  MatC completion(N, s);
  for (int c = 0; c < s; ++c)
    completion.col(c) = grads_z.row(c).conjugate().transpose();

  MatC m0 = grads_z * completion;
  MatC delta_m = proj.gradient_difference(z, sol.displacement) * completion;
  const cplx d0 = m0.determinant();
  cplx delta_d = 0.0;
  for (unsigned mask = 1; mask < (1u << s); ++mask) {
    MatC t = m0;
    for (int c = 0; c < s; ++c)
      if (mask >> c & 1u) t.col(c) = delta_m.col(c);
    delta_d += t.determinant();
  }
  const cplx dfull = d0 + delta_d;
  if (d0 == cplx(0.0) || dfull == cplx(0.0))
    throw CodedError("DegenerateCompletion",
                     "vanishing completion determinant for '" + spec.name + "'");

  const auto& frame = chart.orthonormal_basis;
  const int frame_size = static_cast<int>(frame.size());
  std::vector<VecC> images(frame_size);
  for (int a = 0; a < frame_size; ++a) images[a] = diff.apply(frame[a]);

  VolumeComparison out;
  out.radius = radius(spec, z);
  out.weight =
      std::pow(out.radius, n * (to_double(spec.radius_exponent) - 1.0));
  out.tuples = increasing_tuples(frame_size, n);
  out.omega0.reserve(out.tuples.size());
  out.pullback.reserve(out.tuples.size());
  out.difference.reserve(out.tuples.size());

  MatC block(N, n + s);
  for (const auto& tuple : out.tuples) {
    for (int j = 0; j < n; ++j) block.col(j) = frame[tuple[j]];
    for (int c = 0; c < s; ++c) block.col(n + c) = completion.col(c);
    const cplx base = block.determinant();
    cplx delta1 = 0.0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      MatC t = block;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1u) t.col(j) = images[tuple[j]];
      delta1 += t.determinant();
    }
    out.omega0.push_back(base / d0);
    out.pullback.push_back((base + delta1) / dfull);
    out.difference.push_back(delta1 / dfull -
                             base * (delta_d / (dfull * d0)));
  }
  for (std::size_t k = 0; k < out.tuples.size(); ++k) {
    out.omega0_proxy = std::max(out.omega0_proxy, std::abs(out.omega0[k]));
    out.pullback_proxy =
        std::max(out.pullback_proxy, std::abs(out.pullback[k]));
    out.difference_proxy =
        std::max(out.difference_proxy, std::abs(out.difference[k]));
  }
  out.omega0_proxy *= out.weight;
  out.pullback_proxy *= out.weight;
  out.difference_proxy *= out.weight;
  return out;
}

// ── complex-structure comparison ────────────────────────────────────────────

JComparison compare_complex_structures(const ProjectionMap& proj,
                                       const ChartFrame& chart,
                                       const ProjectionSolution& sol,
                                       const ProjectionDifferential& diff) {
  (void)proj;
  (void)sol;
  const auto& frame = chart.orthonormal_basis;
  const int dim = static_cast<int>(frame.size());
  const cplx iu(0.0, 1.0);

  std::vector<VecC> dpsi(dim), dpsi_i(dim);
  for (int b = 0; b < dim; ++b) {
    dpsi[b] = diff.apply(frame[b]);
    dpsi_i[b] = diff.apply(VecC(iu * frame[b]));
  }

  const int ambient2 = 2 * static_cast<int>(frame[0].size());
  Eigen::MatrixXd pushed(ambient2, dim);
  for (int b = 0; b < dim; ++b)
    pushed.col(b) = embed_real(VecC(frame[b] + dpsi[b]));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pushed);
  if (qr.rank() < dim)
    throw CodedError("FrameDegenerate",
                     "pushed-forward tangent frame is rank deficient");

  JComparison out;
  out.j0.resize(dim, dim);
  out.pullback.resize(dim, dim);
  out.difference.resize(dim, dim);
  double worst = 0.0;
  for (int b = 0; b < dim; ++b) {
    for (int a = 0; a < dim; ++a)
      out.j0(a, b) = std::real(frame[a].dot(VecC(iu * frame[b])));

    const VecC i_dphi = iu * (frame[b] + dpsi[b]);
    Eigen::VectorXd rhs = embed_real(i_dphi);
    Eigen::VectorXd coeff = qr.solve(rhs);
    out.pullback.col(b) = coeff;
    worst = std::max(worst, (pushed * coeff - rhs).norm() /
                                std::max(rhs.norm(), 1e-300));

    const VecC u = iu * dpsi[b] - dpsi_i[b];
    Eigen::VectorXd rhs_u = embed_real(u);
    Eigen::VectorXd coeff_u = qr.solve(rhs_u);
    out.difference.col(b) = coeff_u;
    worst = std::max(worst, (pushed * coeff_u - rhs_u).norm() /
                                std::max(rhs_u.norm(), 1e-300));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.difference);
  out.op_norm_difference = svd.singularValues()(0);
  Eigen::MatrixXd square_defect =
      out.pullback * out.pullback + Eigen::MatrixXd::Identity(dim, dim);
  out.j_square_defect = square_defect.cwiseAbs().maxCoeff();
  out.tangency_residual = worst;
  return out;
}

// ── decay-rate scans ────────────────────────────────────────────────────────

double find_inner_cutoff(const ProjectionMap& proj,
                         const std::vector<VecC>& unit_points) {
  double good = std::numeric_limits<double>::quiet_NaN();
  for (double r = 8.0; r >= 0.04; r *= 0.7) {
    bool ok = true;
    for (const VecC& unit : unit_points) {
      VecC z = place_at_radius(proj.spec(), unit, r);
      try {
        ProjectionSolution sol = proj.solve(z);
        if (sol.displacement.norm() > 0.9 * std::max(1.0, z.norm())) {
          ok = false;  // converged, but no longer a small graph over the cone
          break;
        }
      } catch (const CodedError&) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
    good = r;
  }
  if (std::isnan(good)) return 16.0;  // even the largest probe failed
  return good;
}

RateReport deformation_rate_scan(const AffineConeSpec& spec,
                                 const std::vector<double>& radii,
                                 int directions, std::uint64_t seed) {
  if (directions < 1)
    throw CodedError("InvalidOption", "need at least one scan direction");
  if (radii.size() < 2)
    throw CodedError("InsufficientSamples", "need at least two scan radii");
  ProjectionMap proj(spec);
  std::mt19937_64 rng(seed);
  std::vector<VecC> units;
  units.reserve(directions);
  for (int d = 0; d < directions; ++d)
    units.push_back(random_cone_point(spec, rng));

  RateReport report;
  report.cone_name = spec.name;
  report.inner_cutoff = find_inner_cutoff(proj, units);

  std::vector<double> usable;
  for (double r : radii)
    if (r >= 2.0 * report.inner_cutoff) usable.push_back(r);
  if (usable.size() < 2)
    throw CodedError("InsufficientSamples",
                     "all requested radii lie below twice the inner cutoff (" +
                         std::to_string(report.inner_cutoff) + ")");

  std::vector<double> rs, omega_mags, j_mags, ambient_norms, coeff_mags;
  for (int d = 0; d < directions; ++d) {
    for (double r : usable) {
      VecC z = place_at_radius(spec, units[d], r);
      ChartFrame chart = make_chart(spec, WhichVariety::cone, z);
      ProjectionSolution sol = proj.solve(z);
      ProjectionDifferential diff = proj.differential(z, sol);
      VolumeComparison vol = compare_volume_forms(proj, chart, sol, diff);
      JComparison jc = compare_complex_structures(proj, chart, sol, diff);
      DecaySample sample;
      sample.radius = r;
      sample.direction = d;
      sample.omega_difference = vol.difference_proxy;
      sample.j_difference = jc.op_norm_difference;
      sample.ratio = vol.difference_proxy > 0.0
                         ? jc.op_norm_difference / vol.difference_proxy
                         : 0.0;
      sample.coefficient_abs = std::abs(sol.coefficients(0));
      sample.ambient_norm = z.norm();
      report.samples.push_back(sample);
      rs.push_back(r);
      omega_mags.push_back(vol.difference_proxy);
      j_mags.push_back(jc.op_norm_difference);
      ambient_norms.push_back(sample.ambient_norm);
      coeff_mags.push_back(sample.coefficient_abs);
    }
  }
  report.omega_fit = fit_rate(rs, omega_mags, false);
  report.j_fit = fit_rate(rs, j_mags, false);
  report.coefficient_fit = fit_rate(ambient_norms, coeff_mags, false);
  for (const auto& sample : report.samples)
    report.lemma_constant = std::max(report.lemma_constant, sample.ratio);
  report.descriptor = nlohmann::json{{"cone", spec.name},
                                     {"directions", directions},
                                     {"seed", seed},
                                     {"radii_requested", radii.size()},
                                     {"radii_used", usable.size()}};
  return report;
}

nlohmann::json RateReport::to_json() const {
  nlohmann::json samples_json = nlohmann::json::array();
  for (const auto& sample : samples) {
    samples_json.push_back({{"radius", sample.radius},
                            {"direction", sample.direction},
                            {"omega_difference", sample.omega_difference},
                            {"j_difference", sample.j_difference},
                            {"ratio", sample.ratio},
                            {"coefficient_abs", sample.coefficient_abs},
                            {"ambient_norm", sample.ambient_norm}});
  }
  return nlohmann::json{{"cone", cone_name},
                        {"omega_fit", rate_fit_json(omega_fit)},
                        {"j_fit", rate_fit_json(j_fit)},
                        {"coefficient_fit", rate_fit_json(coefficient_fit)},
                        {"lemma_constant", lemma_constant},
                        {"inner_cutoff", inner_cutoff},
                        {"descriptor", descriptor},
                        {"samples", samples_json}};
}

void write_decay_csv(const std::string& path, const RateReport& report) {
  std::ofstream out(path);
  if (!out)
    throw CodedError("IoError", "cannot open '" + path + "' for writing");
  out << "radius,direction,omega_difference,j_difference,ratio,"
         "coefficient_abs,ambient_norm\n";
  out << std::setprecision(17);
  for (const auto& sample : report.samples) {
    out << sample.radius << ',' << sample.direction << ','
        << sample.omega_difference << ',' << sample.j_difference << ','
        << sample.ratio << ',' << sample.coefficient_abs << ','
        << sample.ambient_norm << '\n';
  }
}

}  // namespace acgeo
