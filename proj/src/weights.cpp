#include "acgeo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace acgeo {

namespace {

double weight_plus(double m, double mu) {
  const double half = (m - 2.0) / 2.0;
  return -half + std::sqrt(half * half + mu);
}

double weight_minus(double m, double mu) {
  const double half = (m - 2.0) / 2.0;
  return -half - std::sqrt(half * half + mu);
}

}  // namespace

// ── WeightSet ───────────────────────────────────────────────────────────────

bool WeightSet::contains(double value, double tol) const {
  for (const auto& entry : weights)
    if (std::abs(entry.value - value) <= tol) return true;
  return false;
}

std::optional<double> WeightSet::next_above(double value, double tol) const {
  for (const auto& entry : weights)
    if (entry.value > value + tol) return entry.value;
  return std::nullopt;
}

nlohmann::json WeightSet::to_json() const {
  nlohmann::json weights_json = nlohmann::json::array();
  for (const auto& entry : weights)
    weights_json.push_back(
        {{"value", entry.value}, {"multiplicity", entry.multiplicity}});
  return nlohmann::json{
      {"m", m},
      {"eigenvalues", eigenvalues},
      {"multiplicities", multiplicities},
      {"weights", weights_json},
      {"certified_range", {certified_min, certified_max}},
      {"exact", exact}};
}

WeightSet WeightSet::from_json(const nlohmann::json& j) {
  const double m = j.at("m").get<double>();
  const auto eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  std::vector<int> multiplicities;
  if (j.contains("multiplicities"))
    multiplicities = j.at("multiplicities").get<std::vector<int>>();
  return exceptional_weights(m, eigenvalues, multiplicities);
}

// ── derivation ──────────────────────────────────────────────────────────────

WeightSet exceptional_weights(double m, const std::vector<double>& eigenvalues,
                              const std::vector<int>& multiplicities) {
  if (!(m > 2.0))
    throw CodedError("BadDimension",
                     "cone dimension must exceed 2, got " + std::to_string(m));
  if (eigenvalues.empty())
    throw CodedError("UnsortedSpectrum", "empty eigenvalue list");
  if (std::abs(eigenvalues.front()) > 1e-14)
    throw CodedError("UnsortedSpectrum",
                     "spectrum must start at the constant eigenvalue 0");
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    if (!(eigenvalues[i] > eigenvalues[i - 1]))
      throw CodedError("UnsortedSpectrum",
                       "eigenvalues must increase strictly");
  if (!multiplicities.empty() &&
      multiplicities.size() != eigenvalues.size())
    throw CodedError("UnsortedSpectrum",
                     "multiplicity list length mismatch");

  WeightSet ws;
  ws.m = m;
  ws.eigenvalues = eigenvalues;
  ws.multiplicities = multiplicities.empty()
                          ? std::vector<int>(eigenvalues.size(), 1)
                          : multiplicities;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double mu = std::max(eigenvalues[j], 0.0);
    const int mult = ws.multiplicities[j];
    if (mult < 1)
      throw CodedError("UnsortedSpectrum", "multiplicities must be positive");
    for (double w : {weight_plus(m, mu), weight_minus(m, mu)}) {
      bool merged = false;
      for (auto& entry : ws.weights) {
        if (std::abs(entry.value - w) <= 1e-12) {
          entry.multiplicity += mult;
          merged = true;
          break;
        }
      }
      if (!merged) ws.weights.push_back({w, mult});
    }
  }
  std::sort(ws.weights.begin(), ws.weights.end(),
            [](const WeightEntry& a, const WeightEntry& b) {
              return a.value < b.value;
            });
  ws.certified_min = weight_minus(m, eigenvalues.back());
  ws.certified_max = weight_plus(m, eigenvalues.back());
  ws.exact = true;
  for (const auto& entry : ws.weights)
    if (std::abs(entry.value - std::round(entry.value)) > 1e-9)
      ws.exact = false;
  // Structural sanity: 0 and 2−m always present; nothing strictly inside
  // (2−m, 0).
  if (!ws.contains(0.0) || !ws.contains(2.0 - m))
    throw CodedError("UnsortedSpectrum",
                     "derived set is missing the μ=0 branch weights");
  for (const auto& entry : ws.weights)
    if (entry.value > (2.0 - m) + 1e-12 && entry.value < -1e-12)
      throw CodedError("UnsortedSpectrum",
                       "derived weight inside the forbidden band (2−m, 0)");
  return ws;
}

bool is_fredholm(const WeightSet& ws, double beta) {
  const double probe = beta + 2.0;
  if (probe < ws.certified_min - 1e-12 || probe > ws.certified_max + 1e-12)
    throw CodedError("CutoffExceeded",
                     "query " + std::to_string(probe) +
                         " outside the certified band [" +
                         std::to_string(ws.certified_min) + ", " +
                         std::to_string(ws.certified_max) + "]");
  return !ws.contains(probe);
}

ObataGapReport obata_gap_check(const WeightSet& ws, bool ricci_nonneg) {
  double mu1 = std::numeric_limits<double>::infinity();
  for (double mu : ws.eigenvalues)
    if (mu > 1e-14) {
      mu1 = mu;
      break;
    }
  if (ricci_nonneg && mu1 < ws.m - 1.0 - 1e-12)
    throw CodedError("HypothesisViolated",
                     "first nonzero eigenvalue " + std::to_string(mu1) +
                         " below the Lichnerowicz bound m−1 = " +
                         std::to_string(ws.m - 1.0));
  ObataGapReport report;
  report.smallest_positive = std::numeric_limits<double>::infinity();
  for (const auto& entry : ws.weights) {
    const double w = entry.value;
    if (w > 1e-12)
      report.smallest_positive = std::min(report.smallest_positive, w);
    if (std::abs(w - 1.0) <= 1e-12 || std::abs(w - (1.0 - ws.m)) <= 1e-12)
      report.boundary_case = true;
    const bool in_closed_interval =
        w >= (1.0 - ws.m) - 1e-12 && w <= 1.0 + 1e-12;
    // The interval may only contain 2−m and 0, plus the boundary pair
    // {1, 1−m} attained exactly when the Lichnerowicz bound is an equality.
    const bool allowed = std::abs(w) <= 1e-12 ||
                         std::abs(w - (2.0 - ws.m)) <= 1e-12 ||
                         std::abs(w - 1.0) <= 1e-12 ||
                         std::abs(w - (1.0 - ws.m)) <= 1e-12;
    if (in_closed_interval && !allowed) report.violations.push_back(w);
    if (w > 1.0 + 1e-12 && w < 2.0 - 1e-12) {
      if (report.count_in_1_2 == 0) report.weight_in_1_2 = w;
      ++report.count_in_1_2;
    }
  }
  report.gap_holds = report.violations.empty();
  return report;
}

nlohmann::json ObataGapReport::to_json() const {
  nlohmann::json j{{"gap_holds", gap_holds},
                   {"boundary_case", boundary_case},
                   {"smallest_positive", smallest_positive},
                   {"violations", violations},
                   {"count_in_1_2", count_in_1_2}};
  if (weight_in_1_2)
    j["weight_in_1_2"] = *weight_in_1_2;
  else
    j["weight_in_1_2"] = nullptr;
  return j;
}

// ── rate iteration ──────────────────────────────────────────────────────────

RateIterationTrace rate_iteration(double beta0, double epsilon) {
  if (!(beta0 > -2.0) || !(beta0 < 0.0))
    throw CodedError("BadInitialRate",
                     "beta0 must lie in (-2, 0), got " + std::to_string(beta0));
  if (!(epsilon > 0.0) || !(epsilon <= 0.1))
    throw CodedError("BadInitialRate",
                     "epsilon must lie in (0, 0.1], got " +
                         std::to_string(epsilon));
  RateIterationTrace trace;
  trace.beta0 = beta0;
  trace.epsilon = epsilon;
  trace.steps.push_back(beta0);
  double rate = 2.0 * beta0;  // first doubling carries no slack
  trace.steps.push_back(rate);
  trace.step_count = 1;
  while (rate >= -2.0) {
    // Slack of at most ε, capped so the schedule always descends.
    const double slack = std::min(epsilon, std::abs(rate) / 2.0);
    rate = 2.0 * rate + slack;
    trace.steps.push_back(rate);
    ++trace.step_count;
    if (trace.step_count > 4096)
      throw CodedError("BadInitialRate",
                       "doubling schedule failed to terminate");
  }
  trace.terminal_rate = rate;
  return trace;
}

nlohmann::json RateIterationTrace::to_json() const {
  return nlohmann::json{{"beta0", beta0},
                        {"epsilon", epsilon},
                        {"steps", steps},
                        {"terminal_rate", terminal_rate},
                        {"step_count", step_count}};
}

// ── radial modes ────────────────────────────────────────────────────────────

RadialModeSolution radial_mode_solve(double m, double mu, double s,
                                     double target_decay) {
  if (!(m > 2.0))
    throw CodedError("BadDimension",
                     "cone dimension must exceed 2, got " + std::to_string(m));
  if (mu < 0.0)
    throw CodedError("UnsortedSpectrum",
                     "link eigenvalue must be nonnegative");
  RadialModeSolution out;
  out.exponent = s + 2.0;
  out.root_plus = weight_plus(m, mu);
  out.root_minus = weight_minus(m, mu);
  const double denom = (s + 2.0) * (s + m) - mu;
  const double denom_scale =
      1.0 + std::abs((s + 2.0) * (s + m)) + std::abs(mu);
  if (std::abs(denom) <= 1e-12 * denom_scale) {
    out.resonant = true;
    out.log_solution = true;
    // L[r^{s+2}·log r] = (2(s+2) + m − 2)·r^s away from a double root.
    const double log_denominator = 2.0 * (s + 2.0) + m - 2.0;
    out.coefficient = std::abs(log_denominator) > 1e-12
                          ? 1.0 / log_denominator
                          : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.coefficient = 1.0 / denom;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.suppressed_root =
      out.root_plus > target_decay + 1e-12 ? out.root_plus : nan;
  out.kept_root = out.root_minus <= target_decay + 1e-12 ? out.root_minus
                  : out.root_plus <= target_decay + 1e-12 ? out.root_plus
                                                          : nan;

  // Substitute the returned solution into the ODE at r ∈ {1, 10, 100}.
  double worst = 0.0;
  for (double r : {1.0, 10.0, 100.0}) {
    const double a = s + 2.0;
    double lhs;
    if (out.log_solution) {
      if (std::isnan(out.coefficient)) break;
      const double c = out.coefficient;
      const double lg = std::log(r);
      const double u2 = c * std::pow(r, a - 2.0) *
                        (a * (a - 1.0) * lg + 2.0 * a - 1.0);
      const double u1 = c * std::pow(r, a - 1.0) * (a * lg + 1.0);
      const double u0 = c * std::pow(r, a) * lg;
      lhs = u2 + (m - 1.0) / r * u1 - mu / (r * r) * u0;
    } else {
      const double c = out.coefficient;
      const double u2 = c * a * (a - 1.0) * std::pow(r, a - 2.0);
      const double u1 = c * a * std::pow(r, a - 1.0);
      const double u0 = c * std::pow(r, a);
      lhs = u2 + (m - 1.0) / r * u1 - mu / (r * r) * u0;
    }
    const double rhs = std::pow(r, s);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  out.residual = worst;
  return out;
}

nlohmann::json RadialModeSolution::to_json() const {
  return nlohmann::json{{"resonant", resonant},
                        {"exponent", exponent},
                        {"coefficient", coefficient},
                        {"log_solution", log_solution},
                        {"root_plus", root_plus},
                        {"root_minus", root_minus},
                        {"suppressed_root", suppressed_root},
                        {"kept_root", kept_root},
                        {"residual", residual}};
}

// ── spectrum generators and I/O ─────────────────────────────────────────────

std::vector<double> sphere_eigenvalues(double m, int k_max) {
  if (!(m > 2.0))
    throw CodedError("BadDimension",
                     "sphere link needs cone dimension > 2");
  if (k_max < 0)
    throw CodedError("UnsortedSpectrum", "k_max must be nonnegative");
  std::vector<double> mus;
  mus.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k)
    mus.push_back(static_cast<double>(k) * (k + m - 2.0));
  return mus;
}

std::vector<double> lens_eigenvalues(int m, int p, int k_max) {
  if (m < 4 || m % 2 != 0)
    throw CodedError("BadDimension",
                     "diagonal cyclic quotients need even cone dimension ≥ 4");
  if (p < 1)
    throw CodedError("UnsortedSpectrum", "quotient order must be positive");
  std::vector<double> mus;
  for (int k = 0; k <= k_max; ++k) {
    bool invariant = false;
    // Bidegrees (a, b), a+b = k: the difference a−b runs over
    // {−k, −k+2, …, k}; a character-invariant vector needs p | a−b.
    for (int j = -k; j <= k; ++j) {
      if (j % p != 0) continue;
      if ((k - j) % 2 != 0) continue;
      invariant = true;
      break;
    }
    if (invariant)
      mus.push_back(static_cast<double>(k) * (k + m - 2.0));
  }
  return mus;
}

std::pair<std::vector<double>, std::vector<int>> read_spectrum_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CodedError("IoError", "cannot open '" + path + "'");
  std::vector<double> eigenvalues;
  std::vector<int> multiplicities;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("eigenvalue") != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',')) continue;
    double mu = 0.0;
    int mult = 1;
    try {
      mu = std::stod(a);
      if (std::getline(row, b, ',')) mult = std::stoi(b);
    } catch (const std::exception&) {
      throw CodedError("IoError", "malformed spectrum row '" + line + "'");
    }
    eigenvalues.push_back(mu);
    multiplicities.push_back(mult);
  }
  return {eigenvalues, multiplicities};
}

void write_spectrum_csv(const std::string& path, const WeightSet& ws) {
  std::ofstream out(path);
  if (!out) throw CodedError("IoError", "cannot open '" + path + "'");
  out << "eigenvalue,multiplicity\n" << std::setprecision(17);
  for (std::size_t j = 0; j < ws.eigenvalues.size(); ++j)
    out << ws.eigenvalues[j] << ',' << ws.multiplicities[j] << '\n';
}

}  // namespace acgeo
