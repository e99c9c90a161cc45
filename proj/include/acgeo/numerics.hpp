/*
 * numerics.hpp — shared numerical kit for the conical-geometry suite.
 *
 *   • coded error type carrying a stable machine-readable code string
 *   • rational helpers ("p/q" parsing) on boost::rational<long long>
 *   • finite differences: first/second/mixed central stencils with one
 *     Richardson extrapolation level
 *   • adaptive Simpson quadrature and a fixed 10-point Gauss–Legendre rule
 *   • power-law rate fitting  m(r) ≈ A · r^s · (log r)^p,  p ∈ {0,1}
 *   • deterministic seed derivation and combinatorial index tuples
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace acgeo {

using cplx = std::complex<double>;
using Rational = boost::rational<long long>;

// ── errors ──────────────────────────────────────────────────────────────────

/** Exception with a stable code (e.g. "InsufficientSamples") plus free text. */
class CodedError : public std::runtime_error {
 public:
  CodedError(std::string code, const std::string& what_arg)
      : std::runtime_error(code + ": " + what_arg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// ── rationals ───────────────────────────────────────────────────────────────

/** Parse "p/q" or "p" (q > 0 after normalization). */
Rational parse_rational(const std::string& text);

/** Format as "p/q", or "p" when the denominator is 1. */
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// ── finite differences ──────────────────────────────────────────────────────

/**
 * Step policy. First derivatives use the classic h ~ ε^(1/3)·scale; second
 * derivatives use the optimum of the Richardson-extrapolated central-second-
 * difference error model  h⁴/480 + 10ε/h², i.e. h = (2400ε)^(1/6)·scale ≈
 * 9.3e-3·scale, which keeps Hessian errors near 1e-10 for unit-scale data.
 */
struct FDPolicy {
  double first_step_rel = 6.0e-6;   // ≈ ε^(1/3)
  double second_step_rel = 9.3e-3;  // ≈ (2400 ε)^(1/6)
  double step_scale(double coordinate_magnitude, bool second) const {
    double h = (second ? second_step_rel : first_step_rel) *
               std::max(1.0, coordinate_magnitude);
    if (!(h > 0.0) || !std::isfinite(h))
      throw CodedError("StepUnderflow", "finite-difference step underflowed");
    return h;
  }
};

/** f'(x) by central differences with one Richardson level. */
double d1_central(const std::function<double(double)>& f, double x, double h);

/** f''(x) by central second differences with one Richardson level. */
double d2_central(const std::function<double(double)>& f, double x, double h);

/** ∂²f/∂x∂y by the 4-point cross stencil with one Richardson level. */
double d2_mixed(const std::function<double(double, double)>& f, double x,
                double y, double hx, double hy);

// ── quadrature ──────────────────────────────────────────────────────────────

/** Adaptive Simpson on [a,b]; tolerance is max(abs_tol, rel_tol·|I|). */
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol = 1e-13,
                        double rel_tol = 1e-13, int max_depth = 48);

/** Fixed 10-point Gauss–Legendre rule on [a,b] (smooth in the endpoints). */
double gauss_legendre_10(const std::function<double(double)>& f, double a,
                         double b);

// ── rate fitting ────────────────────────────────────────────────────────────

/** Least-squares fit of magnitudes ≈ amplitude · r^exponent · (log r)^log_power. */
struct RateFit {
  double exponent = 0.0;
  int log_power = 0;  // 0 or 1
  double amplitude = 0.0;
  double residual_rms = 0.0;  // rms residual of log-magnitudes
  int sample_count = 0;
  std::array<double, 2> radius_range{0.0, 0.0};
};

/**
 * Fit log m = log A + s·log r (+ log log r when allow_log and it lowers the
 * rms residual by at least 20%). Requires ≥ 6 samples (InsufficientSamples),
 * positive magnitudes (NonpositiveMagnitude), and a genuine spread of radii
 * (DegenerateFit). The log model is only considered when all radii exceed 1.
 */
RateFit fit_rate(const std::vector<double>& radii,
                 const std::vector<double>& magnitudes, bool allow_log);

// ── misc ────────────────────────────────────────────────────────────────────

/** All strictly increasing k-tuples from {0,…,n−1}, lexicographic. */
std::vector<std::vector<int>> increasing_tuples(int n, int k);

/** Deterministic per-experiment seed derived from a base seed and a name. */
std::uint64_t derive_seed(std::uint64_t base, std::string_view name);

/** Geometric grid of `count` radii from lo to hi inclusive (count ≥ 2). */
std::vector<double> geometric_grid(double lo, double hi, int count);

/** Mean and population standard deviation. */
std::pair<double, double> mean_stddev(const std::vector<double>& xs);

}  // namespace acgeo
