#include "acgeo/numerics.hpp"

#include <algorithm>
#include <numeric>

namespace acgeo {

// ── rationals ──────────────────────────────────────────────────────────────

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text), 1);
    long long num = std::stoll(text.substr(0, slash));
    long long den = std::stoll(text.substr(slash + 1));
    if (den == 0) throw CodedError("BadRational", "zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const CodedError&) {
    throw;
  } catch (const std::exception&) {
    throw CodedError("BadRational", "cannot parse rational '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ── finite differences ─────────────────────────────────────────────────────

double d1_central(const std::function<double(double)>& f, double x, double h) {
  auto stencil = [&](double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
  };
  double coarse = stencil(h);
  double fine = stencil(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double d2_central(const std::function<double(double)>& f, double x, double h) {
  double f0 = f(x);
  auto stencil = [&](double step) {
    return (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step);
  };
  double coarse = stencil(h);
  double fine = stencil(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double d2_mixed(const std::function<double(double, double)>& f, double x,
                double y, double hx, double hy) {
  auto stencil = [&](double sx, double sy) {
    return (f(x + sx, y + sy) - f(x + sx, y - sy) - f(x - sx, y + sy) +
            f(x - sx, y - sy)) /
           (4.0 * sx * sy);
  };
  double coarse = stencil(hx, hy);
  double fine = stencil(0.5 * hx, 0.5 * hy);
  return (4.0 * fine - coarse) / 3.0;
}

// ── quadrature ─────────────────────────────────────────────────────────────

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, a, b);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double gauss_legendre_10(const std::function<double(double)>& f, double a,
                         double b) {
  // Nodes/weights for n = 10 on [-1, 1].
  static constexpr std::array<double, 5> xs = {
      0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
      0.8650633666889845, 0.9739065285171717};
  static constexpr std::array<double, 5> ws = {
      0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
      0.1494513491505806, 0.0666713443086881};
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i)
    acc += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
  return acc * half;
}

// ── rate fitting ───────────────────────────────────────────────────────────

namespace {

struct LineFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0;
};

// Least squares y ≈ intercept + slope·x; rms of residuals.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx < 1e-12)
    throw CodedError("DegenerateFit", "radii do not span a usable range");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - out.intercept - out.slope * x[i];
    ss += r * r;
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& radii,
                 const std::vector<double>& magnitudes, bool allow_log) {
  if (radii.size() != magnitudes.size())
    throw CodedError("InsufficientSamples", "radii/magnitude length mismatch");
  if (radii.size() < 6)
    throw CodedError("InsufficientSamples",
                     "rate fit needs at least 6 samples, got " +
                         std::to_string(radii.size()));
  std::vector<double> x, y;
  x.reserve(radii.size());
  y.reserve(radii.size());
  bool all_above_one = true;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw CodedError("NonpositiveMagnitude",
                       "radius must be positive, got " + std::to_string(radii[i]));
    if (!(magnitudes[i] > 0.0))
      throw CodedError("NonpositiveMagnitude",
                       "magnitude must be positive, got " +
                           std::to_string(magnitudes[i]));
    if (radii[i] <= 1.0) all_above_one = false;
    x.push_back(std::log(radii[i]));
    y.push_back(std::log(magnitudes[i]));
  }

  LineFit plain = fit_line(x, y);
  RateFit out;
  out.exponent = plain.slope;
  out.log_power = 0;
  out.amplitude = std::exp(plain.intercept);
  out.residual_rms = plain.rms;
  out.sample_count = static_cast<int>(radii.size());
  out.radius_range = {*std::min_element(radii.begin(), radii.end()),
                      *std::max_element(radii.begin(), radii.end())};

  if (allow_log && all_above_one) {
    // Model with a fixed (log r)^1 factor: subtract log log r and refit.
    std::vector<double> y_log(y.size());
    for (size_t i = 0; i < y.size(); ++i) y_log[i] = y[i] - std::log(x[i]);
    LineFit logged = fit_line(x, y_log);
    if (logged.rms <= 0.8 * plain.rms) {
      out.exponent = logged.slope;
      out.log_power = 1;
      out.amplitude = std::exp(logged.intercept);
      out.residual_rms = logged.rms;
    }
  }
  return out;
}

// ── misc ───────────────────────────────────────────────────────────────────

std::vector<std::vector<int>> increasing_tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
  // FNV-1a over the name, mixed with the base seed (splitmix64 finalizer).
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo))
    throw CodedError("DegenerateFit", "geometric grid needs 0 < lo < hi, count ≥ 2");
  std::vector<double> out(count);
  double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / xs.size())};
}

}  // namespace acgeo
