#include "acgeo/flags.hpp"

#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace acgeo {

FlagPartition flag_c1(const std::vector<int>& parts) {
  if (parts.empty())
    throw CodedError("EmptyPartition", "ordered partition has no parts");
  for (int p : parts)
    if (p <= 0)
      throw CodedError("EmptyPartition", "partition parts must be positive");
  if (parts.size() == 1)
    throw CodedError("EmptyFlag",
                     "single-part partition gives P = G: no flag manifold");
  const int total = std::accumulate(parts.begin(), parts.end(), 0);

  FlagPartition flag;
  flag.parts = parts;
  flag.raw_coefficients.reserve(total);
  int cumulative = 0;
  for (int part : parts) {
    const int before = cumulative;  // boxes in strictly earlier groups
    cumulative += part;
    const int value = (total - cumulative) - before;
    for (int i = 0; i < part; ++i) flag.raw_coefficients.push_back(value);
  }
  // Normalize modulo ℤ(1,…,1): zero the last block.
  const int shift = -flag.raw_coefficients.back();
  flag.c1_coefficients = flag.raw_coefficients;
  for (int& c : flag.c1_coefficients) c += shift;

  int g = 0;
  for (std::size_t i = 0; i < flag.c1_coefficients.size(); ++i)
    for (std::size_t j = i + 1; j < flag.c1_coefficients.size(); ++j)
      g = std::gcd(g, std::abs(flag.c1_coefficients[i] -
                               flag.c1_coefficients[j]));
  flag.divisibility = g == 0 ? 1 : g;
  return flag;
}

nlohmann::json FlagPartition::to_json() const {
  return nlohmann::json{{"parts", parts},
                        {"raw_coefficients", raw_coefficients},
                        {"c1_coefficients", c1_coefficients},
                        {"divisibility", divisibility}};
}

int maximal_flag_divisibility(int n) {
  if (n < 1)
    throw CodedError("EmptyPartition", "need n >= 1 for SU(n+1)/T");
  return flag_c1(std::vector<int>(n + 1, 1)).divisibility;
}

namespace {

SmallResolutionRecord make_record(int k, int n, const std::string& bundle,
                                  int divisor, int dividend) {
  SmallResolutionRecord rec;
  rec.k = k;
  rec.n = n;
  rec.bundle = bundle;
  rec.condition = std::to_string(divisor) + " | " + std::to_string(dividend);
  rec.exists = dividend % divisor == 0;
  rec.twist_power = Rational(dividend, divisor);
  return rec;
}

}  // namespace

std::array<SmallResolutionRecord, 4> grassmannian_small_resolutions(int k,
                                                                    int n) {
  if (k < 1 || k > n)
    throw CodedError("BadRank", "need 1 <= k <= n for G(k, n+1)");
  const int co = n + 1 - k;  // rank of Q and Q*
  return {make_record(k, n, "T", k, n),
          make_record(k, n, "T*", k, n + 2),
          make_record(k, n, "Q", co, n + 2),
          make_record(k, n, "Q*", co, n)};
}

nlohmann::json SmallResolutionRecord::to_json() const {
  return nlohmann::json{{"k", k},
                        {"n", n},
                        {"bundle", bundle},
                        {"condition", condition},
                        {"exists", exists},
                        {"twist_power", format_rational(twist_power)}};
}

BundleCheck projective_bundle_c1_check(int rank, int c1_E, int c1_B, int k) {
  if (rank < 2)
    throw CodedError("BadRank",
                     "projectivized bundle needs rank >= 2, got " +
                         std::to_string(rank));
  if (k < 1) throw CodedError("BadRank", "divisor k must be positive");
  BundleCheck check;
  const int total = c1_E + c1_B;
  check.divisible = rank % k == 0 && total % k == 0;
  if (check.divisible && k == rank)
    check.twist_power = Rational(-total, rank);
  return check;
}

std::vector<FanoIndexRecord> fano_index_table(int n_max) {
  std::vector<FanoIndexRecord> rows;
  for (int n = 2; n <= n_max; ++n) {
    FanoIndexRecord p;
    p.space = "P^" + std::to_string(n - 1);
    p.n = n;
    p.index = n;
    rows.push_back(p);
  }
  for (int n = 3; n <= n_max; ++n) {
    FanoIndexRecord q;
    q.space = "Q^" + std::to_string(n - 1);
    q.n = n;
    q.index = n - 1;
    rows.push_back(q);
  }
  return rows;
}

nlohmann::json FanoIndexRecord::to_json() const {
  return nlohmann::json{{"space", space}, {"n", n}, {"index", index}};
}

void write_resolution_csv(const std::string& path, int n_min, int n_max) {
  if (n_min < 2 || n_max < n_min)
    throw CodedError("BadRank", "need 2 <= n_min <= n_max");
  std::ofstream out(path);
  if (!out) throw CodedError("IoError", "cannot open '" + path + "'");
  out << "k,n,bundle,exists,twist_power\n";
  for (int n = n_min; n <= n_max; ++n) {
    for (int k = 2; k <= n; ++k) {
      for (const auto& rec : grassmannian_small_resolutions(k, n)) {
        out << rec.k << ',' << rec.n << ',' << rec.bundle << ','
            << (rec.exists ? 1 : 0) << ',' << format_rational(rec.twist_power)
            << '\n';
      }
    }
  }
}

}  // namespace acgeo
