/*
 * flags.hpp — first-Chern-class combinatorics of SU(n+1) flag varieties and
 * the small-resolution bundle criteria over Grassmannians.
 *
 * An ordered partition (n₁, n₂, …) of n+1 labels a flag variety G/P. Its c₁
 * is the sum of all roots λ_i − λ_j whose boxes i < j lie in different
 * groups, so the raw coefficient of λ_i is #{j > i, different group} −
 * #{j < i, different group}. The weight lattice is ℤ^{n+1}/ℤ(1,…,1), so
 * coefficient vectors are normalized by adding a multiple of (1,…,1) that
 * zeroes the last block, and divisibility is the gcd of pairwise coefficient
 * differences.
 *
 * Over G(k, n+1) with Picard generator t = [det T] (T the tautological
 * subbundle) the tangent bundle has c₁ = −(n+1)t, and the four natural
 * bundles T, T*, Q, Q* carry c₁ = +t, −t, −t, +t with ranks k, k, n+1−k,
 * n+1−k. A total space of E twisted to have trivial canonical bundle exists
 * iff rank(E) divides c₁(E) + c₁(base) in Pic, and then the twisting line
 * bundle is (det T)^p with p = −(c₁(E)+c₁(B))/rank — which reduces to the
 * divisibility table: T iff k|n, T* iff k|n+2, Q iff (n+1−k)|(n+2), Q* iff
 * (n+1−k)|n, with powers n/k, (n+2)/k, (n+2)/(n+1−k), n/(n+1−k).
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "acgeo/numerics.hpp"

namespace acgeo {

struct FlagPartition {
  std::vector<int> parts;             // ordered partition of n+1
  std::vector<int> raw_coefficients;  // root-sum values, sum to 0
  std::vector<int> c1_coefficients;   // normalized: last block zeroed
  int divisibility = 1;               // gcd of pairwise differences
  nlohmann::json to_json() const;
};

/**
 * c₁(G/P) for the flag variety labelled by the ordered partition. Throws
 * EmptyPartition (no parts / nonpositive part) and EmptyFlag (single part:
 * P = G, no flag manifold).
 */
FlagPartition flag_c1(const std::vector<int>& parts);

/** Divisibility of c₁ of the full flag variety SU(n+1)/T; always 2. */
int maximal_flag_divisibility(int n);

struct SmallResolutionRecord {
  int k = 0;
  int n = 0;                 // Grassmannian G(k, n+1)
  std::string bundle;        // "T", "T*", "Q", "Q*"
  std::string condition;     // divisibility predicate, human-readable
  bool exists = false;
  Rational twist_power{0};   // exponent of det T in the twisting line bundle
  nlohmann::json to_json() const;
};

/** The four bundle candidates over G(k, n+1), 1 ≤ k ≤ n. */
std::array<SmallResolutionRecord, 4> grassmannian_small_resolutions(int k,
                                                                    int n);

struct BundleCheck {
  bool divisible = false;               // k | rank and k | (c1_E + c1_B)
  std::optional<Rational> twist_power;  // −(c1_E+c1_B)/rank when k == rank
};

/**
 * Generic Picard-rank-1 form of the twisted-bundle criterion: both rank and
 * c₁(E)+c₁(B) divisible by k. Throws BadRank (rank < 2 or k < 1).
 */
BundleCheck projective_bundle_c1_check(int rank, int c1_E, int c1_B, int k);

struct FanoIndexRecord {
  std::string space;  // "P^{d}" or "Q^{d}"
  int n = 0;          // ambient parameter: ℙ^{n−1}, or quadric in ℙⁿ
  int index = 0;
  nlohmann::json to_json() const;
};

/** Index facts consumed by the explicit-metric normalizations. */
std::vector<FanoIndexRecord> fano_index_table(int n_max = 8);

/** CSV over (k, n, bundle, exists, twist_power) for 2 ≤ k ≤ n in range. */
void write_resolution_csv(const std::string& path, int n_min, int n_max);

}  // namespace acgeo
