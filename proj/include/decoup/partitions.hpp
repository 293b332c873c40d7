#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "decoup/polynomials.hpp"

namespace decoup {

using BigCount = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// pi = (B_1, ..., B_m): m disjoint k-subsets covering [km].
struct OrderedPartition {
  int k = 0;
  int m = 0;
  std::vector<SubsetMask> blocks;

  int n() const { return k * m; }
  /// Index l of the block containing j.
  int block_of(int j) const;
  bool operator==(const OrderedPartition&) const = default;
};

/// Throws unless blocks are k-subsets, pairwise disjoint, covering [km].
void validate(const OrderedPartition& pi);

inline constexpr int kMaxEnumerationSize = 16;
/// Partitions are generated lazily, but no caller may ask for more than this many.
inline constexpr std::uint64_t kMaxPartitionCount = 10'000'000;

BigCount count_partitions(int k, int m);
/// m! prod_{l=1}^m binom((k-1)l, k-1)
BigCount multiplicity_N(int k, int m);
/// binom(km, m) / k^m
BigRational coefficient_ratio(int k, int m);
BigCount big_binomial(int n, int k);
BigCount big_factorial(int n);

/// Calls f(pi) for every partition; B_1 runs over k-subsets of [km] in colex order, then
/// B_2 over k-subsets of the remainder, and so on.
template <class F>
void for_each_partition(int k, int m, F&& f);

std::vector<OrderedPartition> enumerate_partitions(int k, int m);

/// T_pi(eps): coordinate j gets eps_l for the block B_l containing j.
std::vector<Scalar> t_pi_vector(const OrderedPartition& pi, std::span<const Scalar> eps);

/// L_pi(z^(1), ..., z^(m)) = sum over i_l in B_l of x_{i_1..i_m} z^(1)_{i_1} ... z^(m)_{i_m}.
class PartitionOperator {
 public:
  PartitionOperator(const TetraPoly& P, const OrderedPartition& pi);

  int degree() const { return pi_.m; }
  const OrderedPartition& partition() const { return pi_; }
  const NormedSpace& space() const { return diagonal_.space(); }
  /// Number of crossing monomials kept.
  std::size_t size() const { return diagonal_.size(); }

  SpaceVector evaluate(std::span<const Point> args) const;
  void evaluate_into(std::span<const Point> args, std::span<Scalar> out) const;
  /// L_pi(z, ..., z)
  SpaceVector evaluate_diagonal(std::span<const Scalar> z) const;
  /// L_pi(z, ..., z) as a tetrahedral polynomial: the crossing part of P.
  const TetraPoly& diagonal_polynomial() const { return diagonal_; }

 private:
  OrderedPartition pi_;
  TetraPoly diagonal_;
  std::vector<int> slot_of_;  // block index of each variable
};

/// E_eps[eps_1 ... eps_m P(T_pi(eps) z)] over all 2^m sign vectors.
SpaceVector sign_average_L_pi(const TetraPoly& P, const OrderedPartition& pi, std::span<const Scalar> z);

/// Max relative error between P(z) and ratio * (1/|Pi|) sum_pi L_pi(z, ..., z) over the points.
double verify_decomposition(const TetraPoly& P, int k, std::span<const Point> points);
/// Same at `count` standard complex gaussian points drawn from `seed`.
double verify_decomposition(const TetraPoly& P, int k, int count, std::uint64_t seed);

struct IdentityCheck {
  bool holds = false;
  BigCount multiplicity;         // claimed common count
  std::uint64_t mismatches = 0;  // subsets whose count differs
  std::uint64_t subsets = 0;     // number of m-subsets checked
};

inline constexpr std::uint64_t kMaxIdentityBlocks = 100'000;

/// Counts, for each m-subset A of [n], the triples (B, A_1, A_2) with |B| = k, A_1 a singleton in B,
/// A_2 an (m-1)-subset of the complement of B, A_1 u A_2 = A; compares with m binom(n-m, k-1).
IdentityCheck verify_one_variable_identity(int n, int m, int k);

/// Counts, for each m-subset A of [km], the partitions that A crosses once per block; compares with N(k,m).
IdentityCheck verify_partition_multiplicity(int k, int m);

struct RatioBoundCheck {
  BigRational ratio;
  bool lower_holds = false;  // 1 <= ratio, exact
  bool upper_holds = false;  // ratio <= e^m, 100-digit floats
};

RatioBoundCheck check_ratio_bounds(int k, int m);

// Implementation ----------------------------------------------------------

namespace detail {
void check_enumeration(int k, int m);

template <class F>
void partition_recurse(OrderedPartition& pi, int l, SubsetMask remaining, F& f) {
  if (l == pi.m - 1) {
    pi.blocks[static_cast<std::size_t>(l)] = remaining;
    f(static_cast<const OrderedPartition&>(pi));
    return;
  }
  for_each_subset_of(remaining, pi.k, [&](SubsetMask B) {
    pi.blocks[static_cast<std::size_t>(l)] = B;
    partition_recurse(pi, l + 1, remaining & ~B, f);
  });
}
}  // namespace detail

template <class F>
void for_each_partition(int k, int m, F&& f) {
  detail::check_enumeration(k, m);
  OrderedPartition pi{k, m, std::vector<SubsetMask>(static_cast<std::size_t>(m))};
  detail::partition_recurse(pi, 0, full_mask(k * m), f);
}

}  // namespace decoup
