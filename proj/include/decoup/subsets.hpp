#pragma once

// Bitmask helpers for subsets of [n] = {0, ..., n-1}, n <= 63.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace decoup {

using SubsetMask = std::uint64_t;

inline constexpr int kMaxVariables = 63;

inline int subset_size(SubsetMask A) { return std::popcount(A); }

inline SubsetMask full_mask(int n) {
  return n >= 64 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1;
}

inline bool contains(SubsetMask A, int j) { return (A >> j) & 1u; }

// Elements of A in increasing order.
inline std::vector<int> subset_elements(SubsetMask A) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::popcount(A)));
  while (A != 0) {
    out.push_back(std::countr_zero(A));
    A &= A - 1;
  }
  return out;
}

inline SubsetMask mask_of(const std::vector<int>& elements) {
  SubsetMask A = 0;
  for (int e : elements) {
    if (e < 0 || e >= kMaxVariables) throw std::out_of_range("subset element out of range");
    A |= SubsetMask{1} << e;
  }
  return A;
}

// binom(n, k) for n <= 63 from a Pascal table; every entry fits in 64 bits.
std::uint64_t binom_u64(int n, int k);

// Colexicographic rank of an m-subset: sum_i binom(c_i, i + 1) over the sorted
// elements c_0 < c_1 < ... . Colex order on m-subsets equals numeric mask order.
std::uint64_t colex_rank(SubsetMask A);
SubsetMask colex_unrank(std::uint64_t rank, int m);

// Next mask with the same popcount in increasing numeric order (Gosper).
inline SubsetMask next_same_popcount(SubsetMask v) {
  const SubsetMask t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

// Scatter the low bits of `bits` onto the set positions of `support` (pdep).
inline SubsetMask deposit_bits(SubsetMask bits, SubsetMask support) {
  SubsetMask out = 0;
  while (support != 0 && bits != 0) {
    const SubsetMask low = support & -support;
    if (bits & 1u) out |= low;
    bits >>= 1;
    support &= support - 1;
  }
  return out;
}

// Calls f(A) for every k-subset A of `support` in increasing (colex) order.
template <class F>
void for_each_subset_of(SubsetMask support, int k, F&& f) {
  const int size = std::popcount(support);
  if (k < 0 || k > size) return;
  if (k == 0) {
    f(SubsetMask{0});
    return;
  }
  const SubsetMask last = full_mask(size) ^ full_mask(size - k);
  for (SubsetMask v = full_mask(k);; v = next_same_popcount(v)) {
    f(deposit_bits(v, support));
    if (v == last) break;
  }
}

}  // namespace decoup
