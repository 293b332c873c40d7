#include "decoup/partitions.hpp"

#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "decoup/randomness.hpp"

namespace decoup {

namespace {

bool crosses_every_block(SubsetMask A, const OrderedPartition& pi) {
  for (auto B : pi.blocks)
    if (subset_size(A & B) != 1) return false;
  return true;
}

int partition_degree(const TetraPoly& P, int k) {
  if (k < 1) throw std::invalid_argument("block size k must be >= 1");
  const int n = P.variables();
  if (n % k != 0) throw std::invalid_argument("number of variables must equal k*m");
  const int m = n / k;
  if (!P.is_homogeneous(m)) throw std::invalid_argument("polynomial must be m-homogeneous with n = k*m");
  return m;
}

}  // namespace

int OrderedPartition::block_of(int j) const {
  for (std::size_t l = 0; l < blocks.size(); ++l)
    if (contains(blocks[l], j)) return static_cast<int>(l);
  throw std::out_of_range("index is not covered by the partition");
}

void validate(const OrderedPartition& pi) {
  if (pi.k < 1 || pi.m < 1) throw std::invalid_argument("partition needs k, m >= 1");
  if (pi.k * pi.m > kMaxVariables) throw std::invalid_argument("partition too large for subset masks");
  if (static_cast<int>(pi.blocks.size()) != pi.m) throw std::invalid_argument("partition must have m blocks");
  SubsetMask seen = 0;
  for (auto B : pi.blocks) {
    if (subset_size(B) != pi.k) throw std::invalid_argument("partition blocks must have k elements");
    if (seen & B) throw std::invalid_argument("partition blocks must be disjoint");
    seen |= B;
  }
  if (seen != full_mask(pi.n())) throw std::invalid_argument("partition blocks must cover [km]");
}

BigCount big_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigCount r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigCount big_factorial(int n) {
  BigCount r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigCount count_partitions(int k, int m) {
  if (k < 1 || m < 1) throw std::invalid_argument("count_partitions needs k, m >= 1");
  BigCount r = 1;
  for (int l = 1; l <= m; ++l) r *= big_binomial(k * l, k);
  return r;
}

BigCount multiplicity_N(int k, int m) {
  if (k < 1 || m < 1) throw std::invalid_argument("multiplicity_N needs k, m >= 1");
  BigCount r = big_factorial(m);
  for (int l = 1; l <= m; ++l) r *= big_binomial((k - 1) * l, k - 1);
  return r;
}

BigRational coefficient_ratio(int k, int m) {
  if (k < 1 || m < 1) throw std::invalid_argument("coefficient_ratio needs k, m >= 1");
  BigCount km = boost::multiprecision::pow(BigCount(k), static_cast<unsigned>(m));
  return BigRational(big_binomial(k * m, m), km);
}

RatioBoundCheck check_ratio_bounds(int k, int m) {
  using Float = boost::multiprecision::cpp_bin_float_100;
  RatioBoundCheck out;
  out.ratio = coefficient_ratio(k, m);
  const BigCount num = boost::multiprecision::numerator(out.ratio);
  const BigCount den = boost::multiprecision::denominator(out.ratio);
  out.lower_holds = num >= den;
  const Float value = Float(num) / Float(den);
  out.upper_holds = value <= boost::multiprecision::exp(Float(m));
  return out;
}

void detail::check_enumeration(int k, int m) {
  if (k < 1 || m < 1) throw std::invalid_argument("partition enumeration needs k, m >= 1");
  if (k * m > kMaxEnumerationSize) throw std::length_error("partition enumeration supports k*m <= 16");
  if (count_partitions(k, m) > kMaxPartitionCount) throw std::length_error("too many partitions to enumerate");
}

std::vector<OrderedPartition> enumerate_partitions(int k, int m) {
  std::vector<OrderedPartition> out;
  for_each_partition(k, m, [&](const OrderedPartition& pi) { out.push_back(pi); });
  return out;
}

std::vector<Scalar> t_pi_vector(const OrderedPartition& pi, std::span<const Scalar> eps) {
  validate(pi);
  if (static_cast<int>(eps.size()) != pi.m) throw std::invalid_argument("T_pi needs m signs");
  std::vector<Scalar> out(static_cast<std::size_t>(pi.n()));
  for (std::size_t l = 0; l < pi.blocks.size(); ++l)
    for (SubsetMask B = pi.blocks[l]; B != 0; B &= B - 1) out[static_cast<std::size_t>(std::countr_zero(B))] = eps[l];
  return out;
}

// PartitionOperator -------------------------------------------------------

PartitionOperator::PartitionOperator(const TetraPoly& P, const OrderedPartition& pi)
    : pi_(pi), diagonal_(P.variables(), P.space()) {
  validate(pi);
  if (P.variables() != pi.n()) throw std::invalid_argument("L_pi needs a polynomial in k*m variables");
  if (!P.is_homogeneous(pi.m)) throw std::invalid_argument("L_pi needs an m-homogeneous polynomial");
  std::vector<TetraTerm> kept;
  for (std::size_t t = 0; t < P.size(); ++t) {
    const SubsetMask A = P.subsets()[t];
    if (!crosses_every_block(A, pi)) continue;
    auto c = P.coefficient(t);
    kept.push_back({A, std::vector<Scalar>(c.begin(), c.end())});
  }
  diagonal_ = TetraPoly(P.variables(), P.space(), std::move(kept), pi.m);
  slot_of_.resize(static_cast<std::size_t>(pi.n()));
  for (int j = 0; j < pi.n(); ++j) slot_of_[static_cast<std::size_t>(j)] = pi.block_of(j);
}

void PartitionOperator::evaluate_into(std::span<const Point> args, std::span<Scalar> out) const {
  if (static_cast<int>(args.size()) != pi_.m) throw std::invalid_argument("L_pi needs m arguments");
  for (const auto& a : args)
    if (static_cast<int>(a.size()) != pi_.n()) throw std::invalid_argument("argument has wrong length");
  const std::size_t d = space().dimension();
  if (out.size() != d) throw std::invalid_argument("output buffer has wrong dimension");
  std::fill(out.begin(), out.end(), Scalar{});
  for (std::size_t t = 0; t < diagonal_.size(); ++t) {
    Scalar prod = 1.0;
    for (SubsetMask A = diagonal_.subsets()[t]; A != 0; A &= A - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(A));
      prod *= args[static_cast<std::size_t>(slot_of_[j])][j];
    }
    auto x = diagonal_.coefficient(t);
    for (std::size_t i = 0; i < d; ++i) out[i] += x[i] * prod;
  }
}

SpaceVector PartitionOperator::evaluate(std::span<const Point> args) const {
  std::vector<Scalar> out(space().dimension());
  evaluate_into(args, out);
  return SpaceVector(space(), std::move(out));
}

SpaceVector PartitionOperator::evaluate_diagonal(std::span<const Scalar> z) const { return diagonal_.evaluate(z); }

SpaceVector sign_average_L_pi(const TetraPoly& P, const OrderedPartition& pi, std::span<const Scalar> z) {
  validate(pi);
  if (P.variables() != pi.n() || static_cast<int>(z.size()) != pi.n())
    throw std::invalid_argument("sign average needs k*m variables");
  const std::size_t d = P.space().dimension();
  std::vector<Scalar> acc(d);
  std::vector<Scalar> eps(static_cast<std::size_t>(pi.m));
  const std::uint64_t total = std::uint64_t{1} << pi.m;
  for (std::uint64_t s = 0; s < total; ++s) {
    double sign = 1.0;
    for (int l = 0; l < pi.m; ++l) {
      const bool neg = (s >> l) & 1u;
      eps[static_cast<std::size_t>(l)] = neg ? -1.0 : 1.0;
      if (neg) sign = -sign;
    }
    const auto a = t_pi_vector(pi, eps);
    const auto v = substitute_pointwise(P, a, z);
    for (std::size_t i = 0; i < d; ++i) acc[i] += sign * v.coords[i];
  }
  for (auto& v : acc) v /= static_cast<double>(total);
  return SpaceVector(P.space(), std::move(acc));
}

double verify_decomposition(const TetraPoly& P, int k, std::span<const Point> points) {
  const int m = partition_degree(P, k);
  const std::size_t d = P.space().dimension();
  const BigRational ratio = coefficient_ratio(k, m);
  const double factor = ratio.convert_to<double>() / count_partitions(k, m).convert_to<double>();
  std::vector<std::vector<Scalar>> sums(points.size(), std::vector<Scalar>(d));
  for_each_partition(k, m, [&](const OrderedPartition& pi) {
    const PartitionOperator L(P, pi);
    for (std::size_t s = 0; s < points.size(); ++s) {
      const auto v = L.evaluate_diagonal(points[s]);
      for (std::size_t i = 0; i < d; ++i) sums[s][i] += v.coords[i];
    }
  });
  double worst = 0.0;
  for (std::size_t s = 0; s < points.size(); ++s) {
    for (auto& v : sums[s]) v *= factor;
    const auto lhs = P.evaluate(points[s]);
    worst = std::max(worst, relative_error(P.space(), lhs.coords, sums[s]));
  }
  return worst;
}

double verify_decomposition(const TetraPoly& P, int k, int count, std::uint64_t seed) {
  std::vector<Point> points;
  const auto dist = Distribution::gaussian();
  const SeedSpec spec{seed};
  const std::uint64_t id = stream_id("verify-decomposition");
  for (int s = 0; s < count; ++s)
    points.push_back(sample_vector(dist, static_cast<std::size_t>(P.variables()), spec,
                                   StreamLabel{id, static_cast<std::uint64_t>(s), 0}));
  return verify_decomposition(P, k, points);
}

IdentityCheck verify_one_variable_identity(int n, int m, int k) {
  if (n < 1 || n > kMaxVariables) throw std::invalid_argument("identity check needs 1 <= n <= 63");
  if (m < 1 || m > n || k < 1 || k > n) throw std::invalid_argument("identity check needs 1 <= m, k <= n");
  if (binom_u64(n, k) > kMaxIdentityBlocks) throw std::length_error("identity check needs binom(n,k) <= 1e5");
  if (binom_u64(n, m) > kMaxSubsetSupDimension) throw std::length_error("too many m-subsets to count");
  std::vector<std::uint64_t> counts(binom_u64(n, m));
  const SubsetMask all = full_mask(n);
  for_each_subset_of(all, k, [&](SubsetMask B) {
    for (SubsetMask J = B; J != 0; J &= J - 1) {
      const SubsetMask single = J & -J;
      for_each_subset_of(all & ~B, m - 1, [&](SubsetMask A2) { ++counts[colex_rank(single | A2)]; });
    }
  });
  IdentityCheck out;
  out.multiplicity = BigCount(m) * big_binomial(n - m, k - 1);
  out.subsets = counts.size();
  for (auto c : counts)
    if (BigCount(c) != out.multiplicity) ++out.mismatches;
  out.holds = out.mismatches == 0;
  return out;
}

IdentityCheck verify_partition_multiplicity(int k, int m) {
  detail::check_enumeration(k, m);
  const int n = k * m;
  std::vector<std::uint64_t> counts(binom_u64(n, m));
  std::vector<int> elems;
  for_each_partition(k, m, [&](const OrderedPartition& pi) {
    // one pick per block, odometer style
    std::vector<std::vector<int>> choices;
    for (auto B : pi.blocks) choices.push_back(subset_elements(B));
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      SubsetMask A = 0;
      for (std::size_t l = 0; l < idx.size(); ++l) A |= SubsetMask{1} << choices[l][idx[l]];
      ++counts[colex_rank(A)];
      std::size_t l = 0;
      while (l < idx.size() && ++idx[l] == choices[l].size()) idx[l++] = 0;
      if (l == idx.size()) break;
    }
  });
  IdentityCheck out;
  out.multiplicity = multiplicity_N(k, m);
  out.subsets = counts.size();
  for (auto c : counts)
    if (BigCount(c) != out.multiplicity) ++out.mismatches;
  out.holds = out.mismatches == 0;
  return out;
}

}  // namespace decoup
