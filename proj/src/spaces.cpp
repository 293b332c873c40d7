#include "decoup/spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace decoup {

namespace {

struct PascalTable {
  std::array<std::array<std::uint64_t, 64>, 64> c{};
  PascalTable() {
    for (int n = 0; n < 64; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0);
    }
  }
};

const PascalTable& pascal() {
  static const PascalTable table;
  return table;
}

}  // namespace

std::uint64_t binom_u64(int n, int k) {
  if (n < 0 || n > kMaxVariables) throw std::out_of_range("binom_u64: n out of range");
  if (k < 0 || k > n) return 0;
  return pascal().c[n][k];
}

std::uint64_t colex_rank(SubsetMask A) {
  std::uint64_t rank = 0;
  int i = 0;
  while (A != 0) {
    const int c = std::countr_zero(A);
    rank += binom_u64(c, i + 1);
    ++i;
    A &= A - 1;
  }
  return rank;
}

SubsetMask colex_unrank(std::uint64_t rank, int m) {
  SubsetMask A = 0;
  for (int i = m; i >= 1; --i) {
    int c = i - 1;
    while (c + 1 <= kMaxVariables && binom_u64(c + 1, i) <= rank) ++c;
    rank -= binom_u64(c, i);
    A |= SubsetMask{1} << c;
  }
  return A;
}

NormedSpace NormedSpace::lq(double q, std::size_t d) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq space requires q >= 1");
  if (d < 1) throw std::invalid_argument("lq space requires d >= 1");
  NormedSpace s;
  s.kind_ = SpaceKind::LqSequence;
  s.q_ = q;
  s.dim_ = d;
  return s;
}

NormedSpace NormedSpace::subset_sup(int n, int m) {
  if (n < 1 || n > kMaxVariables) throw std::invalid_argument("subset_sup requires 1 <= n <= 63");
  if (m < 0 || m > n) throw std::invalid_argument("subset_sup requires 0 <= m <= n");
  const std::uint64_t dim = binom_u64(n, m);
  if (dim > kMaxSubsetSupDimension) throw std::length_error("subset_sup dimension too large to materialize");
  NormedSpace s;
  s.kind_ = SpaceKind::SubsetSup;
  s.q_ = kInfinity;
  s.dim_ = static_cast<std::size_t>(dim);
  s.n_ = n;
  s.m_ = m;
  return s;
}

std::size_t NormedSpace::subset_index(SubsetMask A) const {
  if (kind_ != SpaceKind::SubsetSup) throw std::invalid_argument("subset_index on a non-subset space");
  if ((A & ~full_mask(n_)) != 0 || decoup::subset_size(A) != m_)
    throw std::out_of_range("subset is not an m-subset of [n]");
  return static_cast<std::size_t>(colex_rank(A));
}

SubsetMask NormedSpace::subset_at(std::size_t index) const {
  if (kind_ != SpaceKind::SubsetSup) throw std::invalid_argument("subset_at on a non-subset space");
  if (index >= dim_) throw std::out_of_range("subset index out of range");
  return colex_unrank(index, m_);
}

double NormedSpace::norm(std::span<const Scalar> v) const {
  if (v.size() != dim_) throw std::invalid_argument("coordinate count does not match space dimension");
  if (std::isinf(q_)) {
    double best = 0.0;
    for (const auto& c : v) best = std::max(best, std::abs(c));
    return best;
  }
  if (q_ == 1.0) {
    double s = 0.0;
    for (const auto& c : v) s += std::abs(c);
    return s;
  }
  double s = 0.0;
  if (q_ == 2.0) {
    for (const auto& c : v) s += std::norm(c);
  } else {
    for (const auto& c : v) s += std::pow(std::abs(c), q_);
  }
  if (s > 0.0 && std::isfinite(s) && s >= std::numeric_limits<double>::min())
    return q_ == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / q_);
  // Powers under- or overflowed: rescale by the largest modulus.
  double top = 0.0;
  for (const auto& c : v) top = std::max(top, std::abs(c));
  if (top == 0.0 || !std::isfinite(top)) return top;
  s = 0.0;
  for (const auto& c : v) s += std::pow(std::abs(c) / top, q_);
  return top * std::pow(s, 1.0 / q_);
}

double NormedSpace::norm_pow(std::span<const Scalar> v, double p) const {
  if (kind_ == SpaceKind::LqSequence && q_ == p && v.size() == dim_) {
    if (p == 2.0) {
      double s = 0.0;
      for (const auto& c : v) s += std::norm(c);
      return s;
    }
    if (p == 1.0) return norm(v);
    double s = 0.0;
    for (const auto& c : v) s += std::pow(std::abs(c), q_);
    return s;
  }
  const double r = norm(v);
  if (p == 1.0) return r;
  if (p == 2.0) return r * r;
  return std::pow(r, p);
}

std::string NormedSpace::describe() const {
  std::ostringstream os;
  if (kind_ == SpaceKind::SubsetSup) {
    os << "subset_sup(n=" << n_ << ",m=" << m_ << ")";
  } else {
    os << "l";
    if (std::isinf(q_)) {
      os << "inf";
    } else {
      os << q_;
    }
    os << "^" << dim_;
  }
  return os.str();
}

SpaceVector::SpaceVector(NormedSpace s, std::vector<Scalar> c) : space(std::move(s)), coords(std::move(c)) {
  if (coords.size() != space.dimension())
    throw std::invalid_argument("coordinate count does not match space dimension");
  for (const auto& x : coords)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("space vector coordinates must be finite");
}

SpaceVector SpaceVector::zero(const NormedSpace& s) {
  return SpaceVector(s, std::vector<Scalar>(s.dimension()));
}

double norm(const SpaceVector& v) { return v.space.norm(v.coords); }

SpaceVector canonical_basis_vector(const NormedSpace& space, std::size_t index) {
  if (index >= space.dimension()) throw std::out_of_range("basis index out of range");
  std::vector<Scalar> c(space.dimension());
  c[index] = 1.0;
  return SpaceVector(space, std::move(c));
}

SpaceVector subset_basis_vector(const NormedSpace& space, SubsetMask A) {
  return canonical_basis_vector(space, space.subset_index(A));
}

double relative_error(const NormedSpace& space, std::span<const Scalar> a, std::span<const Scalar> b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_error: size mismatch");
  std::vector<Scalar> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double scale = std::max(space.norm(a), space.norm(b));
  const double d = space.norm(diff);
  if (scale == 0.0) return d;
  return d / scale;
}

void to_json(nlohmann::json& j, const NormedSpace& s) {
  if (s.kind() == SpaceKind::SubsetSup) {
    j = {{"kind", "subset_sup"}, {"n", s.ambient_variables()}, {"m", s.subset_size()}};
  } else if (std::isinf(s.q())) {
    j = {{"kind", "lq"}, {"q", "inf"}, {"d", s.dimension()}};
  } else {
    j = {{"kind", "lq"}, {"q", s.q()}, {"d", s.dimension()}};
  }
}

void from_json(const nlohmann::json& j, NormedSpace& s) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lq") {
    const auto& q = j.at("q");
    double qv = 0.0;
    if (q.is_string()) {
      const auto text = q.get<std::string>();
      if (text != "inf" && text != "infinity") throw std::invalid_argument("unknown q: " + text);
      qv = kInfinity;
    } else {
      qv = q.get<double>();
    }
    s = NormedSpace::lq(qv, j.at("d").get<std::size_t>());
  } else if (kind == "subset_sup") {
    s = NormedSpace::subset_sup(j.at("n").get<int>(), j.at("m").get<int>());
  } else {
    throw std::invalid_argument("unknown space kind: " + kind);
  }
}

}  // namespace decoup
