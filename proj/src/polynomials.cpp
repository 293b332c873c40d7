#include "decoup/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace decoup {

namespace {

void check_point(std::span<const Scalar> z, int n, const char* what) {
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument(std::string(what) + ": point has wrong length");
}

void check_coeff(const std::vector<Scalar>& c, const NormedSpace& space) {
  if (c.size() != space.dimension()) throw std::invalid_argument("coefficient dimension does not match space");
  for (const auto& x : c)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw std::invalid_argument("coefficients must be finite");
}

bool all_zero(const std::vector<Scalar>& c) {
  return std::all_of(c.begin(), c.end(), [](const Scalar& x) { return x == Scalar{}; });
}

// Neumaier summation state per coordinate.
struct CompensatedAccumulator {
  std::vector<Scalar> sum, comp;
  explicit CompensatedAccumulator(std::size_t d) : sum(d), comp(d) {}

  static void add1(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }

  void add(std::size_t i, Scalar x) {
    double sr = sum[i].real(), si = sum[i].imag(), cr = comp[i].real(), ci = comp[i].imag();
    add1(sr, cr, x.real());
    add1(si, ci, x.imag());
    sum[i] = {sr, si};
    comp[i] = {cr, ci};
  }

  void store(std::span<Scalar> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sum[i] + comp[i];
  }
};

Scalar monomial(SubsetMask A, std::span<const Scalar> z) {
  Scalar prod = 1.0;
  while (A != 0) {
    prod *= z[static_cast<std::size_t>(std::countr_zero(A))];
    A &= A - 1;
  }
  return prod;
}

Scalar monomial(const MultiIndex& alpha, std::span<const Scalar> z) {
  Scalar prod = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    for (std::uint32_t e = 0; e < alpha[j]; ++e) prod *= z[j];
  return prod;
}

}  // namespace

// TetraPoly ---------------------------------------------------------------

TetraPoly::TetraPoly(int n, NormedSpace space, std::optional<int> declared_degree)
    : TetraPoly(n, std::move(space), {}, declared_degree) {}

TetraPoly::TetraPoly(int n, NormedSpace space, std::vector<TetraTerm> terms, std::optional<int> declared_degree)
    : n_(n), space_(std::move(space)), declared_(declared_degree) {
  if (n < 0 || n > kMaxVariables) throw std::invalid_argument("TetraPoly supports 0 <= n <= 63 variables");
  if (declared_ && (*declared_ < 0 || *declared_ > n)) throw std::invalid_argument("declared degree out of range");
  std::map<SubsetMask, std::vector<Scalar>> merged;
  for (auto& t : terms) {
    if ((t.subset & ~full_mask(n)) != 0) throw std::invalid_argument("term subset is not contained in [n]");
    check_coeff(t.coeff, space_);
    if (declared_ && subset_size(t.subset) != *declared_)
      throw std::invalid_argument("term degree differs from the declared homogeneity degree");
    auto [it, inserted] = merged.try_emplace(t.subset, std::move(t.coeff));
    if (!inserted)
      for (std::size_t i = 0; i < it->second.size(); ++i) it->second[i] += t.coeff[i];
  }
  const std::size_t d = space_.dimension();
  for (auto& [A, c] : merged) {
    if (all_zero(c)) continue;
    subsets_.push_back(A);
    coeffs_.insert(coeffs_.end(), c.begin(), c.end());
  }
  (void)d;
}

int TetraPoly::degree() const {
  int best = 0;
  for (auto A : subsets_) best = std::max(best, subset_size(A));
  return best;
}

std::optional<int> TetraPoly::homogeneous_degree() const {
  if (declared_) return declared_;
  if (subsets_.empty()) return std::nullopt;
  const int m = subset_size(subsets_.front());
  for (auto A : subsets_)
    if (subset_size(A) != m) return std::nullopt;
  return m;
}

bool TetraPoly::is_homogeneous(int m) const {
  return std::all_of(subsets_.begin(), subsets_.end(), [m](SubsetMask A) { return subset_size(A) == m; });
}

std::span<const Scalar> TetraPoly::coefficient(std::size_t term) const {
  const std::size_t d = space_.dimension();
  return std::span<const Scalar>(coeffs_).subspan(term * d, d);
}

SpaceVector TetraPoly::coefficient_of(SubsetMask A) const {
  auto it = std::lower_bound(subsets_.begin(), subsets_.end(), A);
  if (it == subsets_.end() || *it != A) return SpaceVector::zero(space_);
  auto c = coefficient(static_cast<std::size_t>(it - subsets_.begin()));
  return SpaceVector(space_, std::vector<Scalar>(c.begin(), c.end()));
}

SpaceVector TetraPoly::evaluate(std::span<const Scalar> z) const {
  check_point(z, n_, "TetraPoly::evaluate");
  for (const auto& x : z)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw std::invalid_argument("point must be finite");
  std::vector<Scalar> out(space_.dimension());
  evaluate_into(z, out);
  return SpaceVector(space_, std::move(out));
}

void TetraPoly::evaluate_into(std::span<const Scalar> z, std::span<Scalar> out) const {
  check_point(z, n_, "TetraPoly::evaluate");
  const std::size_t d = space_.dimension();
  if (out.size() != d) throw std::invalid_argument("output buffer has wrong dimension");
  if (subsets_.size() > kCompensatedSumThreshold) {
    CompensatedAccumulator acc(d);
    for (std::size_t t = 0; t < subsets_.size(); ++t) {
      const Scalar zA = monomial(subsets_[t], z);
      const Scalar* x = &coeffs_[t * d];
      for (std::size_t i = 0; i < d; ++i) acc.add(i, x[i] * zA);
    }
    acc.store(out);
    return;
  }
  std::fill(out.begin(), out.end(), Scalar{});
  for (std::size_t t = 0; t < subsets_.size(); ++t) {
    const Scalar zA = monomial(subsets_[t], z);
    const Scalar* x = &coeffs_[t * d];
    for (std::size_t i = 0; i < d; ++i) out[i] += x[i] * zA;
  }
}

TetraPoly TetraPoly::scaled(Scalar c) const {
  auto ts = terms();
  for (auto& t : ts)
    for (auto& x : t.coeff) x *= c;
  return TetraPoly(n_, space_, std::move(ts), declared_);
}

TetraPoly TetraPoly::with_variables(int n) const {
  if (n < n_) throw std::invalid_argument("with_variables cannot drop variables");
  return TetraPoly(n, space_, terms(), declared_);
}

std::vector<TetraTerm> TetraPoly::terms() const {
  std::vector<TetraTerm> out;
  out.reserve(size());
  for (std::size_t t = 0; t < size(); ++t) {
    auto c = coefficient(t);
    out.push_back({subsets_[t], std::vector<Scalar>(c.begin(), c.end())});
  }
  return out;
}

TetraPoly operator+(const TetraPoly& a, const TetraPoly& b) {
  if (!(a.space() == b.space())) throw std::invalid_argument("cannot add polynomials in different spaces");
  auto ts = a.terms();
  auto tb = b.terms();
  ts.insert(ts.end(), std::make_move_iterator(tb.begin()), std::make_move_iterator(tb.end()));
  return TetraPoly(std::max(a.variables(), b.variables()), a.space(), std::move(ts));
}

// GenPoly -----------------------------------------------------------------

GenPoly::GenPoly(int n, NormedSpace space, std::optional<int> declared_degree)
    : GenPoly(n, std::move(space), {}, declared_degree) {}

GenPoly::GenPoly(int n, NormedSpace space, std::vector<GenTerm> terms, std::optional<int> declared_degree)
    : n_(n), space_(std::move(space)), declared_(declared_degree) {
  if (n < 0) throw std::invalid_argument("GenPoly requires n >= 0");
  std::map<MultiIndex, std::vector<Scalar>> merged;
  for (auto& t : terms) {
    if (static_cast<int>(t.alpha.size()) != n) throw std::invalid_argument("multi-index length differs from n");
    check_coeff(t.coeff, space_);
    if (declared_ && multi_index_degree(t.alpha) > *declared_)
      throw std::invalid_argument("term degree exceeds the declared degree");
    auto [it, inserted] = merged.try_emplace(t.alpha, std::move(t.coeff));
    if (!inserted)
      for (std::size_t i = 0; i < it->second.size(); ++i) it->second[i] += t.coeff[i];
  }
  for (auto& [alpha, c] : merged) {
    if (all_zero(c)) continue;
    alphas_.push_back(alpha);
    coeffs_.insert(coeffs_.end(), c.begin(), c.end());
  }
}

int GenPoly::degree() const {
  int best = 0;
  for (const auto& a : alphas_) best = std::max(best, multi_index_degree(a));
  return best;
}

std::optional<int> GenPoly::homogeneous_degree() const {
  if (alphas_.empty()) return std::nullopt;
  const int m = multi_index_degree(alphas_.front());
  for (const auto& a : alphas_)
    if (multi_index_degree(a) != m) return std::nullopt;
  return m;
}

bool GenPoly::is_homogeneous(int m) const {
  return std::all_of(alphas_.begin(), alphas_.end(), [m](const MultiIndex& a) { return multi_index_degree(a) == m; });
}

bool GenPoly::is_tetrahedral() const {
  return std::all_of(alphas_.begin(), alphas_.end(), [](const MultiIndex& a) {
    return std::all_of(a.begin(), a.end(), [](std::uint32_t e) { return e <= 1; });
  });
}

std::span<const Scalar> GenPoly::coefficient(std::size_t term) const {
  const std::size_t d = space_.dimension();
  return std::span<const Scalar>(coeffs_).subspan(term * d, d);
}

SpaceVector GenPoly::evaluate(std::span<const Scalar> z) const {
  std::vector<Scalar> out(space_.dimension());
  evaluate_into(z, out);
  return SpaceVector(space_, std::move(out));
}

void GenPoly::evaluate_into(std::span<const Scalar> z, std::span<Scalar> out) const {
  check_point(z, n_, "GenPoly::evaluate");
  const std::size_t d = space_.dimension();
  if (out.size() != d) throw std::invalid_argument("output buffer has wrong dimension");
  if (alphas_.size() > kCompensatedSumThreshold) {
    CompensatedAccumulator acc(d);
    for (std::size_t t = 0; t < alphas_.size(); ++t) {
      const Scalar za = monomial(alphas_[t], z);
      for (std::size_t i = 0; i < d; ++i) acc.add(i, coeffs_[t * d + i] * za);
    }
    acc.store(out);
    return;
  }
  std::fill(out.begin(), out.end(), Scalar{});
  for (std::size_t t = 0; t < alphas_.size(); ++t) {
    const Scalar za = monomial(alphas_[t], z);
    for (std::size_t i = 0; i < d; ++i) out[i] += coeffs_[t * d + i] * za;
  }
}

std::vector<GenTerm> GenPoly::terms() const {
  std::vector<GenTerm> out;
  for (std::size_t t = 0; t < size(); ++t) {
    auto c = coefficient(t);
    out.push_back({alphas_[t], std::vector<Scalar>(c.begin(), c.end())});
  }
  return out;
}

GenPoly operator+(const GenPoly& a, const GenPoly& b) {
  if (!(a.space() == b.space()) || a.variables() != b.variables())
    throw std::invalid_argument("cannot add polynomials with different shapes");
  auto ts = a.terms();
  auto tb = b.terms();
  ts.insert(ts.end(), std::make_move_iterator(tb.begin()), std::make_move_iterator(tb.end()));
  return GenPoly(a.variables(), a.space(), std::move(ts));
}

// Free operations ---------------------------------------------------------

GenPoly homogeneous_projection(const GenPoly& P, int k) {
  if (k < 0) throw std::invalid_argument("projection degree must be nonnegative");
  std::vector<GenTerm> kept;
  for (auto& t : P.terms())
    if (multi_index_degree(t.alpha) == k) kept.push_back(std::move(t));
  return GenPoly(P.variables(), P.space(), std::move(kept));
}

TetraPoly homogeneous_projection(const TetraPoly& P, int k) {
  if (k < 0) throw std::invalid_argument("projection degree must be nonnegative");
  std::vector<TetraTerm> kept;
  for (auto& t : P.terms())
    if (subset_size(t.subset) == k) kept.push_back(std::move(t));
  return TetraPoly(P.variables(), P.space(), std::move(kept));
}

TetraPoly tetrahedralize(const GenPoly& P) {
  if (P.variables() > kMaxVariables) throw std::invalid_argument("too many variables for subset masks");
  std::vector<TetraTerm> out;
  for (auto& t : P.terms()) {
    SubsetMask A = 0;
    for (std::size_t j = 0; j < t.alpha.size(); ++j) {
      if (t.alpha[j] > 1) throw std::invalid_argument("polynomial is not tetrahedral");
      if (t.alpha[j] == 1) A |= SubsetMask{1} << j;
    }
    out.push_back({A, std::move(t.coeff)});
  }
  return TetraPoly(P.variables(), P.space(), std::move(out));
}

GenPoly to_general(const TetraPoly& P) {
  std::vector<GenTerm> out;
  for (auto& t : P.terms()) {
    MultiIndex alpha(static_cast<std::size_t>(P.variables()), 0);
    for (int j : subset_elements(t.subset)) alpha[static_cast<std::size_t>(j)] = 1;
    out.push_back({std::move(alpha), std::move(t.coeff)});
  }
  return GenPoly(P.variables(), P.space(), std::move(out));
}

SpaceVector gradient_pairing(const TetraPoly& P, std::span<const Scalar> z, std::span<const Scalar> lambda) {
  check_point(z, P.variables(), "gradient_pairing");
  check_point(lambda, P.variables(), "gradient_pairing");
  const std::size_t d = P.space().dimension();
  std::vector<Scalar> out(d);
  for (std::size_t t = 0; t < P.size(); ++t) {
    const SubsetMask A = P.subsets()[t];
    Scalar weight = 0.0;
    for (SubsetMask B = A; B != 0; B &= B - 1) weight += lambda[static_cast<std::size_t>(std::countr_zero(B))];
    const Scalar f = weight * monomial(A, z);
    auto x = P.coefficient(t);
    for (std::size_t i = 0; i < d; ++i) out[i] += x[i] * f;
  }
  return SpaceVector(P.space(), std::move(out));
}

std::vector<SpaceVector> gradient(const TetraPoly& P, std::span<const Scalar> z) {
  check_point(z, P.variables(), "gradient");
  const std::size_t d = P.space().dimension();
  std::vector<std::vector<Scalar>> parts(static_cast<std::size_t>(P.variables()), std::vector<Scalar>(d));
  for (std::size_t t = 0; t < P.size(); ++t) {
    const SubsetMask A = P.subsets()[t];
    auto x = P.coefficient(t);
    for (SubsetMask B = A; B != 0; B &= B - 1) {
      const int j = std::countr_zero(B);
      const Scalar rest = monomial(A & ~(SubsetMask{1} << j), z);
      auto& dst = parts[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < d; ++i) dst[i] += x[i] * rest;
    }
  }
  std::vector<SpaceVector> out;
  out.reserve(parts.size());
  for (auto& p : parts) out.emplace_back(P.space(), std::move(p));
  return out;
}

SpaceVector substitute_pointwise(const TetraPoly& P, std::span<const Scalar> a, std::span<const Scalar> z) {
  check_point(a, P.variables(), "substitute_pointwise");
  check_point(z, P.variables(), "substitute_pointwise");
  Point az(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) az[j] = a[j] * z[j];
  return P.evaluate(az);
}

SpaceVector substitute_pointwise(const GenPoly& P, std::span<const Scalar> a, std::span<const Scalar> z) {
  check_point(a, P.variables(), "substitute_pointwise");
  check_point(z, P.variables(), "substitute_pointwise");
  Point az(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) az[j] = a[j] * z[j];
  return P.evaluate(az);
}

}  // namespace decoup
