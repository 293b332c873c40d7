#include "decoup/multilinear.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace decoup {

namespace {

int require_homogeneous_degree(const AnyPoly& P) {
  const auto m = std::visit([](const auto& p) { return p.homogeneous_degree(); }, P);
  if (!m) throw std::invalid_argument("multilinear operator needs an m-homogeneous source");
  if (*m < 1) throw std::invalid_argument("multilinear operator needs degree m >= 1");
  const bool ok = std::visit([&](const auto& p) { return p.is_homogeneous(*m); }, P);
  if (!ok) throw std::invalid_argument("multilinear operator needs an m-homogeneous source");
  return *m;
}

void check_args(const SymMultilinear& M, std::span<const Point> args) {
  if (static_cast<int>(args.size()) != M.degree()) throw std::invalid_argument("wrong number of arguments");
  for (const auto& a : args)
    if (static_cast<int>(a.size()) != M.variables()) throw std::invalid_argument("argument has wrong length");
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

bool lex_less(const Point& a, const Point& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

// Permanent of the r x r matrix a(l, c) = slots[l][cols[c]], by dynamic programming over
// the set of used columns.
Scalar permanent(std::span<const Point* const> slots, const int* cols, int r) {
  std::array<Scalar, 1 << kMaxDirectDegree> dp{};
  dp[0] = 1.0;
  const unsigned full = (1u << r) - 1;
  for (unsigned mask = 0; mask < full; ++mask) {
    if (dp[mask] == Scalar{}) continue;
    const auto& row = *slots[static_cast<std::size_t>(std::popcount(mask))];
    for (int c = 0; c < r; ++c) {
      if (mask & (1u << c)) continue;
      dp[mask | (1u << c)] += dp[mask] * row[static_cast<std::size_t>(cols[c])];
    }
  }
  return dp[full];
}

}  // namespace

SymMultilinear::SymMultilinear(TetraPoly P) : source_(std::move(P)), m_(require_homogeneous_degree(source_)) {}

SymMultilinear::SymMultilinear(GenPoly P) : source_(std::move(P)), m_(require_homogeneous_degree(source_)) {}

int SymMultilinear::variables() const {
  return std::visit([](const auto& p) { return p.variables(); }, source_);
}

const NormedSpace& SymMultilinear::space() const {
  return std::visit([](const auto& p) -> const NormedSpace& { return p.space(); }, source_);
}

SpaceVector SymMultilinear::polynomial(std::span<const Scalar> z) const {
  return std::visit([&](const auto& p) { return p.evaluate(z); }, source_);
}

void SymMultilinear::polynomial_into(std::span<const Scalar> z, std::span<Scalar> out) const {
  std::visit([&](const auto& p) { p.evaluate_into(z, out); }, source_);
}

SpaceVector eval_direct(const SymMultilinear& M, std::span<const Point> args) {
  if (!M.tetrahedral()) throw std::invalid_argument("eval_direct needs a tetrahedral source; use polarization");
  if (M.degree() > kMaxDirectDegree) throw std::invalid_argument("eval_direct supports m <= 6");
  check_args(M, args);
  const int m = M.degree();
  std::vector<const Point*> slots;
  for (const auto& a : args) slots.push_back(&a);
  std::stable_sort(slots.begin(), slots.end(), [](const Point* a, const Point* b) { return lex_less(*a, *b); });

  const TetraPoly& P = M.tetra();
  const std::size_t d = P.space().dimension();
  std::vector<Scalar> out(d);
  std::array<int, kMaxDirectDegree> cols{};
  for (std::size_t t = 0; t < P.size(); ++t) {
    int r = 0;
    for (SubsetMask A = P.subsets()[t]; A != 0; A &= A - 1) cols[static_cast<std::size_t>(r++)] = std::countr_zero(A);
    const Scalar s = permanent(slots, cols.data(), m);
    if (s == Scalar{}) continue;
    auto x = P.coefficient(t);
    for (std::size_t i = 0; i < d; ++i) out[i] += x[i] * s;
  }
  const double scale = 1.0 / factorial(m);
  for (auto& v : out) v *= scale;
  return SpaceVector(P.space(), std::move(out));
}

SpaceVector eval_polarization(const SymMultilinear& M, std::span<const Point> args) {
  if (M.degree() > kMaxPolarizationDegree) throw std::invalid_argument("polarization supports m <= 25");
  check_args(M, args);
  const int m = M.degree();
  const std::size_t n = static_cast<std::size_t>(M.variables());
  const std::size_t d = M.space().dimension();
  std::vector<Scalar> out(d), value(d);
  Point w(n);
  // eps and -eps give equal terms by homogeneity, so eps_1 = +1 is fixed.
  const std::uint64_t count = std::uint64_t{1} << (m - 1);
  for (std::uint64_t s = 0; s < count; ++s) {
    std::fill(w.begin(), w.end(), Scalar{});
    double sign = 1.0;
    for (int l = 0; l < m; ++l) {
      const bool neg = l > 0 && ((s >> (l - 1)) & 1u);
      if (neg) sign = -sign;
      const double e = neg ? -1.0 : 1.0;
      const auto& z = args[static_cast<std::size_t>(l)];
      for (std::size_t j = 0; j < n; ++j) w[j] += e * z[j];
    }
    M.polynomial_into(w, value);
    for (std::size_t i = 0; i < d; ++i) out[i] += sign * value[i];
  }
  const double scale = 1.0 / (factorial(m) * static_cast<double>(count));
  for (auto& v : out) v *= scale;
  return SpaceVector(M.space(), std::move(out));
}

void eval_one_variable_into(const SymMultilinear& M, std::span<const Scalar> u, std::span<const Scalar> z,
                            std::span<Scalar> out) {
  const std::size_t n = static_cast<std::size_t>(M.variables());
  if (u.size() != n || z.size() != n) throw std::invalid_argument("eval_one_variable: dimension mismatch");
  const std::size_t d = M.space().dimension();
  if (out.size() != d) throw std::invalid_argument("output buffer has wrong dimension");
  const int m = M.degree();
  if (!M.tetrahedral()) {
    std::vector<Point> args(static_cast<std::size_t>(m), Point(z.begin(), z.end()));
    args[0].assign(u.begin(), u.end());
    const auto r = eval_polarization(M, args);
    std::copy(r.coords.begin(), r.coords.end(), out.begin());
    return;
  }
  const TetraPoly& P = M.tetra();
  std::fill(out.begin(), out.end(), Scalar{});
  std::vector<int> e(static_cast<std::size_t>(m));
  std::vector<Scalar> suffix(static_cast<std::size_t>(m) + 1);
  for (std::size_t t = 0; t < P.size(); ++t) {
    int r = 0;
    for (SubsetMask A = P.subsets()[t]; A != 0; A &= A - 1) e[static_cast<std::size_t>(r++)] = std::countr_zero(A);
    suffix[static_cast<std::size_t>(m)] = 1.0;
    for (int i = m - 1; i >= 0; --i)
      suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i) + 1] * z[static_cast<std::size_t>(e[static_cast<std::size_t>(i)])];
    Scalar prefix = 1.0, s = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(e[static_cast<std::size_t>(i)]);
      s += u[j] * prefix * suffix[static_cast<std::size_t>(i) + 1];
      prefix *= z[j];
    }
    auto x = P.coefficient(t);
    for (std::size_t i = 0; i < d; ++i) out[i] += x[i] * s;
  }
  const double scale = 1.0 / m;
  for (auto& v : out) v *= scale;
}

SpaceVector eval_one_variable(const SymMultilinear& M, std::span<const Scalar> u, std::span<const Scalar> z) {
  std::vector<Scalar> out(M.space().dimension());
  eval_one_variable_into(M, u, z, out);
  return SpaceVector(M.space(), std::move(out));
}

SpaceVector evaluate(const SymMultilinear& M, std::span<const Point> args) {
  if (M.tetrahedral() && M.degree() <= kMaxDirectDegree) return eval_direct(M, args);
  return eval_polarization(M, args);
}

std::vector<Scalar> last_slot_vectors(const SymMultilinear& M, std::span<const Point> leading) {
  if (!M.tetrahedral()) throw std::invalid_argument("last_slot_vectors needs a tetrahedral source");
  const int m = M.degree();
  if (m > kMaxDirectDegree) throw std::invalid_argument("last_slot_vectors supports m <= 6");
  if (static_cast<int>(leading.size()) != m - 1) throw std::invalid_argument("expected m - 1 leading arguments");
  const TetraPoly& P = M.tetra();
  const std::size_t n = static_cast<std::size_t>(P.variables());
  for (const auto& a : leading)
    if (a.size() != n) throw std::invalid_argument("argument has wrong length");
  const std::size_t d = P.space().dimension();
  std::vector<const Point*> slots;
  for (const auto& a : leading) slots.push_back(&a);
  std::vector<Scalar> out(n * d);
  std::array<int, kMaxDirectDegree> cols{};
  const double scale = 1.0 / factorial(m);
  for (std::size_t t = 0; t < P.size(); ++t) {
    const SubsetMask A = P.subsets()[t];
    auto x = P.coefficient(t);
    for (SubsetMask B = A; B != 0; B &= B - 1) {
      const int j = std::countr_zero(B);
      int r = 0;
      for (SubsetMask C = A & ~(SubsetMask{1} << j); C != 0; C &= C - 1)
        cols[static_cast<std::size_t>(r++)] = std::countr_zero(C);
      const Scalar s = permanent(slots, cols.data(), m - 1) * scale;
      Scalar* dst = &out[static_cast<std::size_t>(j) * d];
      for (std::size_t i = 0; i < d; ++i) dst[i] += x[i] * s;
    }
  }
  return out;
}

}  // namespace decoup
