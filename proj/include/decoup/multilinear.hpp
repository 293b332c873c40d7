#pragma once

#include <span>
#include <variant>
#include <vector>

#include "decoup/polynomials.hpp"

namespace decoup {

/// The symmetric m-linear operator M with M(z, ..., z) = P(z) for an m-homogeneous P.
class SymMultilinear {
 public:
  explicit SymMultilinear(TetraPoly P);
  explicit SymMultilinear(GenPoly P);

  int degree() const { return m_; }
  int variables() const;
  const NormedSpace& space() const;
  bool tetrahedral() const { return std::holds_alternative<TetraPoly>(source_); }
  const TetraPoly& tetra() const { return std::get<TetraPoly>(source_); }
  const AnyPoly& source() const { return source_; }

  /// Evaluates the source polynomial (the diagonal of M).
  SpaceVector polynomial(std::span<const Scalar> z) const;
  void polynomial_into(std::span<const Scalar> z, std::span<Scalar> out) const;

 private:
  AnyPoly source_;
  int m_;
};

inline constexpr int kMaxDirectDegree = 6;
inline constexpr int kMaxPolarizationDegree = 25;

/// Sum over subsets and slot bijections, 1/m! prefactor. Tetrahedral sources, m <= 6.
/// Arguments are put into a canonical order first, so permuting them gives the identical result.
SpaceVector eval_direct(const SymMultilinear& M, std::span<const Point> args);

/// (1/m!) 2^{-m} sum_eps eps_1...eps_m P(sum_l eps_l z^(l)); any m-homogeneous source, m <= 25.
SpaceVector eval_polarization(const SymMultilinear& M, std::span<const Point> args);

/// M(u, z, ..., z). O(#terms * m) for tetrahedral sources.
SpaceVector eval_one_variable(const SymMultilinear& M, std::span<const Scalar> u, std::span<const Scalar> z);
void eval_one_variable_into(const SymMultilinear& M, std::span<const Scalar> u, std::span<const Scalar> z,
                            std::span<Scalar> out);

/// eval_direct where available, otherwise eval_polarization.
SpaceVector evaluate(const SymMultilinear& M, std::span<const Point> args);

/// v_j = M(z^(1), ..., z^(m-1), e_j) for j = 0..n-1, as a row-major n x d array.
/// Tetrahedral sources only.
std::vector<Scalar> last_slot_vectors(const SymMultilinear& M, std::span<const Point> leading);

}  // namespace decoup
