#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "decoup/spaces.hpp"

namespace decoup {

/// One coefficient x_A of a tetrahedral polynomial, attached to the monomial z_A.
struct TetraTerm {
  SubsetMask subset = 0;
  std::vector<Scalar> coeff;
};

/// Vector-valued tetrahedral polynomial P(z) = sum_A x_A z_A with z_A = prod_{k in A} z_k.
///
/// Only nonzero coefficients are stored, sorted by subset mask; evaluation sums the
/// terms in that order so results are reproducible bit for bit. Immutable.
class TetraPoly {
 public:
  TetraPoly(int n, NormedSpace space, std::optional<int> declared_degree = std::nullopt);
  /// Duplicate subsets are summed; zero coefficients are dropped.
  TetraPoly(int n, NormedSpace space, std::vector<TetraTerm> terms,
            std::optional<int> declared_degree = std::nullopt);

  int variables() const { return n_; }
  const NormedSpace& space() const { return space_; }
  std::size_t size() const { return subsets_.size(); }
  bool empty() const { return subsets_.empty(); }

  /// Largest |A| over stored terms (0 for the zero polynomial).
  int degree() const;
  /// The declared homogeneity degree, else the common |A| of all terms if there is one.
  std::optional<int> homogeneous_degree() const;
  bool is_homogeneous(int m) const;

  std::span<const SubsetMask> subsets() const { return subsets_; }
  std::span<const Scalar> coefficient(std::size_t term) const;
  SpaceVector coefficient_of(SubsetMask A) const;

  SpaceVector evaluate(std::span<const Scalar> z) const;
  /// Writes P(z) into `out` (size = space dimension). No allocation.
  void evaluate_into(std::span<const Scalar> z, std::span<Scalar> out) const;

  TetraPoly scaled(Scalar c) const;
  /// Same coefficients viewed as a polynomial in more variables.
  TetraPoly with_variables(int n) const;
  std::vector<TetraTerm> terms() const;

 private:
  int n_;
  NormedSpace space_;
  std::optional<int> declared_;
  std::vector<SubsetMask> subsets_;
  std::vector<Scalar> coeffs_;  // size() * dimension, row per term
};

TetraPoly operator+(const TetraPoly& a, const TetraPoly& b);

using MultiIndex = std::vector<std::uint32_t>;

struct GenTerm {
  MultiIndex alpha;
  std::vector<Scalar> coeff;
};

/// General polynomial P(z) = sum_alpha x_alpha z^alpha, terms sorted lexicographically by alpha.
class GenPoly {
 public:
  GenPoly(int n, NormedSpace space, std::optional<int> declared_degree = std::nullopt);
  GenPoly(int n, NormedSpace space, std::vector<GenTerm> terms,
          std::optional<int> declared_degree = std::nullopt);

  int variables() const { return n_; }
  const NormedSpace& space() const { return space_; }
  std::size_t size() const { return alphas_.size(); }
  int degree() const;
  std::optional<int> homogeneous_degree() const;
  bool is_homogeneous(int m) const;
  bool is_tetrahedral() const;

  const std::vector<MultiIndex>& alphas() const { return alphas_; }
  std::span<const Scalar> coefficient(std::size_t term) const;

  SpaceVector evaluate(std::span<const Scalar> z) const;
  void evaluate_into(std::span<const Scalar> z, std::span<Scalar> out) const;

  std::vector<GenTerm> terms() const;

 private:
  int n_;
  NormedSpace space_;
  std::optional<int> declared_;
  std::vector<MultiIndex> alphas_;
  std::vector<Scalar> coeffs_;
};

GenPoly operator+(const GenPoly& a, const GenPoly& b);

inline int multi_index_degree(const MultiIndex& alpha) {
  int s = 0;
  for (auto a : alpha) s += static_cast<int>(a);
  return s;
}

/// P_k: keeps exactly the terms with |alpha| = k (possibly none).
GenPoly homogeneous_projection(const GenPoly& P, int k);
TetraPoly homogeneous_projection(const TetraPoly& P, int k);

/// alpha = chi_A  ->  A. Throws if some exponent exceeds 1.
TetraPoly tetrahedralize(const GenPoly& P);
GenPoly to_general(const TetraPoly& P);

/// <grad P(z), lambda z> = sum_A (sum_{j in A} lambda_j) x_A z_A.
SpaceVector gradient_pairing(const TetraPoly& P, std::span<const Scalar> z, std::span<const Scalar> lambda);

/// Partial derivatives d_j P(z) = sum_{A containing j} x_A z_{A \ {j}}, j = 0..n-1.
std::vector<SpaceVector> gradient(const TetraPoly& P, std::span<const Scalar> z);

/// P evaluated at the pointwise product a*z.
SpaceVector substitute_pointwise(const TetraPoly& P, std::span<const Scalar> a, std::span<const Scalar> z);
SpaceVector substitute_pointwise(const GenPoly& P, std::span<const Scalar> a, std::span<const Scalar> z);

/// Evaluation switches to compensated summation above this many terms.
inline constexpr std::size_t kCompensatedSumThreshold = 10000;

// Polynomial files --------------------------------------------------------

using AnyPoly = std::variant<TetraPoly, GenPoly>;

/// Reads {n, degree, space, homogeneous?, terms: [{subset|alpha, coeff: [[re,im],...]}]}.
/// Subset indices are 0-based. Files with `subset` terms give a TetraPoly.
AnyPoly polynomial_from_json(const nlohmann::json& j);
nlohmann::json polynomial_to_json(const TetraPoly& P);
nlohmann::json polynomial_to_json(const GenPoly& P);
AnyPoly read_polynomial_file(const std::string& path);

}  // namespace decoup
