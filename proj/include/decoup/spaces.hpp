#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "decoup/subsets.hpp"

namespace decoup {

using Scalar = std::complex<double>;
using Point = std::vector<Scalar>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class SpaceKind { LqSequence, SubsetSup };

/// A finite-dimensional complex normed space: either l_q^d or the sup-normed
/// space whose coordinates are the m-subsets of [n], ordered colexicographically.
class NormedSpace {
 public:
  static NormedSpace lq(double q, std::size_t d);
  static NormedSpace subset_sup(int n, int m);

  SpaceKind kind() const { return kind_; }
  /// Exponent of the norm; infinity for SubsetSup.
  double q() const { return q_; }
  std::size_t dimension() const { return dim_; }
  int ambient_variables() const { return n_; }
  int subset_size() const { return m_; }

  /// Coordinate slot of an m-subset in a SubsetSup space.
  std::size_t subset_index(SubsetMask A) const;
  SubsetMask subset_at(std::size_t index) const;

  double norm(std::span<const Scalar> coords) const;
  /// ||v||^p, skipping the root/power round trip where possible.
  double norm_pow(std::span<const Scalar> coords, double p) const;

  std::string describe() const;

  bool operator==(const NormedSpace&) const = default;

  /// l_2^1; present so descriptors can be deserialized in place.
  NormedSpace() = default;

 private:

  SpaceKind kind_ = SpaceKind::LqSequence;
  double q_ = 2.0;
  std::size_t dim_ = 1;
  int n_ = 0;
  int m_ = 0;
};

/// Upper bound on SubsetSup dimension that may be materialized.
inline constexpr std::size_t kMaxSubsetSupDimension = std::size_t{1} << 24;

struct SpaceVector {
  NormedSpace space;
  std::vector<Scalar> coords;

  SpaceVector(NormedSpace s, std::vector<Scalar> c);
  static SpaceVector zero(const NormedSpace& s);
};

double norm(const SpaceVector& v);

SpaceVector canonical_basis_vector(const NormedSpace& space, std::size_t index);
/// e_A in a SubsetSup space.
SpaceVector subset_basis_vector(const NormedSpace& space, SubsetMask A);

// Relative distance ||a - b|| / max(||a||, ||b||) in the norm of `space`; 0 when both vanish.
double relative_error(const NormedSpace& space, std::span<const Scalar> a, std::span<const Scalar> b);

void to_json(nlohmann::json& j, const NormedSpace& s);
void from_json(const nlohmann::json& j, NormedSpace& s);

}  // namespace decoup
