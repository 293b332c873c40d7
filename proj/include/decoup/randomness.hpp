#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decoup/spaces.hpp"

namespace decoup {

// Philox4x32-10 counter-based generator (Salmon et al.).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);
/// FNV-1a, for turning experiment names into stream ids.
std::uint64_t stream_id(std::string_view name);
/// Mixes a parent id with an index into a child id.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index);

struct SeedSpec {
  std::uint64_t master_seed = 0;
};

/// Identifies one random vector: an experiment stream, a replicate (sample index) and a copy l.
/// Coordinates are addressed by their position in the vector.
struct StreamLabel {
  std::uint64_t experiment = 0;
  std::uint64_t replicate = 0;
  std::uint32_t copy = 0;
};

PhiloxKey stream_key(const SeedSpec& seed, std::uint64_t experiment);

/// Uniform double in [0, 1) from 53 bits.
inline double uniform53(std::uint32_t hi, std::uint32_t lo) {
  return static_cast<double>(((std::uint64_t{hi} << 32) | lo) >> 11) * 0x1.0p-53;
}

enum class DistKind { Rademacher, Steinhaus, ComplexGaussian, SymmetricDiscrete, ScaledMix };

struct Atom {
  Scalar value;
  double probability;
};

/// Law of one coordinate xi_0. All kinds are symmetric.
class Distribution {
 public:
  static Distribution rademacher();
  static Distribution steinhaus();
  static Distribution gaussian();
  /// Picks an atom by probability, then negates it with probability 1/2.
  static Distribution symmetric_discrete(std::vector<Atom> atoms);
  /// base * scale.
  static Distribution scaled(const Distribution& base, double scale);

  DistKind kind() const { return kind_; }
  std::string name() const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  double scale() const { return scale_; }
  const Distribution& base() const { return *base_; }

  /// E|xi_0|
  double abs_mean() const;
  /// (E|xi_0|^2)^{1/2}
  double l2_norm() const;
  /// Takes values in {-1, +1} only.
  bool is_rademacher() const { return kind_ == DistKind::Rademacher; }

  /// One draw from a Philox output block.
  Scalar draw(const PhiloxCounter& block) const;

  bool operator==(const Distribution& other) const;

 private:
  DistKind kind_ = DistKind::Rademacher;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double scale_ = 1.0;
  std::shared_ptr<const Distribution> base_;
};

void to_json(nlohmann::json& j, const Distribution& d);
void from_json(const nlohmann::json& j, Distribution& d);

/// Coordinate i of the vector labelled `label`.
Scalar draw_coordinate(const Distribution& dist, const PhiloxKey& key, const StreamLabel& label,
                       std::uint32_t coordinate);
void sample_into(const Distribution& dist, const SeedSpec& seed, const StreamLabel& label, std::span<Scalar> out);
void sample_into(const Distribution& dist, const PhiloxKey& key, const StreamLabel& label, std::span<Scalar> out);
Point sample_vector(const Distribution& dist, std::size_t n, const SeedSpec& seed, const StreamLabel& label);

inline constexpr int kMaxSignEnumeration = 24;

/// Visits all 2^n sign vectors in Gray-code order, starting from all +1.
/// f(signs, flipped) gets the current vector and the coordinate flipped since the
/// previous call (-1 on the first call).
template <class F>
void for_each_sign_vector(int n, F&& f) {
  if (n < 0 || n > kMaxSignEnumeration) throw std::invalid_argument("sign enumeration supports n <= 24");
  std::vector<double> signs(static_cast<std::size_t>(n), 1.0);
  f(std::span<const double>(signs), -1);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int j = std::countr_zero(i);
    signs[static_cast<std::size_t>(j)] = -signs[static_cast<std::size_t>(j)];
    f(std::span<const double>(signs), j);
  }
}

/// All 2^n sign vectors in Gray-code order, packed: bit j set means eps_j = -1.
std::vector<SubsetMask> enumerate_sign_vectors(int n);
Point sign_vector(SubsetMask packed, int n);

/// E|gamma|^q = Gamma(q/2 + 1) for a standard complex gaussian.
double abs_moment_gaussian(double q);

}  // namespace decoup
