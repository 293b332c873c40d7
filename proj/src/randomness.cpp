#include "decoup/randomness.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace decoup {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

PhiloxKey stream_key(const SeedSpec& seed, std::uint64_t experiment) {
  const std::uint64_t k = splitmix64(seed.master_seed ^ splitmix64(experiment));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

// Distribution ------------------------------------------------------------

Distribution Distribution::rademacher() { return Distribution{}; }

Distribution Distribution::steinhaus() {
  Distribution d;
  d.kind_ = DistKind::Steinhaus;
  return d;
}

Distribution Distribution::gaussian() {
  Distribution d;
  d.kind_ = DistKind::ComplexGaussian;
  return d;
}

Distribution Distribution::symmetric_discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("symmetric discrete law needs at least one atom");
  double total = 0.0;
  std::vector<double> cum;
  for (const auto& a : atoms) {
    if (!(a.probability >= 0.0) || !std::isfinite(a.probability))
      throw std::invalid_argument("atom probabilities must be nonnegative");
    if (!std::isfinite(a.value.real()) || !std::isfinite(a.value.imag()))
      throw std::invalid_argument("atom values must be finite");
    total += a.probability;
    cum.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("atom probabilities must sum to 1");
  Distribution d;
  d.kind_ = DistKind::SymmetricDiscrete;
  d.atoms_ = std::move(atoms);
  d.cumulative_ = std::move(cum);
  return d;
}

Distribution Distribution::scaled(const Distribution& base, double scale) {
  if (!std::isfinite(scale) || scale == 0.0) throw std::invalid_argument("scale must be finite and nonzero");
  Distribution d;
  d.kind_ = DistKind::ScaledMix;
  d.scale_ = scale;
  d.base_ = std::make_shared<const Distribution>(base);
  return d;
}

std::string Distribution::name() const {
  switch (kind_) {
    case DistKind::Rademacher:
      return "rademacher";
    case DistKind::Steinhaus:
      return "steinhaus";
    case DistKind::ComplexGaussian:
      return "gaussian";
    case DistKind::SymmetricDiscrete:
      return "sym_discrete";
    case DistKind::ScaledMix:
      return "scaled(" + base_->name() + ")";
  }
  return "?";
}

double Distribution::abs_mean() const {
  switch (kind_) {
    case DistKind::Rademacher:
    case DistKind::Steinhaus:
      return 1.0;
    case DistKind::ComplexGaussian:
      return std::sqrt(std::numbers::pi) / 2.0;
    case DistKind::SymmetricDiscrete: {
      double s = 0.0;
      for (const auto& a : atoms_) s += a.probability * std::abs(a.value);
      return s;
    }
    case DistKind::ScaledMix:
      return std::abs(scale_) * base_->abs_mean();
  }
  return 0.0;
}

double Distribution::l2_norm() const {
  switch (kind_) {
    case DistKind::Rademacher:
    case DistKind::Steinhaus:
    case DistKind::ComplexGaussian:
      return 1.0;
    case DistKind::SymmetricDiscrete: {
      double s = 0.0;
      for (const auto& a : atoms_) s += a.probability * std::norm(a.value);
      return std::sqrt(s);
    }
    case DistKind::ScaledMix:
      return std::abs(scale_) * base_->l2_norm();
  }
  return 0.0;
}

Scalar Distribution::draw(const PhiloxCounter& r) const {
  switch (kind_) {
    case DistKind::Rademacher:
      return (r[0] & 1u) ? Scalar(-1.0) : Scalar(1.0);
    case DistKind::Steinhaus:
      return std::polar(1.0, 2.0 * std::numbers::pi * uniform53(r[0], r[1]));
    case DistKind::ComplexGaussian: {
      const double u1 = 1.0 - uniform53(r[0], r[1]);
      const double u2 = uniform53(r[2], r[3]);
      const double radius = std::sqrt(-2.0 * std::log(u1)) * std::numbers::sqrt2 / 2.0;
      const double angle = 2.0 * std::numbers::pi * u2;
      return {radius * std::cos(angle), radius * std::sin(angle)};
    }
    case DistKind::SymmetricDiscrete: {
      const double u = uniform53(r[0], r[1]);
      std::size_t i = 0;
      while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
      const Scalar v = atoms_[i].value;
      return (r[2] & 1u) ? -v : v;
    }
    case DistKind::ScaledMix:
      return scale_ * base_->draw(r);
  }
  return 0.0;
}

bool Distribution::operator==(const Distribution& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == DistKind::ScaledMix) return scale_ == other.scale_ && *base_ == *other.base_;
  if (kind_ == DistKind::SymmetricDiscrete) {
    if (atoms_.size() != other.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (atoms_[i].value != other.atoms_[i].value || atoms_[i].probability != other.atoms_[i].probability)
        return false;
  }
  return true;
}

void to_json(nlohmann::json& j, const Distribution& d) {
  switch (d.kind()) {
    case DistKind::Rademacher:
      j = {{"kind", "rademacher"}};
      break;
    case DistKind::Steinhaus:
      j = {{"kind", "steinhaus"}};
      break;
    case DistKind::ComplexGaussian:
      j = {{"kind", "gaussian"}};
      break;
    case DistKind::SymmetricDiscrete: {
      auto atoms = nlohmann::json::array();
      for (const auto& a : d.atoms()) atoms.push_back({a.value.real(), a.value.imag(), a.probability});
      j = {{"kind", "sym_discrete"}, {"atoms", atoms}};
      break;
    }
    case DistKind::ScaledMix:
      j = {{"kind", "scaled"}, {"base", d.base()}, {"scale", d.scale()}};
      break;
  }
}

void from_json(const nlohmann::json& j, Distribution& d) {
  // A bare string is shorthand for {"kind": ...}.
  const auto kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "rademacher") {
    d = Distribution::rademacher();
  } else if (kind == "steinhaus") {
    d = Distribution::steinhaus();
  } else if (kind == "gaussian" || kind == "complex_gaussian") {
    d = Distribution::gaussian();
  } else if (kind == "sym_discrete") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 3) throw std::invalid_argument("atoms are [re, im, probability]");
      atoms.push_back({{a[0].get<double>(), a[1].get<double>()}, a[2].get<double>()});
    }
    d = Distribution::symmetric_discrete(std::move(atoms));
  } else if (kind == "scaled") {
    d = Distribution::scaled(j.at("base").get<Distribution>(), j.at("scale").get<double>());
  } else {
    throw std::invalid_argument("unknown distribution kind: " + kind);
  }
}

// Sampling ----------------------------------------------------------------

Scalar draw_coordinate(const Distribution& dist, const PhiloxKey& key, const StreamLabel& label,
                       std::uint32_t coordinate) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(label.replicate), static_cast<std::uint32_t>(label.replicate >> 32),
                          label.copy, coordinate};
  return dist.draw(philox4x32_10(ctr, key));
}

void sample_into(const Distribution& dist, const PhiloxKey& key, const StreamLabel& label, std::span<Scalar> out) {
  if (out.size() > 0xFFFFFFFFu) throw std::invalid_argument("vector too long for 32-bit coordinate counters");
  PhiloxCounter ctr{static_cast<std::uint32_t>(label.replicate), static_cast<std::uint32_t>(label.replicate >> 32),
                    label.copy, 0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    ctr[3] = static_cast<std::uint32_t>(i);
    out[i] = dist.draw(philox4x32_10(ctr, key));
  }
}

void sample_into(const Distribution& dist, const SeedSpec& seed, const StreamLabel& label, std::span<Scalar> out) {
  sample_into(dist, stream_key(seed, label.experiment), label, out);
}

Point sample_vector(const Distribution& dist, std::size_t n, const SeedSpec& seed, const StreamLabel& label) {
  if (n < 1) throw std::invalid_argument("sample_vector needs n >= 1");
  Point out(n);
  sample_into(dist, seed, label, out);
  return out;
}

std::vector<SubsetMask> enumerate_sign_vectors(int n) {
  if (n < 0 || n > kMaxSignEnumeration) throw std::invalid_argument("sign enumeration supports n <= 24");
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<SubsetMask> out(total);
  for (std::uint64_t i = 0; i < total; ++i) out[i] = i ^ (i >> 1);
  return out;
}

Point sign_vector(SubsetMask packed, int n) {
  Point out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = contains(packed, j) ? -1.0 : 1.0;
  return out;
}

double abs_moment_gaussian(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("abs_moment_gaussian needs q > 0");
  return std::tgamma(q / 2.0 + 1.0);
}

}  // namespace decoup
