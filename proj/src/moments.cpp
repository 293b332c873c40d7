#include "decoup/moments.hpp"

#include <limits>
#include <stdexcept>

namespace decoup {

std::string to_string(Method m) { return m == Method::ExactEnumeration ? "exact-enumeration" : "monte-carlo"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Inside:
      return "inside";
    case Verdict::Outside:
      return "outside";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

void to_json(nlohmann::json& j, const MomentEstimate& e) {
  j = {{"value", e.value}, {"p", e.p}, {"std_error", e.std_error}, {"samples", e.samples}, {"method", to_string(e.method)}};
}

void to_json(nlohmann::json& j, const RatioReport& r) {
  j = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"verdict", to_string(r.verdict)}};
  j["ratio"] = std::isfinite(r.ratio) ? nlohmann::json(r.ratio) : nlohmann::json(nullptr);
  j["ratio_se"] = std::isfinite(r.ratio_se) ? nlohmann::json(r.ratio_se) : nlohmann::json(nullptr);
  j["bound_low"] = r.bound_low ? nlohmann::json(*r.bound_low) : nlohmann::json(nullptr);
  j["bound_high"] = r.bound_high ? nlohmann::json(*r.bound_high) : nlohmann::json(nullptr);
}

SamplingPlan substream(const SamplingPlan& plan, std::uint64_t index) {
  SamplingPlan out = plan;
  out.stream = derive_stream(plan.stream, index);
  return out;
}

Verdict classify(double ratio, double se, bool exact, std::optional<double> low, std::optional<double> high) {
  if (!low && !high) return Verdict::Inconclusive;
  if (!std::isfinite(ratio) || !std::isfinite(se)) return Verdict::Inconclusive;
  const double lo = low.value_or(-std::numeric_limits<double>::infinity());
  const double hi = high.value_or(std::numeric_limits<double>::infinity());
  if (exact) {
    const double lo_s = lo - kExactSlack * std::abs(lo);
    const double hi_s = hi + kExactSlack * std::abs(hi);
    return (ratio >= lo_s && ratio <= hi_s) ? Verdict::Inside : Verdict::Outside;
  }
  const double a = ratio - kSigmaWidth * se;
  const double b = ratio + kSigmaWidth * se;
  if (a >= lo && b <= hi) return Verdict::Inside;
  if (b < lo || a > hi) return Verdict::Outside;
  return Verdict::Inconclusive;
}

RatioReport make_ratio(const MomentEstimate& lhs, const MomentEstimate& rhs, std::optional<double> low,
                       std::optional<double> high) {
  RatioReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.bound_low = low;
  r.bound_high = high;
  if (rhs.value > 0.0) {
    r.ratio = lhs.value / rhs.value;
    const double rel_r = rhs.std_error / rhs.value;
    if (lhs.value > 0.0) {
      const double rel_l = lhs.std_error / lhs.value;
      r.ratio_se = r.ratio * std::sqrt(rel_l * rel_l + rel_r * rel_r);
    } else {
      r.ratio_se = lhs.std_error / rhs.value;
    }
  } else {
    r.ratio = std::numeric_limits<double>::quiet_NaN();
    r.ratio_se = std::numeric_limits<double>::quiet_NaN();
  }
  const bool exact = lhs.method == Method::ExactEnumeration && rhs.method == Method::ExactEnumeration;
  r.verdict = classify(r.ratio, r.ratio_se, exact, low, high);
  return r;
}

void RunningStats::merge(const RunningStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double delta = o.mean - mean;
  mean += delta * nb / n;
  m2 += o.m2 + delta * delta * na * nb / n;
  count += o.count;
}

void check_moment_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("moment order p must satisfy 1 <= p < inf");
}

MomentEstimate moment_from_stats(const RunningStats& powers, double p) {
  MomentEstimate e;
  e.p = p;
  e.samples = powers.count;
  e.method = Method::MonteCarlo;
  const double mean = std::max(0.0, powers.mean);
  e.value = p == 1.0 ? mean : std::pow(mean, 1.0 / p);
  if (mean > 0.0) e.std_error = (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * powers.std_error();
  return e;
}

MomentEstimate exact_moment(double mean_power, double p, std::uint64_t count) {
  MomentEstimate e;
  e.p = p;
  e.samples = count;
  e.method = Method::ExactEnumeration;
  e.value = p == 1.0 ? mean_power : std::pow(std::max(0.0, mean_power), 1.0 / p);
  return e;
}

namespace {

template <class Poly>
MomentEstimate poly_moment_impl(const Poly& P, const Distribution& dist, double p, const SamplingPlan& plan) {
  check_moment_order(p);
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto n = static_cast<std::size_t>(P.variables());
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, z = Point(n), v = std::vector<Scalar>(P.space().dimension())](std::uint64_t r,
                                                                             std::span<double> out) mutable {
      sample_into(dist, key, StreamLabel{plan.stream, r, 0}, z);
      P.evaluate_into(z, v);
      out[0] = P.space().norm_pow(v, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

// Walsh value sum_t x_t eps_{A_t}, with bit j of `negative` marking eps_j = -1.
void walsh_value(const TetraPoly& P, SubsetMask negative, std::span<Scalar> out) {
  const std::size_t d = P.space().dimension();
  std::fill(out.begin(), out.end(), Scalar{});
  for (std::size_t t = 0; t < P.size(); ++t) {
    const auto x = P.coefficient(t);
    if (std::popcount(P.subsets()[t] & negative) & 1) {
      for (std::size_t i = 0; i < d; ++i) out[i] -= x[i];
    } else {
      for (std::size_t i = 0; i < d; ++i) out[i] += x[i];
    }
  }
}

// Average of ||sum_j eps_j v_j + base||^p over eps in {-1,1}^count with eps_0 = +1 when `fix_first`.
// v is row-major count x d. Gray-code updates.
double sign_sum_power(std::span<const Scalar> v, std::size_t count, std::size_t d, const NormedSpace& space, double p,
                      bool fix_first, std::vector<Scalar>& acc) {
  acc.assign(d, Scalar{});
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < d; ++i) acc[i] += v[j * d + i];
  std::vector<double> signs(count, 1.0);
  const std::size_t start = fix_first ? 1 : 0;
  const std::size_t free = count - std::min(count, start);
  double total = space.norm_pow(acc, p);
  const std::uint64_t steps = std::uint64_t{1} << free;
  for (std::uint64_t s = 1; s < steps; ++s) {
    const std::size_t j = start + static_cast<std::size_t>(std::countr_zero(s));
    const double f = -2.0 * signs[j];
    signs[j] = -signs[j];
    for (std::size_t i = 0; i < d; ++i) acc[i] += f * v[j * d + i];
    total += space.norm_pow(acc, p);
  }
  return total / static_cast<double>(steps);
}

}  // namespace

MomentEstimate poly_moment(const TetraPoly& P, const Distribution& dist, double p, const SamplingPlan& plan) {
  return poly_moment_impl(P, dist, p, plan);
}

MomentEstimate poly_moment(const GenPoly& P, const Distribution& dist, double p, const SamplingPlan& plan) {
  return poly_moment_impl(P, dist, p, plan);
}

MomentEstimate poly_moment_exact_rademacher(const TetraPoly& P, double p) {
  check_moment_order(p);
  const int n = P.variables();
  if (n > kMaxSignEnumeration) throw std::invalid_argument("exact Rademacher moments need n <= 24");
  std::vector<Scalar> v(P.space().dimension());
  const std::uint64_t total = std::uint64_t{1} << n;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < total; ++s) {
    walsh_value(P, s, v);
    sum += P.space().norm_pow(v, p);
  }
  return exact_moment(sum / static_cast<double>(total), p, total);
}

MomentEstimate decoupled_moment(const SymMultilinear& M, const Distribution& dist, double p, const SamplingPlan& plan,
                                std::vector<std::uint32_t> copy_labels) {
  check_moment_order(p);
  const int m = M.degree();
  if (copy_labels.empty())
    for (int l = 1; l <= m; ++l) copy_labels.push_back(static_cast<std::uint32_t>(l));
  if (static_cast<int>(copy_labels.size()) != m) throw std::invalid_argument("need one copy label per slot");
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto n = static_cast<std::size_t>(M.variables());
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, args = std::vector<Point>(static_cast<std::size_t>(m), Point(n))](std::uint64_t r,
                                                                                 std::span<double> out) mutable {
      for (int l = 0; l < m; ++l)
        sample_into(dist, key, StreamLabel{plan.stream, r, copy_labels[static_cast<std::size_t>(l)]},
                    args[static_cast<std::size_t>(l)]);
      const auto v = evaluate(M, args);
      out[0] = M.space().norm_pow(v.coords, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

MomentEstimate decoupled_moment_exact_rademacher(const SymMultilinear& M, double p) {
  check_moment_order(p);
  if (!M.tetrahedral()) throw std::invalid_argument("exact decoupled moments need a tetrahedral source");
  const int m = M.degree();
  const int n = M.variables();
  if (n * m > kMaxDecoupledEnumeration) throw std::invalid_argument("exact decoupled moments need n*m <= 24");
  const std::size_t d = M.space().dimension();
  const auto un = static_cast<std::size_t>(n);
  // Each copy may be negated without changing the norm, so eps^(l)_0 = +1 throughout.
  const int free_leading = (m - 1) * (n - 1);
  std::vector<Point> leading(static_cast<std::size_t>(m - 1), Point(un, 1.0));
  std::vector<Scalar> acc;
  double sum = 0.0;
  const std::uint64_t outer = std::uint64_t{1} << free_leading;
  for (std::uint64_t s = 0; s < outer; ++s) {
    for (int l = 0; l < m - 1; ++l)
      for (int j = 1; j < n; ++j) {
        const int bit = l * (n - 1) + (j - 1);
        leading[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] = ((s >> bit) & 1u) ? -1.0 : 1.0;
      }
    const auto v = last_slot_vectors(M, leading);
    sum += sign_sum_power(v, un, d, M.space(), p, true, acc);
  }
  const std::uint64_t total = std::uint64_t{1} << (n * m);
  return exact_moment(sum / static_cast<double>(outer), p, total);
}

MomentEstimate one_variable_moment(const SymMultilinear& M, const Distribution& dist, double p,
                                   const SamplingPlan& plan, std::uint32_t prime_copy) {
  check_moment_order(p);
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto n = static_cast<std::size_t>(M.variables());
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, z = Point(n), u = Point(n), v = std::vector<Scalar>(M.space().dimension())](
               std::uint64_t r, std::span<double> out) mutable {
      sample_into(dist, key, StreamLabel{plan.stream, r, 0}, z);
      if (prime_copy == 0) {
        u = z;
      } else {
        sample_into(dist, key, StreamLabel{plan.stream, r, prime_copy}, u);
      }
      eval_one_variable_into(M, u, z, v);
      out[0] = M.space().norm_pow(v, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

MomentEstimate one_variable_moment_exact_rademacher(const SymMultilinear& M, double p) {
  check_moment_order(p);
  if (!M.tetrahedral()) throw std::invalid_argument("exact one-variable moments need a tetrahedral source");
  const int n = M.variables();
  const int m = M.degree();
  if (2 * n > kMaxDecoupledEnumeration) throw std::invalid_argument("exact one-variable moments need 2n <= 24");
  const std::size_t d = M.space().dimension();
  const auto un = static_cast<std::size_t>(n);
  const TetraPoly& P = M.tetra();
  std::vector<Scalar> w(un * d), acc;
  double sum = 0.0;
  // Negating eps or eps' changes only the sign of M(eps', eps, ..., eps).
  const std::uint64_t outer = std::uint64_t{1} << (n - 1);
  for (std::uint64_t s = 0; s < outer; ++s) {
    const Point eps = sign_vector(s << 1, n);
    const auto grad = gradient(P, eps);
    for (std::size_t j = 0; j < un; ++j)
      for (std::size_t i = 0; i < d; ++i) w[j * d + i] = grad[j].coords[i] / static_cast<double>(m);
    sum += sign_sum_power(w, un, d, M.space(), p, true, acc);
  }
  return exact_moment(sum / static_cast<double>(outer), p, std::uint64_t{1} << (2 * n));
}

MomentEstimate sum_of_copies_moment(const TetraPoly& P, const Distribution& dist, double p, int copies,
                                    const SamplingPlan& plan) {
  check_moment_order(p);
  if (copies < 1) throw std::invalid_argument("need at least one copy");
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto n = static_cast<std::size_t>(P.variables());
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, z = Point(n), xi = Point(n), v = std::vector<Scalar>(P.space().dimension())](
               std::uint64_t r, std::span<double> out) mutable {
      std::fill(z.begin(), z.end(), Scalar{});
      for (int l = 1; l <= copies; ++l) {
        sample_into(dist, key, StreamLabel{plan.stream, r, static_cast<std::uint32_t>(l)}, xi);
        for (std::size_t j = 0; j < n; ++j) z[j] += xi[j];
      }
      P.evaluate_into(z, v);
      out[0] = P.space().norm_pow(v, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

bool sum_of_copies_exact_feasible(int n, int copies) {
  double cells = 1.0;
  for (int j = 0; j < n; ++j) cells *= copies + 1;
  return cells <= static_cast<double>(std::uint64_t{1} << kMaxSignEnumeration);
}

MomentEstimate sum_of_copies_moment_exact_rademacher(const TetraPoly& P, double p, int copies) {
  check_moment_order(p);
  if (copies < 1) throw std::invalid_argument("need at least one copy");
  const int n = P.variables();
  if (!sum_of_copies_exact_feasible(n, copies)) throw std::invalid_argument("exact sum of copies needs (m+1)^n <= 2^24");
  // A coordinate of the sum equals copies - 2i with probability binom(copies, i) / 2^copies.
  const auto base = static_cast<std::uint64_t>(copies + 1);
  std::vector<double> values(base), probs(base);
  for (int i = 0; i <= copies; ++i) {
    values[static_cast<std::size_t>(i)] = copies - 2.0 * i;
    probs[static_cast<std::size_t>(i)] =
        static_cast<double>(binom_u64(copies, i)) / static_cast<double>(std::uint64_t{1} << copies);
  }
  std::uint64_t cells = 1;
  for (int j = 0; j < n; ++j) cells *= base;
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::size_t> digit(un, 0);
  Point z(un, values[0]);
  std::vector<Scalar> v(P.space().dimension());
  double sum = 0.0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    double w = 1.0;
    for (std::size_t j = 0; j < un; ++j) w *= probs[digit[j]];
    P.evaluate_into(z, v);
    sum += w * P.space().norm_pow(v, p);
    for (std::size_t j = 0; j < un; ++j) {
      if (++digit[j] < base) {
        z[j] = values[digit[j]];
        break;
      }
      digit[j] = 0;
      z[j] = values[0];
    }
  }
  return exact_moment(sum, p, std::uint64_t{1} << std::min(63, n * copies));
}

CoefficientFamily coefficient_family(const TetraPoly& P) {
  CoefficientFamily f{P.space(), {}, {}};
  for (std::size_t t = 0; t < P.size(); ++t) {
    auto c = P.coefficient(t);
    f.vectors.emplace_back(c.begin(), c.end());
    f.degrees.push_back(subset_size(P.subsets()[t]));
  }
  return f;
}

CoefficientFamily coefficient_family(const GenPoly& P) {
  CoefficientFamily f{P.space(), {}, {}};
  for (std::size_t t = 0; t < P.size(); ++t) {
    auto c = P.coefficient(t);
    f.vectors.emplace_back(c.begin(), c.end());
    f.degrees.push_back(multi_index_degree(P.alphas()[t]));
  }
  return f;
}

namespace {

std::vector<Scalar> weighted_rows(const CoefficientFamily& family, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != family.vectors.size())
    throw std::invalid_argument("need one weight per coefficient");
  const std::size_t d = family.space.dimension();
  std::vector<Scalar> rows(family.vectors.size() * d);
  for (std::size_t t = 0; t < family.vectors.size(); ++t) {
    if (family.vectors[t].size() != d) throw std::invalid_argument("coefficient has wrong dimension");
    const double c = weights.empty() ? 1.0 : weights[t];
    for (std::size_t i = 0; i < d; ++i) rows[t * d + i] = c * family.vectors[t][i];
  }
  return rows;
}

}  // namespace

MomentEstimate independent_sum_moment_exact(const CoefficientFamily& family, std::span<const double> weights,
                                            double p) {
  check_moment_order(p);
  const std::size_t count = family.vectors.size();
  if (count > kMaxIndependentEnumeration) throw std::invalid_argument("exact independent sums need <= 24 terms");
  if (count == 0) return exact_moment(0.0, p, 1);
  const std::size_t d = family.space.dimension();
  const auto rows = weighted_rows(family, weights);
  std::vector<Scalar> acc;
  const double mean = sign_sum_power(rows, count, d, family.space, p, true, acc);
  return exact_moment(mean, p, std::uint64_t{1} << count);
}

MomentEstimate independent_sum_moment_mc(const CoefficientFamily& family, std::span<const double> weights, double p,
                                         const SamplingPlan& plan) {
  check_moment_order(p);
  const std::size_t count = family.vectors.size();
  const std::size_t d = family.space.dimension();
  const auto rows = weighted_rows(family, weights);
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto dist = Distribution::rademacher();
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, eps = Point(count), v = std::vector<Scalar>(d)](std::uint64_t r, std::span<double> out) mutable {
      sample_into(dist, key, StreamLabel{plan.stream, r, 0}, eps);
      std::fill(v.begin(), v.end(), Scalar{});
      for (std::size_t t = 0; t < count; ++t)
        for (std::size_t i = 0; i < d; ++i) v[i] += eps[t] * rows[t * d + i];
      out[0] = family.space.norm_pow(v, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

MomentEstimate independent_sum_moment(const CoefficientFamily& family, std::span<const double> weights, double p,
                                      const SamplingPlan& plan) {
  if (family.vectors.size() <= kMaxIndependentEnumeration) return independent_sum_moment_exact(family, weights, p);
  return independent_sum_moment_mc(family, weights, p, plan);
}

RatioReport kahane_khinchin_check(const TetraPoly& P, double p, double q, const SamplingPlan& plan) {
  check_moment_order(p);
  check_moment_order(q);
  if (p > q) throw std::invalid_argument("Kahane-Khinchin check needs p <= q");
  const auto w = Distribution::steinhaus();
  const auto lhs = poly_moment(P, Distribution::scaled(w, std::sqrt(p / q)), q, substream(plan, 1));
  const auto rhs = poly_moment(P, w, p, substream(plan, 2));
  return make_ratio(lhs, rhs, std::nullopt, 1.0);
}

MomentEstimate partition_moment(const PartitionOperator& L, const Distribution& dist, double p,
                                const SamplingPlan& plan) {
  check_moment_order(p);
  const int m = L.degree();
  const auto n = static_cast<std::size_t>(L.partition().n());
  const auto key = stream_key(SeedSpec{plan.seed}, plan.stream);
  const auto stats = monte_carlo(plan, 1, [&] {
    return [&, args = std::vector<Point>(static_cast<std::size_t>(m), Point(n)),
            v = std::vector<Scalar>(L.space().dimension())](std::uint64_t r, std::span<double> out) mutable {
      for (int l = 0; l < m; ++l)
        sample_into(dist, key, StreamLabel{plan.stream, r, static_cast<std::uint32_t>(l + 1)},
                    args[static_cast<std::size_t>(l)]);
      L.evaluate_into(args, v);
      out[0] = L.space().norm_pow(v, p);
    };
  });
  return moment_from_stats(stats[0], p);
}

MomentEstimate partition_moment_exact_rademacher(const PartitionOperator& L, double p) {
  return poly_moment_exact_rademacher(L.diagonal_polynomial(), p);
}

}  // namespace decoup
