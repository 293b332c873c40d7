#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "decoup/multilinear.hpp"
#include "decoup/partitions.hpp"
#include "decoup/polynomials.hpp"
#include "decoup/randomness.hpp"

namespace decoup {

enum class Method { ExactEnumeration, MonteCarlo };

std::string to_string(Method m);

/// (E||.||^p)^{1/p} with its delta-method standard error.
struct MomentEstimate {
  double value = 0.0;
  double p = 1.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  Method method = Method::ExactEnumeration;
};

void to_json(nlohmann::json& j, const MomentEstimate& e);

struct SamplingPlan {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // experiment id in the stream label
  int threads = 1;
};

/// Same plan on a child stream.
SamplingPlan substream(const SamplingPlan& plan, std::uint64_t index);

enum class Verdict { Inside, Outside, Inconclusive };

std::string to_string(Verdict v);

struct RatioReport {
  MomentEstimate lhs;
  MomentEstimate rhs;
  double ratio = 0.0;
  double ratio_se = 0.0;
  std::optional<double> bound_low;
  std::optional<double> bound_high;
  Verdict verdict = Verdict::Inconclusive;
};

void to_json(nlohmann::json& j, const RatioReport& r);

/// Relative slack applied to brackets when both sides are exact.
inline constexpr double kExactSlack = 1e-12;
inline constexpr double kSigmaWidth = 4.0;

/// ratio = lhs/rhs; verdict from [ratio - 4 se, ratio + 4 se] against the bracket
/// (missing bounds are open). No bracket at all gives Inconclusive.
RatioReport make_ratio(const MomentEstimate& lhs, const MomentEstimate& rhs, std::optional<double> low,
                       std::optional<double> high);
Verdict classify(double ratio, double se, bool exact, std::optional<double> low, std::optional<double> high);

// Monte Carlo engine ------------------------------------------------------

struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStats& o);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const { return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

inline constexpr std::uint64_t kBlockSize = 4096;

/// Runs `plan.samples` replicates in blocks of 4096. make_worker() builds a per-thread callable
/// worker(replicate, out) filling `stats` values; block results merge in block order, so the output
/// does not depend on the thread count.
template <class MakeWorker>
std::vector<RunningStats> monte_carlo(const SamplingPlan& plan, std::size_t stats, MakeWorker&& make_worker) {
  if (plan.samples < 1) throw std::invalid_argument("Monte Carlo needs at least one sample");
  const std::uint64_t blocks = (plan.samples + kBlockSize - 1) / kBlockSize;
  std::vector<RunningStats> per_block(blocks * stats);
  std::atomic<std::uint64_t> next{0};
  auto run = [&] {
    auto worker = make_worker();
    std::vector<double> out(stats);
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      const std::uint64_t begin = b * kBlockSize;
      const std::uint64_t end = std::min(plan.samples, begin + kBlockSize);
      RunningStats* local = &per_block[b * stats];
      for (std::uint64_t r = begin; r < end; ++r) {
        worker(r, std::span<double>(out));
        for (std::size_t s = 0; s < stats; ++s) local[s].add(out[s]);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(plan.threads, static_cast<int>(blocks)));
  if (threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  std::vector<RunningStats> total(stats);
  for (std::uint64_t b = 0; b < blocks; ++b)
    for (std::size_t s = 0; s < stats; ++s) total[s].merge(per_block[b * stats + s]);
  return total;
}

/// Turns the mean of ||.||^p into (mean)^{1/p} with the delta-method error.
MomentEstimate moment_from_stats(const RunningStats& powers, double p);
/// From an exact average of ||.||^p over `count` equally likely outcomes.
MomentEstimate exact_moment(double mean_power, double p, std::uint64_t count);

// Estimators --------------------------------------------------------------

void check_moment_order(double p);

MomentEstimate poly_moment(const TetraPoly& P, const Distribution& dist, double p, const SamplingPlan& plan);
MomentEstimate poly_moment(const GenPoly& P, const Distribution& dist, double p, const SamplingPlan& plan);
/// Average over all 2^n sign vectors, n <= 24.
MomentEstimate poly_moment_exact_rademacher(const TetraPoly& P, double p);

/// Copies default to 1..m; pass a permutation of labels to relabel the slots.
MomentEstimate decoupled_moment(const SymMultilinear& M, const Distribution& dist, double p, const SamplingPlan& plan,
                                std::vector<std::uint32_t> copy_labels = {});
inline constexpr int kMaxDecoupledEnumeration = 24;
/// Exact over 2^{nm} sign patterns, nm <= 24; tetrahedral sources.
MomentEstimate decoupled_moment_exact_rademacher(const SymMultilinear& M, double p);

/// M(xi', xi, ..., xi) with xi on copy 0 and xi' on `prime_copy` (0 reuses xi).
MomentEstimate one_variable_moment(const SymMultilinear& M, const Distribution& dist, double p,
                                   const SamplingPlan& plan, std::uint32_t prime_copy = 1);
/// Exact over 2^{2n} sign patterns, 2n <= 24.
MomentEstimate one_variable_moment_exact_rademacher(const SymMultilinear& M, double p);

/// P(xi^(1) + ... + xi^(copies)).
MomentEstimate sum_of_copies_moment(const TetraPoly& P, const Distribution& dist, double p, int copies,
                                    const SamplingPlan& plan);
/// Exact for Rademacher copies when (copies + 1)^n <= 2^24.
MomentEstimate sum_of_copies_moment_exact_rademacher(const TetraPoly& P, double p, int copies);
bool sum_of_copies_exact_feasible(int n, int copies);

/// Coefficient vectors x_A (or x_alpha) with their degrees |A|.
struct CoefficientFamily {
  NormedSpace space;
  std::vector<std::vector<Scalar>> vectors;
  std::vector<int> degrees;
};

CoefficientFamily coefficient_family(const TetraPoly& P);
CoefficientFamily coefficient_family(const GenPoly& P);

/// (E||sum_i eps_i c_i x_i||^p)^{1/p} with one independent sign per coefficient.
/// Exact when there are at most 24 coefficients, Monte Carlo otherwise.
MomentEstimate independent_sum_moment(const CoefficientFamily& family, std::span<const double> weights, double p,
                                      const SamplingPlan& plan);
MomentEstimate independent_sum_moment_exact(const CoefficientFamily& family, std::span<const double> weights, double p);
MomentEstimate independent_sum_moment_mc(const CoefficientFamily& family, std::span<const double> weights, double p,
                                         const SamplingPlan& plan);
inline constexpr std::size_t kMaxIndependentEnumeration = 24;

/// lhs = (E||P(sqrt(p/q) w)||^q)^{1/q}, rhs = (E||P(w)||^p)^{1/p} for Steinhaus w; bracket (-, 1].
RatioReport kahane_khinchin_check(const TetraPoly& P, double p, double q, const SamplingPlan& plan);

/// (E||L_pi(xi^(1), ..., xi^(m))||^p)^{1/p}, copies 1..m.
MomentEstimate partition_moment(const PartitionOperator& L, const Distribution& dist, double p,
                                const SamplingPlan& plan);
/// Exact Rademacher value, enumerated through the diagonal L_pi(eps, ..., eps) over 2^n signs.
MomentEstimate partition_moment_exact_rademacher(const PartitionOperator& L, double p);

}  // namespace decoup
