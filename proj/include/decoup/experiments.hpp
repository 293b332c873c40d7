#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoup/moments.hpp"

namespace decoup {

/// Invalid experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RandomPolySpec {
  int n = 8;
  int m = 2;
  double density = 1.0;
  bool homogeneous = true;
  bool n_given = false;
  bool m_given = false;
};

void to_json(nlohmann::json& j, const RandomPolySpec& s);

struct ExperimentConfig {
  std::string kind;
  NormedSpace space = NormedSpace::lq(2.0, 4);
  std::vector<Distribution> distributions;  // empty: experiment defaults
  std::optional<std::string> polynomial_file;
  RandomPolySpec random;
  std::vector<double> p_values{2.0};
  std::optional<double> q;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  int k = 2;
  std::vector<int> m_values;  // empty: {random.m}
  int polynomials = 1;
  std::optional<double> abs_mean;  // user-supplied E|xi_0|
  int counterexample_n = 120;
  int counterexample_m = 3;
  std::optional<std::string> output;
};

/// Parses the config file format; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& kind);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Support: each candidate subset (|A| = m, or |A| <= m when not homogeneous) is kept with
/// probability `density`; coefficients are iid standard complex gaussian vectors. Never empty.
TetraPoly random_tetra_poly(const RandomPolySpec& spec, const NormedSpace& space, std::uint64_t seed,
                            std::uint64_t stream);

/// P = sum_{|A| = m} e_A z_A into the subset sup-normed space.
TetraPoly counterexample_polynomial(int n, int m);

struct ReportRow {
  std::string experiment;
  int m = 0;
  int n = 0;
  double p = 1.0;
  std::string dist;
  RatioReport report;
  std::uint64_t seed = 0;
};

struct IdentityRow {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::uint64_t instances = 0;
  bool passed() const { return max_error <= tolerance; }
};

struct RunReport {
  std::string experiment;
  std::string version;
  nlohmann::json config;
  std::vector<ReportRow> rows;
  std::vector<IdentityRow> identities;
  nlohmann::json extras = nlohmann::json::object();
  std::vector<std::string> notes;
  std::uint64_t total_samples = 0;
  double wall_time = 0.0;

  bool any_outside() const;
};

std::string library_version();

nlohmann::json report_to_json(const RunReport& r, bool include_timing = false);
std::string report_to_csv(const RunReport& r);

inline const char* const kCsvHeader =
    "experiment,m,n,p,dist,lhs,lhs_se,rhs,rhs_se,ratio,bound_low,bound_high,verdict,seed";

RunReport run_full_decoupling(const ExperimentConfig& cfg);
RunReport run_partition_decoupling(const ExperimentConfig& cfg);
RunReport run_counterexample(const ExperimentConfig& cfg);
RunReport run_one_variable(const ExperimentConfig& cfg);
RunReport run_comparison(const ExperimentConfig& cfg);
RunReport run_independent_sum(const ExperimentConfig& cfg);
RunReport run_kahane(const ExperimentConfig& cfg);
RunReport verify_identities(const ExperimentConfig& cfg);

/// Dispatches on cfg.kind (the CLI subcommand name).
RunReport run_experiment(const ExperimentConfig& cfg);

// Counterexample kernels ---------------------------------------------------

/// sup over m-subsets A of prod_{i in A} |s_i|: the product of the m largest |s_i|.
double top_m_product(std::span<const double> abs_values, int m);
/// Same by visiting every m-subset.
double brute_force_subset_max(std::span<const double> abs_values, int m);

// Bracket constants ---------------------------------------------------------

double factorial_d(int m);
double kwapien_low(int m);       // m!/m^m
double kwapien_high(int m);      // m^m
double gaussian_low(int m);      // m!/m^{m/2}
double gaussian_high(int m);     // m^{m/2}
double steinhaus_walsh_constant(int m);  // (1+sqrt 2)^m
double one_variable_steinhaus_constant(int m);  // (pi/2) sqrt(e m)

}  // namespace decoup
