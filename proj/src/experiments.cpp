#include "decoup/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace decoup {

// Bracket constants ---------------------------------------------------------

double factorial_d(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}
double kwapien_low(int m) { return factorial_d(m) / std::pow(double(m), m); }
double kwapien_high(int m) { return std::pow(double(m), m); }
double gaussian_low(int m) { return factorial_d(m) / std::pow(double(m), 0.5 * m); }
double gaussian_high(int m) { return std::pow(double(m), 0.5 * m); }
double steinhaus_walsh_constant(int m) { return std::pow(1.0 + std::numbers::sqrt2, m); }
double one_variable_steinhaus_constant(int m) {
  return 0.5 * std::numbers::pi * std::sqrt(std::numbers::e * m);
}

// Counterexample kernels ---------------------------------------------------

double top_m_product(std::span<const double> abs_values, int m) {
  if (m < 0 || static_cast<std::size_t>(m) > abs_values.size())
    throw std::invalid_argument("top_m_product: need 0 <= m <= n");
  std::vector<double> v(abs_values.begin(), abs_values.end());
  std::partial_sort(v.begin(), v.begin() + m, v.end(), std::greater<>());
  double prod = 1.0;
  for (int i = 0; i < m; ++i) prod *= v[static_cast<std::size_t>(i)];
  return prod;
}

namespace {
void subset_max_recurse(std::span<const double> a, int start, int left, double prod, double& best) {
  if (left == 0) {
    best = std::max(best, prod);
    return;
  }
  for (int i = start; i + left <= static_cast<int>(a.size()); ++i)
    subset_max_recurse(a, i + 1, left - 1, prod * a[static_cast<std::size_t>(i)], best);
}
}  // namespace

double brute_force_subset_max(std::span<const double> abs_values, int m) {
  if (m < 0 || static_cast<std::size_t>(m) > abs_values.size())
    throw std::invalid_argument("brute_force_subset_max: need 0 <= m <= n");
  double best = -1.0;
  subset_max_recurse(abs_values, 0, m, 1.0, best);
  return best;
}

TetraPoly counterexample_polynomial(int n, int m) {
  NormedSpace space = NormedSpace::subset_sup(n, m);
  std::vector<TetraTerm> terms;
  terms.reserve(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    TetraTerm t{space.subset_at(i), std::vector<Scalar>(space.dimension())};
    t.coeff[i] = 1.0;
    terms.push_back(std::move(t));
  }
  return TetraPoly(n, space, std::move(terms), m);
}

// Random polynomials --------------------------------------------------------

void to_json(nlohmann::json& j, const RandomPolySpec& s) {
  j = {{"n", s.n}, {"m", s.m}, {"density", s.density}, {"homogeneous", s.homogeneous}};
}

TetraPoly random_tetra_poly(const RandomPolySpec& spec, const NormedSpace& space, std::uint64_t seed,
                            std::uint64_t stream) {
  if (spec.n < 1 || spec.n > kMaxVariables) throw ConfigError("random polynomial: n must be in [1, 63]");
  if (spec.m < 0 || spec.m > spec.n) throw ConfigError("random polynomial: m must be in [0, n]");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw ConfigError("random polynomial: density must be in (0, 1]");
  std::uint64_t candidates = 0;
  for (int deg = spec.homogeneous ? spec.m : 0; deg <= spec.m; ++deg) candidates += binom_u64(spec.n, deg);
  if (candidates > 1'000'000) throw ConfigError("random polynomial: more than 10^6 candidate monomials");

  const PhiloxKey key = stream_key(SeedSpec{seed}, stream);
  const Distribution gauss = Distribution::gaussian();
  const std::size_t d = space.dimension();
  std::vector<TetraTerm> terms;
  std::uint64_t index = 0;
  SubsetMask first = 0;
  for (int deg = spec.homogeneous ? spec.m : 0; deg <= spec.m; ++deg) {
    for_each_subset_of(full_mask(spec.n), deg, [&](SubsetMask A) {
      if (index == 0) first = A;
      const auto block = philox4x32_10(
          {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0xFFFFFFFFu, 0u}, key);
      if (uniform53(block[0], block[1]) < spec.density) {
        TetraTerm t{A, std::vector<Scalar>(d)};
        sample_into(gauss, key, StreamLabel{stream, index, 1}, t.coeff);
        terms.push_back(std::move(t));
      }
      ++index;
    });
  }
  if (terms.empty()) {
    TetraTerm t{first, std::vector<Scalar>(d)};
    sample_into(gauss, key, StreamLabel{stream, 0, 1}, t.coeff);
    terms.push_back(std::move(t));
  }
  std::optional<int> declared;
  if (spec.homogeneous) declared = spec.m;
  return TetraPoly(spec.n, space, std::move(terms), declared);
}

// Config --------------------------------------------------------------------

namespace {

const std::set<std::string> kKinds = {"verify-identities", "full-decoupling", "partition-decoupling",
                                      "one-variable",      "comparison",      "independent-sum",
                                      "counterexample",    "kahane"};

std::vector<double> read_doubles(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  return {j.get<double>()};
}

void apply_kind_defaults(ExperimentConfig& cfg) {
  if (cfg.kind == "counterexample") {
    cfg.p_values = {1.0};
    cfg.samples = 2000;
  } else if (cfg.kind == "kahane") {
    cfg.p_values = {1.0};
    cfg.q = 2.0;
    cfg.polynomials = 50;
    cfg.random.n = 6;
    cfg.random.m = 3;
    cfg.random.homogeneous = false;
  } else if (cfg.kind == "one-variable") {
    cfg.p_values = {1.0, 2.0};
    cfg.m_values = {2, 4};
  } else if (cfg.kind == "partition-decoupling") {
    cfg.m_values = {2};
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& kind) {
  if (!kKinds.count(kind)) throw ConfigError("unknown experiment kind: " + kind);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> allowed = {
      "experiment", "space", "distribution", "distributions", "polynomial", "p",   "q",   "samples", "seed",
      "threads",    "k",     "m_values",     "polynomials",   "abs_mean",   "n",   "m",   "output"};
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown config key: " + key);

  ExperimentConfig cfg;
  cfg.kind = kind;
  apply_kind_defaults(cfg);
  try {
    if (j.contains("experiment") && j.at("experiment").get<std::string>() != kind)
      throw ConfigError("config is for experiment '" + j.at("experiment").get<std::string>() + "'");
    if (j.contains("space")) cfg.space = j.at("space").get<NormedSpace>();
    if (j.contains("distribution")) cfg.distributions = {j.at("distribution").get<Distribution>()};
    if (j.contains("distributions")) cfg.distributions = j.at("distributions").get<std::vector<Distribution>>();
    if (j.contains("polynomial")) {
      const auto& pj = j.at("polynomial");
      if (pj.contains("file")) {
        cfg.polynomial_file = pj.at("file").get<std::string>();
      } else if (pj.contains("random")) {
        const auto& r = pj.at("random");
        for (const auto& [key, _] : r.items())
          if (key != "n" && key != "m" && key != "density" && key != "homogeneous")
            throw ConfigError("unknown random polynomial key: " + key);
        if (r.contains("n")) {
          cfg.random.n = r.at("n").get<int>();
          cfg.random.n_given = true;
        }
        if (r.contains("m")) {
          cfg.random.m = r.at("m").get<int>();
          cfg.random.m_given = true;
          cfg.m_values = {cfg.random.m};
        }
        if (r.contains("density")) cfg.random.density = r.at("density").get<double>();
        if (r.contains("homogeneous")) cfg.random.homogeneous = r.at("homogeneous").get<bool>();
      } else {
        throw ConfigError("polynomial needs either 'file' or 'random'");
      }
    }
    if (j.contains("p")) cfg.p_values = read_doubles(j.at("p"));
    if (j.contains("q") && !j.at("q").is_null()) cfg.q = j.at("q").get<double>();
    if (j.contains("samples")) cfg.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("m_values")) cfg.m_values = j.at("m_values").get<std::vector<int>>();
    if (j.contains("polynomials")) cfg.polynomials = j.at("polynomials").get<int>();
    if (j.contains("abs_mean") && !j.at("abs_mean").is_null()) cfg.abs_mean = j.at("abs_mean").get<double>();
    if (j.contains("n")) cfg.counterexample_n = j.at("n").get<int>();
    if (j.contains("m")) cfg.counterexample_m = j.at("m").get<int>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.p_values.empty()) throw ConfigError("p must not be empty");
  for (double p : cfg.p_values)
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p must satisfy 1 <= p < inf");
  if (cfg.samples < 1) throw ConfigError("samples must be positive");
  if (cfg.threads < 1) throw ConfigError("threads must be positive");
  if (cfg.k < 1) throw ConfigError("k must be positive");
  if (cfg.polynomials < 1) throw ConfigError("polynomials must be positive");
  if (cfg.abs_mean && !(*cfg.abs_mean >= 0.0)) throw ConfigError("abs_mean must be nonnegative");
  for (int m : cfg.m_values)
    if (m < 1) throw ConfigError("m_values must be positive");
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = cfg.kind;
  j["space"] = cfg.space;
  j["distributions"] = cfg.distributions;
  if (cfg.polynomial_file)
    j["polynomial"] = {{"file", *cfg.polynomial_file}};
  else
    j["polynomial"] = {{"random", cfg.random}};
  j["p"] = cfg.p_values;
  j["q"] = cfg.q ? nlohmann::json(*cfg.q) : nlohmann::json(nullptr);
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["k"] = cfg.k;
  j["m_values"] = cfg.m_values;
  j["polynomials"] = cfg.polynomials;
  j["abs_mean"] = cfg.abs_mean ? nlohmann::json(*cfg.abs_mean) : nlohmann::json(nullptr);
  j["n"] = cfg.counterexample_n;
  j["m"] = cfg.counterexample_m;
  return j;
}

// Shared helpers ------------------------------------------------------------

namespace {

constexpr double kExactBudget = 4294967296.0;  // 2^32 elementary updates

RunReport start_report(const ExperimentConfig& cfg) {
  RunReport r;
  r.experiment = cfg.kind;
  r.version = library_version();
  r.config = config_to_json(cfg);
  return r;
}

SamplingPlan base_plan(const ExperimentConfig& cfg) {
  SamplingPlan p;
  p.samples = cfg.samples;
  p.seed = cfg.seed;
  p.stream = stream_id(cfg.kind);
  p.threads = cfg.threads;
  return p;
}

SamplingPlan at(SamplingPlan p, std::initializer_list<std::uint64_t> path) {
  for (auto i : path) p = substream(p, i);
  return p;
}

std::uint64_t poly_stream(const ExperimentConfig& cfg, std::uint64_t index, int m) {
  return derive_stream(derive_stream(stream_id(cfg.kind + "/polynomial"), index), static_cast<std::uint64_t>(m));
}

void add_row(RunReport& rep, const std::string& name, int m, int n, double p, const std::string& dist,
             const RatioReport& r, std::uint64_t seed) {
  rep.rows.push_back(ReportRow{rep.experiment + "/" + name, m, n, p, dist, r, seed});
  for (const auto* e : {&r.lhs, &r.rhs})
    if (e->method == Method::MonteCarlo) rep.total_samples += e->samples;
}

MomentEstimate scaled(MomentEstimate e, double c) {
  e.value *= c;
  e.std_error *= c;
  return e;
}

MomentEstimate exact_constant(double value, double p) {
  MomentEstimate e = exact_moment(p == 1.0 ? value : std::pow(value, p), p, 1);
  e.value = value;
  return e;
}

double pow2(int e) { return std::ldexp(1.0, e); }

double work(const TetraPoly& P) {
  return static_cast<double>(std::max<std::size_t>(1, P.size())) * static_cast<double>(P.space().dimension());
}

bool poly_exact_ok(const TetraPoly& P) {
  return P.variables() <= kMaxSignEnumeration && pow2(P.variables()) * work(P) <= kExactBudget;
}

bool decoupled_exact_ok(const SymMultilinear& M) {
  if (!M.tetrahedral()) return false;
  const int n = M.variables(), m = M.degree();
  if (n * m > kMaxDecoupledEnumeration || m > kMaxDirectDegree) return false;
  const double d = static_cast<double>(M.space().dimension());
  const double inner = static_cast<double>(M.tetra().size()) * factorial_d(m) * m + pow2(n - 1) * d;
  return pow2((m - 1) * (n - 1)) * inner <= kExactBudget;
}

bool one_variable_exact_ok(const SymMultilinear& M) {
  if (!M.tetrahedral()) return false;
  const int n = M.variables();
  if (2 * n > kMaxSignEnumeration) return false;
  const double d = static_cast<double>(M.space().dimension());
  return pow2(n) * (work(M.tetra()) * M.degree() + pow2(n) * d) <= kExactBudget;
}

bool copies_exact_ok(const TetraPoly& P, int copies) {
  return sum_of_copies_exact_feasible(P.variables(), copies) &&
         std::pow(copies + 1.0, P.variables()) * work(P) <= kExactBudget;
}

MomentEstimate moment_P(const TetraPoly& P, const Distribution& dist, double p, const SamplingPlan& plan) {
  if (dist.is_rademacher() && poly_exact_ok(P)) return poly_moment_exact_rademacher(P, p);
  return poly_moment(P, dist, p, plan);
}

MomentEstimate moment_M(const SymMultilinear& M, const Distribution& dist, double p, const SamplingPlan& plan) {
  if (dist.is_rademacher() && decoupled_exact_ok(M)) return decoupled_moment_exact_rademacher(M, p);
  return decoupled_moment(M, dist, p, plan);
}

MomentEstimate moment_one_variable(const SymMultilinear& M, const Distribution& dist, double p,
                                   const SamplingPlan& plan) {
  if (dist.is_rademacher() && one_variable_exact_ok(M)) return one_variable_moment_exact_rademacher(M, p);
  return one_variable_moment(M, dist, p, plan);
}

MomentEstimate moment_L(const PartitionOperator& L, const Distribution& dist, double p, const SamplingPlan& plan) {
  if (dist.is_rademacher() && poly_exact_ok(L.diagonal_polynomial())) return partition_moment_exact_rademacher(L, p);
  return partition_moment(L, dist, p, plan);
}

std::vector<Distribution> distributions_or(const ExperimentConfig& cfg, std::vector<Distribution> fallback) {
  return cfg.distributions.empty() ? fallback : cfg.distributions;
}

std::vector<int> m_values_of(const ExperimentConfig& cfg) {
  if (!cfg.m_values.empty()) return cfg.m_values;
  return {cfg.random.m};
}

std::optional<AnyPoly> load_file(const ExperimentConfig& cfg) {
  if (!cfg.polynomial_file) return std::nullopt;
  try {
    return read_polynomial_file(*cfg.polynomial_file);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("cannot load polynomial file '" + *cfg.polynomial_file + "': " + e.what());
  }
}

TetraPoly as_tetra(const AnyPoly& poly) {
  if (const auto* t = std::get_if<TetraPoly>(&poly)) return *t;
  const auto& g = std::get<GenPoly>(poly);
  if (!g.is_tetrahedral()) throw ConfigError("this experiment needs a tetrahedral polynomial");
  return tetrahedralize(g);
}

int homogeneous_degree_of(const AnyPoly& poly) {
  const auto d = std::visit([](const auto& P) { return P.homogeneous_degree(); }, poly);
  if (!d || *d < 1) throw ConfigError("this experiment needs an m-homogeneous polynomial with m >= 1");
  return *d;
}

/// The polynomials an experiment runs on: the file once, or random ones per (index, m).
struct Subject {
  AnyPoly poly;
  int m;
  std::uint64_t index;
};

std::vector<Subject> homogeneous_subjects(const ExperimentConfig& cfg, bool tetra_only) {
  std::vector<Subject> out;
  if (auto file = load_file(cfg)) {
    if (tetra_only) file = AnyPoly(as_tetra(*file));
    const int m = homogeneous_degree_of(*file);
    out.push_back(Subject{*file, m, 0});
    return out;
  }
  for (int i = 0; i < cfg.polynomials; ++i) {
    for (int m : m_values_of(cfg)) {
      RandomPolySpec spec = cfg.random;
      spec.m = m;
      spec.homogeneous = true;
      out.push_back(Subject{random_tetra_poly(spec, cfg.space, cfg.seed, poly_stream(cfg, i, m)), m,
                            static_cast<std::uint64_t>(i)});
    }
  }
  return out;
}

int variables_of(const AnyPoly& P) {
  return std::visit([](const auto& Q) { return Q.variables(); }, P);
}

}  // namespace

// Experiments ---------------------------------------------------------------

RunReport run_full_decoupling(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const auto dists =
      distributions_or(cfg, {Distribution::rademacher(), Distribution::gaussian(), Distribution::steinhaus()});
  const SamplingPlan plan = base_plan(cfg);
  for (const auto& subj : homogeneous_subjects(cfg, false)) {
    const int m = subj.m;
    const int n = variables_of(subj.poly);
    const SymMultilinear M = std::visit([](const auto& P) { return SymMultilinear(P); }, subj.poly);
    const TetraPoly* tetra = std::get_if<TetraPoly>(&subj.poly);
    for (std::size_t di = 0; di < dists.size(); ++di) {
      const auto& dist = dists[di];
      for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi) {
        const double p = cfg.p_values[pi];
        const SamplingPlan row_plan = at(plan, {subj.index, static_cast<std::uint64_t>(m), di, pi});
        const MomentEstimate lhs = tetra ? moment_P(*tetra, dist, p, substream(row_plan, 0))
                                         : poly_moment(std::get<GenPoly>(subj.poly), dist, p, substream(row_plan, 0));
        const MomentEstimate rhs = moment_M(M, dist, p, substream(row_plan, 1));
        add_row(rep, "kwapien", m, n, p, dist.name(), make_ratio(lhs, rhs, kwapien_low(m), kwapien_high(m)), cfg.seed);
        if (dist.kind() == DistKind::ComplexGaussian)
          add_row(rep, "gaussian", m, n, p, dist.name(), make_ratio(lhs, rhs, gaussian_low(m), gaussian_high(m)),
                  cfg.seed);
        if (dist.kind() == DistKind::Steinhaus || dist.is_rademacher())
          add_row(rep, "scaled_by_sqrt_m_power", m, n, p, dist.name(),
                  make_ratio(lhs, scaled(rhs, gaussian_high(m)), std::nullopt, std::nullopt), cfg.seed);
        if (tetra) {
          const MomentEstimate sum = dist.is_rademacher() && copies_exact_ok(*tetra, m)
                                         ? sum_of_copies_moment_exact_rademacher(*tetra, p, m)
                                         : sum_of_copies_moment(*tetra, dist, p, m, substream(row_plan, 2));
          add_row(rep, "sum_of_copies", m, n, p, dist.name(), make_ratio(sum, rhs, std::nullopt, kwapien_high(m)),
                  cfg.seed);
        }
      }
    }
  }
  return rep;
}

RunReport run_partition_decoupling(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const int k = cfg.k;
  const auto dists = distributions_or(cfg, {Distribution::rademacher()});
  const SamplingPlan plan = base_plan(cfg);
  const auto file = load_file(cfg);
  std::vector<Subject> subjects;
  if (file) {
    const TetraPoly P = as_tetra(*file);
    subjects.push_back(Subject{P, homogeneous_degree_of(*file), 0});
  } else {
    for (int i = 0; i < cfg.polynomials; ++i)
      for (int m : m_values_of(cfg)) {
        RandomPolySpec spec = cfg.random;
        spec.m = m;
        spec.homogeneous = true;
        if (!spec.n_given) spec.n = k * m;
        if (spec.n > k * m)
          throw ConfigError("partition decoupling: polynomial has more than k*m variables");
        subjects.push_back(Subject{random_tetra_poly(spec, cfg.space, cfg.seed, poly_stream(cfg, i, m)), m,
                                   static_cast<std::uint64_t>(i)});
      }
  }
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& subj : subjects) {
    const int m = subj.m;
    const int n = k * m;
    if (n > kMaxEnumerationSize) throw ConfigError("partition decoupling: k*m exceeds 16");
    TetraPoly P = std::get<TetraPoly>(subj.poly);
    if (P.variables() > n) throw ConfigError("partition decoupling: polynomial has more than k*m variables");
    P = P.with_variables(n);
    const auto partitions = enumerate_partitions(k, m);
    std::vector<PartitionOperator> ops;
    ops.reserve(partitions.size());
    for (const auto& pi : partitions) ops.emplace_back(P, pi);
    const double count = static_cast<double>(ops.size());
    const double ratio_low = 1.0 / coefficient_ratio(k, m).convert_to<double>();

    for (std::size_t di = 0; di < dists.size(); ++di) {
      const auto& dist = dists[di];
      for (std::size_t pidx = 0; pidx < cfg.p_values.size(); ++pidx) {
        const double p = cfg.p_values[pidx];
        const SamplingPlan row_plan = at(plan, {subj.index, static_cast<std::uint64_t>(m), di, pidx});
        const MomentEstimate norm_P = moment_P(P, dist, p, substream(row_plan, 0));
        double sum = 0.0, var = 0.0, sum_pow = 0.0, var_pow = 0.0;
        bool exact = true;
        std::uint64_t samples = 0;
        for (std::size_t t = 0; t < ops.size(); ++t) {
          const MomentEstimate e = moment_L(ops[t], dist, p, substream(row_plan, 16 + t));
          exact = exact && e.method == Method::ExactEnumeration;
          samples += e.samples;
          sum += e.value;
          var += e.std_error * e.std_error;
          sum_pow += std::pow(e.value, p);
          const double dpow = p * std::pow(e.value, p - 1.0) * e.std_error;
          var_pow += dpow * dpow;
        }
        MomentEstimate avg;
        avg.p = p;
        avg.method = exact ? Method::ExactEnumeration : Method::MonteCarlo;
        avg.samples = samples;
        avg.value = sum / count;
        avg.std_error = std::sqrt(var) / count;
        MomentEstimate convex = avg;
        const double mean_pow = sum_pow / count;
        convex.value = std::pow(mean_pow, 1.0 / p);
        convex.std_error =
            mean_pow > 0.0 ? (1.0 / p) * std::pow(mean_pow, 1.0 / p - 1.0) * std::sqrt(var_pow) / count : 0.0;
        add_row(rep, "norm_average", m, n, p, dist.name(),
                make_ratio(norm_P, avg, 1.0, std::exp(static_cast<double>(m))), cfg.seed);
        add_row(rep, "convex_average", m, n, p, dist.name(), make_ratio(convex, norm_P, ratio_low, 1.0), cfg.seed);
      }
    }
    rep.identities.push_back(IdentityRow{"partition-decoupling/decomposition_m" + std::to_string(m),
                                         verify_decomposition(P, k, 8, derive_stream(cfg.seed, subj.index)), 1e-10,
                                         8});
    counts.push_back({{"k", k},
                      {"m", m},
                      {"partitions", count_partitions(k, m).str()},
                      {"multiplicity_N", multiplicity_N(k, m).str()},
                      {"coefficient_ratio", coefficient_ratio(k, m).str()}});
  }
  rep.extras["partition_counts"] = counts;
  return rep;
}

RunReport run_counterexample(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const int m = cfg.counterexample_m, n = cfg.counterexample_n;
  if (m < 1 || n < m) throw ConfigError("counterexample: need 1 <= m <= n");
  if (n > 10000) throw ConfigError("counterexample: n is limited to 10^4");
  const double top = kwapien_high(m);
  const std::size_t np = cfg.p_values.size();
  SamplingPlan plan = base_plan(cfg);
  const PhiloxKey key = stream_key(SeedSpec{cfg.seed}, plan.stream);
  const Distribution rad = Distribution::rademacher();
  const auto stats = monte_carlo(plan, np + 2, [&] {
    return [&, eps = Point(static_cast<std::size_t>(n)), sums = std::vector<double>(static_cast<std::size_t>(n)),
            first = std::vector<double>(static_cast<std::size_t>(n))](std::uint64_t r,
                                                                      std::span<double> out) mutable {
      std::fill(sums.begin(), sums.end(), 0.0);
      for (int l = 1; l <= m; ++l) {
        sample_into(rad, key, StreamLabel{plan.stream, r, static_cast<std::uint32_t>(l)}, eps);
        for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(i)] += eps[static_cast<std::size_t>(i)].real();
        if (l == 1)
          for (int i = 0; i < n; ++i) first[static_cast<std::size_t>(i)] = std::abs(eps[static_cast<std::size_t>(i)]);
      }
      for (auto& s : sums) s = std::abs(s);
      const double sup = top_m_product(sums, m);
      for (std::size_t j = 0; j < np; ++j) out[j] = std::pow(sup, cfg.p_values[j]);
      out[np] = sup == top ? 1.0 : 0.0;
      out[np + 1] = std::abs(top_m_product(first, m) - 1.0);
    };
  });

  // Chebyshev on the number of constant rows guarantees the event has probability >= 1/2.
  const double q = std::ldexp(1.0, 1 - m);
  const double mean = n * q;
  const bool guaranteed = mean > m && n * q * (1.0 - q) / ((mean - m) * (mean - m)) <= 0.5;
  const std::optional<double> half = guaranteed ? std::optional<double>(0.5) : std::nullopt;
  const std::optional<double> half_top = guaranteed ? std::optional<double>(top / 2.0) : std::nullopt;

  for (std::size_t j = 0; j < np; ++j) {
    const double p = cfg.p_values[j];
    const MomentEstimate sup = moment_from_stats(stats[j], p);
    const MomentEstimate one = exact_constant(1.0, p);
    add_row(rep, "sup_moment", m, n, p, "rademacher", make_ratio(sup, one, half_top, top), cfg.seed);
    add_row(rep, "implied_gap", m, n, p, "rademacher",
            make_ratio(scaled(sup, 1.0 / gaussian_high(m)), one, std::nullopt, std::nullopt), cfg.seed);
  }
  MomentEstimate freq;
  freq.p = 1.0;
  freq.method = Method::MonteCarlo;
  freq.samples = stats[np].count;
  freq.value = stats[np].mean;
  freq.std_error = std::sqrt(freq.value * (1.0 - freq.value) / static_cast<double>(freq.samples));
  add_row(rep, "event_frequency", m, n, 1.0, "rademacher", make_ratio(freq, exact_constant(1.0, 1.0), half, 1.0),
          cfg.seed);
  rep.total_samples = cfg.samples;
  rep.identities.push_back(IdentityRow{"counterexample/norm_of_P_eps_is_one", stats[np + 1].mean == 0.0 ? 0.0 : 1.0,
                                       0.0, stats[np + 1].count});

  // Shortcut against the materialized polynomial on a small instance.
  const int n_small = std::min(n, 12);
  const TetraPoly P = counterexample_polynomial(n_small, m);
  const SamplingPlan small = substream(plan, 1);
  const PhiloxKey small_key = stream_key(SeedSpec{cfg.seed}, small.stream);
  const std::uint64_t checks = std::min<std::uint64_t>(cfg.samples, 2000);
  double worst = 0.0;
  Point eps(static_cast<std::size_t>(n_small)), sum(static_cast<std::size_t>(n_small));
  std::vector<double> abs_sum(static_cast<std::size_t>(n_small));
  for (std::uint64_t r = 0; r < checks; ++r) {
    std::fill(sum.begin(), sum.end(), Scalar{});
    for (int l = 1; l <= m; ++l) {
      sample_into(rad, small_key, StreamLabel{small.stream, r, static_cast<std::uint32_t>(l)}, eps);
      for (int i = 0; i < n_small; ++i) sum[static_cast<std::size_t>(i)] += eps[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n_small; ++i) abs_sum[static_cast<std::size_t>(i)] = std::abs(sum[static_cast<std::size_t>(i)]);
    const double shortcut = top_m_product(abs_sum, m);
    worst = std::max(worst, std::abs(shortcut - norm(P.evaluate(sum))));
    worst = std::max(worst, std::abs(shortcut - brute_force_subset_max(abs_sum, m)));
  }
  rep.identities.push_back(IdentityRow{"counterexample/order_statistic_shortcut", worst, 0.0, checks});
  rep.extras["event_guaranteed_by_chebyshev"] = guaranteed;
  return rep;
}

RunReport run_one_variable(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const auto dists =
      distributions_or(cfg, {Distribution::gaussian(), Distribution::steinhaus(), Distribution::rademacher()});
  const SamplingPlan plan = base_plan(cfg);
  // (dist, p) -> [(m, ratio)] for the exponent fit
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<int, double>>> sweep;
  for (const auto& subj : homogeneous_subjects(cfg, true)) {
    const TetraPoly& P = std::get<TetraPoly>(subj.poly);
    const int m = subj.m, n = P.variables();
    const SymMultilinear M(P);
    const double root_m = std::sqrt(static_cast<double>(m));
    for (std::size_t di = 0; di < dists.size(); ++di) {
      const auto& dist = dists[di];
      for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi) {
        const double p = cfg.p_values[pi];
        const SamplingPlan row_plan = at(plan, {subj.index, static_cast<std::uint64_t>(m), di, pi});
        const MomentEstimate norm_P = moment_P(P, dist, p, substream(row_plan, 0));
        const MomentEstimate norm_M1 = moment_one_variable(M, dist, p, substream(row_plan, 1));
        const bool gauss = dist.kind() == DistKind::ComplexGaussian;
        add_row(rep, "scaled_one_variable", m, n, p, dist.name(),
                make_ratio(scaled(norm_M1, root_m), norm_P,
                           gauss ? std::optional<double>(std::exp(-0.5)) : std::nullopt,
                           gauss ? std::optional<double>(std::exp(0.5)) : std::nullopt),
                cfg.seed);
        if (dist.kind() == DistKind::Steinhaus)
          add_row(rep, "steinhaus_upper", m, n, p, dist.name(),
                  make_ratio(norm_P, norm_M1, std::nullopt, one_variable_steinhaus_constant(m)), cfg.seed);
        if (dist.is_rademacher()) {
          const RatioReport r = make_ratio(norm_P, norm_M1, std::nullopt, std::nullopt);
          add_row(rep, "rademacher_ratio", m, n, p, dist.name(), r, cfg.seed);
          if (std::isfinite(r.ratio) && r.ratio > 0.0) sweep[{di, pi}].emplace_back(m, r.ratio);
        }
      }
    }
  }
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& [key, pts] : sweep) {
    std::set<int> distinct;
    for (const auto& pt : pts) distinct.insert(pt.first);
    if (distinct.size() < 2) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [m, r] : pts) {
      const double x = std::log(static_cast<double>(m)), y = std::log(r);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double c = static_cast<double>(pts.size());
    fits.push_back({{"dist", dists[key.first].name()},
                    {"p", cfg.p_values[key.second]},
                    {"exponent", (c * sxy - sx * sy) / (c * sxx - sx * sx)},
                    {"points", pts.size()}});
  }
  rep.extras["rademacher_m_exponent"] = fits;
  return rep;
}

RunReport run_comparison(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  auto others = distributions_or(cfg, {Distribution::rademacher(), Distribution::gaussian()});
  const Distribution stein = Distribution::steinhaus();
  const SamplingPlan plan = base_plan(cfg);

  std::vector<std::pair<TetraPoly, std::uint64_t>> polys;
  if (auto file = load_file(cfg)) {
    polys.emplace_back(as_tetra(*file), 0);
  } else {
    for (int i = 0; i < cfg.polynomials; ++i)
      for (int m : m_values_of(cfg)) {
        RandomPolySpec spec = cfg.random;
        spec.m = m;
        polys.emplace_back(random_tetra_poly(spec, cfg.space, cfg.seed, poly_stream(cfg, i, m)),
                           static_cast<std::uint64_t>(i));
      }
  }
  for (const auto& [P, index] : polys) {
    const int m = P.degree(), n = P.variables();
    const auto hom = P.homogeneous_degree();
    const TetraPoly linear = homogeneous_projection(P, 1);
    for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi) {
      const double p = cfg.p_values[pi];
      const SamplingPlan row_plan = at(plan, {index, static_cast<std::uint64_t>(m), pi});
      // Moments are computed once per distribution so equal laws share draws.
      auto moment_for = [&](const TetraPoly& Q, const Distribution& dist, std::uint64_t salt) {
        std::uint64_t slot = 0;
        if (!(dist == stein)) {
          slot = 1;
          for (std::size_t i = 0; i < others.size() && !(others[i] == dist); ++i) ++slot;
        }
        return moment_P(Q, dist, p, at(row_plan, {salt, slot}));
      };
      const MomentEstimate w = moment_for(P, stein, 0);
      const MomentEstimate w_lin = linear.empty() ? MomentEstimate{} : moment_for(linear, stein, 1);
      for (const auto& dist : others) {
        const MomentEstimate x = moment_for(P, dist, 0);
        if (dist.is_rademacher()) {
          add_row(rep, "steinhaus_vs_rademacher", m, n, p, dist.name(),
                  make_ratio(w, x, 1.0 / steinhaus_walsh_constant(m), steinhaus_walsh_constant(m)), cfg.seed);
          if (!linear.empty())
            add_row(rep, "linear_steinhaus_vs_rademacher", 1, n, p, dist.name(),
                    make_ratio(w_lin, moment_for(linear, dist, 1), 2.0 / std::numbers::pi, std::numbers::pi / 2.0),
                    cfg.seed);
        } else {
          add_row(rep, "steinhaus_vs_other", m, n, p, dist.name(), make_ratio(w, x, std::nullopt, std::nullopt),
                  cfg.seed);
        }
        if (hom && *hom == m) {
          const double mu = cfg.abs_mean.value_or(dist.abs_mean());
          add_row(rep, "lower_via_steinhaus", m, n, p, dist.name(),
                  make_ratio(x, w, std::pow(mu / (1.0 + std::numbers::sqrt2), m), std::nullopt), cfg.seed);
        }
      }
    }
  }
  return rep;
}

namespace {

TetraPoly weighted_by_degree(const TetraPoly& P, double base) {
  auto terms = P.terms();
  for (auto& t : terms) {
    const double w = std::pow(base, subset_size(t.subset));
    for (auto& c : t.coeff) c *= w;
  }
  return TetraPoly(P.variables(), P.space(), std::move(terms), P.homogeneous_degree());
}

std::vector<double> degree_weights(const CoefficientFamily& f, double base) {
  std::vector<double> w;
  w.reserve(f.degrees.size());
  for (int d : f.degrees) w.push_back(std::pow(base, d));
  return w;
}

}  // namespace

RunReport run_independent_sum(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const auto dists = distributions_or(cfg, {Distribution::rademacher()});
  const Distribution stein = Distribution::steinhaus();
  const SamplingPlan plan = base_plan(cfg);
  std::vector<std::pair<TetraPoly, std::uint64_t>> polys;
  if (auto file = load_file(cfg)) {
    polys.emplace_back(as_tetra(*file), 0);
  } else {
    for (int i = 0; i < cfg.polynomials; ++i)
      for (int m : m_values_of(cfg)) {
        RandomPolySpec spec = cfg.random;
        spec.m = m;
        polys.emplace_back(random_tetra_poly(spec, cfg.space, cfg.seed, poly_stream(cfg, i, m)),
                           static_cast<std::uint64_t>(i));
      }
  }
  const bool hilbert = cfg.space.kind() == SpaceKind::LqSequence && cfg.space.q() == 2.0;
  const bool sup_norm = cfg.space.q() == kInfinity;
  if (sup_norm) rep.notes.push_back("dual-weight comparison skipped: the sup norm has no finite cotype");
  for (const auto& [P, index] : polys) {
    const int m = P.degree(), n = P.variables();
    const CoefficientFamily family = coefficient_family(P);
    const SamplingPlan poly_plan = at(plan, {index, static_cast<std::uint64_t>(m)});
    const MomentEstimate plain = independent_sum_moment(family, {}, 2.0, substream(poly_plan, 0));

    if (hilbert) {
      double sq = 0.0;
      for (const auto& v : family.vectors)
        for (const auto& c : v) sq += std::norm(c);
      const MomentEstimate closed = exact_constant(std::sqrt(sq), 2.0);
      add_row(rep, "hilbert_steinhaus", m, n, 2.0, stein.name(),
              make_ratio(poly_moment(P, stein, 2.0, substream(poly_plan, 1)), closed, 1.0, 1.0), cfg.seed);
      add_row(rep, "hilbert_independent", m, n, 2.0, "rademacher", make_ratio(plain, closed, 1.0, 1.0), cfg.seed);
    }
    for (std::size_t di = 0; di < dists.size(); ++di) {
      const auto& dist = dists[di];
      const MomentEstimate lhs =
          independent_sum_moment(family, degree_weights(family, dist.l2_norm()), 2.0, at(poly_plan, {2, di}));
      const MomentEstimate rhs = moment_P(P, dist, 2.0, at(poly_plan, {3, di}));
      add_row(rep, "independent_weights", m, n, 2.0, dist.name(), make_ratio(lhs, rhs, std::nullopt, std::nullopt),
              cfg.seed);
    }
    const MomentEstimate gap_rhs = moment_P(weighted_by_degree(P, std::numbers::sqrt2), stein, 1.0,
                                            substream(poly_plan, 4));
    add_row(rep, "gap_weights", m, n, 1.0, stein.name(), make_ratio(plain, gap_rhs, std::nullopt, std::nullopt),
            cfg.seed);
    if (!sup_norm) {
      const double q = std::max(2.0, cfg.space.q()) + 1.0;
      const MomentEstimate dual_lhs = moment_P(P, stein, q, substream(poly_plan, 5));
      const MomentEstimate dual_rhs =
          independent_sum_moment(family, degree_weights(family, std::sqrt(q / 2.0)), 2.0, substream(poly_plan, 6));
      add_row(rep, "dual_gap_weights", m, n, q, stein.name(),
              make_ratio(dual_lhs, dual_rhs, std::nullopt, std::nullopt), cfg.seed);
    }
  }
  return rep;
}

RunReport run_kahane(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const double p = cfg.p_values.front();
  const double q = cfg.q.value_or(2.0);
  if (!(q >= p)) throw ConfigError("kahane: need q >= p");
  const SamplingPlan plan = base_plan(cfg);
  const auto file = load_file(cfg);
  const int count = file ? 1 : cfg.polynomials;
  const int max_n = std::max(1, cfg.random.n);
  const int max_m = std::max(1, cfg.random.m);
  for (int i = 0; i < count; ++i) {
    TetraPoly P = file ? as_tetra(*file) : [&] {
      RandomPolySpec spec = cfg.random;
      spec.n = 1 + i % max_n;
      spec.m = std::min(spec.n, 1 + (i / max_n) % max_m);
      return random_tetra_poly(spec, cfg.space, cfg.seed, poly_stream(cfg, static_cast<std::uint64_t>(i), spec.m));
    }();
    add_row(rep, "kahane_khinchin", P.degree(), P.variables(), p, "steinhaus",
            kahane_khinchin_check(P, p, q, substream(plan, static_cast<std::uint64_t>(i))), cfg.seed);
  }
  return rep;
}

// Identity battery ----------------------------------------------------------

namespace {

class BatteryRng {
 public:
  BatteryRng(std::uint64_t seed, std::uint64_t stream) : key_(stream_key(SeedSpec{seed}, stream)) {}

  PhiloxCounter block() {
    const std::uint64_t c = counter_++;
    return philox4x32_10({static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32), 0xB5u, 0u}, key_);
  }
  int range(int lo, int hi) {
    const auto b = block();
    const std::uint64_t x = (std::uint64_t{b[0]} << 32) | b[1];
    return lo + static_cast<int>(x % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::uint64_t next() {
    const auto b = block();
    return (std::uint64_t{b[0]} << 32) | b[1];
  }
  Point gaussian_point(int n) {
    Point z(static_cast<std::size_t>(n));
    for (auto& c : z) c = gauss_.draw(block());
    return z;
  }
  NormedSpace space() {
    static const double qs[] = {1.0, 2.0, 3.0, kInfinity};
    const double q = qs[range(0, 3)];
    return NormedSpace::lq(q, static_cast<std::size_t>(range(1, 4)));
  }

 private:
  PhiloxKey key_;
  std::uint64_t counter_ = 0;
  Distribution gauss_ = Distribution::gaussian();
};

constexpr int kBatteryInstances = 100;
constexpr double kBatteryTolerance = 1e-9;

TetraPoly battery_poly(BatteryRng& rng, int n, int m, const NormedSpace& space, std::uint64_t seed) {
  RandomPolySpec spec;
  spec.n = n;
  spec.m = m;
  spec.density = 0.7;
  spec.homogeneous = true;
  return random_tetra_poly(spec, space, seed, rng.next());
}

// (k, m) with km <= 8
std::vector<std::pair<int, int>> small_partition_shapes() {
  std::vector<std::pair<int, int>> out;
  for (int k = 1; k <= 8; ++k)
    for (int m = 1; m <= 4 && k * m <= 8; ++m) out.emplace_back(k, m);
  return out;
}

void add_sum(std::vector<Scalar>& acc, std::span<const Scalar> v, Scalar c) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * v[i];
}

}  // namespace

RunReport verify_identities(const ExperimentConfig& cfg) {
  RunReport rep = start_report(cfg);
  const std::uint64_t base = stream_id("verify-identities");
  const std::uint64_t seed = cfg.seed;
  auto record = [&](const std::string& name, double err, double tol, std::uint64_t count) {
    rep.identities.push_back(IdentityRow{"verify-identities/" + name, err, tol, count});
  };

  {  // polarization against direct symmetrization, and the one-variable route
    BatteryRng rng(seed, derive_stream(base, 1));
    double err = 0.0, err_one = 0.0;
    for (int t = 0; t < kBatteryInstances; ++t) {
      const int m = rng.range(1, 4), n = rng.range(m, 8);
      const NormedSpace space = rng.space();
      const SymMultilinear M(battery_poly(rng, n, m, space, seed));
      std::vector<Point> args;
      for (int l = 0; l < m; ++l) args.push_back(rng.gaussian_point(n));
      const SpaceVector direct = eval_direct(M, args);
      err = std::max(err, relative_error(space, eval_polarization(M, args).coords, direct.coords));
      std::vector<Point> one(static_cast<std::size_t>(m), args[0]);
      one[0] = args[m > 1 ? 1 : 0];
      err_one = std::max(err_one, relative_error(space, eval_one_variable(M, one[0], args[0]).coords,
                                                 eval_direct(M, one).coords));
    }
    record("polarization_vs_direct", err, kBatteryTolerance, kBatteryInstances);
    record("one_variable_vs_direct", err_one, kBatteryTolerance, kBatteryInstances);
  }
  const auto shapes = small_partition_shapes();
  {  // P = ratio * average of L_pi(z, ..., z)
    BatteryRng rng(seed, derive_stream(base, 2));
    double err = 0.0;
    for (int t = 0; t < kBatteryInstances; ++t) {
      const auto [k, m] = shapes[static_cast<std::size_t>(rng.range(0, static_cast<int>(shapes.size()) - 1))];
      const TetraPoly P = battery_poly(rng, k * m, m, rng.space(), seed);
      std::vector<Point> pts{rng.gaussian_point(k * m), rng.gaussian_point(k * m)};
      err = std::max(err, verify_decomposition(P, k, pts));
    }
    record("partition_decomposition", err, kBatteryTolerance, kBatteryInstances);
  }
  {  // L_pi(z, ..., z) as a sign average
    BatteryRng rng(seed, derive_stream(base, 3));
    double err = 0.0;
    for (int t = 0; t < kBatteryInstances; ++t) {
      const auto [k, m] = shapes[static_cast<std::size_t>(rng.range(0, static_cast<int>(shapes.size()) - 1))];
      const NormedSpace space = rng.space();
      const TetraPoly P = battery_poly(rng, k * m, m, space, seed);
      const auto parts = enumerate_partitions(k, m);
      const auto& pi = parts[static_cast<std::size_t>(rng.range(0, static_cast<int>(parts.size()) - 1))];
      const Point z = rng.gaussian_point(k * m);
      const PartitionOperator L(P, pi);
      err = std::max(err, relative_error(space, sign_average_L_pi(P, pi, z).coords, L.evaluate_diagonal(z).coords));
    }
    record("sign_average", err, kBatteryTolerance, kBatteryInstances);
  }
  {  // <grad P(z), u> = m M(u, z, ..., z), and the Euler relation
    BatteryRng rng(seed, derive_stream(base, 4));
    double err_grad = 0.0, err_euler = 0.0;
    for (int t = 0; t < kBatteryInstances; ++t) {
      const int m = rng.range(1, 4), n = rng.range(m, 8);
      const NormedSpace space = rng.space();
      const TetraPoly P = battery_poly(rng, n, m, space, seed);
      const SymMultilinear M(P);
      const Point z = rng.gaussian_point(n), u = rng.gaussian_point(n);
      const auto grad = gradient(P, z);
      std::vector<Scalar> pair_u(space.dimension()), pair_z(space.dimension());
      for (int j = 0; j < n; ++j) {
        add_sum(pair_u, grad[static_cast<std::size_t>(j)].coords, u[static_cast<std::size_t>(j)]);
        add_sum(pair_z, grad[static_cast<std::size_t>(j)].coords, z[static_cast<std::size_t>(j)]);
      }
      std::vector<Point> args(static_cast<std::size_t>(m), z);
      args[0] = u;
      std::vector<Scalar> direct = eval_direct(M, args).coords;
      for (auto& c : direct) c *= static_cast<double>(m);
      err_grad = std::max(err_grad, relative_error(space, pair_u, direct));
      std::vector<Scalar> mp = P.evaluate(z).coords;
      for (auto& c : mp) c *= static_cast<double>(m);
      err_euler = std::max(err_euler, relative_error(space, pair_z, mp));
      const Point ones(static_cast<std::size_t>(n), Scalar{1.0});
      err_euler = std::max(err_euler, relative_error(space, gradient_pairing(P, z, ones).coords, mp));
    }
    record("gradient", err_grad, kBatteryTolerance, kBatteryInstances);
    record("euler", err_euler, kBatteryTolerance, kBatteryInstances);
  }

  // Integer identities: error counts failures, tolerance 0.
  {
    double failures = 0;
    std::uint64_t cases = 0;
    for (int k = 1; k <= 9; ++k)
      for (int m = 1; k * m <= 9; ++m) {
        std::uint64_t seen = 0;
        for_each_partition(k, m, [&](const OrderedPartition&) { ++seen; });
        if (BigCount(seen) != count_partitions(k, m)) ++failures;
        if (!verify_partition_multiplicity(k, m).holds) ++failures;
        ++cases;
      }
    record("partition_count_and_multiplicity", failures, 0.0, cases);
  }
  {
    double failures = 0;
    std::uint64_t cases = 0;
    for (int k = 1; k <= 30; ++k)
      for (int m = 1; m <= 30; ++m) {
        if (multiplicity_N(k, m) * big_binomial(k * m, m) != count_partitions(k, m) * BigCount(pow(BigCount(k), m)))
          ++failures;
        const auto b = check_ratio_bounds(k, m);
        if (!b.lower_holds || !b.upper_holds) ++failures;
        ++cases;
      }
    record("multiplicity_formula_and_ratio_bounds", failures, 0.0, cases);
  }
  {
    double failures = 0;
    std::uint64_t cases = 0;
    for (int n = 1; n <= 12; ++n)
      for (int m = 1; m <= n; ++m)
        for (int k = 1; k + m - 1 <= n; ++k) {
          if (binom_u64(n, k) > kMaxIdentityBlocks) continue;
          if (!verify_one_variable_identity(n, m, k).holds) ++failures;
          ++cases;
        }
    record("one_variable_multiplicity", failures, 0.0, cases);
  }
  return rep;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.kind == "verify-identities") return verify_identities(cfg);
  if (cfg.kind == "full-decoupling") return run_full_decoupling(cfg);
  if (cfg.kind == "partition-decoupling") return run_partition_decoupling(cfg);
  if (cfg.kind == "one-variable") return run_one_variable(cfg);
  if (cfg.kind == "comparison") return run_comparison(cfg);
  if (cfg.kind == "independent-sum") return run_independent_sum(cfg);
  if (cfg.kind == "counterexample") return run_counterexample(cfg);
  if (cfg.kind == "kahane") return run_kahane(cfg);
  throw ConfigError("unknown experiment kind: " + cfg.kind);
}

}  // namespace decoup
