// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "decoup/experiments.hpp"

using namespace decoup;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SamplingPlan plan_for(const std::string& name, std::uint64_t samples, std::uint64_t seed = 2024) {
  SamplingPlan p;
  p.samples = samples;
  p.seed = seed;
  p.stream = stream_id("acceptance/" + name);
  return p;
}

TetraPoly random_poly(int n, int m, const NormedSpace& space, std::uint64_t index, bool homogeneous = true,
                      double density = 1.0) {
  RandomPolySpec spec;
  spec.n = n;
  spec.m = m;
  spec.homogeneous = homogeneous;
  spec.density = density;
  return random_tetra_poly(spec, space, 77, derive_stream(stream_id("acceptance/poly"), index));
}

const std::vector<NormedSpace>& spaces() {
  static const std::vector<NormedSpace> s = {NormedSpace::lq(2, 1), NormedSpace::lq(1, 3), NormedSpace::lq(2, 4),
                                             NormedSpace::lq(4, 2), NormedSpace::lq(kInfinity, 3)};
  return s;
}

ExperimentConfig config(const std::string& kind, json j) { return config_from_json(j, kind); }

const IdentityRow* find_identity(const RunReport& r, const std::string& name) {
  for (const auto& id : r.identities)
    if (id.name == name) return &id;
  return nullptr;
}

// 1 -------------------------------------------------------------------------
Outcome identity_battery() {
  Outcome o;
  const auto r = verify_identities(config("verify-identities", {{"seed", 1}}));
  for (const char* name : {"verify-identities/polarization_vs_direct", "verify-identities/partition_decomposition",
                           "verify-identities/sign_average", "verify-identities/gradient", "verify-identities/euler"}) {
    const IdentityRow* id = find_identity(r, name);
    if (!id) {
      o.fail(std::string("missing ") + name);
      continue;
    }
    if (id->instances < 100) o.fail(std::string(name) + ": fewer than 100 instances");
    if (!(id->max_error <= 1e-9)) o.fail(std::string(name) + fmt(": max error %.3g", id->max_error));
  }
  o.detail = o.ok ? "5 identities x 100 instances, max error <= 1e-9" : o.detail;
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome integer_combinatorics() {
  Outcome o;
  const auto r = verify_identities(config("verify-identities", {{"seed", 1}}));
  for (const char* name : {"verify-identities/partition_count_and_multiplicity",
                           "verify-identities/multiplicity_formula_and_ratio_bounds",
                           "verify-identities/one_variable_multiplicity"}) {
    const IdentityRow* id = find_identity(r, name);
    if (!id) {
      o.fail(std::string("missing ") + name);
      continue;
    }
    if (id->max_error != 0.0) o.fail(std::string(name) + fmt(": %g mismatches", id->max_error));
  }
  // Independent cross-check of the integer identity at the corner k = m = 30.
  const BigCount lhs = multiplicity_N(30, 30) * big_binomial(900, 30);
  BigCount k_pow = 1;
  for (int i = 0; i < 30; ++i) k_pow *= 30;
  if (lhs != count_partitions(30, 30) * k_pow) o.fail("N(30,30) identity");
  if (o.ok) o.detail = "partition counts, N(k,m) identity, one-variable multiplicity, ratio bounds exact";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome gaussian_closed_form() {
  Outcome o;
  const NormedSpace scalar = NormedSpace::lq(2, 1);
  std::ostringstream d;
  for (int m = 1; m <= 4; ++m) {
    const GenPoly P(1, scalar, {{{static_cast<std::uint32_t>(m)}, {1.0}}});
    const double p = 2.0;
    const auto e = poly_moment(P, Distribution::gaussian(), p, plan_for("gaussian", 1000000, static_cast<std::uint64_t>(m)));
    const double expected = std::pow(std::tgamma(p * m / 2.0 + 1.0), 1.0 / p);
    const double z = (e.value - expected) / e.std_error;
    d << "pm=" << 2 * m << " z=" << fmt("%.2f", z) << " ";
    if (!(std::abs(z) <= 4.0)) o.fail(d.str());
  }
  if (o.ok) o.detail = d.str();
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome kwapien_exact() {
  Outcome o;
  int checked = 0;
  double lo_seen = INFINITY, hi_seen = 0;
  for (int i = 0; i < 25; ++i) {
    const int m = 2 + i % 2;
    const int n = m == 2 ? 4 + i % 9 : 3 + i % 6;  // nm <= 24
    const TetraPoly P = random_poly(n, m, spaces()[static_cast<std::size_t>(i) % spaces().size()],
                                    static_cast<std::uint64_t>(i), true, i % 3 == 0 ? 0.5 : 1.0);
    const SymMultilinear M(P);
    for (double p : {1.0, 2.0}) {
      const double ratio = poly_moment_exact_rademacher(P, p).value / decoupled_moment_exact_rademacher(M, p).value;
      lo_seen = std::min(lo_seen, ratio / kwapien_low(m));
      hi_seen = std::max(hi_seen, ratio / kwapien_high(m));
      if (!(ratio >= kwapien_low(m) && ratio <= kwapien_high(m)))
        o.fail(fmt("m=%g n=%g ratio=%.6g", m, n, ratio));
      ++checked;
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " exact ratios, min ratio/low " + fmt("%.3g", lo_seen) +
                       ", max ratio/high " + fmt("%.3g", hi_seen);
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome gaussian_bracket() {
  Outcome o;
  std::ostringstream d;
  for (int i = 0; i < 4; ++i) {
    const TetraPoly P = random_poly(8, 2, spaces()[static_cast<std::size_t>(i)], 100 + static_cast<std::uint64_t>(i));
    const auto plan = plan_for("gauss-bracket", 100000, static_cast<std::uint64_t>(i));
    const auto lhs = poly_moment(P, Distribution::gaussian(), 2.0, substream(plan, 0));
    const auto rhs = decoupled_moment(SymMultilinear(P), Distribution::gaussian(), 2.0, substream(plan, 1));
    const auto r = make_ratio(lhs, rhs, gaussian_low(2), gaussian_high(2));
    d << fmt("%.4f+-%.4f ", r.ratio, r.ratio_se);
    if (r.verdict == Verdict::Outside) o.fail("outside: " + d.str());
  }
  if (o.ok) o.detail = "ratios in [1,2]: " + d.str();
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome partition_sandwich() {
  Outcome o;
  int checked = 0;
  for (auto [k, m] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const auto partitions = enumerate_partitions(k, m);
    for (int i = 0; i < 5; ++i) {
      const TetraPoly P = random_poly(k * m, m, spaces()[static_cast<std::size_t>(i)],
                                      200 + static_cast<std::uint64_t>(10 * k + m + 100 * i));
      std::vector<PartitionOperator> ops;
      for (const auto& pi : partitions) ops.emplace_back(P, pi);
      for (double p : {1.0, 2.0}) {
        double avg = 0;
        for (const auto& L : ops) avg += partition_moment_exact_rademacher(L, p).value;
        avg /= static_cast<double>(ops.size());
        const double norm_P = poly_moment_exact_rademacher(P, p).value;
        if (!(avg <= norm_P && norm_P <= std::exp(static_cast<double>(m)) * avg))
          o.fail(fmt("k=%g m=%g: norm/avg=%.6g", k, m, norm_P / avg));
        ++checked;
      }
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " exact sandwiches";
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome steinhaus_rademacher() {
  Outcome o;
  int checked = 0, inside = 0;
  for (int m = 1; m <= 3; ++m)
    for (int n : {m + 1, 6, 10}) {
      const TetraPoly P = random_poly(n, m, spaces()[static_cast<std::size_t>(n + m) % spaces().size()],
                                      300 + static_cast<std::uint64_t>(10 * m + n), false);
      for (double p : {1.0, 2.0}) {
        const auto w = poly_moment(P, Distribution::steinhaus(), p,
                                   plan_for("stein-rad", 100000, static_cast<std::uint64_t>(100 * m + n)));
        const auto x = poly_moment_exact_rademacher(P, p);
        const double c = steinhaus_walsh_constant(m);
        const auto r = make_ratio(w, x, 1.0 / c, c);
        if (r.verdict == Verdict::Outside) o.fail(fmt("m=%g n=%g ratio=%.6g", m, n, r.ratio));
        inside += r.verdict == Verdict::Inside;
        ++checked;
      }
    }
  if (o.ok) o.detail = std::to_string(inside) + "/" + std::to_string(checked) + " inside, none outside";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome counterexample() {
  Outcome o;
  const auto r = run_counterexample(config("counterexample", {{"seed", 3}}));
  const ReportRow *freq = nullptr, *sup = nullptr;
  for (const auto& row : r.rows) {
    if (row.experiment == "counterexample/event_frequency") freq = &row;
    if (row.experiment == "counterexample/sup_moment" && row.p == 1.0) sup = &row;
  }
  if (!freq || !sup) {
    o.fail("missing rows");
    return o;
  }
  if (r.total_samples != 2000) o.fail("expected N = 2000");
  if (sup->m != 3 || sup->n != 120) o.fail("expected m = 3, n = 120");
  const double f = freq->report.lhs.value, f_se = freq->report.lhs.std_error;
  const double s = sup->report.lhs.value, s_se = sup->report.lhs.std_error;
  if (!(f >= 0.5 - 3 * f_se)) o.fail(fmt("frequency %.4f (se %.4f)", f, f_se));
  if (!(s >= 13.5 - 4 * s_se)) o.fail(fmt("E sup %.4f (se %.4f)", s, s_se));
  for (const char* name : {"counterexample/norm_of_P_eps_is_one", "counterexample/order_statistic_shortcut"}) {
    const IdentityRow* id = find_identity(r, name);
    if (!id || !id->passed()) o.fail(std::string("identity ") + name);
  }
  if (o.ok) o.detail = fmt("frequency %.4f (se %.4f), E sup %.3f", f, f_se, s);
  return o;
}

// 9, 10 ---------------------------------------------------------------------
RunReport one_variable_run() {
  static const RunReport r = run_one_variable(config(
      "one-variable", {{"samples", 100000},
                       {"seed", 4},
                       {"distributions", {"gaussian", "steinhaus"}},
                       {"m_values", {2, 4}},
                       {"p", {1, 2}},
                       {"polynomial", {{"random", {{"n", 8}, {"m", 2}}}}}}));
  return r;
}

Outcome one_variable_rows(const std::string& row_name, const std::string& dist) {
  Outcome o;
  const RunReport r = one_variable_run();
  int count = 0;
  std::ostringstream d;
  for (const auto& row : r.rows) {
    if (row.experiment != row_name || row.dist != dist) continue;
    ++count;
    if (row.n != 8) o.fail("expected n = 8");
    d << fmt("m=%g p=%g %.3f ", row.m, row.p, row.report.ratio);
    if (row.report.verdict == Verdict::Outside) o.fail("outside: " + d.str());
  }
  if (count != 4) o.fail("expected 4 rows, got " + std::to_string(count));
  if (o.ok) o.detail = d.str();
  return o;
}

// 11 ------------------------------------------------------------------------
Outcome kahane() {
  Outcome o;
  const auto r = run_kahane(config("kahane", {{"seed", 5}}));
  int count = 0;
  double worst = -INFINITY;
  for (const auto& row : r.rows) {
    const auto& rep = row.report;
    ++count;
    if (row.n > 6 || row.m > 3) o.fail("polynomial too large");
    const double slack = rep.lhs.value - rep.rhs.value - 4 * std::hypot(rep.lhs.std_error, rep.rhs.std_error);
    worst = std::max(worst, slack);
    if (slack > 0) o.fail(fmt("lhs %.5g > rhs %.5g", rep.lhs.value, rep.rhs.value));
  }
  if (count != 50) o.fail("expected 50 polynomials, got " + std::to_string(count));
  if (o.ok) o.detail = std::to_string(count) + " polynomials, max lhs - rhs - 4se = " + fmt("%.3g", worst);
  return o;
}

// 12 ------------------------------------------------------------------------
Outcome hilbert_exactness() {
  Outcome o;
  const NormedSpace l2 = NormedSpace::lq(2, 8);
  std::ostringstream d;
  for (int i = 0; i < 3; ++i) {
    const TetraPoly P = random_poly(5, 2 + i % 2, l2, 400 + static_cast<std::uint64_t>(i), false, 0.8);
    double ss = 0;
    for (std::size_t t = 0; t < P.size(); ++t)
      for (auto c : P.coefficient(t)) ss += std::norm(c);
    const double closed = std::sqrt(ss);
    const auto mc = poly_moment(P, Distribution::steinhaus(), 2.0, plan_for("hilbert", 100000, static_cast<std::uint64_t>(i)));
    if (!(std::abs(mc.value - closed) <= 4 * mc.std_error)) o.fail(fmt("MC %.6g vs %.6g", mc.value, closed));
    const auto fam = coefficient_family(P);
    const std::vector<double> ones(fam.vectors.size(), 1.0);
    if (fam.vectors.size() > kMaxIndependentEnumeration) {
      o.fail("polynomial too large for exact path");
      continue;
    }
    const auto ex = independent_sum_moment(fam, ones, 2.0, plan_for("hilbert-ind", 1));
    if (ex.method != Method::ExactEnumeration) o.fail("independent sum not exact");
    if (!(std::abs(ex.value - closed) <= 1e-12 * closed)) o.fail(fmt("exact %.17g vs %.17g", ex.value, closed));
    d << fmt("terms=%g mc z=%.2f ", static_cast<double>(P.size()), (mc.value - closed) / mc.std_error);
  }
  if (o.ok) o.detail = d.str();
  return o;
}

// 13 ------------------------------------------------------------------------
void compare_numbers(const json& a, const json& b, double& worst, bool& same_shape) {
  if (a.type() != b.type() && !(a.is_number() && b.is_number())) {
    same_shape = false;
    return;
  }
  if (a.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (x != y) worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), std::abs(y)));
  } else if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        same_shape = false;
        continue;
      }
      if (it.key() == "threads") continue;
      compare_numbers(it.value(), b.at(it.key()), worst, same_shape);
    }
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      same_shape = false;
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) compare_numbers(a[i], b[i], worst, same_shape);
  } else if (a != b) {
    same_shape = false;
  }
}

Outcome determinism() {
  Outcome o;
  int runs = 0;
  double worst = 0;
  for (const std::string kind : {"full-decoupling", "comparison", "one-variable", "independent-sum"}) {
    json j = {{"samples", 20000}, {"seed", 13}};
    const auto cfg = config(kind, j);
    const std::string first = report_to_json(run_experiment(cfg)).dump();
    const std::string second = report_to_json(run_experiment(cfg)).dump();
    if (first != second) o.fail(kind + ": reruns differ");
    j["threads"] = 3;
    const json threaded = report_to_json(run_experiment(config(kind, j)));
    bool same_shape = true;
    compare_numbers(json::parse(first), threaded, worst, same_shape);
    if (!same_shape) o.fail(kind + ": thread-count run has a different shape");
    runs += 3;
  }
  if (!(worst <= 1e-12)) o.fail(fmt("thread-count relative difference %.3g", worst));
  if (o.ok) o.detail = std::to_string(runs) + " runs, reruns byte-identical, threads 1 vs 3 max rel diff " +
                       fmt("%.3g", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity battery", identity_battery},
      {"integer combinatorics", integer_combinatorics},
      {"gaussian closed form", gaussian_closed_form},
      {"kwapien sandwich (exact)", kwapien_exact},
      {"gaussian bracket", gaussian_bracket},
      {"partition sandwich", partition_sandwich},
      {"steinhaus/rademacher bracket", steinhaus_rademacher},
      {"counterexample", counterexample},
      {"one-variable gaussian", [] { return one_variable_rows("one-variable/scaled_one_variable", "gaussian"); }},
      {"one-variable steinhaus", [] { return one_variable_rows("one-variable/steinhaus_upper", "steinhaus"); }},
      {"kahane-khinchin", kahane},
      {"hilbert-space exactness", hilbert_exactness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s AC%zu %s (%.1fs): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}
