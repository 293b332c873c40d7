#include <cstdio>
#include <sstream>

#include "decoup/experiments.hpp"

#ifndef DECOUP_VERSION
#define DECOUP_VERSION "0.0.0"
#endif

namespace decoup {

std::string library_version() { return DECOUP_VERSION; }

bool RunReport::any_outside() const {
  for (const auto& r : rows)
    if (r.report.verdict == Verdict::Outside) return true;
  for (const auto& i : identities)
    if (!i.passed()) return true;
  return false;
}

nlohmann::json report_to_json(const RunReport& r, bool include_timing) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["version"] = r.version;
  j["config"] = r.config;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json e = row.report;
    e["experiment"] = row.experiment;
    e["m"] = row.m;
    e["n"] = row.n;
    e["p"] = row.p;
    e["dist"] = row.dist;
    e["seed"] = row.seed;
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& i : r.identities)
    ids.push_back({{"name", i.name},
                   {"max_error", i.max_error},
                   {"tolerance", i.tolerance},
                   {"instances", i.instances},
                   {"verdict", i.passed() ? "inside" : "outside"}});
  j["identities"] = std::move(ids);
  j["extras"] = r.extras;
  j["notes"] = r.notes;
  j["total_samples"] = r.total_samples;
  if (include_timing) j["wall_time"] = r.wall_time;
  return j;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : ""; }

}  // namespace

std::string report_to_csv(const RunReport& r) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& row : r.rows) {
    const auto& rep = row.report;
    out << row.experiment << ',' << row.m << ',' << row.n << ',' << num(row.p) << ',' << row.dist << ','
        << num(rep.lhs.value) << ',' << num(rep.lhs.std_error) << ',' << num(rep.rhs.value) << ','
        << num(rep.rhs.std_error) << ',' << num(rep.ratio) << ',' << opt(rep.bound_low) << ','
        << opt(rep.bound_high) << ',' << to_string(rep.verdict) << ',' << row.seed << '\n';
  }
  const std::uint64_t seed = r.config.contains("seed") ? r.config["seed"].get<std::uint64_t>() : 0;
  for (const auto& i : r.identities) {
    out << i.name << ",,,," << "identity" << ',' << num(i.max_error) << ",0,,," << num(i.max_error) << ",0,"
        << num(i.tolerance) << ',' << (i.passed() ? "inside" : "outside") << ',' << seed << '\n';
  }
  return out.str();
}

}  // namespace decoup
