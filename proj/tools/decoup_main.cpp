// decoup: runs one experiment and writes its report.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "decoup/experiments.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<int> threads;
  std::string out;
  std::string format = "json";
  bool timing = false;
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw decoup::ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw decoup::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

int run(const std::string& kind, const Options& opt) {
  decoup::ExperimentConfig cfg = decoup::config_from_json(load_config(opt.config_path), kind);
  if (cfg.polynomial_file && !opt.config_path.empty()) {
    const std::filesystem::path file(*cfg.polynomial_file);
    if (file.is_relative())
      cfg.polynomial_file = (std::filesystem::path(opt.config_path).parent_path() / file).string();
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.samples) {
    if (*opt.samples < 1) throw decoup::ConfigError("--samples must be positive");
    cfg.samples = *opt.samples;
  }
  if (opt.threads) {
    if (*opt.threads < 1) throw decoup::ConfigError("--threads must be positive");
    cfg.threads = *opt.threads;
  }

  const auto start = std::chrono::steady_clock::now();
  decoup::RunReport report = decoup::run_experiment(cfg);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string text = opt.format == "csv" ? decoup::report_to_csv(report)
                                               : decoup::report_to_json(report, opt.timing).dump(2) + "\n";
  const std::string out_path = !opt.out.empty() ? opt.out : cfg.output.value_or("");
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw decoup::ConfigError("cannot write " + out_path);
    out << text;
  }
  return report.any_outside() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoupling inequality experiments for vector-valued polynomials"};
  app.set_version_flag("--version", decoup::library_version());
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify-identities", "Exact identity battery over random instances"},
      {"full-decoupling", "P against its symmetric multilinear form M"},
      {"partition-decoupling", "P against the partition operators L_pi"},
      {"one-variable", "P against M(xi', xi, ..., xi)"},
      {"comparison", "Moments of P under different coordinate laws"},
      {"independent-sum", "Coefficients weighted by independent signs"},
      {"counterexample", "Sum of subset basis vectors in the subset sup space"},
      {"kahane", "Moment comparison for Steinhaus polynomials"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--samples", opt.samples, "Monte Carlo samples per estimate");
    sub->add_option("--threads", opt.threads, "Worker threads");
    sub->add_option("--out", opt.out, "Output file (default stdout)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", opt.timing, "Include wall time in JSON output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    return run(kind, opt);
  } catch (const decoup::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
