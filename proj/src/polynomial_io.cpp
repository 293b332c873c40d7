#include <fstream>
#include <stdexcept>

#include "decoup/polynomials.hpp"

namespace decoup {

namespace {

std::vector<Scalar> read_coeff(const nlohmann::json& c) {
  std::vector<Scalar> out;
  if (!c.is_array()) throw std::invalid_argument("coeff must be an array of [re, im] pairs");
  for (const auto& pair : c) {
    if (pair.is_number()) {
      out.emplace_back(pair.get<double>(), 0.0);
    } else if (pair.is_array() && pair.size() == 2) {
      out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    } else {
      throw std::invalid_argument("coefficient entries must be numbers or [re, im]");
    }
  }
  return out;
}

nlohmann::json write_coeff(std::span<const Scalar> c) {
  auto out = nlohmann::json::array();
  for (const auto& x : c) out.push_back({x.real(), x.imag()});
  return out;
}

}  // namespace

AnyPoly polynomial_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const NormedSpace space = j.at("space").get<NormedSpace>();
  std::optional<int> degree;
  if (j.contains("degree")) degree = j.at("degree").get<int>();
  const bool homogeneous = j.value("homogeneous", false);
  const auto& terms = j.at("terms");

  bool any_subset = false, any_alpha = false;
  for (const auto& t : terms) {
    any_subset |= t.contains("subset");
    any_alpha |= t.contains("alpha");
  }
  if (any_subset && any_alpha) throw std::invalid_argument("polynomial file mixes subset and alpha terms");

  if (any_alpha) {
    std::vector<GenTerm> out;
    for (const auto& t : terms) out.push_back({t.at("alpha").get<MultiIndex>(), read_coeff(t.at("coeff"))});
    GenPoly P(n, space, std::move(out), degree);
    if (homogeneous && degree && !P.is_homogeneous(*degree))
      throw std::invalid_argument("polynomial declared homogeneous but has mixed degrees");
    return P;
  }
  if (n > kMaxVariables) throw std::invalid_argument("subset polynomials support at most 63 variables");
  std::vector<TetraTerm> out;
  for (const auto& t : terms) {
    const auto idx = t.at("subset").get<std::vector<int>>();
    for (int e : idx)
      if (e < 0 || e >= n) throw std::invalid_argument("subset index out of range");
    const SubsetMask A = mask_of(idx);
    if (subset_size(A) != static_cast<int>(idx.size())) throw std::invalid_argument("subset lists an index twice");
    out.push_back({A, read_coeff(t.at("coeff"))});
  }
  if (homogeneous) {
    if (!degree) throw std::invalid_argument("homogeneous polynomial needs a degree");
    return TetraPoly(n, space, std::move(out), degree);
  }
  TetraPoly P(n, space, std::move(out));
  if (degree && P.degree() > *degree) throw std::invalid_argument("term degree exceeds the declared degree");
  return P;
}

nlohmann::json polynomial_to_json(const TetraPoly& P) {
  nlohmann::json j;
  j["n"] = P.variables();
  j["degree"] = P.degree();
  j["space"] = P.space();
  const auto h = P.homogeneous_degree();
  j["homogeneous"] = h.has_value();
  if (h) j["degree"] = *h;
  auto terms = nlohmann::json::array();
  for (std::size_t t = 0; t < P.size(); ++t)
    terms.push_back({{"subset", subset_elements(P.subsets()[t])}, {"coeff", write_coeff(P.coefficient(t))}});
  j["terms"] = std::move(terms);
  return j;
}

nlohmann::json polynomial_to_json(const GenPoly& P) {
  nlohmann::json j;
  j["n"] = P.variables();
  j["degree"] = P.degree();
  j["space"] = P.space();
  auto terms = nlohmann::json::array();
  for (std::size_t t = 0; t < P.size(); ++t)
    terms.push_back({{"alpha", P.alphas()[t]}, {"coeff", write_coeff(P.coefficient(t))}});
  j["terms"] = std::move(terms);
  return j;
}

AnyPoly read_polynomial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open polynomial file: " + path);
  return polynomial_from_json(nlohmann::json::parse(in));
}

}  // namespace decoup
