#include "survmidas/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace survmidas {

using nlohmann::json;

void save_model_json(const Model& model, const std::string& path) {
  const auto& w = model.dictionary;
  const int L = w.family == DictFamily::unrestricted ? w.d : w.L;
  const int k = static_cast<int>(model.covariate_names.size());
  if (model.beta.size() != 1 + static_cast<long>(k) * L)
    throw std::invalid_argument("save_model_json: beta length does not match k*L + 1");

  json groups = json::array();
  for (int g = 0; g < k; ++g) {
    json coefs = json::array();
    for (int l = 0; l < L; ++l) coefs.push_back(model.beta[1 + g * L + l]);
    groups.push_back({{"name", model.covariate_names[g]}, {"coefs", coefs}});
  }
  json j = {
      {"intercept", model.beta[0]},
      {"groups", groups},
      {"dictionary",
       {{"family", family_name(w.family)},
        {"alpha_poly", w.alpha_poly},
        {"beta_poly", w.beta_poly},
        {"L", L},
        {"d", w.d}}},
      {"lambda", model.lambda},
      {"alpha", model.alpha},
      {"s", model.s},
      {"t", model.t},
      {"m", model.m},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Model load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;

  Model model;
  const auto& dj = j.at("dictionary");
  const std::string fam = dj.at("family").get<std::string>();
  const int L = dj.at("L").get<int>();
  const int d = dj.at("d").get<int>();
  if (fam == "unrestricted") {
    model.dictionary = unrestricted_dictionary(d);
  } else if (fam == "legendre") {
    model.dictionary = legendre_dictionary(L, d);
  } else if (fam == "gegenbauer") {
    model.dictionary = gegenbauer_dictionary(dj.at("alpha_poly").get<double>(), L, d);
  } else if (fam == "chebyshev1") {
    model.dictionary = chebyshev_dictionary(1, L, d);
  } else if (fam == "chebyshev2") {
    model.dictionary = chebyshev_dictionary(2, L, d);
  } else if (fam == "jacobi") {
    model.dictionary = jacobi_dictionary(dj.at("alpha_poly").get<double>(),
                                         dj.at("beta_poly").get<double>(), L, d);
  } else {
    throw std::runtime_error("unknown dictionary family: " + fam);
  }

  const auto& groups = j.at("groups");
  const int k = static_cast<int>(groups.size());
  const int cols = fam == "unrestricted" ? d : L;
  model.beta = Vec::Zero(1 + static_cast<long>(k) * cols);
  model.beta[0] = j.at("intercept").get<double>();
  model.covariate_names.resize(k);
  for (int g = 0; g < k; ++g) {
    model.covariate_names[g] = groups[g].at("name").get<std::string>();
    const auto& coefs = groups[g].at("coefs");
    if (static_cast<int>(coefs.size()) != cols)
      throw std::runtime_error("model group has wrong coefficient count");
    for (int l = 0; l < cols; ++l) model.beta[1 + g * cols + l] = coefs[l].get<double>();
  }
  model.lambda = j.at("lambda").get<double>();
  model.alpha = j.at("alpha").get<double>();
  model.s = j.at("s").get<double>();
  model.t = j.at("t").get<double>();
  model.m = j.at("m").get<int>();
  return model;
}

}  // namespace survmidas
