#pragma once

#include "survmidas/solver.hpp"

namespace survmidas {

// A fitted model together with everything needed to predict on new data.
struct Model {
  Vec beta;  // intercept + K groups of L, original scale
  MidasDictionary dictionary;
  std::vector<std::string> covariate_names;
  double lambda = 0;
  double alpha = 1;
  double s = 0;
  double t = 0;
  int m = 1;
};

void save_model_json(const Model& model, const std::string& path);
Model load_model_json(const std::string& path);

}  // namespace survmidas
