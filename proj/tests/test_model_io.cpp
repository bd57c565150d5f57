#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "survmidas/model_io.hpp"
#include "survmidas/simulation.hpp"

using namespace survmidas;

namespace {

Model fitted_model(const MidasDictionary& dict, std::uint64_t seed) {
  ScenarioSpec spec = make_scenario(1, 120, seed);
  const Dataset ds = simulate_dataset(spec).dataset;
  const double t = 7.0;
  const IpcwWeights w = ipcw_weights(ds, fit_censoring_km(ds), t);
  const DesignMatrix x = aggregate(ds, dict);
  SolverOptions opts;
  opts.tol = 1e-6;
  const std::vector<double> grid = lambda_path(x, w, 1.0, 4, 0.2);
  const FitResult fr = fit(x, w, {.alpha = 1.0, .lambda = grid[2]}, opts);

  Model model;
  model.beta = fr.beta;
  model.dictionary = dict;
  model.covariate_names = ds.covariate_names;
  model.lambda = fr.lambda;
  model.alpha = fr.alpha;
  model.s = ds.s;
  model.t = t;
  model.m = ds.m;
  return model;
}

void check_round_trip(const Model& a) {
  const std::string path = "model_roundtrip_test.json";
  save_model_json(a, path);
  const Model b = load_model_json(path);
  std::remove(path.c_str());

  REQUIRE(b.beta.size() == a.beta.size());
  CHECK((b.beta - a.beta).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(b.covariate_names == a.covariate_names);
  CHECK(b.lambda == doctest::Approx(a.lambda).epsilon(1e-12));
  CHECK(b.alpha == a.alpha);
  CHECK(b.s == a.s);
  CHECK(b.t == a.t);
  CHECK(b.m == a.m);
  CHECK(b.dictionary.family == a.dictionary.family);
  CHECK(b.dictionary.L == a.dictionary.L);
  CHECK(b.dictionary.d == a.dictionary.d);
  CHECK(b.dictionary.alpha_poly == doctest::Approx(a.dictionary.alpha_poly));
  CHECK(b.dictionary.beta_poly == doctest::Approx(a.dictionary.beta_poly));
  REQUIRE(b.dictionary.w.rows() == a.dictionary.w.rows());
  REQUIRE(b.dictionary.w.cols() == a.dictionary.w.cols());
  // the dictionary is rebuilt from its parameters, not stored numerically
  CHECK((b.dictionary.w - a.dictionary.w).cwiseAbs().maxCoeff() <= 1e-12);

  // predictions agree on fresh data
  // the censoring calibration needs a pilot large enough for 1/n < 0.01
  ScenarioSpec spec = make_scenario(1, 150, 777);
  const Dataset fresh = simulate_dataset(spec).dataset;
  const Mat xa = aggregate(fresh, a.dictionary).x;
  const Mat xb = aggregate(fresh, b.dictionary).x;
  const Vec pa = predict_probs(a.beta, xa);
  const Vec pb = predict_probs(b.beta, xb);
  CHECK((pa - pb).cwiseAbs().maxCoeff() <= 1e-12);
}

}  // namespace

TEST_CASE("model JSON round trip: gegenbauer dictionary") {
  check_round_trip(fitted_model(gegenbauer_dictionary(-0.5, 3, 24), 5));
}

TEST_CASE("model JSON round trip: jacobi dictionary") {
  check_round_trip(fitted_model(jacobi_dictionary(0.5, 1.5, 4, 24), 6));
}

TEST_CASE("model JSON round trip: unrestricted dictionary") {
  check_round_trip(fitted_model(unrestricted_dictionary(24), 7));
}

TEST_CASE("load_model_json rejects missing files and junk") {
  CHECK_THROWS(load_model_json("no_such_model_file.json"));
  const std::string path = "model_junk_test.json";
  {
    std::ofstream out(path);
    out << "{\"intercept\": 0.5}";
  }
  CHECK_THROWS(load_model_json(path));
  std::remove(path.c_str());
}
