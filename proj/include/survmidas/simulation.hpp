#pragma once

#include "survmidas/model_selection.hpp"

namespace survmidas {

struct ScenarioSpec {
  int scenario = 1;   // 1: light dependence, 2: persistent AR, 3: heavy tails
  int n = 800;
  int k = 50;
  double s = 6;
  int m = 4;
  double rho = 0.1;
  double rho0 = 0.1;
  double target_censoring = 0.81;
  std::uint64_t seed = 0;

  int d() const { return static_cast<int>(std::lround(s * m)); }
};

// sets (rho, rho0) and the innovation law for the given scenario number
ScenarioSpec make_scenario(int scenario, int n, std::uint64_t seed);

// Beta(a, b) density evaluated at (j-1)/d, j = 1..d.
Vec beta_weights(double a, double b, int d);

// True high-frequency coefficients of the logistic representation at (t, s):
// rows 1 and 2 carry (1 + log(t-s)) * w1 and (log(t-s) - 1) * w2, the rest 0.
struct TrueParams {
  double intercept = 0;  // 1 + log(t - s)
  Mat theta;             // K x d
};
TrueParams true_params(double t, double s, int k, int d);

// AR(1) mixed-frequency panels with Toeplitz cross-sectional correlation;
// absolute values applied last. panels[i] is K x d, lag 1 most recent.
std::vector<Mat> gen_covariates(const ScenarioSpec& spec);

// T = s + exp((logit(zeta) - (1 + A - B)) / (1 + A + B)) with
// A = sum_j w1((j-1)/d) x_{j,1}, B = sum_j w2((j-1)/d) x_{j,2}.
double survival_time(const Mat& panel, double s, double zeta, int* redraw_flag);

// Rate calibration of C = s + Exp(gamma) by bisection on a pilot draw;
// achieves |rate - target| <= 0.01 or throws.
double calibrate_gamma(const std::vector<double>& true_times, double s,
                       double target, std::uint64_t seed,
                       double* achieved = nullptr);

struct SimulatedData {
  Dataset dataset;
  std::vector<double> true_time;
  std::vector<double> censor_time;
  double gamma = 0;
  double censoring_rate = 0;
  int redraws = 0;
};

SimulatedData simulate_dataset(const ScenarioSpec& spec);

enum class Method { lasso_u, lasso_m, sg_lasso_m };
std::string method_name(Method m);

struct Table2Config {
  std::vector<int> scenarios = {1};
  int n = 1200;
  int replications = 100;
  std::vector<double> percentiles = {0.10, 0.30, 0.50};
  std::vector<Method> methods = {Method::lasso_u, Method::lasso_m,
                                 Method::sg_lasso_m};
  std::uint64_t seed = 0;
  int midas_L = 3;
  CvPlan plan;  // alpha grid is overridden to {1} for the LASSO methods
};

struct Table2Cell {
  int scenario = 1;
  double percentile = 0;
  Method method = Method::sg_lasso_m;
  double mean_auc = 0, sd_auc = 0;
  std::vector<double> aucs;  // one per replication, NaN if degenerate
};

// fit one method via CV on train and return its test-set AUC
double method_test_auc(Method method, const Dataset& train, const Dataset& test,
                       double t, int midas_L, const CvPlan& plan);

std::vector<Table2Cell> run_table2(const Table2Config& cfg, int threads = 1);

void save_table2_csv(const std::vector<Table2Cell>& cells, const std::string& path,
                     const std::string& header_comment);

}  // namespace survmidas
