#pragma once

#include <optional>

#include "survmidas/censoring.hpp"
#include "survmidas/midas.hpp"

namespace survmidas {

// Omega(b) = alpha * |b_pen|_1 + (1 - alpha) * sum_G |b_G|_2 over penalized
// coordinates; alpha = 1 is the LASSO, alpha = 0 the group LASSO.
struct PenaltySpec {
  double alpha = 1.0;
  double lambda = 0.0;
};

struct SolverOptions {
  double tol = 1e-7;      // KKT tolerance
  int max_iter = 10000;
  bool standardize = true;
  std::optional<Vec> warm_start;  // on the original scale
  bool trace = false;             // record the per-iteration objective
  // The weighted risk is unbounded below when some weights exceed 1 and the
  // data are separable along a penalty-cheap direction; stop (converged =
  // false) once the standardized-scale iterate norm passes this bound.
  double divergence_norm = 1e4;
  // Each per-sample risk term is nonnegative whenever f_i <= 1, so a strongly
  // negative objective certifies the same unboundedness much earlier.
  double divergence_objective = -2.0;
};

struct FitResult {
  Vec beta;             // original (unstandardized) scale, intercept first
  double objective = 0; // R_N + lambda*Omega of the problem actually solved
  int iterations = 0;
  double kkt_residual = 0;
  double lambda = 0;
  double alpha = 1;
  bool converged = false;
  bool diverged = false;  // hit a divergence guard (objective unbounded below)
  Vec center, scale;    // standardization applied internally
  std::vector<double> objective_trace;  // filled when SolverOptions::trace
};

// R_N(beta) = (1/N) sum_i [ -f_i x_i^T beta + log(1 + exp(x_i^T beta)) ]
double empirical_risk(const Mat& x, const Vec& weights, const Vec& beta);
Vec risk_gradient(const Mat& x, const Vec& weights, const Vec& beta);

// Proximal operator of step * lambda * Omega: per penalized group,
// coordinate soft-threshold at step*lambda*alpha, then group shrinkage by
// step*lambda*(1-alpha); unpenalized coordinates pass through.
Vec prox_sg(const Vec& v, double step, double lambda, double alpha,
            const std::vector<std::vector<int>>& groups,
            const std::vector<bool>& penalized);

// Max KKT violation of the sparse-group LASSO stationarity conditions at beta,
// given the risk gradient g.
double kkt_residual(const Vec& g, const Vec& beta, double lambda, double alpha,
                    const std::vector<std::vector<int>>& groups,
                    const std::vector<bool>& penalized);

// Accelerated proximal gradient with backtracking and restart on objective
// increase; Lipschitz seed lambda_max(X^T X) / (4N).
FitResult fit(const DesignMatrix& x, const IpcwWeights& w, const PenaltySpec& spec,
              const SolverOptions& opts = {});

// Descending log-spaced grid from lambda_max (smallest lambda with all
// penalized coefficients zero) down to ratio * lambda_max.
std::vector<double> lambda_path(const DesignMatrix& x, const IpcwWeights& w,
                                double alpha, int n_lambda, double ratio,
                                bool standardize = true);

// Warm-started fits along a descending lambda grid.
std::vector<FitResult> fit_path(const DesignMatrix& x, const IpcwWeights& w,
                                double alpha, const std::vector<double>& lambdas,
                                const SolverOptions& opts = {});

inline double predict_prob(const Vec& beta, const Vec& x_row) {
  double p = sigmoid(x_row.dot(beta));
  return std::min(1.0 - 1e-15, std::max(1e-15, p));
}

Vec predict_probs(const Vec& beta, const Mat& x);

}  // namespace survmidas
