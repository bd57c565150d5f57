#pragma once

#include <optional>

#include "survmidas/censoring.hpp"

namespace survmidas {

struct ScoredSample {
  Vec scores;   // predicted probabilities in [0,1]
  Vec tilde_t;
  Eigen::VectorXi delta;
  double t = 0;  // horizon

  int n() const { return static_cast<int>(scores.size()); }
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (FPR, TPR), sorted by FPR
  double auc = 0;       // after the monotonization step
  double auc_raw = 0;   // trapezoid on the raw clamped curve
  double kappa = 0;
  int skipped_factors = 0;  // empty-risk-set factors skipped in the KM products
};

class DegenerateHorizon : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nearest-neighbor conditional survival S_kappa(t | score_i): weighted
// Kaplan-Meier over the rank neighborhood {j : |F(s_i) - F(s_j)| < kappa},
// product over event times a <= t of 1 - d(a)/risk(a).
Vec nn_conditional_survival(const ScoredSample& s, double kappa,
                            int* skipped = nullptr);

RocCurve roc_curve(const ScoredSample& s, double kappa);

// Span rule of the reference implementation: 2*kappa = 0.25 * n^{-1/5}.
double default_kappa(int n);

// Negative IPCW-weighted logistic risk of the scores (higher is better).
double likelihood_score(const ScoredSample& s, const IpcwWeights& w);

struct BootstrapAuc {
  std::vector<double> aucs;
  double ci_lo = 0, ci_hi = 0;  // percentile 2.5 / 97.5
  int skipped = 0;              // degenerate replicates
};

BootstrapAuc bootstrap_auc(const ScoredSample& s, int b, std::uint64_t seed,
                           std::optional<double> kappa_override = std::nullopt);

// One AUC per replicate index, NaN where the replicate was degenerate; the
// resample of replicate r depends only on (seed, r).
std::vector<double> bootstrap_auc_indexed(
    const ScoredSample& s, int b, std::uint64_t seed,
    std::optional<double> kappa_override = std::nullopt);

// p = (1/b) * #{r : auc_a[r] < auc_b[r]}; ties count as not-smaller.
double pairwise_auc_test(const std::vector<double>& auc_a,
                         const std::vector<double>& auc_b);

void save_roc_csv(const RocCurve& roc, const std::string& path);
void save_roc_svg(const RocCurve& roc, const std::string& path);

}  // namespace survmidas
