#pragma once

#include <functional>

#include "survmidas/evaluation.hpp"
#include "survmidas/solver.hpp"

namespace survmidas {

enum class CvMetric { auc, likelihood };

struct CvPlan {
  int k = 5;
  CvMetric metric = CvMetric::auc;
  std::vector<double> alpha_grid = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  int n_lambda = 25;
  double lambda_ratio = 0.01;
  std::uint64_t seed = 0;
  double oversample_target = 0;   // 0 disables oversampling
  bool drop_censored = false;     // drop-censored baseline: plain logistic loss
  // held-out metrics are insensitive to the last digits of beta, so the CV
  // inner solver runs looser than the defaults
  SolverOptions solver{.tol = 1e-5, .max_iter = 3000};
};

struct CvCell {
  double alpha = 1, lambda = 0;
  double mean_metric = 0, sd_metric = 0;
  int valid_folds = 0;
};

struct CvResult {
  std::vector<CvCell> cells;
  double best_alpha = 1, best_lambda = 0, best_metric = 0;
  FitResult refit;  // on the full training data at the best cell
};

// Event and non-event units are split independently at ratio frac (floor to
// train); deterministic under seed and invariant to input row order.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double t,
                                             double frac, std::uint64_t seed);

// k folds of record indices; per-fold event counts within 1 of N_events/k.
std::vector<std::vector<int>> stratified_folds(const Dataset& ds, double t, int k,
                                               std::uint64_t seed);

// Duplicates minority (event-indicator = 1) units uniformly at random until
// their proportion reaches target.
Dataset oversample(const Dataset& train, double t, double target,
                   std::uint64_t seed);

// Removes units with delta = 0 and tilde_t < t; the rest are treated as fully
// observed (indicator weights, standard logistic loss).
Dataset drop_censored_filter(const Dataset& ds, double t);

// IPCW weights for the fitting pipeline: KM refit on ds unless plain
// indicator weights are requested (drop-censored baseline).
IpcwWeights pipeline_weights(const Dataset& ds, double t, bool drop_censored);

CvResult cross_validate(const Dataset& ds, double t, const MidasDictionary& dict,
                        const CvPlan& plan);

ScoredSample score_dataset(const Dataset& ds, double t, const MidasDictionary& dict,
                           const Vec& beta);

struct ProtocolResult {
  std::vector<double> averaged_aucs;  // b per-index averages across splits
  double mean = 0, ci_lo = 0, ci_hi = 0;
  int skipped_replicates = 0;
};

// fit on train, return scores for test
using MethodFn = std::function<Vec(const Dataset& train, const Dataset& test,
                                   double t, std::uint64_t seed)>;

// Per split: stratified 80/20-style split at `frac`, method fit + test scores,
// b bootstrap AUCs; replicate r is averaged across splits at fixed index r.
// Resample indices depend only on (seed, split, r), so two methods fed the
// same data see identical resamples.
ProtocolResult repeated_split_protocol(const Dataset& ds, double t,
                                       const MethodFn& method, int n_splits, int b,
                                       double frac, std::uint64_t seed);

}  // namespace survmidas
