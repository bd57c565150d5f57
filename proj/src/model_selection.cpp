#include "survmidas/model_selection.hpp"

#include <algorithm>
#include <numeric>

namespace survmidas {

namespace {

// record indices sorted by id, so downstream shuffles are invariant to the
// dataset's row order
std::vector<int> id_order(const Dataset& ds) {
  std::vector<int> idx(static_cast<std::size_t>(ds.n()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return ds.records[static_cast<std::size_t>(a)].id <
           ds.records[static_cast<std::size_t>(b)].id;
  });
  return idx;
}

Dataset subset(const Dataset& ds, const std::vector<int>& idx) {
  Dataset out;
  out.s = ds.s;
  out.m = ds.m;
  out.reporting_delay = ds.reporting_delay;
  out.covariate_names = ds.covariate_names;
  out.records.reserve(idx.size());
  for (int i : idx) out.records.push_back(ds.records[static_cast<std::size_t>(i)]);
  return out;
}

double nan_mean(const std::vector<double>& v, int* count = nullptr) {
  double s = 0;
  int n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  if (count) *count = n;
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

double nan_sd(const std::vector<double>& v, double mean) {
  double s = 0;
  int n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      s += (x - mean) * (x - mean);
      ++n;
    }
  return n > 1 ? std::sqrt(s / (n - 1)) : 0.0;
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double t,
                                             double frac, std::uint64_t seed) {
  if (frac <= 0 || frac >= 1) throw std::invalid_argument("frac must be in (0,1)");
  std::vector<int> events, rest;
  for (int i : id_order(ds)) {
    if (event_indicator(ds.records[static_cast<std::size_t>(i)], t)) events.push_back(i);
    else rest.push_back(i);
  }
  if (events.size() < 2)
    throw std::runtime_error("stratified_split: fewer than 2 events at horizon t");
  auto rng = rng_stream(seed, {0x517ULL, 1});
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(rest.begin(), rest.end(), rng);

  std::vector<int> train_idx, test_idx;
  auto deal = [&](const std::vector<int>& stratum) {
    const auto n_train = static_cast<std::size_t>(
        std::floor(frac * static_cast<double>(stratum.size())));
    train_idx.insert(train_idx.end(), stratum.begin(), stratum.begin() + n_train);
    test_idx.insert(test_idx.end(), stratum.begin() + n_train, stratum.end());
  };
  deal(events);
  deal(rest);
  return {subset(ds, train_idx), subset(ds, test_idx)};
}

std::vector<std::vector<int>> stratified_folds(const Dataset& ds, double t, int k,
                                               std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  std::vector<int> events, rest;
  for (int i : id_order(ds)) {
    if (event_indicator(ds.records[static_cast<std::size_t>(i)], t)) events.push_back(i);
    else rest.push_back(i);
  }
  auto rng = rng_stream(seed, {0xf01d5ULL, 2});
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(rest.begin(), rest.end(), rng);
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < events.size(); ++i)
    folds[i % static_cast<std::size_t>(k)].push_back(events[i]);
  for (std::size_t i = 0; i < rest.size(); ++i)
    folds[(events.size() + i) % static_cast<std::size_t>(k)].push_back(rest[i]);
  return folds;
}

Dataset oversample(const Dataset& train, double t, double target,
                   std::uint64_t seed) {
  if (target <= 0 || target >= 1)
    throw std::invalid_argument("oversample target must be in (0,1)");
  std::vector<int> minority;
  for (int i = 0; i < train.n(); ++i)
    if (event_indicator(train.records[static_cast<std::size_t>(i)], t))
      minority.push_back(i);
  if (minority.empty())
    throw std::runtime_error("oversample: no minority (event) units");
  const auto n = static_cast<double>(train.n());
  const auto n_min = static_cast<double>(minority.size());
  if (n_min / n >= target) return train;
  const auto extra =
      static_cast<std::size_t>(std::ceil((target * n - n_min) / (1.0 - target)));
  Dataset out = train;
  auto rng = rng_stream(seed, {0x05a3ULL, 3});
  std::uniform_int_distribution<std::size_t> pick(0, minority.size() - 1);
  for (std::size_t r = 0; r < extra; ++r)
    out.records.push_back(
        train.records[static_cast<std::size_t>(minority[pick(rng)])]);
  return out;
}

Dataset drop_censored_filter(const Dataset& ds, double t) {
  Dataset out;
  out.s = ds.s;
  out.m = ds.m;
  out.reporting_delay = ds.reporting_delay;
  out.covariate_names = ds.covariate_names;
  for (const auto& rec : ds.records)
    if (!(rec.delta == 0 && rec.tilde_t < t)) out.records.push_back(rec);
  return out;
}

IpcwWeights pipeline_weights(const Dataset& ds, double t, bool drop_censored) {
  if (drop_censored) {
    IpcwWeights w;
    w.horizon = t;
    w.weights.resize(ds.n());
    for (int i = 0; i < ds.n(); ++i)
      w.weights[i] = event_indicator(ds.records[static_cast<std::size_t>(i)], t);
    return w;
  }
  return ipcw_weights(ds, fit_censoring_km(ds), t);
}

ScoredSample score_dataset(const Dataset& ds, double t, const MidasDictionary& dict,
                           const Vec& beta) {
  const DesignMatrix x = aggregate(ds, dict);
  ScoredSample s;
  s.t = t;
  s.scores = predict_probs(beta, x.x);
  s.tilde_t.resize(ds.n());
  s.delta.resize(ds.n());
  for (int i = 0; i < ds.n(); ++i) {
    s.tilde_t[i] = ds.records[static_cast<std::size_t>(i)].tilde_t;
    s.delta[i] = ds.records[static_cast<std::size_t>(i)].delta;
  }
  return s;
}

CvResult cross_validate(const Dataset& ds_in, double t, const MidasDictionary& dict,
                        const CvPlan& plan) {
  const Dataset data = plan.drop_censored ? drop_censored_filter(ds_in, t) : ds_in;
  if (!fit_feasible(data, t))
    throw std::runtime_error("cross_validate: no event or no survivor at horizon t");

  auto feasible_folds = [&](const std::vector<std::vector<int>>& folds) {
    for (const auto& fold : folds) {
      std::vector<int> train_idx;
      std::vector<char> in_fold(static_cast<std::size_t>(data.n()), 0);
      for (int i : fold) in_fold[static_cast<std::size_t>(i)] = 1;
      for (int i = 0; i < data.n(); ++i)
        if (!in_fold[static_cast<std::size_t>(i)]) train_idx.push_back(i);
      if (!fit_feasible(subset(data, train_idx), t)) return false;
    }
    return true;
  };
  auto folds = stratified_folds(data, t, plan.k, plan.seed);
  if (!feasible_folds(folds)) {
    folds = stratified_folds(data, t, plan.k, plan.seed + 1);
    if (!feasible_folds(folds))
      throw std::runtime_error(
          "cross_validate: a training fold fails the follow-up requirement");
  }

  // lambda grid per alpha, computed once on the full training data and
  // shared across folds
  const DesignMatrix design_full = aggregate(data, dict);
  const IpcwWeights w_full = pipeline_weights(data, t, plan.drop_censored);
  const std::size_t n_alpha = plan.alpha_grid.size();
  std::vector<std::vector<double>> grids(n_alpha);
  for (std::size_t a = 0; a < n_alpha; ++a)
    grids[a] = lambda_path(design_full, w_full, plan.alpha_grid[a], plan.n_lambda,
                           plan.lambda_ratio, plan.solver.standardize);

  const auto n_lam = static_cast<std::size_t>(plan.n_lambda);
  // metric[alpha][lambda][fold]
  std::vector<std::vector<std::vector<double>>> metric(
      n_alpha, std::vector<std::vector<double>>(
                   n_lam, std::vector<double>(folds.size(),
                                              std::numeric_limits<double>::quiet_NaN())));

  for (std::size_t fi = 0; fi < folds.size(); ++fi) {
    std::vector<int> train_idx;
    std::vector<char> in_fold(static_cast<std::size_t>(data.n()), 0);
    for (int i : folds[fi]) in_fold[static_cast<std::size_t>(i)] = 1;
    for (int i = 0; i < data.n(); ++i)
      if (!in_fold[static_cast<std::size_t>(i)]) train_idx.push_back(i);

    Dataset train = subset(data, train_idx);
    const Dataset heldout = subset(data, folds[fi]);
    // KM for held-out weights comes from the original (pre-oversampling)
    // training fold
    const StepSurvival km_orig = fit_censoring_km(train);
    if (plan.oversample_target > 0)
      train = oversample(train, t, plan.oversample_target,
                         derive_seed(plan.seed, {fi, 11}));
    const IpcwWeights w_train = pipeline_weights(train, t, plan.drop_censored);
    const DesignMatrix x_train = aggregate(train, dict);
    const DesignMatrix x_ho = aggregate(heldout, dict);

    std::optional<IpcwWeights> w_ho;
    if (plan.metric == CvMetric::likelihood) {
      try {
        w_ho = plan.drop_censored ? pipeline_weights(heldout, t, true)
                                  : ipcw_weights(heldout, km_orig, t);
      } catch (const InsufficientFollowUp&) {
      }
    }

    for (std::size_t a = 0; a < n_alpha; ++a) {
      const auto fits =
          fit_path(x_train, w_train, plan.alpha_grid[a], grids[a], plan.solver);
      for (std::size_t li = 0; li < fits.size(); ++li) {
        if (fits[li].diverged) continue;  // unbounded cell: leave the fold NaN
        ScoredSample s;
        s.t = t;
        s.scores = predict_probs(fits[li].beta, x_ho.x);
        s.tilde_t.resize(heldout.n());
        s.delta.resize(heldout.n());
        for (int i = 0; i < heldout.n(); ++i) {
          s.tilde_t[i] = heldout.records[static_cast<std::size_t>(i)].tilde_t;
          s.delta[i] = heldout.records[static_cast<std::size_t>(i)].delta;
        }
        double val = std::numeric_limits<double>::quiet_NaN();
        if (plan.metric == CvMetric::auc) {
          try {
            val = roc_curve(s, default_kappa(heldout.n())).auc;
          } catch (const DegenerateHorizon&) {
          }
        } else if (w_ho) {
          val = likelihood_score(s, *w_ho);
        }
        metric[a][li][fi] = val;
      }
    }
  }

  CvResult res;
  for (std::size_t a = 0; a < n_alpha; ++a) {
    for (std::size_t li = 0; li < n_lam; ++li) {
      CvCell cell;
      cell.alpha = plan.alpha_grid[a];
      cell.lambda = grids[a][li];
      cell.mean_metric = nan_mean(metric[a][li], &cell.valid_folds);
      cell.sd_metric = nan_sd(metric[a][li], cell.mean_metric);
      res.cells.push_back(cell);
    }
  }
  // cells scored in every fold outrank partially degenerate ones; within a
  // tier the metric decides, ties toward larger lambda then larger alpha
  bool have_best = false;
  int best_folds = 0;
  for (const auto& cell : res.cells) {
    if (std::isnan(cell.mean_metric)) continue;
    const bool better =
        !have_best || cell.valid_folds > best_folds ||
        (cell.valid_folds == best_folds &&
         (cell.mean_metric > res.best_metric ||
          (cell.mean_metric == res.best_metric &&
           (cell.lambda > res.best_lambda ||
            (cell.lambda == res.best_lambda && cell.alpha > res.best_alpha)))));
    if (better) {
      have_best = true;
      best_folds = cell.valid_folds;
      res.best_metric = cell.mean_metric;
      res.best_alpha = cell.alpha;
      res.best_lambda = cell.lambda;
    }
  }
  if (!have_best)
    throw std::runtime_error("cross_validate: every grid cell was degenerate");

  // refit on the full training data at the selected cell, warm-started down
  // the selected alpha's path
  Dataset refit_data = data;
  if (plan.oversample_target > 0)
    refit_data = oversample(data, t, plan.oversample_target,
                            derive_seed(plan.seed, {0xfefeULL, 12}));
  const IpcwWeights w_refit = pipeline_weights(refit_data, t, plan.drop_censored);
  const DesignMatrix x_refit = aggregate(refit_data, dict);
  std::size_t best_a = 0;
  for (std::size_t a = 0; a < n_alpha; ++a)
    if (plan.alpha_grid[a] == res.best_alpha) best_a = a;
  std::vector<double> partial;
  for (double lam : grids[best_a]) {
    partial.push_back(lam);
    if (lam == res.best_lambda) break;
  }
  res.refit = fit_path(x_refit, w_refit, res.best_alpha, partial, plan.solver).back();
  return res;
}

ProtocolResult repeated_split_protocol(const Dataset& ds, double t,
                                       const MethodFn& method, int n_splits, int b,
                                       double frac, std::uint64_t seed) {
  if (n_splits < 1) throw std::invalid_argument("n_splits must be >= 1");
  std::vector<std::vector<double>> per_split(static_cast<std::size_t>(n_splits));
  for (int sp = 0; sp < n_splits; ++sp) {
    const auto spc = static_cast<std::uint64_t>(sp);
    auto [train, test] = stratified_split(ds, t, frac, derive_seed(seed, {spc, 21}));
    const Vec scores = method(train, test, t, derive_seed(seed, {spc, 22}));
    ScoredSample s;
    s.t = t;
    s.scores = scores;
    s.tilde_t.resize(test.n());
    s.delta.resize(test.n());
    for (int i = 0; i < test.n(); ++i) {
      s.tilde_t[i] = test.records[static_cast<std::size_t>(i)].tilde_t;
      s.delta[i] = test.records[static_cast<std::size_t>(i)].delta;
    }
    per_split[static_cast<std::size_t>(sp)] =
        bootstrap_auc_indexed(s, b, derive_seed(seed, {spc, 23}));
  }

  ProtocolResult out;
  for (int r = 0; r < b; ++r) {
    double sum = 0;
    int cnt = 0;
    for (int sp = 0; sp < n_splits; ++sp) {
      const double v = per_split[static_cast<std::size_t>(sp)][static_cast<std::size_t>(r)];
      if (!std::isnan(v)) {
        sum += v;
        ++cnt;
      }
    }
    if (cnt > 0) out.averaged_aucs.push_back(sum / cnt);
    else ++out.skipped_replicates;
  }
  if (!out.averaged_aucs.empty()) {
    double s = 0;
    for (double v : out.averaged_aucs) s += v;
    out.mean = s / static_cast<double>(out.averaged_aucs.size());
    out.ci_lo = quantile7(out.averaged_aucs, 0.025);
    out.ci_hi = quantile7(out.averaged_aucs, 0.975);
  }
  return out;
}

}  // namespace survmidas
