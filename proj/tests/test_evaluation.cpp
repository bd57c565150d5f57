#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "survmidas/evaluation.hpp"

using namespace survmidas;

namespace {

ScoredSample make_sample(const std::vector<double>& scores,
                         const std::vector<double>& times,
                         const std::vector<int>& deltas, double t) {
  ScoredSample s;
  const int n = static_cast<int>(scores.size());
  s.scores.resize(n);
  s.tilde_t.resize(n);
  s.delta.resize(n);
  for (int i = 0; i < n; ++i) {
    s.scores[i] = scores[i];
    s.tilde_t[i] = times[i];
    s.delta[i] = deltas[i];
  }
  s.t = t;
  return s;
}

// 20-unit fixture with 30% censoring, mixed tied scores and tied times
ScoredSample censored_fixture() {
  std::vector<double> scores = {0.91, 0.85, 0.85, 0.77, 0.70, 0.66, 0.61, 0.55, 0.52, 0.48,
                                0.45, 0.41, 0.38, 0.33, 0.33, 0.28, 0.22, 0.17, 0.12, 0.08};
  std::vector<double> times = {6.2, 6.4, 6.4, 6.6, 6.9, 7.4, 6.8, 7.9, 8.3, 7.1,
                               8.9, 9.4, 7.6, 9.9, 8.1, 10.4, 10.9, 11.4, 11.9, 12.4};
  std::vector<int> delta = {1, 1, 0, 1, 1, 0, 1, 1, 0, 1,
                            1, 0, 1, 1, 0, 1, 1, 0, 1, 1};
  return make_sample(scores, times, delta, 8.0);
}

}  // namespace

TEST_CASE("default_kappa follows the 2*kappa = 0.25 n^{-1/5} span rule") {
  CHECK(2.0 * default_kappa(1024) == doctest::Approx(0.25 * std::pow(1024.0, -0.2)));
  CHECK(2.0 * default_kappa(1024) == doctest::Approx(0.0625));
  CHECK_THROWS(default_kappa(1));
}

TEST_CASE("perfect separation, no censoring: AUC = 1") {
  // scores identical to the 0/1 outcome: tied ranks make both neighborhoods
  // pure for any kappa <= 0.5
  std::vector<double> scores, times;
  std::vector<int> delta;
  for (int i = 0; i < 20; ++i) {
    const bool failed = i < 10;
    scores.push_back(failed ? 1.0 : 0.0);
    times.push_back(failed ? 5.0 + 0.05 * i : 9.0 + 0.05 * i);
    delta.push_back(1);
  }
  const ScoredSample s = make_sample(scores, times, delta, 7.0);
  for (double kappa : {0.1, 0.4, 0.5}) {
    const RocCurve roc = roc_curve(s, kappa);
    CHECK(roc.auc == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant scores give the diagonal and AUC exactly 0.5") {
  const ScoredSample s = make_sample({0.4, 0.4, 0.4, 0.4}, {5, 6, 9, 10},
                                     {1, 1, 1, 1}, 7.0);
  const RocCurve roc = roc_curve(s, 2.0);
  CHECK(roc.auc == 0.5);
}

TEST_CASE("full-window kappa, no censoring: conditional survival is marginal") {
  const ScoredSample s = make_sample({0.9, 0.7, 0.5, 0.3, 0.1},
                                     {5, 6, 8, 9, 10}, {1, 1, 1, 1, 1}, 7.0);
  const Vec surv = nn_conditional_survival(s, 2.0);
  for (int i = 0; i < 5; ++i) CHECK(surv[i] == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("self-only neighborhood of an early event has survival 0") {
  const ScoredSample s = make_sample({0.9, 0.5, 0.1}, {5, 6, 9}, {1, 1, 1}, 7.0);
  const Vec surv = nn_conditional_survival(s, 1e-9);
  CHECK(surv[0] == 0.0);
  CHECK(surv[1] == 0.0);
  CHECK(surv[2] == 1.0);
}

TEST_CASE("N=6 censored fixture matches a hand product-limit under full window") {
  // times 4(e) 5(c) 6(e) 7(c) 8(e) 9(e), t=8: events at 4 (risk 6), 6 (risk 4),
  // 8 (risk 2): S = (5/6)(3/4)(1/2) = 5/16
  const ScoredSample s = make_sample({1, 2, 3, 4, 5, 6}, {4, 5, 6, 7, 8, 9},
                                     {1, 0, 1, 0, 1, 1}, 8.0);
  const Vec surv = nn_conditional_survival(s, 2.0);
  for (int i = 0; i < 6; ++i) CHECK(surv[i] == doctest::Approx(5.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("censored 20-unit fixture agrees with the naive transcription") {
  const ScoredSample s = censored_fixture();
  for (double kappa : {0.05, 0.11, 0.2, 0.35, default_kappa(20)}) {
    const Vec fast = nn_conditional_survival(s, kappa);
    const Vec slow = oracle::naive_nn_survival(s, kappa);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
    const RocCurve roc = roc_curve(s, kappa);
    const auto ref = oracle::naive_roc(s, kappa);
    CHECK(roc.auc == doctest::Approx(ref.auc).epsilon(1e-10));
    CHECK(roc.auc_raw == doctest::Approx(ref.auc_raw).epsilon(1e-10));
  }
}

TEST_CASE("AUC is invariant under strictly increasing score transforms") {
  const ScoredSample s = censored_fixture();
  const double kappa = default_kappa(s.n());
  const double base = roc_curve(s, kappa).auc;
  ScoredSample cubed = s;
  for (int i = 0; i < s.n(); ++i) cubed.scores[i] = std::pow(s.scores[i], 3);
  ScoredSample logit_tf = s;
  for (int i = 0; i < s.n(); ++i)
    logit_tf.scores[i] = std::log(s.scores[i] / (1 - s.scores[i]));
  CHECK(roc_curve(cubed, kappa).auc == doctest::Approx(base).epsilon(1e-12));
  CHECK(roc_curve(logit_tf, kappa).auc == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("no censoring, self-only neighborhoods: AUC equals classical concordance") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif;
  std::vector<double> scores, times;
  std::vector<int> delta;
  for (int i = 0; i < 40; ++i) {
    scores.push_back(unif(rng));
    times.push_back(unif(rng) < 0.5 ? 5.0 + unif(rng) : 9.0 + unif(rng));
    delta.push_back(1);
  }
  const ScoredSample s = make_sample(scores, times, delta, 7.0);
  // kappa below the minimal rank gap: S(t|s_i) becomes the unit's own outcome
  // and the curve reduces to the classical empirical ROC
  const RocCurve roc = roc_curve(s, 1e-9);
  double conc = 0, pairs = 0;
  for (int i = 0; i < 40; ++i) {
    if (times[i] > 7.0) continue;
    for (int j = 0; j < 40; ++j) {
      if (times[j] <= 7.0) continue;
      pairs += 1;
      if (scores[i] > scores[j]) conc += 1;
      else if (scores[i] == scores[j]) conc += 0.5;
    }
  }
  CHECK(roc.auc == doctest::Approx(conc / pairs).epsilon(1e-9));
}

TEST_CASE("degenerate horizon raises") {
  const ScoredSample all_dead =
      make_sample({0.1, 0.5, 0.9}, {5, 5.5, 6}, {1, 1, 1}, 7.0);
  CHECK_THROWS_AS(roc_curve(all_dead, 2.0), DegenerateHorizon);
}

TEST_CASE("likelihood_score closed form at p = 0.5") {
  const ScoredSample s = make_sample({0.5, 0.5, 0.5}, {5, 8, 9}, {1, 0, 1}, 7.0);
  IpcwWeights w;
  w.horizon = 7.0;
  w.weights.resize(3);
  w.weights << 1.0, 0.0, 0.0;
  CHECK(likelihood_score(s, w) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bootstrap determinism and the pairwise tie rule") {
  const ScoredSample s = censored_fixture();
  const auto a = bootstrap_auc_indexed(s, 50, 2024);
  const auto b = bootstrap_auc_indexed(s, 50, 2024);
  CHECK(a == b);
  CHECK(pairwise_auc_test(a, a) == 0.0);  // identical: strict ties not smaller

  const auto c = bootstrap_auc_indexed(s, 50, 2025);
  CHECK(a != c);

  std::vector<double> lo = {0.1, 0.2, 0.3}, hi = {0.2, 0.3, 0.4};
  CHECK(pairwise_auc_test(lo, hi) == 1.0);
  CHECK(pairwise_auc_test(hi, lo) == 0.0);

  const BootstrapAuc ci = bootstrap_auc(s, 50, 2024);
  CHECK(static_cast<int>(ci.aucs.size()) + ci.skipped == 50);
  CHECK(ci.ci_lo <= ci.ci_hi);
}

TEST_CASE("constant scores bootstrap to a degenerate CI at 0.5") {
  const ScoredSample s = make_sample({0.3, 0.3, 0.3, 0.3, 0.3, 0.3},
                                     {5, 6, 6.5, 9, 10, 11}, {1, 1, 1, 1, 1, 1}, 7.0);
  const BootstrapAuc ci = bootstrap_auc(s, 30, 9);
  // trapezoid rounding leaves the resampled AUCs within machine epsilon of 1/2
  for (double a : ci.aucs) CHECK(a == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ci.ci_lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ci.ci_hi == doctest::Approx(0.5).epsilon(1e-12));
}
