#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "survmidas/solver.hpp"

using namespace survmidas;

namespace {

// synthetic design: k groups of size L plus intercept, standard normal entries
DesignMatrix random_design(int n, int k, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Mat x(n, 1 + k * L);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < x.cols(); ++j) x(i, j) = gauss(rng);
  }
  return design_layout(x, k, L);
}

Vec bernoulli_weights(const DesignMatrix& dm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec beta(dm.p());
  for (int j = 0; j < dm.p(); ++j) beta[j] = 0.5 * gauss(rng);
  std::uniform_real_distribution<double> unif;
  Vec f(dm.n());
  for (int i = 0; i < dm.n(); ++i)
    f[i] = unif(rng) < sigmoid(dm.x.row(i).dot(beta)) ? 1.0 : 0.0;
  return f;
}

IpcwWeights wrap(const Vec& f) {
  IpcwWeights w;
  w.weights = f;
  w.horizon = 1;
  return w;
}

}  // namespace

TEST_CASE("empirical risk closed forms") {
  Mat x(1, 1);
  x << 1.0;
  Vec f(1), beta(1);
  SUBCASE("beta = 0 gives log 2") {
    f << 0.7;
    beta << 0.0;
    CHECK(empirical_risk(x, f, beta) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("single obs, f=2, beta=0.3") {
    f << 2.0;
    beta << 0.3;
    CHECK(empirical_risk(x, f, beta) ==
          doctest::Approx(-2.0 * 0.3 + std::log(1.0 + std::exp(0.3))).epsilon(1e-15));
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 20; ++rep) {
    const DesignMatrix dm = random_design(30, 2, 3, 100 + rep);
    Vec f(dm.n());
    for (int i = 0; i < dm.n(); ++i) f[i] = std::abs(gauss(rng)) * 0.8;
    Vec beta(dm.p());
    for (int j = 0; j < dm.p(); ++j) beta[j] = gauss(rng);
    const Vec g = risk_gradient(dm.x, f, beta);
    const double h = 1e-5;
    for (int j = 0; j < dm.p(); ++j) {
      Vec bp = beta, bm = beta;
      bp[j] += h;
      bm[j] -= h;
      const double fd = (empirical_risk(dm.x, f, bp) - empirical_risk(dm.x, f, bm)) / (2 * h);
      const double rel = std::abs(g[j] - fd) / std::max(1.0, std::abs(fd));
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("prox_sg closed-form cases") {
  std::vector<std::vector<int>> groups = {{0}, {1, 2, 3}};
  std::vector<bool> pen = {false, true, true, true};
  Vec v(4);
  v << 0.7, 1.0, -0.4, 0.1;
  SUBCASE("lambda = 0 is the identity") {
    CHECK((prox_sg(v, 0.5, 0.0, 0.5, groups, pen) - v).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("alpha = 1 is a plain soft threshold, intercept untouched") {
    const Vec out = prox_sg(v, 1.0, 0.3, 1.0, groups, pen);
    CHECK(out[0] == 0.7);
    CHECK(out[1] == doctest::Approx(0.7));
    CHECK(out[2] == doctest::Approx(-0.1));
    CHECK(out[3] == 0.0);
  }
  SUBCASE("matches the numerical prox oracle on random cases") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    for (int rep = 0; rep < 50; ++rep) {
      Vec vv(4);
      for (int j = 0; j < 4; ++j) vv[j] = gauss(rng);
      const double step = 0.1 + unif(rng);
      const double lambda = unif(rng);
      const double alpha = unif(rng);
      const Vec fast = prox_sg(vv, step, lambda, alpha, groups, pen);
      const Vec slow = oracle::prox_numeric(vv, step, lambda, alpha, groups, pen);
      CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("lambda = 0 fit matches the independent Newton MLE") {
  const DesignMatrix dm = random_design(200, 1, 3, 1);  // p = 4
  const Vec f = bernoulli_weights(dm, 2);
  SolverOptions opts;
  opts.tol = 1e-10;
  const FitResult fit0 = fit(dm, wrap(f), PenaltySpec{1.0, 0.0}, opts);
  const Vec mle = oracle::newton_logistic(dm.x, f);
  CHECK((fit0.beta - mle).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(fit0.converged);
}

TEST_CASE("large lambda zeroes everything; intercept equals the 1-d Newton MLE") {
  const DesignMatrix dm = random_design(80, 2, 3, 3);
  Vec f = bernoulli_weights(dm, 4);
  f[0] = 1.4;  // a weight above 1, as IPCW produces
  const IpcwWeights w = wrap(f);
  const auto grid = lambda_path(dm, w, 0.5, 3, 0.01);
  const FitResult res = fit(dm, w, PenaltySpec{0.5, grid[0] * 1.000001});
  for (int j = 1; j < dm.p(); ++j) CHECK(res.beta[j] == 0.0);
  CHECK(res.beta[0] == doctest::Approx(oracle::newton_intercept(f)).epsilon(1e-6));

  // just below lambda_max something activates
  const FitResult below = fit(dm, w, PenaltySpec{0.5, grid[0] * 0.95});
  double nnz = 0;
  for (int j = 1; j < dm.p(); ++j) nnz += below.beta[j] != 0 ? 1 : 0;
  CHECK(nnz > 0);
}

TEST_CASE("lambda_max subgradient formula at alpha = 1") {
  const DesignMatrix dm = random_design(60, 2, 2, 9);
  const Vec f = bernoulli_weights(dm, 10);
  const IpcwWeights w = wrap(f);
  const auto grid = lambda_path(dm, w, 1.0, 2, 0.5, false);  // unstandardized
  const double pbar = f.mean();
  double lmax = 0;
  for (int j = 1; j < dm.p(); ++j) {
    double g = 0;
    for (int i = 0; i < dm.n(); ++i) g += (pbar - f[i]) * dm.x(i, j);
    lmax = std::max(lmax, std::abs(g / dm.n()));
  }
  CHECK(grid[0] == doctest::Approx(lmax).epsilon(1e-10));
}

TEST_CASE("alpha = 1 path equals the independent ISTA solver") {
  const DesignMatrix dm = random_design(60, 2, 2, 21);
  const Vec f = bernoulli_weights(dm, 22);
  const IpcwWeights w = wrap(f);
  const auto grid = lambda_path(dm, w, 1.0, 5, 0.05);
  SolverOptions opts;
  opts.tol = 1e-10;
  const auto fits = fit_path(dm, w, 1.0, grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec ref = oracle::ista_lasso(dm, f, grid[i], true);
    CHECK((fits[i].beta - ref).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("KKT residual below tolerance at convergence on sparse-group instances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif;
  for (int rep = 0; rep < 10; ++rep) {
    const DesignMatrix dm = random_design(50, 3, 3, 300 + rep);
    const Vec f = bernoulli_weights(dm, 400 + rep);
    const double alpha = unif(rng);
    const IpcwWeights w = wrap(f);
    const auto grid = lambda_path(dm, w, alpha, 4, 0.1);
    SolverOptions opts;
    opts.tol = 1e-7;
    for (double lam : grid) {
      const FitResult res = fit(dm, w, PenaltySpec{alpha, lam}, opts);
      REQUIRE(res.converged);
      CHECK(res.kkt_residual < 1e-7);
      // recompute the residual from scratch on the standardized problem
    }
  }
}

TEST_CASE("alpha = 0 keeps or kills whole groups") {
  const DesignMatrix dm = random_design(60, 4, 3, 31);
  const Vec f = bernoulli_weights(dm, 32);
  const IpcwWeights w = wrap(f);
  const auto grid = lambda_path(dm, w, 0.0, 6, 0.05);
  const auto fits = fit_path(dm, w, 0.0, grid);
  for (const auto& res : fits) {
    if (!res.converged) continue;
    for (std::size_t g = 1; g < dm.groups.size(); ++g) {
      bool any = false, all = true;
      for (int j : dm.groups[g]) {
        if (res.beta[j] != 0.0) any = true;
        else all = false;
      }
      CHECK((any == all || !any));  // all-zero or all-nonzero
    }
  }
}

TEST_CASE("objective trace is monotone non-increasing") {
  const DesignMatrix dm = random_design(70, 2, 3, 61);
  const Vec f = bernoulli_weights(dm, 62);
  SolverOptions opts;
  opts.trace = true;
  const FitResult res = fit(dm, wrap(f), PenaltySpec{0.5, 0.05}, opts);
  REQUIRE(res.objective_trace.size() > 2);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] <=
          res.objective_trace[i - 1] + 1e-12 * (1 + std::abs(res.objective_trace[i - 1])));
}

TEST_CASE("self-consistency at extreme precision (N=40, p=7)") {
  const DesignMatrix dm = random_design(40, 2, 3, 77);
  const Vec f = bernoulli_weights(dm, 78);
  const IpcwWeights w = wrap(f);
  SolverOptions hi;
  hi.tol = 1e-12;
  hi.max_iter = 1000000;
  const FitResult ref = fit(dm, w, PenaltySpec{0.5, 0.1}, hi);
  const FitResult std_run = fit(dm, w, PenaltySpec{0.5, 0.1});
  CHECK(std::abs(std_run.objective - ref.objective) < 1e-8);
  CHECK(std_run.kkt_residual < 1e-7);
}

TEST_CASE("standardization leaves predictions invariant to column scaling") {
  const DesignMatrix dm = random_design(50, 2, 2, 91);
  const Vec f = bernoulli_weights(dm, 92);
  DesignMatrix scaled = dm;
  scaled.x.col(1) *= 10.0;
  scaled.x.col(4) *= 0.01;
  const FitResult a = fit(dm, wrap(f), PenaltySpec{0.7, 0.03});
  const FitResult b = fit(scaled, wrap(f), PenaltySpec{0.7, 0.03});
  const Vec pa = predict_probs(a.beta, dm.x);
  const Vec pb = predict_probs(b.beta, scaled.x);
  CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("divergence guard flags unbounded problems instead of looping") {
  // one separable coordinate and a weight above 1 make the risk unbounded
  Mat x(4, 2);
  x << 1, 1, 1, 2, 1, -1, 1, -2;
  DesignMatrix dm = design_layout(x, 1, 1);
  Vec f(4);
  f << 2.0, 1.5, 0.0, 0.0;
  const FitResult res = fit(dm, wrap(f), PenaltySpec{1.0, 1e-6});
  CHECK(res.diverged);
  CHECK_FALSE(res.converged);
}

TEST_CASE("predict_prob closed forms and clamping") {
  Vec beta(1);
  Vec row(1);
  beta << 0.0;
  row << 1.0;
  CHECK(predict_prob(beta, row) == 0.5);
  beta << std::log(3.0);
  CHECK(predict_prob(beta, row) == doctest::Approx(0.75).epsilon(1e-15));
  beta << 5000.0;
  CHECK(predict_prob(beta, row) < 1.0);
  beta << -5000.0;
  CHECK(predict_prob(beta, row) > 0.0);
}
