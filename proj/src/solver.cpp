#include "survmidas/solver.hpp"

#include <algorithm>

namespace survmidas {

namespace {

double soft(double v, double thr) {
  if (v > thr) return v - thr;
  if (v < -thr) return v + thr;
  return 0.0;
}

struct Standardized {
  Mat x;
  Vec center, scale;
};

Standardized standardize_design(const DesignMatrix& dm, bool on) {
  Standardized s;
  s.x = dm.x;
  const int n = dm.n(), p = dm.p();
  s.center = Vec::Zero(p);
  s.scale = Vec::Ones(p);
  if (!on) return s;
  for (int j = 0; j < p; ++j) {
    if (!dm.penalized[static_cast<std::size_t>(j)]) continue;
    const double c = s.x.col(j).mean();
    s.x.col(j).array() -= c;
    double sd = std::sqrt(s.x.col(j).squaredNorm() / n);
    if (sd < 1e-12) sd = 1.0;
    s.x.col(j) /= sd;
    s.center[j] = c;
    s.scale[j] = sd;
  }
  return s;
}

// beta on the original scale -> coefficients of the standardized design
Vec to_standardized(const Vec& beta, const Standardized& s) {
  Vec bs = beta.cwiseProduct(s.scale);
  bs[0] += beta.dot(s.center) - beta[0] * s.center[0];
  return bs;
}

Vec to_original(const Vec& bs, const Standardized& s) {
  Vec beta = bs.cwiseQuotient(s.scale);
  beta[0] = bs[0] - beta.dot(s.center) + beta[0] * s.center[0];
  return beta;
}

double risk_from_linear(const Vec& z, const Vec& f) {
  const auto n = z.size();
  double r = 0;
  for (Eigen::Index i = 0; i < n; ++i) r += -f[i] * z[i] + log1pexp(z[i]);
  return r / static_cast<double>(n);
}

double penalty_value(const Vec& b, double lambda, double alpha,
                     const std::vector<std::vector<int>>& groups,
                     const std::vector<bool>& penalized) {
  if (lambda == 0) return 0;
  double l1 = 0, l21 = 0;
  for (const auto& g : groups) {
    double sq = 0;
    for (int j : g) {
      if (!penalized[static_cast<std::size_t>(j)]) continue;
      l1 += std::abs(b[j]);
      sq += b[j] * b[j];
    }
    l21 += std::sqrt(sq);
  }
  return lambda * (alpha * l1 + (1 - alpha) * l21);
}

double power_iteration_gram(const Mat& x) {
  Vec v = Vec::Ones(x.cols()).normalized();
  double eig = 0;
  for (int it = 0; it < 100; ++it) {
    Vec w = x.transpose() * (x * v);
    const double nrm = w.norm();
    if (nrm == 0) return 0;
    v = w / nrm;
    eig = nrm;
  }
  return eig;
}

}  // namespace

double empirical_risk(const Mat& x, const Vec& weights, const Vec& beta) {
  if (!beta.allFinite() || !weights.allFinite())
    throw std::invalid_argument("empirical_risk: non-finite input");
  return risk_from_linear(x * beta, weights);
}

Vec risk_gradient(const Mat& x, const Vec& weights, const Vec& beta) {
  Vec z = x * beta;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]) - weights[i];
  return x.transpose() * z / static_cast<double>(x.rows());
}

Vec prox_sg(const Vec& v, double step, double lambda, double alpha,
            const std::vector<std::vector<int>>& groups,
            const std::vector<bool>& penalized) {
  if (step <= 0) throw std::invalid_argument("prox_sg: step must be positive");
  Vec out = v;
  if (lambda == 0) return out;
  const double thr1 = step * lambda * alpha;
  const double thr2 = step * lambda * (1 - alpha);
  for (const auto& g : groups) {
    double sq = 0;
    bool any = false;
    for (int j : g) {
      if (!penalized[static_cast<std::size_t>(j)]) continue;
      any = true;
      out[j] = soft(v[j], thr1);
      sq += out[j] * out[j];
    }
    if (!any || thr2 == 0) continue;
    const double nrm = std::sqrt(sq);
    const double factor = nrm > 0 ? std::max(0.0, 1.0 - thr2 / nrm) : 0.0;
    for (int j : g)
      if (penalized[static_cast<std::size_t>(j)]) out[j] *= factor;
  }
  return out;
}

double kkt_residual(const Vec& g, const Vec& beta, double lambda, double alpha,
                    const std::vector<std::vector<int>>& groups,
                    const std::vector<bool>& penalized) {
  double viol = 0;
  for (int j = 0; j < g.size(); ++j)
    if (!penalized[static_cast<std::size_t>(j)]) viol = std::max(viol, std::abs(g[j]));
  for (const auto& grp : groups) {
    std::vector<int> pen;
    for (int j : grp)
      if (penalized[static_cast<std::size_t>(j)]) pen.push_back(j);
    if (pen.empty()) continue;
    double nrm = 0;
    for (int j : pen) nrm += beta[j] * beta[j];
    nrm = std::sqrt(nrm);
    if (nrm == 0) {
      double sq = 0;
      for (int j : pen) {
        const double s = soft(g[j], lambda * alpha);
        sq += s * s;
      }
      viol = std::max(viol, std::sqrt(sq) - lambda * (1 - alpha));
    } else {
      for (int j : pen) {
        if (beta[j] != 0) {
          const double stat = g[j] + lambda * alpha * (beta[j] > 0 ? 1 : -1) +
                              lambda * (1 - alpha) * beta[j] / nrm;
          viol = std::max(viol, std::abs(stat));
        } else {
          viol = std::max(viol, std::abs(g[j]) - lambda * alpha);
        }
      }
    }
  }
  return std::max(0.0, viol);
}

FitResult fit(const DesignMatrix& dm, const IpcwWeights& w, const PenaltySpec& spec,
              const SolverOptions& opts) {
  if (opts.tol <= 0) throw std::invalid_argument("solver tolerance must be positive");
  const int n = dm.n();
  const Vec& f = w.weights;
  if (f.size() != n) throw std::invalid_argument("weight/design size mismatch");

  const Standardized sd = standardize_design(dm, opts.standardize);
  const double lambda = spec.lambda, alpha = spec.alpha;
  const auto& groups = dm.groups;
  const auto& penalized = dm.penalized;

  const double l_seed =
      std::max(power_iteration_gram(sd.x) / (4.0 * n), 1e-12);
  double lip = l_seed;

  Vec beta = opts.warm_start ? to_standardized(*opts.warm_start, sd)
                             : Vec::Zero(dm.p());
  Vec y = beta;
  double t_momentum = 1.0;

  auto objective = [&](const Vec& b, double risk) {
    return risk + penalty_value(b, lambda, alpha, groups, penalized);
  };

  Vec z_beta = sd.x * beta;
  double risk_beta = risk_from_linear(z_beta, f);
  double obj_beta = objective(beta, risk_beta);

  FitResult res;
  res.lambda = lambda;
  res.alpha = alpha;
  res.converged = false;

  int iter = 0;
  bool diverged = false;
  double kkt = std::numeric_limits<double>::infinity();
  Vec beta_prev = beta;
  for (; iter < opts.max_iter; ++iter) {
    // gradient at the extrapolated point
    Vec z_y = sd.x * y;
    Vec r_y(n);
    for (int i = 0; i < n; ++i) r_y[i] = sigmoid(z_y[i]) - f[i];
    const double risk_y = risk_from_linear(z_y, f);
    Vec g_y = sd.x.transpose() * r_y / static_cast<double>(n);

    Vec cand;
    double risk_cand = 0;
    for (int bt = 0; bt < 80; ++bt) {
      cand = prox_sg(y - g_y / lip, 1.0 / lip, lambda, alpha, groups, penalized);
      Vec diff = cand - y;
      risk_cand = risk_from_linear(sd.x * cand, f);
      const double quad = risk_y + g_y.dot(diff) + 0.5 * lip * diff.squaredNorm();
      if (risk_cand <= quad + 1e-14 * std::abs(quad)) break;
      lip *= 2.0;
    }
    double obj_cand = objective(cand, risk_cand);

    if (obj_cand > obj_beta + 1e-14 * (1 + std::abs(obj_beta))) {
      // momentum overshoot: restart from the last iterate (plain prox step
      // from beta is a descent step under the backtracked majorization)
      t_momentum = 1.0;
      y = beta;
      Vec z_b = sd.x * beta;
      Vec r_b(n);
      for (int i = 0; i < n; ++i) r_b[i] = sigmoid(z_b[i]) - f[i];
      const double risk_b = risk_from_linear(z_b, f);
      Vec g_b = sd.x.transpose() * r_b / static_cast<double>(n);
      for (int bt = 0; bt < 80; ++bt) {
        cand = prox_sg(beta - g_b / lip, 1.0 / lip, lambda, alpha, groups, penalized);
        Vec diff = cand - beta;
        risk_cand = risk_from_linear(sd.x * cand, f);
        const double quad = risk_b + g_b.dot(diff) + 0.5 * lip * diff.squaredNorm();
        if (risk_cand <= quad + 1e-14 * std::abs(quad)) break;
        lip *= 2.0;
      }
      obj_cand = objective(cand, risk_cand);
    }

    beta_prev = beta;
    beta = cand;
    risk_beta = risk_cand;
    obj_beta = std::min(obj_beta, obj_cand);
    if (opts.trace) res.objective_trace.push_back(obj_cand);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    y = beta + ((t_momentum - 1.0) / t_next) * (beta - beta_prev);
    t_momentum = t_next;

    if (beta.norm() > opts.divergence_norm ||
        obj_beta < opts.divergence_objective) {
      res.diverged = diverged = true;
      ++iter;
      break;
    }

    if (iter % 5 == 4 || iter + 1 == opts.max_iter) {
      Vec g = risk_gradient(sd.x, f, beta);
      kkt = kkt_residual(g, beta, lambda, alpha, groups, penalized);
      if (kkt <= opts.tol) {
        res.converged = true;
        ++iter;
        break;
      }
    }
    lip = std::max(l_seed, lip * 0.95);
  }

  if (!res.converged && !diverged) {
    Vec g = risk_gradient(sd.x, f, beta);
    kkt = kkt_residual(g, beta, lambda, alpha, groups, penalized);
    res.converged = kkt <= opts.tol;
  }

  res.beta = to_original(beta, sd);
  res.objective = obj_beta;
  res.iterations = iter;
  res.kkt_residual = kkt;
  res.center = sd.center;
  res.scale = sd.scale;
  return res;
}

std::vector<double> lambda_path(const DesignMatrix& dm, const IpcwWeights& w,
                                double alpha, int n_lambda, double ratio,
                                bool standardize) {
  if (n_lambda < 1) throw std::invalid_argument("n_lambda must be >= 1");
  if (ratio <= 0 || ratio >= 1) throw std::invalid_argument("ratio must be in (0,1)");
  const Standardized sd = standardize_design(dm, standardize);
  const int n = dm.n();
  const Vec& f = w.weights;

  // intercept-only optimum: sigmoid(b0) = mean(f), clamped when the weighted
  // event mean leaves (0,1)
  const double pbar = std::clamp(f.mean(), 1e-12, 1.0 - 1e-12);
  Vec resid = Vec::Constant(n, pbar) - f;
  Vec g = sd.x.transpose() * resid / static_cast<double>(n);

  double lmax = 0;
  for (const auto& grp : dm.groups) {
    std::vector<int> pen;
    for (int j : grp)
      if (dm.penalized[static_cast<std::size_t>(j)]) pen.push_back(j);
    if (pen.empty()) continue;
    double linf = 0, l2sq = 0;
    for (int j : pen) {
      linf = std::max(linf, std::abs(g[j]));
      l2sq += g[j] * g[j];
    }
    double lam_g;
    if (alpha >= 1.0) {
      lam_g = linf;
    } else if (alpha <= 0.0) {
      lam_g = std::sqrt(l2sq);
    } else {
      // root of ||soft(g_G, lam*alpha)||_2 = lam*(1-alpha)
      double lo = 0, hi = linf / alpha;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double sq = 0;
        for (int j : pen) {
          const double s = soft(g[j], mid * alpha);
          sq += s * s;
        }
        if (std::sqrt(sq) > mid * (1 - alpha)) lo = mid;
        else hi = mid;
      }
      lam_g = 0.5 * (lo + hi);
    }
    lmax = std::max(lmax, lam_g);
  }
  lmax = std::max(lmax, 1e-12);

  std::vector<double> grid(static_cast<std::size_t>(n_lambda));
  if (n_lambda == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double step = std::log(ratio) / (n_lambda - 1);
  for (int i = 0; i < n_lambda; ++i)
    grid[static_cast<std::size_t>(i)] = lmax * std::exp(step * i);
  return grid;
}

std::vector<FitResult> fit_path(const DesignMatrix& dm, const IpcwWeights& w,
                                double alpha, const std::vector<double>& lambdas,
                                const SolverOptions& opts) {
  std::vector<FitResult> fits;
  fits.reserve(lambdas.size());
  SolverOptions o = opts;
  for (double lam : lambdas) {
    fits.push_back(fit(dm, w, PenaltySpec{alpha, lam}, o));
    // a diverged iterate would poison every later warm start
    if (!fits.back().diverged)
      o.warm_start = fits.back().beta;
  }
  return fits;
}

Vec predict_probs(const Vec& beta, const Mat& x) {
  Vec z = x * beta;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    z[i] = std::min(1.0 - 1e-15, std::max(1e-15, sigmoid(z[i])));
  return z;
}

}  // namespace survmidas
