#include "survmidas/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

namespace survmidas {

namespace {

// empirical CDF value per unit; ties share the maximal rank
Vec cdf_ranks(const Vec& scores) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  Vec f(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && scores[order[static_cast<std::size_t>(j + 1)]] ==
                            scores[order[static_cast<std::size_t>(i)]])
      ++j;
    const double r = static_cast<double>(j + 1) / n;
    for (int q = i; q <= j; ++q) f[order[static_cast<std::size_t>(q)]] = r;
    i = j + 1;
  }
  return f;
}

}  // namespace

Vec nn_conditional_survival(const ScoredSample& s, double kappa, int* skipped) {
  const int n = s.n();
  if (n < 1) throw std::invalid_argument("empty sample");
  const Vec f = cdf_ranks(s.scores);

  // global unique event times <= t, for the empty-risk-set warning counter
  std::vector<double> event_times;
  for (int i = 0; i < n; ++i)
    if (s.delta[i] == 1 && s.tilde_t[i] <= s.t) event_times.push_back(s.tilde_t[i]);
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()),
                    event_times.end());

  // rank neighborhoods are intervals in score order
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return f[a] < f[b]; });

  Vec surv(n);
  int skip_count = 0;
  std::vector<std::pair<double, int>> nb;  // (time, delta) of neighbors
  for (int pos = 0; pos < n; ++pos) {
    const int i = order[static_cast<std::size_t>(pos)];
    nb.clear();
    double max_nb_time = -std::numeric_limits<double>::infinity();
    // |f_i - f_j| < kappa over the sorted-rank array
    for (int q = pos; q >= 0 && f[i] - f[order[static_cast<std::size_t>(q)]] < kappa; --q) {
      const int j = order[static_cast<std::size_t>(q)];
      nb.emplace_back(s.tilde_t[j], s.delta[j]);
      max_nb_time = std::max(max_nb_time, s.tilde_t[j]);
    }
    for (int q = pos + 1;
         q < n && f[order[static_cast<std::size_t>(q)]] - f[i] < kappa; ++q) {
      const int j = order[static_cast<std::size_t>(q)];
      nb.emplace_back(s.tilde_t[j], s.delta[j]);
      max_nb_time = std::max(max_nb_time, s.tilde_t[j]);
    }
    std::sort(nb.begin(), nb.end());
    double prod = 1.0;
    std::size_t a = 0;
    while (a < nb.size()) {
      std::size_t b = a;
      double d_events = nb[a].second == 1 && nb[a].first <= s.t ? 1.0 : 0.0;
      while (b + 1 < nb.size() && nb[b + 1].first == nb[a].first) {
        ++b;
        if (nb[b].second == 1 && nb[b].first <= s.t) d_events += 1.0;
      }
      if (d_events > 0) {
        const double risk = static_cast<double>(nb.size() - a);
        prod *= 1.0 - d_events / risk;
      }
      a = b + 1;
    }
    surv[i] = prod;
    // global event times beyond every neighbor: the local risk set is empty
    for (double et : event_times)
      if (et > max_nb_time) ++skip_count;
  }
  if (skipped) *skipped = skip_count;
  return surv;
}

double default_kappa(int n) {
  if (n < 2) throw std::invalid_argument("default_kappa requires n >= 2");
  return 0.5 * 0.25 * std::pow(static_cast<double>(n), -0.2);
}

RocCurve roc_curve(const ScoredSample& s, double kappa) {
  const int n = s.n();
  RocCurve roc;
  roc.kappa = kappa;
  const Vec surv = nn_conditional_survival(s, kappa, &roc.skipped_factors);
  const double s_marginal = surv.mean();  // S_kappa(t) = S_kappa(-inf, t)
  if (s_marginal <= 0.0 || s_marginal >= 1.0)
    throw DegenerateHorizon("S_kappa(t) = " + std::to_string(s_marginal) +
                            "; both a failure and a survivor must be plausible at t");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return s.scores[a] < s.scores[b]; });

  // thresholds c swept from +inf down through the distinct score values to -inf;
  // S_kappa(c,t) and F(c) via suffix/prefix sums over score order
  struct Pt { double fpr, tpr; };
  std::vector<Pt> raw;
  raw.push_back({0.0, 0.0});  // c = +inf
  double s_above = 0;  // sum of surv over scores > c
  int n_above = 0;
  int pos = n - 1;
  while (pos >= 0) {
    int q = pos;
    const double c = s.scores[order[static_cast<std::size_t>(pos)]];
    while (q >= 0 && s.scores[order[static_cast<std::size_t>(q)]] == c) {
      s_above += surv[order[static_cast<std::size_t>(q)]];
      ++n_above;
      --q;
    }
    pos = q;
    // now c' = next lower threshold (the value just below c); evaluate at
    // threshold equal to the score value below, i.e. 1{score > c'} counts
    // everything >= current block. For the sweep we evaluate at c = value of
    // the block below; the final step (c = -inf) counts all units.
    const double f_c = static_cast<double>(n - n_above) / n;  // F(c') with <=
    const double s_c = s_above / n;
    double se = ((1.0 - f_c) - s_c) / (1.0 - s_marginal);
    double sp = 1.0 - s_c / s_marginal;
    se = std::clamp(se, 0.0, 1.0);
    sp = std::clamp(sp, 0.0, 1.0);
    raw.push_back({1.0 - sp, se});
  }
  raw.push_back({1.0, 1.0});  // c = -inf

  auto trapezoid = [](const std::vector<Pt>& pts) {
    double a = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      a += 0.5 * (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr);
    return a;
  };

  std::vector<Pt> sorted = raw;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Pt& a, const Pt& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
  });
  roc.auc_raw = trapezoid(sorted);

  // cumulative-max correction along the threshold sweep
  std::vector<Pt> mono = raw;
  for (std::size_t i = 1; i < mono.size(); ++i) {
    mono[i].fpr = std::max(mono[i].fpr, mono[i - 1].fpr);
    mono[i].tpr = std::max(mono[i].tpr, mono[i - 1].tpr);
  }
  roc.auc = trapezoid(mono);
  roc.points.reserve(mono.size());
  for (const auto& p : mono) roc.points.emplace_back(p.fpr, p.tpr);
  return roc;
}

double likelihood_score(const ScoredSample& s, const IpcwWeights& w) {
  const int n = s.n();
  if (w.weights.size() != n) throw std::invalid_argument("weight length mismatch");
  double risk = 0;
  for (int i = 0; i < n; ++i) {
    const double p = std::clamp(s.scores[i], 1e-12, 1.0 - 1e-12);
    const double z = logit(p);
    risk += -w.weights[i] * z + log1pexp(z);
  }
  return -risk / n;
}

std::vector<double> bootstrap_auc_indexed(const ScoredSample& s, int b,
                                          std::uint64_t seed,
                                          std::optional<double> kappa_override) {
  if (b < 1) throw std::invalid_argument("bootstrap replicate count must be >= 1");
  const int n = s.n();
  std::vector<double> aucs(static_cast<std::size_t>(b),
                           std::numeric_limits<double>::quiet_NaN());
  for (int r = 0; r < b; ++r) {
    auto rng = rng_stream(seed, {static_cast<std::uint64_t>(r)});
    std::uniform_int_distribution<int> pick(0, n - 1);
    ScoredSample rs;
    rs.t = s.t;
    rs.scores.resize(n);
    rs.tilde_t.resize(n);
    rs.delta.resize(n);
    for (int i = 0; i < n; ++i) {
      const int j = pick(rng);
      rs.scores[i] = s.scores[j];
      rs.tilde_t[i] = s.tilde_t[j];
      rs.delta[i] = s.delta[j];
    }
    const double kappa = kappa_override ? *kappa_override : default_kappa(n);
    try {
      aucs[static_cast<std::size_t>(r)] = roc_curve(rs, kappa).auc;
    } catch (const DegenerateHorizon&) {
    }
  }
  return aucs;
}

BootstrapAuc bootstrap_auc(const ScoredSample& s, int b, std::uint64_t seed,
                           std::optional<double> kappa_override) {
  const auto indexed = bootstrap_auc_indexed(s, b, seed, kappa_override);
  BootstrapAuc out;
  for (double a : indexed) {
    if (std::isnan(a)) ++out.skipped;
    else out.aucs.push_back(a);
  }
  if (!out.aucs.empty()) {
    out.ci_lo = quantile7(out.aucs, 0.025);
    out.ci_hi = quantile7(out.aucs, 0.975);
  }
  return out;
}

double pairwise_auc_test(const std::vector<double>& auc_a,
                         const std::vector<double>& auc_b) {
  if (auc_a.size() != auc_b.size())
    throw std::invalid_argument("pairwise_auc_test: length mismatch");
  if (auc_a.empty()) throw std::invalid_argument("pairwise_auc_test: empty input");
  std::size_t smaller = 0;
  for (std::size_t r = 0; r < auc_a.size(); ++r)
    if (auc_a[r] < auc_b[r]) ++smaller;
  return static_cast<double>(smaller) / static_cast<double>(auc_a.size());
}

void save_roc_csv(const RocCurve& roc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.precision(17);
  out << "fpr,tpr\n";
  for (const auto& [fpr, tpr] : roc.points) out << fpr << ',' << tpr << '\n';
}

void save_roc_svg(const RocCurve& roc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  const int w = 480, h = 480, pad = 40;
  auto px = [&](double x) { return pad + x * (w - 2 * pad); };
  auto py = [&](double y) { return h - pad - y * (h - 2 * pad); };
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
      << "<line x1='" << px(0) << "' y1='" << py(0) << "' x2='" << px(1) << "' y2='"
      << py(1) << "' stroke='#bbbbbb' stroke-dasharray='4 4'/>\n<polyline fill='none' "
         "stroke='#1f77b4' stroke-width='2' points='";
  for (const auto& [fpr, tpr] : roc.points) out << px(fpr) << ',' << py(tpr) << ' ';
  out << "'/>\n<text x='" << pad << "' y='" << pad / 2 << "'>AUC = " << roc.auc
      << "</text>\n</svg>\n";
}

}  // namespace survmidas
