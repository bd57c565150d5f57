#include "survmidas/censoring.hpp"

#include <algorithm>
#include <fstream>

namespace survmidas {

double StepSurvival::operator()(double u) const {
  // value strictly before u: apply jumps at times < u only
  auto it = std::lower_bound(jump_times.begin(), jump_times.end(), u);
  if (it == jump_times.begin()) return 1.0;
  return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

StepSurvival fit_censoring_km(const Dataset& ds) {
  StepSurvival km;
  km.origin = ds.s;
  const int n = ds.n();

  std::vector<double> times(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) times[static_cast<std::size_t>(i)] = ds.records[static_cast<std::size_t>(i)].tilde_t;
  std::sort(times.begin(), times.end());

  // distinct censoring times, ascending
  std::vector<double> cens;
  for (const auto& rec : ds.records)
    if (rec.delta == 0) cens.push_back(rec.tilde_t);
  std::sort(cens.begin(), cens.end());
  cens.erase(std::unique(cens.begin(), cens.end()), cens.end());

  double surv = 1.0;
  for (double a : cens) {
    const auto at_risk = static_cast<double>(
        times.end() - std::lower_bound(times.begin(), times.end(), a));
    double d_cens = 0;
    for (const auto& rec : ds.records)
      if (rec.delta == 0 && rec.tilde_t == a) d_cens += 1;
    if (at_risk <= 0) continue;
    surv *= 1.0 - d_cens / at_risk;
    km.jump_times.push_back(a);
    km.values.push_back(surv);
  }
  return km;
}

IpcwWeights ipcw_weights(const Dataset& ds, const StepSurvival& km, double t) {
  IpcwWeights w;
  w.horizon = t;
  w.weights.resize(ds.n());
  for (int i = 0; i < ds.n(); ++i) {
    const auto& rec = ds.records[static_cast<std::size_t>(i)];
    if (event_indicator(rec, t) == 0) {
      w.weights[i] = 0.0;
      continue;
    }
    const double h = km(std::min(t, rec.tilde_t));
    if (h <= 0.0)
      throw InsufficientFollowUp(
          "H(t ∧ tilde_t) = 0 at record '" + rec.id +
          "': insufficient follow-up, P(tilde_T >= t) > 0 fails empirically");
    w.weights[i] = 1.0 / h;
  }
  return w;
}

void save_step_survival_csv(const StepSurvival& km, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "time,survival\n";
  out.precision(17);
  out << km.origin << ",1\n";
  for (std::size_t j = 0; j < km.jump_times.size(); ++j)
    out << km.jump_times[j] << ',' << km.values[j] << '\n';
}

}  // namespace survmidas
