#pragma once

#include "survmidas/data_model.hpp"

namespace survmidas {

// Product-limit estimate of H(u) = P(C >= u | C >= s). Evaluation is
// left-continuous: the jump at u itself is not applied, so the value at a
// jump time equals the pre-jump value.
struct StepSurvival {
  std::vector<double> jump_times;  // ascending censoring-event times
  std::vector<double> values;      // value just after each jump
  double origin = 0;               // s

  double operator()(double u) const;
};

struct IpcwWeights {
  Vec weights;  // f_i(t) = event_indicator(i, t) / H(t ∧ tilde_t_i)
  double horizon = 0;
};

class InsufficientFollowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kaplan-Meier estimator where the "events" are censorings (delta = 0).
// The at-risk count at time u is #{i : tilde_t_i >= u}; a failure tied with
// a censoring is treated as occurring first, so it stays in the risk set.
StepSurvival fit_censoring_km(const Dataset& ds);

IpcwWeights ipcw_weights(const Dataset& ds, const StepSurvival& km, double t);

void save_step_survival_csv(const StepSurvival& km, const std::string& path);

}  // namespace survmidas
