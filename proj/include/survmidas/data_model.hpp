#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survmidas/common.hpp"

namespace survmidas {

// One unit: observed time tilde_t = min(T, C), event flag delta = 1{T <= C},
// and a K x d panel of lagged covariates. Panel column j-1 holds lag j,
// lag 1 being the most recent observation (u = 0 in weight-function terms).
struct SurvivalRecord {
  std::string id;
  double tilde_t = 0;
  int delta = 0;
  Mat panel;  // K x d
};

struct Dataset {
  std::vector<SurvivalRecord> records;
  double s = 0;                             // conditioning age in years
  int m = 1;                                // observations per year
  bool reporting_delay = false;             // d = s*m - 1 instead of s*m
  std::vector<std::string> covariate_names; // K labels

  int n() const { return static_cast<int>(records.size()); }
  int k() const { return records.empty() ? 0 : static_cast<int>(records.front().panel.rows()); }
  int d() const { return records.empty() ? 0 : static_cast<int>(records.front().panel.cols()); }
  int expected_d() const {
    return static_cast<int>(std::lround(s * m)) - (reporting_delay ? 1 : 0);
  }
};

struct HorizonConfig {
  double t = 0;
  double s = 0;
};

// delta_obs(t) * 1{tilde_t <= t} with delta_obs(t) = 1 - 1{tilde_t <= t}(1 - delta),
// which reduces to 1{tilde_t <= t, delta = 1}.
inline int event_indicator(const SurvivalRecord& rec, double t) {
  return (rec.tilde_t <= t && rec.delta == 1) ? 1 : 0;
}

// CSV column mapping; lag columns are detected from the `<name>_lag<j>` pattern.
struct CsvSchema {
  std::string id_col = "id";
  std::string time_col = "time";
  std::string status_col = "status";
};

struct LoadReport {
  std::vector<std::string> excluded_ids;  // rows with tilde_t < s
  std::size_t accepted = 0;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dataset load_dataset(const std::string& path, const CsvSchema& schema, double s,
                     int m, bool reporting_delay = false,
                     LoadReport* report = nullptr);

void save_dataset_csv(const Dataset& ds, const std::string& path);

// validates shared (K, d), delta in {0,1}, tilde_t >= s
void validate_dataset(const Dataset& ds);

// true iff some unit is observed at or beyond t and at least one event
// occurs by t; both are needed before fitting at horizon t
bool fit_feasible(const Dataset& ds, double t);

}  // namespace survmidas
