#pragma once

#include "survmidas/data_model.hpp"

namespace survmidas {

// Raw panel with explicit missingness (NaN cells). Columns are grouped by
// variable: cell (i, k*d + j) is lag j+1 of variable k for firm i.
struct RawPanel {
  std::vector<std::string> ids;
  std::vector<double> tilde_t;
  std::vector<int> delta;
  Mat cells;  // N_raw x (K_raw * d), NaN = missing
  std::vector<std::string> var_names;
  int k = 0;
  int d = 0;

  int n() const { return static_cast<int>(ids.size()); }
  int p() const { return k * d; }
};

struct SubdatasetChoice {
  int a = 0, b = 0;
  int n_ab = 0, p_ab = 0;
  int uncensored = 0;
  bool admissible = false;
};

struct PrepOptions {
  int c1 = 25;
  int c2 = 25;
  int step = 50;
  // per-variable missingness statistic: min over the variable's lag columns
  // of per-column missing counts (default), or max under the sensitivity flag
  bool m2_use_max = false;
};

struct PrepResult {
  Dataset dataset;
  SubdatasetChoice selected;
  std::vector<SubdatasetChoice> grid;
  int n_after_s = 0;  // dims after the tilde_t >= s filter; the 0.5 ratios
  int p_after_s = 0;  // are taken against these
};

class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(const std::string& msg, std::vector<SubdatasetChoice> grid)
      : std::runtime_error(msg), grid(std::move(grid)) {}
  std::vector<SubdatasetChoice> grid;
};

// Appendix-style complete-subdataset extraction: sweep thresholds (a, b) over
// stepped grids, per cell drop firms with many missing cells and variables
// with high column-missingness, then firms still incomplete; among admissible
// cells (both dims at least half retained) keep the one with the most
// uncensored firms, ties toward larger n_ab then larger p_ab.
PrepResult extract_subdataset(const RawPanel& raw, double s, int m,
                              const PrepOptions& opts = {});

RawPanel load_raw_panel(const std::string& path, const CsvSchema& schema);

void save_choice_grid_csv(const std::vector<SubdatasetChoice>& grid,
                          const std::string& path);

}  // namespace survmidas
