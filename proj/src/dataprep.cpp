#include "survmidas/dataprep.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace survmidas {

PrepResult extract_subdataset(const RawPanel& raw, double s, int m,
                              const PrepOptions& opts) {
  if (raw.n() == 0) throw std::invalid_argument("raw panel is empty");

  // step 1: keep firms observed at least s years
  std::vector<int> firms;
  for (int i = 0; i < raw.n(); ++i)
    if (raw.tilde_t[static_cast<std::size_t>(i)] >= s) firms.push_back(i);
  const int N = static_cast<int>(firms.size());
  const int P = raw.p();
  if (N == 0) throw std::runtime_error("no firms observed for at least s years");

  // per-firm missing counts M1 and per-variable column statistic M2
  std::vector<int> m1(static_cast<std::size_t>(N), 0);
  for (int fi = 0; fi < N; ++fi) {
    const int i = firms[static_cast<std::size_t>(fi)];
    for (int c = 0; c < P; ++c)
      if (std::isnan(raw.cells(i, c))) ++m1[static_cast<std::size_t>(fi)];
  }
  std::vector<int> m2(static_cast<std::size_t>(raw.k), 0);
  for (int k = 0; k < raw.k; ++k) {
    int stat = opts.m2_use_max ? 0 : std::numeric_limits<int>::max();
    for (int j = 0; j < raw.d; ++j) {
      int col_missing = 0;
      for (int fi = 0; fi < N; ++fi)
        if (std::isnan(raw.cells(firms[static_cast<std::size_t>(fi)], k * raw.d + j)))
          ++col_missing;
      stat = opts.m2_use_max ? std::max(stat, col_missing) : std::min(stat, col_missing);
    }
    m2[static_cast<std::size_t>(k)] = stat;
  }

  PrepResult res;
  res.n_after_s = N;
  res.p_after_s = P;

  struct Cell {
    SubdatasetChoice choice;
    std::vector<int> firm_rows;  // raw row indices
    std::vector<int> vars;
  };
  std::optional<Cell> best;

  for (int a = opts.c1; a <= N; a += opts.step) {
    for (int b = opts.c2; b <= P; b += opts.step) {
      std::vector<int> keep_vars;
      for (int k = 0; k < raw.k; ++k)
        if (m2[static_cast<std::size_t>(k)] < a) keep_vars.push_back(k);
      std::vector<int> keep_rows;
      int uncensored = 0;
      for (int fi = 0; fi < N; ++fi) {
        if (m1[static_cast<std::size_t>(fi)] >= b) continue;
        const int i = firms[static_cast<std::size_t>(fi)];
        bool complete = true;
        for (int k : keep_vars) {
          for (int j = 0; j < raw.d && complete; ++j)
            if (std::isnan(raw.cells(i, k * raw.d + j))) complete = false;
          if (!complete) break;
        }
        if (!complete) continue;
        keep_rows.push_back(i);
        if (raw.delta[static_cast<std::size_t>(i)] == 1) ++uncensored;
      }
      SubdatasetChoice ch;
      ch.a = a;
      ch.b = b;
      ch.n_ab = static_cast<int>(keep_rows.size());
      ch.p_ab = static_cast<int>(keep_vars.size()) * raw.d;
      ch.uncensored = uncensored;
      ch.admissible = 2 * ch.n_ab >= N && 2 * ch.p_ab >= P;
      res.grid.push_back(ch);
      if (!ch.admissible) continue;
      const bool better =
          !best || ch.uncensored > best->choice.uncensored ||
          (ch.uncensored == best->choice.uncensored &&
           (ch.n_ab > best->choice.n_ab ||
            (ch.n_ab == best->choice.n_ab && ch.p_ab > best->choice.p_ab)));
      if (better) best = Cell{ch, keep_rows, keep_vars};
    }
  }

  if (!best)
    throw ExtractionError("no admissible (a, b) cell retains half of both dimensions",
                          res.grid);
  res.selected = best->choice;

  Dataset& ds = res.dataset;
  ds.s = s;
  ds.m = m;
  ds.reporting_delay = raw.d == static_cast<int>(std::lround(s * m)) - 1;
  for (int k : best->vars) ds.covariate_names.push_back(raw.var_names[static_cast<std::size_t>(k)]);
  for (int i : best->firm_rows) {
    SurvivalRecord rec;
    rec.id = raw.ids[static_cast<std::size_t>(i)];
    rec.tilde_t = raw.tilde_t[static_cast<std::size_t>(i)];
    rec.delta = raw.delta[static_cast<std::size_t>(i)];
    rec.panel.resize(static_cast<Eigen::Index>(best->vars.size()), raw.d);
    for (std::size_t kk = 0; kk < best->vars.size(); ++kk)
      for (int j = 0; j < raw.d; ++j)
        rec.panel(static_cast<Eigen::Index>(kk), j) =
            raw.cells(i, best->vars[kk] * raw.d + j);
    ds.records.push_back(std::move(rec));
  }
  validate_dataset(ds);
  return res;
}

RawPanel load_raw_panel(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cur;
    while (std::getline(ss, cur, ',')) header.push_back(cur);
  }
  int id_idx = -1, time_idx = -1, status_idx = -1;
  std::map<std::string, std::map<int, int>> lag_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[c];
    if (h == schema.id_col) id_idx = c;
    else if (h == schema.time_col) time_idx = c;
    else if (h == schema.status_col) status_idx = c;
    else {
      auto pos = h.rfind("_lag");
      if (pos == std::string::npos) continue;
      int j = 0;
      auto r = std::from_chars(h.data() + pos + 4, h.data() + h.size(), j);
      if (r.ec != std::errc() || r.ptr != h.data() + h.size() || j < 1) continue;
      lag_cols[h.substr(0, pos)][j] = c;
    }
  }
  if (id_idx < 0 || time_idx < 0 || status_idx < 0)
    throw SchemaError("raw panel needs id, time and status columns");
  if (lag_cols.empty()) throw SchemaError("no '<name>_lag<j>' columns found");

  RawPanel raw;
  raw.d = static_cast<int>(lag_cols.begin()->second.size());
  for (const auto& [name, cols] : lag_cols) {
    if (static_cast<int>(cols.size()) != raw.d)
      throw SchemaError("variable '" + name + "' has inconsistent lag count");
    raw.var_names.push_back(name);
  }
  raw.k = static_cast<int>(raw.var_names.size());

  std::vector<std::vector<double>> rows;
  std::size_t rownum = 1;
  while (std::getline(in, line)) {
    ++rownum;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    {
      std::stringstream ss(line);
      std::string cur;
      while (std::getline(ss, cur, ',')) cells.push_back(cur);
      if (!line.empty() && line.back() == ',') cells.emplace_back();
    }
    cells.resize(header.size());
    auto num = [&](const std::string& cell) {
      if (cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN")
        return std::numeric_limits<double>::quiet_NaN();
      return std::stod(cell);
    };
    raw.ids.push_back(cells[static_cast<std::size_t>(id_idx)]);
    raw.tilde_t.push_back(num(cells[static_cast<std::size_t>(time_idx)]));
    raw.delta.push_back(static_cast<int>(num(cells[static_cast<std::size_t>(status_idx)])));
    std::vector<double> row(static_cast<std::size_t>(raw.p()));
    for (int k = 0; k < raw.k; ++k) {
      const auto& cols = lag_cols[raw.var_names[static_cast<std::size_t>(k)]];
      for (const auto& [j, c] : cols)
        row[static_cast<std::size_t>(k * raw.d + j - 1)] =
            num(cells[static_cast<std::size_t>(c)]);
    }
    rows.push_back(std::move(row));
  }
  raw.cells.resize(static_cast<Eigen::Index>(rows.size()), raw.p());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < raw.p(); ++c)
      raw.cells(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  return raw;
}

void save_choice_grid_csv(const std::vector<SubdatasetChoice>& grid,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "a,b,n_ab,p_ab,uncensored,admissible\n";
  for (const auto& c : grid)
    out << c.a << ',' << c.b << ',' << c.n_ab << ',' << c.p_ab << ','
        << c.uncensored << ',' << (c.admissible ? 1 : 0) << '\n';
}

}  // namespace survmidas
