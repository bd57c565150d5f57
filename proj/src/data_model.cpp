#include "survmidas/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace survmidas {

double quantile7(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile7: empty sample");
  std::sort(v.begin(), v.end());
  if (p <= 0) return v.front();
  if (p >= 1) return v.back();
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t' || *(e - 1) == '\r')) --e;
  double val = 0;
  auto res = std::from_chars(b, e, val);
  if (res.ec != std::errc() || res.ptr != e)
    throw ParseError("non-numeric cell at row " + std::to_string(row) + ", column '" +
                     col + "': '" + cell + "'");
  return val;
}

}  // namespace

Dataset load_dataset(const std::string& path, const CsvSchema& schema, double s,
                     int m, bool reporting_delay, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);

  int id_idx = -1, time_idx = -1, status_idx = -1;
  // name -> lag j -> column index
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
      auto res = std::from_chars(h.data() + pos + 4, h.data() + h.size(), j);
      if (res.ec != std::errc() || res.ptr != h.data() + h.size() || j < 1) continue;
      lag_cols[h.substr(0, pos)][j] = c;
    }
  }
  if (id_idx < 0) throw SchemaError("missing column '" + schema.id_col + "'");
  if (time_idx < 0) throw SchemaError("missing column '" + schema.time_col + "'");
  if (status_idx < 0) throw SchemaError("missing column '" + schema.status_col + "'");
  if (lag_cols.empty()) throw SchemaError("no '<name>_lag<j>' covariate columns found");

  Dataset ds;
  ds.s = s;
  ds.m = m;
  ds.reporting_delay = reporting_delay;
  const int d = ds.expected_d();
  for (const auto& [name, cols] : lag_cols) {
    if (static_cast<int>(cols.size()) != d || cols.begin()->first != 1 ||
        cols.rbegin()->first != d)
      throw SchemaError("covariate '" + name + "' must have lags 1.." +
                        std::to_string(d) + " (found " + std::to_string(cols.size()) +
                        " lag columns)");
    ds.covariate_names.push_back(name);
  }
  const int K = static_cast<int>(ds.covariate_names.size());

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    SurvivalRecord rec;
    rec.id = cells[id_idx];
    rec.tilde_t = parse_cell(cells[time_idx], row, schema.time_col);
    const double st = parse_cell(cells[status_idx], row, schema.status_col);
    if (st != 0.0 && st != 1.0)
      throw ParseError("status must be 0 or 1 at row " + std::to_string(row));
    rec.delta = static_cast<int>(st);
    rec.panel.resize(K, d);
    for (int k = 0; k < K; ++k) {
      const auto& cols = lag_cols[ds.covariate_names[k]];
      for (const auto& [j, c] : cols)
        rec.panel(k, j - 1) = parse_cell(cells[c], row, header[c]);
    }
    if (rec.tilde_t < s) {
      if (report) report->excluded_ids.push_back(rec.id);
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  if (report) report->accepted = ds.records.size();
  validate_dataset(ds);
  return ds;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  const int K = ds.k(), d = ds.d();
  out << "id,time,status";
  for (int k = 0; k < K; ++k)
    for (int j = 1; j <= d; ++j) out << ',' << ds.covariate_names[k] << "_lag" << j;
  out << '\n';
  char buf[48];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& rec : ds.records) {
    out << rec.id << ',' << fmt(rec.tilde_t) << ',' << rec.delta;
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < d; ++j) out << ',' << fmt(rec.panel(k, j));
    out << '\n';
  }
}

void validate_dataset(const Dataset& ds) {
  if (ds.records.empty()) throw std::runtime_error("dataset has no records");
  const int K = ds.k(), d = ds.d();
  if (d != ds.expected_d())
    throw std::runtime_error("panel lag count " + std::to_string(d) +
                             " does not match s*m" +
                             std::string(ds.reporting_delay ? "-1" : "") + " = " +
                             std::to_string(ds.expected_d()));
  if (K != static_cast<int>(ds.covariate_names.size()))
    throw std::runtime_error("covariate name count does not match panel rows");
  for (const auto& rec : ds.records) {
    if (rec.panel.rows() != K || rec.panel.cols() != d)
      throw std::runtime_error("record '" + rec.id + "' has mismatched panel shape");
    if (rec.delta != 0 && rec.delta != 1)
      throw std::runtime_error("record '" + rec.id + "' has delta outside {0,1}");
    if (rec.tilde_t < ds.s)
      throw std::runtime_error("record '" + rec.id + "' violates tilde_t >= s");
    if (!rec.panel.allFinite())
      throw std::runtime_error("record '" + rec.id + "' has non-finite panel entries");
  }
}

bool fit_feasible(const Dataset& ds, double t) {
  bool survivor = false, event = false;
  for (const auto& rec : ds.records) {
    if (rec.tilde_t >= t) survivor = true;
    if (event_indicator(rec, t)) event = true;
    if (survivor && event) return true;
  }
  return false;
}

}  // namespace survmidas
