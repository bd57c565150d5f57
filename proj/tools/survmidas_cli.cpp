// Command-line front end: simulate, prep, fit, cv, predict, evaluate, compare.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "survmidas/dataprep.hpp"
#include "survmidas/model_io.hpp"
#include "survmidas/model_selection.hpp"
#include "survmidas/simulation.hpp"

namespace sm = survmidas;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string config_hash(int argc, char** argv) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int i = 1; i < argc; ++i)
    for (const char* c = argv[i]; *c; ++c) h = sm::splitmix64(h ^ static_cast<std::uint64_t>(*c));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string header_comment(std::uint64_t seed, const std::string& hash) {
  std::ostringstream os;
  os << "# survmidas " << kVersion << " seed=" << seed << " config=" << hash;
  return os.str();
}

void write_with_header(const std::string& path, const std::string& header,
                       const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << header << "\n" << body;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

struct ScoreFile {
  std::vector<std::string> ids;
  sm::ScoredSample sample;
};

// CSV columns: id,score,time,status
ScoreFile load_scores(const std::string& path, double t) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::vector<std::string> ids;
  std::vector<double> scores, times;
  std::vector<int> deltas;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string id, sc, tm, st;
    std::getline(ss, id, ',');
    std::getline(ss, sc, ',');
    std::getline(ss, tm, ',');
    std::getline(ss, st, ',');
    ids.push_back(id);
    scores.push_back(std::stod(sc));
    times.push_back(std::stod(tm));
    deltas.push_back(std::stoi(st));
  }
  ScoreFile f;
  f.ids = std::move(ids);
  const int n = static_cast<int>(scores.size());
  f.sample.scores = Eigen::Map<sm::Vec>(scores.data(), n);
  f.sample.tilde_t = Eigen::Map<sm::Vec>(times.data(), n);
  f.sample.delta = Eigen::Map<Eigen::VectorXi>(deltas.data(), n);
  f.sample.t = t;
  return f;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional censored MIDAS logistic regression"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "worker thread count")->capture_default_str();

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Monte Carlo study (Table-2 layout)");
  int scenario = 1, sim_n = 1200, reps = 100;
  double target_cens = 0.81;
  std::string sim_out = "table.csv", emit_data;
  sim->add_option("--scenario", scenario)->capture_default_str();
  sim->add_option("--n", sim_n)->capture_default_str();
  sim->add_option("--reps", reps)->capture_default_str();
  sim->add_option("--target-censoring", target_cens)->capture_default_str();
  sim->add_option("--out", sim_out)->capture_default_str();
  sim->add_option("--emit-data", emit_data,
                  "also write a single simulated dataset CSV to this path");

  // ---- prep ----
  auto* prep = app.add_subcommand("prep", "complete-subdataset extraction");
  std::string prep_in, prep_out = "sub.csv", prep_report;
  double prep_s = 6;
  int prep_m = 4, c1 = 25, c2 = 25, step = 50;
  bool m2_max = false;
  prep->add_option("--input", prep_in)->required();
  prep->add_option("--s", prep_s)->capture_default_str();
  prep->add_option("--m", prep_m)->capture_default_str();
  prep->add_option("--c1", c1)->capture_default_str();
  prep->add_option("--c2", c2)->capture_default_str();
  prep->add_option("--step", step)->capture_default_str();
  prep->add_flag("--m2-max", m2_max, "sensitivity reading of the missingness statistic");
  prep->add_option("--out", prep_out)->capture_default_str();
  prep->add_option("--report", prep_report, "threshold-grid report CSV");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "single fit or a lambda path");
  std::string fit_in, fit_out = "model.json", fit_dict = "gegenbauer:-0.5", km_out, path_spec;
  double fit_s = 6, fit_t = 7, fit_lambda = -1, fit_alpha = 1.0;
  int fit_m = 4, fit_L = 3;
  fit->add_option("--input", fit_in)->required();
  fit->add_option("--s", fit_s)->capture_default_str();
  fit->add_option("--m", fit_m)->capture_default_str();
  fit->add_option("--t", fit_t)->capture_default_str();
  fit->add_option("--dict", fit_dict)->capture_default_str();
  fit->add_option("--L", fit_L)->capture_default_str();
  fit->add_option("--lambda", fit_lambda, "penalty level (single fit)");
  fit->add_option("--path", path_spec, "n,ratio: fit a descending lambda path");
  fit->add_option("--alpha", fit_alpha)->capture_default_str();
  fit->add_option("--out", fit_out)->capture_default_str();
  fit->add_option("--km-out", km_out, "censoring survival CSV");

  // ---- cv ----
  auto* cv = app.add_subcommand("cv", "cross-validated fit");
  std::string cv_in, cv_out = "cv.csv", cv_model = "model.json", cv_dict = "gegenbauer:-0.5";
  std::string cv_metric = "auc", alpha_grid_spec;
  double cv_s = 6, cv_t = 7, cv_ratio = 0.01, cv_oversample = 0;
  int cv_m = 4, cv_L = 3, cv_k = 5, cv_nlambda = 25;
  bool drop_cens = false;
  cv->add_option("--input", cv_in)->required();
  cv->add_option("--s", cv_s)->capture_default_str();
  cv->add_option("--m", cv_m)->capture_default_str();
  cv->add_option("--t", cv_t)->capture_default_str();
  cv->add_option("--dict", cv_dict)->capture_default_str();
  cv->add_option("--L", cv_L)->capture_default_str();
  cv->add_option("--k", cv_k)->capture_default_str();
  cv->add_option("--metric", cv_metric, "auc|likelihood")->capture_default_str();
  cv->add_option("--alpha-grid", alpha_grid_spec, "comma-separated alphas");
  cv->add_option("--n-lambda", cv_nlambda)->capture_default_str();
  cv->add_option("--ratio", cv_ratio)->capture_default_str();
  cv->add_option("--oversample", cv_oversample)->capture_default_str();
  cv->add_flag("--drop-censored", drop_cens);
  cv->add_option("--out", cv_out)->capture_default_str();
  cv->add_option("--model-out", cv_model)->capture_default_str();

  // ---- predict ----
  auto* pred = app.add_subcommand("predict", "score a dataset with a saved model");
  std::string pred_in, pred_model, pred_out = "scores.csv";
  pred->add_option("--input", pred_in)->required();
  pred->add_option("--model", pred_model)->required();
  pred->add_option("--out", pred_out)->capture_default_str();

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "time-dependent ROC/AUC of a score file");
  std::string ev_scores, ev_out = "roc.csv", ev_svg;
  double ev_t = 7, ev_kappa = -1;
  int ev_boot = 0;
  ev->add_option("--scores", ev_scores)->required();
  ev->add_option("--t", ev_t)->capture_default_str();
  ev->add_option("--kappa", ev_kappa, "neighborhood half-width (default span rule)");
  ev->add_option("--bootstrap", ev_boot, "bootstrap replicates for an AUC CI");
  ev->add_option("--out", ev_out)->capture_default_str();
  ev->add_option("--svg", ev_svg, "ROC plot path");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "pairwise bootstrap AUC test of two score files");
  std::string cmp_a, cmp_b;
  double cmp_t = 7;
  int cmp_boot = 1000;
  cmp->add_option("--scores-a", cmp_a)->required();
  cmp->add_option("--scores-b", cmp_b)->required();
  cmp->add_option("--t", cmp_t)->capture_default_str();
  cmp->add_option("--bootstrap", cmp_boot)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  omp_set_num_threads(std::max(1, threads));
#endif
  const std::string header = header_comment(seed, config_hash(argc, argv));

  try {
    if (sim->parsed()) {
      if (!emit_data.empty()) {
        sm::ScenarioSpec spec = sm::make_scenario(scenario, sim_n, seed);
        spec.target_censoring = target_cens;
        sm::SimulatedData data = sm::simulate_dataset(spec);
        sm::save_dataset_csv(data.dataset, emit_data);
      }
      if (reps > 0) {
        sm::Table2Config cfg;
        cfg.scenarios = {scenario};
        cfg.n = sim_n;
        cfg.replications = reps;
        cfg.seed = seed;
        auto cells = sm::run_table2(cfg, threads);
        sm::save_table2_csv(cells, sim_out, header);
      }
    } else if (prep->parsed()) {
      sm::RawPanel raw = sm::load_raw_panel(prep_in, sm::CsvSchema{});
      sm::PrepOptions po;
      po.c1 = c1;
      po.c2 = c2;
      po.step = step;
      po.m2_use_max = m2_max;
      sm::PrepResult res = sm::extract_subdataset(raw, prep_s, prep_m, po);
      sm::save_dataset_csv(res.dataset, prep_out);
      if (!prep_report.empty()) sm::save_choice_grid_csv(res.grid, prep_report);
      std::cerr << "selected a=" << res.selected.a << " b=" << res.selected.b
                << " n=" << res.selected.n_ab << " p=" << res.selected.p_ab << "\n";
    } else if (fit->parsed()) {
      sm::Dataset ds = sm::load_dataset(fit_in, sm::CsvSchema{}, fit_s, fit_m);
      sm::MidasDictionary dict = sm::parse_dictionary(fit_dict, fit_L, ds.d());
      sm::DesignMatrix x = sm::aggregate(ds, dict);
      sm::StepSurvival km = sm::fit_censoring_km(ds);
      if (!km_out.empty()) sm::save_step_survival_csv(km, km_out);
      sm::IpcwWeights w = sm::ipcw_weights(ds, km, fit_t);
      if (!path_spec.empty()) {
        auto parts = parse_list(path_spec);
        if (parts.size() != 2) throw CLI::ValidationError("--path expects n,ratio");
        auto lambdas =
            sm::lambda_path(x, w, fit_alpha, static_cast<int>(parts[0]), parts[1]);
        auto fits = sm::fit_path(x, w, fit_alpha, lambdas);
        std::ostringstream body;
        body << "lambda,objective,kkt_residual,nonzeros,iterations,converged\n";
        for (const auto& f : fits) {
          int nnz = 0;
          for (int j = 1; j < f.beta.size(); ++j)
            if (f.beta[j] != 0) ++nnz;
          body << csv_num(f.lambda) << ',' << csv_num(f.objective) << ','
               << csv_num(f.kkt_residual) << ',' << nnz << ',' << f.iterations << ','
               << (f.converged ? 1 : 0) << "\n";
        }
        write_with_header(fit_out, header, body.str());
      } else {
        if (fit_lambda < 0) throw CLI::ValidationError("fit needs --lambda or --path");
        sm::FitResult f = sm::fit(x, w, {fit_alpha, fit_lambda});
        sm::Model model{f.beta, dict, ds.covariate_names, f.lambda, f.alpha,
                        fit_s,  fit_t, fit_m};
        sm::save_model_json(model, fit_out);
      }
    } else if (cv->parsed()) {
      sm::Dataset ds = sm::load_dataset(cv_in, sm::CsvSchema{}, cv_s, cv_m);
      sm::MidasDictionary dict = sm::parse_dictionary(cv_dict, cv_L, ds.d());
      sm::CvPlan plan;
      plan.k = cv_k;
      plan.metric = cv_metric == "likelihood" ? sm::CvMetric::likelihood : sm::CvMetric::auc;
      if (cv_metric != "auc" && cv_metric != "likelihood")
        throw CLI::ValidationError("--metric must be auc or likelihood");
      if (!alpha_grid_spec.empty()) plan.alpha_grid = parse_list(alpha_grid_spec);
      plan.n_lambda = cv_nlambda;
      plan.lambda_ratio = cv_ratio;
      plan.seed = seed;
      plan.oversample_target = cv_oversample;
      plan.drop_censored = drop_cens;
      sm::CvResult res = sm::cross_validate(ds, cv_t, dict, plan);
      std::ostringstream body;
      body << "alpha,lambda,mean_metric,sd_metric,valid_folds\n";
      for (const auto& c : res.cells)
        body << csv_num(c.alpha) << ',' << csv_num(c.lambda) << ','
             << csv_num(c.mean_metric) << ',' << csv_num(c.sd_metric) << ','
             << c.valid_folds << "\n";
      write_with_header(cv_out, header, body.str());
      sm::Model model{res.refit.beta, dict,  ds.covariate_names,
                      res.best_lambda, res.best_alpha, cv_s, cv_t, cv_m};
      sm::save_model_json(model, cv_model);
    } else if (pred->parsed()) {
      sm::Model model = sm::load_model_json(pred_model);
      sm::Dataset ds = sm::load_dataset(pred_in, sm::CsvSchema{}, model.s, model.m);
      sm::ScoredSample sc = sm::score_dataset(ds, model.t, model.dictionary, model.beta);
      std::ostringstream body;
      body << "id,score,time,status\n";
      for (int i = 0; i < ds.n(); ++i)
        body << ds.records[i].id << ',' << csv_num(sc.scores[i]) << ','
             << csv_num(ds.records[i].tilde_t) << ',' << ds.records[i].delta << "\n";
      write_with_header(pred_out, header, body.str());
    } else if (ev->parsed()) {
      ScoreFile f = load_scores(ev_scores, ev_t);
      double kappa = ev_kappa > 0 ? ev_kappa : sm::default_kappa(f.sample.n());
      sm::RocCurve roc = sm::roc_curve(f.sample, kappa);
      sm::save_roc_csv(roc, ev_out);
      if (!ev_svg.empty()) sm::save_roc_svg(roc, ev_svg);
      std::cout << "auc=" << roc.auc << " auc_raw=" << roc.auc_raw
                << " kappa=" << kappa << "\n";
      if (ev_boot > 0) {
        sm::BootstrapAuc bs = sm::bootstrap_auc(f.sample, ev_boot, seed,
                                                ev_kappa > 0
                                                    ? std::optional<double>(ev_kappa)
                                                    : std::nullopt);
        std::cout << "ci=[" << bs.ci_lo << "," << bs.ci_hi << "] skipped=" << bs.skipped
                  << "\n";
      }
    } else if (cmp->parsed()) {
      ScoreFile fa = load_scores(cmp_a, cmp_t);
      ScoreFile fb = load_scores(cmp_b, cmp_t);
      auto aa = sm::bootstrap_auc_indexed(fa.sample, cmp_boot, seed);
      auto bb = sm::bootstrap_auc_indexed(fb.sample, cmp_boot, seed);
      std::cout << "p=" << sm::pairwise_auc_test(aa, bb) << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
