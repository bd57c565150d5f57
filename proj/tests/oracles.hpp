// Independent reference implementations used only by tests. These are coded
// from the mathematical definitions, deliberately not sharing logic with the
// library (dense Newton steps, golden-section searches, O(n^2) loops,
// Golub-Welsch quadrature), so agreement is evidence rather than tautology.
#pragma once

#include <vector>

#include "survmidas/dataprep.hpp"
#include "survmidas/evaluation.hpp"
#include "survmidas/midas.hpp"

namespace oracle {

using survmidas::Mat;
using survmidas::Vec;

// Unpenalized weighted logistic MLE by damped Newton iterations.
Vec newton_logistic(const Mat& x, const Vec& f, int max_iter = 200,
                    double tol = 1e-12);

// MLE of the intercept-only weighted model.
double newton_intercept(const Vec& f);

// argmin_b 0.5*||b - v||^2 + step*lambda*Omega(b) by cyclic exact (golden
// section) coordinate minimization.
Vec prox_numeric(const Vec& v, double step, double lambda, double alpha,
                 const std::vector<std::vector<int>>& groups,
                 const std::vector<bool>& penalized, int sweeps = 400);

// Plain-LASSO ISTA (alpha = 1) with the same standardization convention as
// the library but implemented from scratch; returns original-scale beta.
Vec ista_lasso(const survmidas::DesignMatrix& dm, const Vec& f, double lambda,
               bool standardize, int max_iter = 400000, double tol = 1e-13);

struct Quadrature {
  Vec nodes, weights;
};

// Gauss-Jacobi rule: integrates g against (1-x)^a (1+x)^b on [-1,1] exactly
// for polynomials of degree <= 2n-1 (Golub-Welsch on the Jacobi matrix).
Quadrature gauss_jacobi(int n, double a, double b);

// Direct O(n^2) transcription of the time-dependent NN ROC formulas:
// max-rank ecdf, |F_i - F_j| < kappa neighborhoods, per-unit product-limit
// over event times <= t, Se/Sp sweep over distinct thresholds, clamping,
// cumulative-max monotonization, trapezoid.
struct NaiveRoc {
  double auc = 0, auc_raw = 0;
};
NaiveRoc naive_roc(const survmidas::ScoredSample& s, double kappa);
Vec naive_nn_survival(const survmidas::ScoredSample& s, double kappa);

// Exhaustive (a, b) threshold-grid enumeration of the subdataset extraction.
survmidas::SubdatasetChoice brute_force_choice(const survmidas::RawPanel& raw,
                                               double s,
                                               const survmidas::PrepOptions& opts);

}  // namespace oracle
