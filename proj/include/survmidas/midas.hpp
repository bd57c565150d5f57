#pragma once

#include "survmidas/data_model.hpp"

namespace survmidas {

enum class DictFamily { jacobi, legendre, gegenbauer, chebyshev1, chebyshev2, unrestricted };

std::string family_name(DictFamily f);

// d x L MIDAS weighting matrix, entry (j,l) = w_l((j-1)/d) / d. Polynomial
// families evaluate degree-0..L-1 Jacobi polynomials at 2u - 1; the
// unrestricted family is the identity lag mapping W = I_d / d.
struct MidasDictionary {
  Mat w;
  DictFamily family = DictFamily::gegenbauer;
  double alpha_poly = -0.5;
  double beta_poly = -0.5;
  int L = 0;
  int d = 0;
};

// Columns 0..L-1 hold P_0..P_{L-1} evaluated at x in [-1,1].
Mat jacobi_polynomials(double alpha_poly, double beta_poly, int L, const Vec& x);

MidasDictionary jacobi_dictionary(double alpha_poly, double beta_poly, int L, int d);
MidasDictionary legendre_dictionary(int L, int d);
MidasDictionary gegenbauer_dictionary(double alpha_poly, int L, int d);
MidasDictionary chebyshev_dictionary(int kind, int L, int d);
MidasDictionary unrestricted_dictionary(int d);

// Default recommendation: Gegenbauer alpha_poly = -1/2, L = 3.
MidasDictionary default_dictionary(int d);

// parses "jacobi:a,b" | "legendre" | "gegenbauer:a" | "chebyshev1" |
// "chebyshev2" | "unrestricted"
MidasDictionary parse_dictionary(const std::string& spec, int L, int d);

struct DesignMatrix {
  Mat x;                                 // N x p, column 0 is the intercept
  std::vector<std::vector<int>> groups;  // groups[0] = {0}, then K groups of L
  std::vector<bool> penalized;           // per column, intercept false

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
};

// Row i = (1, Z_{i,1}^T W, ..., Z_{i,K}^T W); p = K*L + 1.
DesignMatrix aggregate(const Dataset& ds, const MidasDictionary& w);

// Builds the group/penalty layout for K covariates of L columns each
// (used by aggregate and by tests on synthetic designs).
DesignMatrix design_layout(Mat x, int k, int L);

// Implied high-frequency lag coefficients: entry (k,j) = sum_l beta_{k,l} W(j,l),
// so that X^T beta = intercept + sum_{k,j} theta_{k,j} x_{i,k,j}.
Mat expand_weights(const Vec& beta, const MidasDictionary& w);

void save_dictionary_csv(const MidasDictionary& w, const std::string& path);

}  // namespace survmidas
