#pragma once

#include "piotrowski/glm.hpp"

namespace piotrowski {

// 1 - loglik / loglik_null. Defined as 0 when loglik_null == 0. Throws
// FitError (NestingViolation) if loglik falls below loglik_null.
double mcfadden_r2(double loglik, double loglik_null);

struct NullFit {
  double intercept = 0.0;  // logit of the pooled proportion, +-inf when degenerate
  double pooled_proportion = 0.0;
  double loglik_null = 0.0;
  bool degenerate = false;
};

// Intercept-only maximum likelihood under the given weighting.
NullFit fit_null(const BinSeries& series, Weighting weighting);

// Regularized upper incomplete gamma Q(a, x): power series for x < a + 1,
// Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Upper-tail chi-square probability, Q(df/2, x/2).
double chi_square_sf(double x, int df);

struct LrTest {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

LrTest lr_test(double loglik, double loglik_null, int df);

// Likelihood-ratio test of the fit against its intercept-only model, df = degree.
LrTest lr_test(const LogisticFit& fit);

// Secondary diagnostic: Wald z-test of the highest-order coefficient, with the
// standard error taken from the inverse Fisher information at the estimate.
// Same statistic on the standardized and raw scales.
struct WaldTest {
  double estimate = 0.0;   // highest-order standardized coefficient
  double std_error = 0.0;
  double statistic = 0.0;  // z^2, chi-square with 1 df
  double p_value = 1.0;
};

// `series` must be the one the fit was estimated on. Throws FitError
// (SingularDesign) when the information matrix is not positive definite.
WaldTest wald_highest_order(const LogisticFit& fit, const BinSeries& series);

}  // namespace piotrowski
