#include "piotrowski/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double mcfadden_r2(double loglik, double loglik_null) {
  if (loglik_null == 0.0) return 0.0;
  const double slack = 1e-9 * std::max(1.0, std::abs(loglik_null));
  if (loglik < loglik_null - slack) {
    throw FitError(FitError::Kind::NestingViolation,
                   fmt::format("log-likelihood {} below null log-likelihood {}", loglik,
                               loglik_null));
  }
  return std::clamp(1.0 - loglik / loglik_null, 0.0, 1.0);
}

NullFit fit_null(const BinSeries& series, Weighting weighting) {
  const auto r = make_response(series, weighting);
  NullFit out;
  const double total_w = r.w.sum();
  const double p = total_w > 0 ? r.w.dot(r.y) / total_w : 0.0;
  out.pooled_proportion = p;
  if (p <= 0.0 || p >= 1.0) {
    out.degenerate = true;
    out.intercept = p <= 0.0 ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
    out.loglik_null = 0.0;
    return out;
  }
  out.intercept = std::log(p / (1.0 - p));
  const double log_p = std::log(p), log_q = std::log1p(-p);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < r.y.size(); ++i) {
    const double y = r.y[i];
    if (y > 0.0) ll += r.w[i] * y * log_p;
    if (y < 1.0) ll += r.w[i] * (1.0 - y) * log_q;
  }
  out.loglik_null = ll;
  return out;
}

double regularized_gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double chi_square_sf(double x, int df) {
  if (df <= 0) throw ParameterError(fmt::format("chi-square df must be positive, got {}", df));
  if (!(x > 0.0)) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

LrTest lr_test(double loglik, double loglik_null, int df) {
  // validates nesting
  (void)mcfadden_r2(loglik, loglik_null);
  LrTest t;
  t.statistic = std::max(0.0, 2.0 * (loglik - loglik_null));
  t.df = df;
  t.p_value = chi_square_sf(t.statistic, df);
  return t;
}

LrTest lr_test(const LogisticFit& fit) { return lr_test(fit.loglik, fit.loglik_null, fit.degree); }

WaldTest wald_highest_order(const LogisticFit& fit, const BinSeries& series) {
  const auto design = build_design(series, fit.degree);
  const auto r = make_response(series, fit.weighting);
  const Eigen::VectorXd eta = design.rows * fit.coeffs_std;
  Eigen::VectorXd v(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = inverse_logit(eta[i]);
    v[i] = r.w[i] * p * (1.0 - p);
  }
  const Eigen::MatrixXd information = design.rows.transpose() * v.asDiagonal() * design.rows;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw FitError(FitError::Kind::SingularDesign, "information matrix is not positive definite");
  }
  const Eigen::Index d = fit.degree;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(d + 1);
  unit[d] = 1.0;
  const double variance = ldlt.solve(unit)[d];
  if (!(variance > 0.0)) {
    throw FitError(FitError::Kind::SingularDesign, "non-positive coefficient variance");
  }
  WaldTest t;
  t.estimate = fit.coeffs_std[d];
  t.std_error = std::sqrt(variance);
  const double z = t.estimate / t.std_error;
  t.statistic = z * z;
  t.p_value = chi_square_sf(t.statistic, 1);
  return t;
}

}  // namespace piotrowski
