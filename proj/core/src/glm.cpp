#include "piotrowski/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "piotrowski/diagnostics.hpp"
#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

// log(1 + e^x) without overflow
double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double binomial_coefficient(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double loglik_from_eta(const Eigen::VectorXd& eta, const Response& r) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double y = r.y[i];
    // log p = -softplus(-eta), log(1 - p) = -softplus(eta)
    if (y > 0.0) ll -= r.w[i] * y * softplus(-eta[i]);
    if (y < 1.0) ll -= r.w[i] * (1.0 - y) * softplus(eta[i]);
  }
  return ll;
}

double saturated_from_response(const Response& r) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < r.y.size(); ++i) {
    const double y = r.y[i];
    if (y > 0.0 && y < 1.0) ll += r.w[i] * (y * std::log(y) + (1.0 - y) * std::log1p(-y));
  }
  return ll;
}

void check_rank(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const auto d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff()) {
    throw FitError(FitError::Kind::SingularDesign,
                   fmt::format("design matrix of degree {} is rank deficient", x.cols() - 1));
  }
}

}  // namespace

std::string_view to_string(Weighting w) noexcept {
  return w == Weighting::Weighted ? "weighted" : "unweighted";
}

std::optional<Weighting> parse_weighting(std::string_view text) noexcept {
  if (text == "weighted") return Weighting::Weighted;
  if (text == "unweighted") return Weighting::Unweighted;
  return std::nullopt;
}

Response make_response(const BinSeries& series, Weighting weighting) {
  const auto n = static_cast<Eigen::Index>(series.size());
  Response r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = series.bins[static_cast<std::size_t>(i)];
    r.y[i] = b.proportion();
    r.w[i] = weighting == Weighting::Weighted ? static_cast<double>(b.trials()) : 1.0;
  }
  return r;
}

DesignSpec build_design(const BinSeries& series, int degree) {
  if (degree < 1) throw ParameterError(fmt::format("degree must be >= 1, got {}", degree));
  const auto n = static_cast<Eigen::Index>(series.size());
  if (n < degree + 2) {
    throw FitError(FitError::Kind::Underdetermined,
                   fmt::format("{} bins cannot support a degree-{} model (need {})", n, degree,
                               degree + 2));
  }
  double mean = 0.0;
  for (const auto& b : series.bins) mean += b.midpoint;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& b : series.bins) ss += (b.midpoint - mean) * (b.midpoint - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw FitError(FitError::Kind::DegenerateAbscissa, "all bin midpoints coincide");
  }

  DesignSpec design;
  design.degree = degree;
  design.center = mean;
  design.scale = sd;
  design.rows.resize(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = design.standardize(series.bins[static_cast<std::size_t>(i)].midpoint);
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      design.rows(i, k) = power;
      power *= z;
    }
  }
  return design;
}

double inverse_logit(double eta) noexcept {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log_likelihood(const Eigen::VectorXd& beta_std, const DesignSpec& design,
                      const BinSeries& series, Weighting weighting) {
  return loglik_from_eta(design.rows * beta_std, make_response(series, weighting));
}

Eigen::VectorXd loglik_gradient(const Eigen::VectorXd& beta_std, const DesignSpec& design,
                                const BinSeries& series, Weighting weighting) {
  const auto r = make_response(series, weighting);
  const Eigen::VectorXd eta = design.rows * beta_std;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = r.w[i] * (r.y[i] - inverse_logit(eta[i]));
  return design.rows.transpose() * resid;
}

double saturated_loglik(const BinSeries& series, Weighting weighting) {
  return saturated_from_response(make_response(series, weighting));
}

Eigen::VectorXd destandardize(const Eigen::VectorXd& b, double center, double scale) {
  const auto d = static_cast<int>(b.size()) - 1;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(b.size());
  // sum_k b_k s^-k (t - c)^k = sum_k b_k s^-k sum_j C(k,j) t^j (-c)^(k-j)
  for (int k = 0; k <= d; ++k) {
    const double bk = b[k] / std::pow(scale, k);
    for (int j = 0; j <= k; ++j) {
      beta[j] += bk * binomial_coefficient(k, j) * std::pow(-center, k - j);
    }
  }
  return beta;
}

Eigen::VectorXd destandardize(const Eigen::VectorXd& coeffs_std, const DesignSpec& design) {
  return destandardize(coeffs_std, design.center, design.scale);
}

LogisticFit fit_logistic(const BinSeries& series, int degree, Weighting weighting,
                         const FitOptions& options) {
  const DesignSpec design = build_design(series, degree);
  const Eigen::MatrixXd& x = design.rows;
  check_rank(x);

  const Response r = make_response(series, weighting);
  const NullFit null_fit = fit_null(series, weighting);
  const double ll_saturated = saturated_from_response(r);

  LogisticFit fit;
  fit.degree = degree;
  fit.weighting = weighting;
  fit.window_years = series.window_years;
  fit.overlap_years = series.overlap_years;
  fit.n_bins = static_cast<int>(series.size());
  fit.center = design.center;
  fit.scale = design.scale;
  fit.year_min = series.bins.front().start_year;
  fit.year_max = series.bins.back().end_year;
  fit.df_residual = fit.n_bins - (degree + 1);
  fit.null_degenerate = null_fit.degenerate;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(degree + 1);
  beta[0] = std::log(std::clamp(null_fit.pooled_proportion, 1e-6, 1.0 - 1e-6) /
                     (1.0 - std::clamp(null_fit.pooled_proportion, 1e-6, 1.0 - 1e-6)));
  Eigen::VectorXd eta = x * beta;
  double ll = loglik_from_eta(eta, r);

  const auto n = x.rows();
  Eigen::VectorXd working(n), score_terms(n);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = inverse_logit(eta[i]);
      working[i] = r.w[i] * p * (1.0 - p);
      score_terms[i] = r.w[i] * (r.y[i] - p);
    }
    const Eigen::VectorXd score = x.transpose() * score_terms;
    const Eigen::MatrixXd information = x.transpose() * working.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) break;

    // step-halving until the likelihood does not decrease
    Eigen::VectorXd candidate = beta + step;
    Eigen::VectorXd candidate_eta = x * candidate;
    double candidate_ll = loglik_from_eta(candidate_eta, r);
    const double noise = 1e-13 * std::max(1.0, std::abs(ll));
    int halvings = 0;
    while (!(candidate_ll >= ll - noise) && halvings < options.max_halvings) {
      step *= 0.5;
      candidate = beta + step;
      candidate_eta = x * candidate;
      candidate_ll = loglik_from_eta(candidate_eta, r);
      ++halvings;
    }
    if (!(candidate_ll >= ll - noise)) {
      // no ascent direction left at working precision
      fit.converged = score.cwiseAbs().maxCoeff() < 1e-6;
      break;
    }

    const double delta_ll = candidate_ll - ll;
    const double delta_beta = step.cwiseAbs().maxCoeff();
    beta = candidate;
    eta = candidate_eta;
    ll = candidate_ll;

    if (beta.cwiseAbs().maxCoeff() > options.separation_bound) {
      fit.separation = true;
      break;
    }
    if (std::abs(delta_ll) < options.loglik_tolerance && delta_beta < options.beta_tolerance) {
      fit.converged = true;
      break;
    }
    // At the saturated bound a regular optimum moves by O(sqrt(gap)) per step;
    // coefficients still marching by whole units mean divergence.
    if (ll_saturated - ll < 1e-8 && delta_beta > 0.1) {
      fit.separation = true;
      break;
    }
  }

  fit.coeffs_std = beta;
  fit.coeffs_raw = destandardize(beta, design);
  fit.loglik = ll;
  fit.loglik_null = null_fit.loglik_null;
  // IRLS starts at the intercept-only optimum and never descends, so the
  // nesting check inside mcfadden_r2 only trips on a broken fit.
  fit.mcfadden_r2 = mcfadden_r2(fit.loglik, fit.loglik_null);
  const LrTest lr = lr_test(fit.loglik, fit.loglik_null, degree);
  fit.lr_statistic = lr.statistic;
  fit.p_value = lr.p_value;
  return fit;
}

double linear_predictor(const LogisticFit& fit, double year) noexcept {
  const double z = (year - fit.center) / fit.scale;
  double eta = 0.0;
  for (Eigen::Index k = fit.coeffs_std.size() - 1; k >= 0; --k) eta = eta * z + fit.coeffs_std[k];
  return eta;
}

double predict(const LogisticFit& fit, double year) noexcept {
  return inverse_logit(linear_predictor(fit, year));
}

PiotrowskiParams to_piotrowski(const LogisticFit& fit) {
  if (fit.degree != 1) {
    throw FitError(FitError::Kind::UnsupportedConversion,
                   fmt::format("Piotrowski parameters need a degree-1 fit, got degree {}",
                               fit.degree));
  }
  PiotrowskiParams p;
  p.r = fit.coeffs_raw[1];
  p.a_relative = 1.0;
  p.a_calendar = std::exp(-fit.coeffs_raw[0]);
  // eta = b0 + b1 (t - c)/s vanishes at t = c - s b0/b1
  p.t_half = fit.coeffs_std[1] != 0.0 ? fit.center - fit.scale * fit.coeffs_std[0] / fit.coeffs_std[1]
                                      : std::numeric_limits<double>::quiet_NaN();
  return p;
}

std::string fit_csv_header(int max_degree) {
  std::string h = "change,degree,weighting,window,overlap";
  for (int k = 0; k <= max_degree; ++k) h += fmt::format(",beta{}", k);
  h += ",loglik,loglik_null,r2,p_value,df,converged,separation";
  return h;
}

std::string fit_csv_row(std::string_view change, const LogisticFit& fit, int max_degree) {
  std::string row = fmt::format("{},{},{},{},{}", change, fit.degree, to_string(fit.weighting),
                                fit.window_years, fit.overlap_years);
  for (int k = 0; k <= max_degree; ++k) {
    row += k < fit.coeffs_raw.size() ? fmt::format(",{:.10g}", fit.coeffs_raw[k]) : std::string(",");
  }
  row += fmt::format(",{:.6f},{:.6f},{:.6f},{:.6g},{},{},{}", fit.loglik, fit.loglik_null,
                     fit.mcfadden_r2, fit.p_value, fit.df_residual, fit.converged ? 1 : 0,
                     fit.separation ? 1 : 0);
  return row;
}

}  // namespace piotrowski
