#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "piotrowski/binning.hpp"

namespace piotrowski {

// Weighted: every bin carries its number of trials as prior weight.
// Unweighted: every bin's proportion counts once.
enum class Weighting { Weighted, Unweighted };

std::string_view to_string(Weighting w) noexcept;
std::optional<Weighting> parse_weighting(std::string_view text) noexcept;

// Response y_i (bin proportion) and prior weight w_i for each bin.
struct Response {
  Eigen::VectorXd y;
  Eigen::VectorXd w;
};

Response make_response(const BinSeries& series, Weighting weighting);

// Standardized polynomial design: row i is (1, z_i, ..., z_i^degree) with
// z_i = (midpoint_i - center) / scale, center/scale being the sample mean and
// sample standard deviation of the midpoints.
struct DesignSpec {
  int degree = 1;
  double center = 0.0;
  double scale = 1.0;
  Eigen::MatrixXd rows;

  Eigen::Index columns() const noexcept { return degree + 1; }
  double standardize(double year) const noexcept { return (year - center) / scale; }
};

// Throws FitError (Underdetermined) with fewer than degree + 2 bins and
// FitError (DegenerateAbscissa) when all midpoints coincide.
DesignSpec build_design(const BinSeries& series, int degree);

struct FitOptions {
  int max_iterations = 100;
  int max_halvings = 30;
  double loglik_tolerance = 1e-10;
  double beta_tolerance = 1e-8;
  // |beta_std|_inf beyond this is reported as separation
  double separation_bound = 30.0;
};

struct LogisticFit {
  int degree = 1;
  Weighting weighting = Weighting::Weighted;
  int window_years = 0;
  int overlap_years = 0;
  int n_bins = 0;
  double center = 0.0;
  double scale = 1.0;
  // fitted range, used for drawing curves
  double year_min = 0.0;
  double year_max = 0.0;

  Eigen::VectorXd coeffs_std;
  Eigen::VectorXd coeffs_raw;

  double loglik = 0.0;
  double loglik_null = 0.0;
  double mcfadden_r2 = 0.0;
  double lr_statistic = 0.0;
  double p_value = 1.0;
  int df_residual = 0;

  int iterations = 0;
  bool converged = false;
  bool separation = false;
  // intercept-only model sits at p in {0, 1}
  bool null_degenerate = false;
};

/// Maximum-likelihood binomial logit fit by IRLS (Newton's method with
/// step-halving) on the standardized polynomial design.
///
/// Non-convergence and separation are reported through the returned flags;
/// a rank-deficient design throws FitError (SingularDesign).
LogisticFit fit_logistic(const BinSeries& series, int degree, Weighting weighting,
                         const FitOptions& options = {});

// sum_i w_i [y_i log p_i + (1 - y_i) log(1 - p_i)], with 0 log 0 := 0.
double log_likelihood(const Eigen::VectorXd& beta_std, const DesignSpec& design,
                      const BinSeries& series, Weighting weighting);

// sum_i w_i (y_i - p_i) x_i
Eigen::VectorXd loglik_gradient(const Eigen::VectorXd& beta_std, const DesignSpec& design,
                                const BinSeries& series, Weighting weighting);

// Upper bound of the log-likelihood, attained when p_i = y_i for every bin.
double saturated_loglik(const BinSeries& series, Weighting weighting);

// Re-expresses sum_k b_k z^k, z = (t - center)/scale, as sum_k beta_k t^k.
Eigen::VectorXd destandardize(const Eigen::VectorXd& coeffs_std, double center, double scale);
Eigen::VectorXd destandardize(const Eigen::VectorXd& coeffs_std, const DesignSpec& design);

// Numerically stable logistic function.
double inverse_logit(double eta) noexcept;

double linear_predictor(const LogisticFit& fit, double year) noexcept;
double predict(const LogisticFit& fit, double year) noexcept;

// p(t) = 1 / (1 + a exp(-r t)). a_relative = 1 with t counted from t_half;
// a_calendar = exp(-beta0) with t in calendar years.
struct PiotrowskiParams {
  double a_relative = 1.0;
  double a_calendar = 1.0;
  double r = 0.0;
  double t_half = 0.0;
};

// Degree-1 fits only; throws FitError (UnsupportedConversion) otherwise.
PiotrowskiParams to_piotrowski(const LogisticFit& fit);

// Flat CSV record:
// change,degree,weighting,window,overlap,beta0..betaD,loglik,loglik_null,r2,p_value,df,converged,separation
std::string fit_csv_header(int max_degree);
std::string fit_csv_row(std::string_view change, const LogisticFit& fit, int max_degree);

}  // namespace piotrowski
