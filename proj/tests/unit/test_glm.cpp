#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "piotrowski/diagnostics.hpp"
#include "piotrowski/errors.hpp"
#include "piotrowski/glm.hpp"
#include "piotrowski/synthetic.hpp"

using namespace piotrowski;

namespace {

BinSeries series_of(std::initializer_list<std::tuple<double, Count, Count>> rows) {
  BinSeries s;
  s.window_years = 10;
  for (auto [mid, rec, inn] : rows) {
    const int start = static_cast<int>(mid) - 5;
    s.bins.push_back({start, start + 10, mid, rec, inn});
  }
  return s;
}

LogisticFit raw_line(double b0, double b1) {
  LogisticFit f;
  f.degree = 1;
  f.center = 0.0;
  f.scale = 1.0;
  f.coeffs_std = Eigen::Vector2d(b0, b1);
  f.coeffs_raw = f.coeffs_std;
  return f;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("weighting names") {
  CHECK(to_string(Weighting::Weighted) == "weighted");
  CHECK(parse_weighting("unweighted") == Weighting::Unweighted);
  CHECK_FALSE(parse_weighting("both").has_value());
}

TEST_CASE("design standardizes with the sample sd") {
  const auto s = series_of({{1600, 1, 1}, {1610, 1, 1}, {1620, 1, 1}});
  const auto d = build_design(s, 1);
  CHECK(d.center == doctest::Approx(1610));
  CHECK(d.scale == doctest::Approx(10));
  REQUIRE(d.rows.cols() == 2);
  CHECK(d.rows(0, 1) == doctest::Approx(-1.0));
  CHECK(d.rows(1, 1) == doctest::Approx(0.0));
  CHECK(d.rows(2, 1) == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i) CHECK(d.rows(i, 0) == 1.0);
}

TEST_CASE("degree-3 design on 5 equispaced points has full rank") {
  const auto s = series_of({{1600, 1, 1}, {1610, 1, 1}, {1620, 1, 1}, {1630, 1, 1}, {1640, 1, 1}});
  const auto d = build_design(s, 3);
  REQUIRE(d.rows.cols() == 4);
  // Gram determinant by plain cofactor-free elimination on a copy
  Eigen::Matrix4d g = d.rows.transpose() * d.rows;
  double det = 1.0;
  for (int c = 0; c < 4; ++c) {
    det *= g(c, c);
    for (int r = c + 1; r < 4; ++r) {
      const double f = g(r, c) / g(c, c);
      for (int k = c; k < 4; ++k) g(r, k) -= f * g(c, k);
    }
  }
  CHECK(det > 1e-6);
}

TEST_CASE("design errors") {
  const auto two = series_of({{1600, 1, 1}, {1610, 1, 1}});
  try {
    build_design(two, 1);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::Underdetermined);
  }
  BinSeries same = series_of({{1600, 1, 1}, {1600, 2, 1}, {1600, 1, 3}});
  try {
    build_design(same, 1);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::DegenerateAbscissa);
  }
}

TEST_CASE("fit rejects a design with too few distinct midpoints for its degree") {
  const auto s = series_of({{1600, 3, 1}, {1600, 1, 3}, {1610, 2, 2}, {1610, 1, 2}, {1600, 2, 2}});
  try {
    fit_logistic(s, 2, Weighting::Weighted);
    FAIL("expected FitError");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::SingularDesign);
  }
}

TEST_CASE("log-likelihood examples") {
  const auto one = series_of({{1600, 1, 1}});
  DesignSpec d;
  d.degree = 1;
  d.rows = Eigen::MatrixXd::Ones(1, 2);
  d.rows(0, 1) = 0.0;
  CHECK(log_likelihood(Eigen::Vector2d::Zero(), d, one, Weighting::Weighted) == doctest::Approx(2 * std::log(0.5)).epsilon(1e-12));
  const auto all = series_of({{1600, 0, 5}});
  CHECK(log_likelihood(Eigen::Vector2d::Zero(), d, all, Weighting::Unweighted) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  const auto g = loglik_gradient(Eigen::Vector2d::Zero(), d, one, Weighting::Weighted);
  CHECK(g[0] == 0.0);
}

TEST_CASE("log-likelihood matches a naive summation") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> coef(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_series(rng, 8 + trial % 20, 40, 4.0, 1600);
    const int degree = 1 + trial % 5;
    if (static_cast<int>(s.size()) < degree + 2) continue;
    const auto d = build_design(s, degree);
    std::vector<double> beta(degree + 1);
    for (auto& b : beta) b = coef(rng);
    for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
      const auto pts = oracle::points(s, w == Weighting::Weighted);
      const auto [c, sd] = oracle::mean_sd(pts);
      const double expected = oracle::loglik(beta, pts, c, sd);
      CHECK(log_likelihood(to_eigen(beta), d, s, w) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> coef(0.0, 0.8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = oracle::random_series(rng, 20, 50, 3.0, 1650);
    const int degree = 1 + trial % 6;
    const auto d = build_design(s, degree);
    std::vector<double> beta(degree + 1);
    for (auto& b : beta) b = coef(rng);
    for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
      const auto analytic = loglik_gradient(to_eigen(beta), d, s, w);
      const auto numeric = oracle::fd_gradient(
          [&](const std::vector<double>& b) { return log_likelihood(to_eigen(b), d, s, w); }, beta, 1e-5);
      for (int k = 0; k <= degree; ++k) {
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric[k]), 1.0});
        CHECK(std::abs(analytic[k] - numeric[k]) / denom < 1e-6);
      }
    }
  }
}

TEST_CASE("destandardize examples") {
  const auto b = destandardize(Eigen::Vector2d(0.0, 4.9), 1650.0, 100.0);
  CHECK(b[0] == doctest::Approx(-80.85));
  CHECK(b[1] == doctest::Approx(0.049));
  const Eigen::Vector3d v(0.3, -1.2, 2.5);
  CHECK((destandardize(v, 0.0, 1.0) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("destandardize matches the expansion oracle and both forms agree") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> coef(0.0, 2.0);
  std::uniform_real_distribution<double> year(1400, 1900);
  for (int trial = 0; trial < 100; ++trial) {
    const int degree = 1 + trial % 6;
    std::vector<double> b(degree + 1);
    for (auto& x : b) x = coef(rng);
    const double c = year(rng), s = 20 + 100 * std::abs(coef(rng));
    const auto ours = destandardize(to_eigen(b), c, s);
    const auto expected = oracle::expand_polynomial(b, c, s);
    for (int k = 0; k <= degree; ++k) {
      CHECK(ours[k] == doctest::Approx(expected[k]).epsilon(1e-9).scale(1e-300));
    }
    if (degree == 3) {
      for (int i = 0; i < 5; ++i) {
        const double t = year(rng), z = (t - c) / s;
        double lhs = 0, rhs = 0;
        for (int k = 3; k >= 0; --k) lhs = lhs * z + b[k];
        for (int k = 3; k >= 0; --k) rhs = rhs * t + ours[k];
        CHECK(rhs == doctest::Approx(lhs).epsilon(1e-9).scale(std::max(1.0, std::abs(ours[0]))));
      }
    }
  }
}

TEST_CASE("prediction and Piotrowski parameters from published-style coefficients") {
  const auto f = raw_line(-82.238, 0.049);
  CHECK(predict(f, 82.238 / 0.049) == doctest::Approx(0.5).epsilon(1e-12));
  // eta = -13.638 at 1400, so p is about 1.19e-6
  CHECK(predict(f, 1400) == doctest::Approx(1.0 / (1.0 + std::exp(13.638))).epsilon(1e-9));
  CHECK(predict(f, 1400) < 1.2e-6);
  CHECK(predict(raw_line(0, 0), 1234.5) == 0.5);
  const auto p = to_piotrowski(f);
  CHECK(p.t_half == doctest::Approx(1678.33).epsilon(1e-5));
  CHECK(p.r == doctest::Approx(0.049));
  CHECK(p.a_relative == 1.0);
  CHECK(p.a_calendar == doctest::Approx(std::exp(82.238)));
  const auto unit = to_piotrowski(raw_line(0, 1));
  CHECK(unit.a_relative == 1.0);
  CHECK(unit.a_calendar == 1.0);
  CHECK(unit.r == 1.0);
  CHECK(unit.t_half == 0.0);

  LogisticFit cubic = raw_line(0, 1);
  cubic.degree = 3;
  CHECK_THROWS_AS(to_piotrowski(cubic), FitError);
}

TEST_CASE("inverse logit stays finite and inside (0,1)") {
  CHECK(inverse_logit(0) == 0.5);
  CHECK(inverse_logit(800) == 1.0);
  CHECK(inverse_logit(-800) >= 0.0);
  CHECK(inverse_logit(30) < 1.0);
  CHECK(inverse_logit(-30) > 0.0);
}

TEST_CASE("constant proportion 0.5 fits zero coefficients") {
  BinSeries s;
  for (int i = 0; i < 10; ++i) s.bins.push_back({1500 + 10 * i, 1510 + 10 * i, 1505.0 + 10 * i, 4 + i, 4 + i});
  for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
    const auto f = fit_logistic(s, 1, w);
    CHECK(f.converged);
    CHECK(std::abs(f.coeffs_raw[0]) < 1e-9);
    CHECK(std::abs(f.coeffs_raw[1]) < 1e-12);
    CHECK(f.mcfadden_r2 == doctest::Approx(0.0).epsilon(1e-12).scale(1));
    CHECK(f.df_residual == 8);
  }
}

TEST_CASE("synthetic recovery of the raw slope") {
  std::mt19937_64 rng(31);
  // p(year) = 1 / (1 + exp(-(year - 1650) * 0.05))
  const auto s = synthetic::logistic_bins(-1650 * 0.05, 0.05, 1400, 1900, 10, 500, rng);
  const auto f = fit_logistic(s, 1, Weighting::Weighted);
  CHECK(f.converged);
  CHECK_FALSE(f.separation);
  CHECK(std::abs(f.coeffs_raw[1] - 0.05) / 0.05 < 0.05);
  CHECK(std::abs(to_piotrowski(f).t_half - 1650) < 2);
  const auto pts = oracle::points(s, true);
  const auto [c, sd] = oracle::mean_sd(pts);
  CHECK(f.loglik == doctest::Approx(oracle::max_loglik_2param(pts, c, sd)).epsilon(1e-9));
}

TEST_CASE("converged fits satisfy the score equations and are local maxima") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> eps(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const auto s = oracle::random_series(rng, 25, 200, 3.5, 1620);
    const int degree = 1 + trial % 4;
    for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
      const auto f = fit_logistic(s, degree, w);
      if (!f.converged) continue;
      const auto d = build_design(s, degree);
      CHECK(loglik_gradient(f.coeffs_std, d, s, w).cwiseAbs().maxCoeff() < 1e-6);
      for (int k = 0; k < 1000 / 24 + 1; ++k) {
        Eigen::VectorXd e(degree + 1);
        for (int j = 0; j <= degree; ++j) e[j] = eps(rng);
        e *= 0.1 * std::abs(eps(rng)) / std::max(e.norm(), 1e-12);
        if (e.norm() > 0.1) e *= 0.1 / e.norm();
        CHECK(log_likelihood(f.coeffs_std + e, d, s, w) <= f.loglik + 1e-9);
      }
    }
  }
}

TEST_CASE("equal trials make weighted and unweighted coincide") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = synthetic::logistic_bins(-1600 * 0.04, 0.04, 1450, 1750, 10, 60, rng);
    const auto a = fit_logistic(s, 1 + trial % 3, Weighting::Weighted);
    const auto b = fit_logistic(s, 1 + trial % 3, Weighting::Unweighted);
    CHECK((a.coeffs_std - b.coeffs_std).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("time translation shifts t_half exactly") {
  std::mt19937_64 rng(43);
  const auto s = oracle::random_series(rng, 30, 100, 4.0, 1600);
  auto shifted = s;
  for (auto& b : shifted.bins) {
    b.start_year += 37;
    b.end_year += 37;
    b.midpoint += 37;
  }
  for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
    const auto a = fit_logistic(s, 1, w), b = fit_logistic(shifted, 1, w);
    CHECK(to_piotrowski(b).t_half - to_piotrowski(a).t_half == doctest::Approx(37).epsilon(1e-9));
    CHECK(b.coeffs_raw[1] == doctest::Approx(a.coeffs_raw[1]).epsilon(1e-9));
    CHECK(b.loglik == doctest::Approx(a.loglik).epsilon(1e-12));
    CHECK(b.mcfadden_r2 == doctest::Approx(a.mcfadden_r2).epsilon(1e-12));
  }
}

TEST_CASE("count scaling leaves coefficients unchanged") {
  std::mt19937_64 rng(47);
  const auto s = oracle::random_series(rng, 30, 100, 4.0, 1600);
  auto scaled = s;
  for (auto& b : scaled.bins) {
    b.recessive *= 5;
    b.innovative *= 5;
  }
  for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
    const auto a = fit_logistic(s, 2, w), b = fit_logistic(scaled, 2, w);
    CHECK((a.coeffs_std - b.coeffs_std).cwiseAbs().maxCoeff() < 1e-8);
    const double factor = w == Weighting::Weighted ? 5.0 : 1.0;
    CHECK(b.loglik == doctest::Approx(factor * a.loglik).epsilon(1e-10));
  }
}

TEST_CASE("degree-1 prediction is monotone for a positive slope") {
  std::mt19937_64 rng(53);
  const auto s = synthetic::logistic_bins(-1600 * 0.03, 0.03, 1400, 1800, 10, 50, rng);
  const auto f = fit_logistic(s, 1, Weighting::Weighted);
  REQUIRE(f.coeffs_raw[1] > 0);
  double last = 0.0;
  for (int y = 1300; y <= 1900; ++y) {
    const double p = predict(f, y);
    CHECK(p >= last);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    last = p;
  }
}

TEST_CASE("perfectly ordered bins are flagged as separated") {
  const auto s = series_of({{1505, 10, 0}, {1515, 8, 0}, {1525, 9, 0}, {1535, 0, 7}, {1545, 0, 12}, {1555, 0, 5}});
  for (auto w : {Weighting::Weighted, Weighting::Unweighted}) {
    const auto f = fit_logistic(s, 1, w);
    CHECK(f.separation);
    CHECK_FALSE(f.converged);
    CHECK(f.coeffs_std[1] > 0);
  }
}

TEST_CASE("fit CSV row") {
  std::mt19937_64 rng(59);
  const auto s = synthetic::logistic_bins(-1600 * 0.03, 0.03, 1400, 1800, 10, 50, rng);
  const auto f = fit_logistic(s, 1, Weighting::Weighted);
  CHECK(fit_csv_header(2) == "change,degree,weighting,window,overlap,beta0,beta1,beta2,loglik,loglik_null,r2,p_value,df,converged,separation");
  const auto row = fit_csv_row("x", f, 2);
  CHECK(row.rfind("x,1,weighted,10,0,", 0) == 0);
  CHECK(row.find(",,") != std::string::npos);  // beta2 left blank
  CHECK(row.substr(row.size() - 7) == ",38,1,0");
}
