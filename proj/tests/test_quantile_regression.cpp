#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lf/lfunctionals.hpp"
#include "lf/quantile_regression.hpp"
#include "oracles.hpp"

using lf::BetaGrid;
using lf::Link;
using lf::ParametricDistribution;
using lf::PolynomialSystem;
using lf::Prob;
using lf::RegressionData;
using lf::SystemKind;
using lf::WeightMeasure;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// y_i = b0 + b1 x_i + sigma e_i with e ~ F0 and x uniform on (0, 2).
RegressionData homoscedastic(std::size_t n, std::uint64_t seed, const ParametricDistribution& f0,
                             double b0 = 1.0, double b1 = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 2.0);
  const auto e = lf::draw_sample(f0, n, seed ^ 0x9e3779b97f4a7c15ULL);
  MatrixXd x(static_cast<Eigen::Index>(n), 2);
  VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    x(k, 0) = 1.0;
    x(k, 1) = ux(rng);
    y[k] = b0 + b1 * x(k, 1) + e[i];
  }
  return RegressionData(x, y);
}

MatrixXd random_design(int n, int q, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXd x(n, q);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < q; ++j) x(i, j) = nd(rng);
  }
  return x;
}

WeightMeasure windowed(SystemKind kind, double eps, int m) {
  return lf::gram_schmidt_eps(PolynomialSystem(kind), eps, std::max(m, 4)).weight(m);
}

}  // namespace

TEST(Link, RoundTripOnGrid) {
  const std::vector<Link> links = {Link::identity(), Link::logit(80.0, 162.0), Link::log(), Link::boxcox(0.5),
                                   Link::boxcox(-0.7)};
  for (const auto& h : links) {
    const double lo = h.kind() == Link::Kind::kLogit ? 80.0 : (h.kind() == Link::Kind::kIdentity ? -50.0 : 0.0);
    const double hi = h.kind() == Link::Kind::kLogit ? 162.0 : 50.0;
    for (int k = 1; k <= 1000; ++k) {
      const double y = lo + (hi - lo) * k / 1001.0;
      EXPECT_NEAR(h.inverse(h.forward(y)), y, 1e-12 * std::max(1.0, std::abs(y))) << h.name() << " y=" << y;
      EXPECT_GT(h.derivative(y), 0.0);
      if (k > 1) EXPECT_GT(h.forward(y), h.forward(lo + (hi - lo) * (k - 1) / 1001.0));
    }
  }
}

TEST(Link, DerivativeMatchesDifferenceQuotient) {
  for (const auto& h : {Link::logit(0.0, 1.0), Link::log(), Link::boxcox(0.3)}) {
    for (double y : {0.2, 0.5, 0.9}) {
      const double e = 1e-6;
      EXPECT_NEAR(h.derivative(y), (h.forward(y + e) - h.forward(y - e)) / (2 * e), 1e-6 * h.derivative(y));
    }
  }
}

TEST(Link, ParseAndErrors) {
  EXPECT_EQ(Link::parse("logit:80,162").kind(), Link::Kind::kLogit);
  EXPECT_EQ(Link::parse("logit:80,162").b(), 162.0);
  EXPECT_EQ(Link::parse("boxcox:0").kind(), Link::Kind::kLog);
  EXPECT_EQ(Link::parse("identity").kind(), Link::Kind::kIdentity);
  EXPECT_THROW(Link::parse("logit:3,1"), lf::ValidationError);
  EXPECT_THROW(Link::parse("probit"), lf::ValidationError);
  EXPECT_THROW(Link::log().forward(-1.0), lf::DomainError);
  EXPECT_THROW(Link::boxcox(0.5).inverse(-3.0), lf::DomainError);
  EXPECT_GT(Link::logit(80, 162).inverse(40.0), 80.0 - 1e-12);
  EXPECT_LE(Link::logit(80, 162).inverse(40.0), 162.0);
}

TEST(RegressionData, Validation) {
  MatrixXd x(4, 2);
  x << 1, 1, 1, 2, 1, 3, 1, 4;
  EXPECT_NO_THROW(RegressionData(x, VectorXd::LinSpaced(4, 1, 4)));
  MatrixXd bad = x;
  bad.col(1) = 2 * bad.col(0);
  EXPECT_THROW(RegressionData(bad, VectorXd::LinSpaced(4, 1, 4)), lf::RankDeficient);
  EXPECT_THROW(RegressionData(x.topRows(2), VectorXd::LinSpaced(2, 1, 2)), lf::ValidationError);
  EXPECT_THROW(RegressionData(x, VectorXd::LinSpaced(4, 1, 4), Link::logit(0, 4)), lf::DomainError);
  const RegressionData d(x, VectorXd::LinSpaced(4, 1, 4), Link::log());
  EXPECT_NEAR(d.z()[3], std::log(4.0), 1e-15);
  EXPECT_NEAR(d.leverage_ratio(), std::sqrt(17.0) / 2.0, 1e-15);
}

TEST(CheckLoss, Examples) {
  EXPECT_EQ(lf::check_loss(0.5, 2.0), 1.0);
  EXPECT_EQ(lf::check_loss(0.25, -1.0), 0.75);
  EXPECT_EQ(lf::check_loss(0.3, 0.0), 0.0);
  EXPECT_THROW(lf::check_loss(1.0, 1.0), lf::ValidationError);
}

TEST(FitRq, Examples) {
  const RegressionData d(MatrixXd::Ones(4, 1), (VectorXd(4) << 1, 2, 3, 5).finished());
  EXPECT_EQ(lf::fit_rq(d, 0.5)[0], 2.0);

  MatrixXd x(6, 2);
  VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i - 2.5;
    y[i] = 2.0 * x(i, 1);
  }
  const RegressionData lin(x, y);
  for (double p : {0.1, 0.5, 0.77}) {
    const VectorXd b = lf::fit_rq(lin, p);
    EXPECT_NEAR(b[0], 0.0, 1e-12);
    EXPECT_NEAR(b[1], 2.0, 1e-12);
  }
}

TEST(FitRq, MatchesBasicSolutionEnumeration) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> un(5, 20);
  std::uniform_int_distribution<int> uq(1, 3);
  std::uniform_real_distribution<double> up(0.02, 0.98);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = un(rng);
    const int q = std::min(uq(rng), n - 1);
    const MatrixXd x = random_design(n, q, rng);
    VectorXd y(n);
    // Every fourth instance has heavily tied integer responses.
    for (int i = 0; i < n; ++i) y[i] = rep % 4 == 0 ? std::round(2.0 * nd(rng)) : x.row(i).sum() + nd(rng);
    const double p = rep % 5 == 0 ? 0.5 : up(rng);
    const auto sol = lf::solve_rq(x, y, p);
    const double oracle = lf::oracle::rq_enumerate(x, y, p);
    EXPECT_NEAR(sol.objective, oracle, 1e-8 * (1.0 + std::abs(oracle))) << "rep " << rep;
    EXPECT_NEAR(lf::oracle::check_sum(x, y, p, sol.beta), sol.objective, 1e-10 * (1.0 + oracle));
  }
}

TEST(FitRq, OptimalityConditionHolds) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd x = random_design(300, 4, rng);
    std::normal_distribution<double> nd;
    VectorXd y(300);
    for (int i = 0; i < 300; ++i) y[i] = x.row(i).sum() + nd(rng) * (1.0 + std::abs(x(i, 1)));
    const double p = 0.05 + 0.045 * rep;
    const auto sol = lf::solve_rq(x, y, p);
    EXPECT_LE(lf::rq_optimality_violation(x, y, VectorXd::Constant(300, p), sol.beta, 1e-9), 1e-9);
    EXPECT_EQ(sol.basis.size(), 4u);
    const VectorXd r = y - x * sol.beta;
    for (auto i : sol.basis) EXPECT_NEAR(r[i], 0.0, 1e-10);
  }
}

TEST(FitRq, InterceptOnlyIsSampleQuantile) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int n : {1 + 1, 5, 10, 37}) {
    VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = std::round(3 * nd(rng)) / 2;
    const RegressionData d(MatrixXd::Ones(n, 1), y);
    const lf::EmpiricalSample s(std::vector<double>(y.data(), y.data() + n));
    for (int k = 1; k < 4 * n; ++k) {
      const double p = static_cast<double>(k) / (4 * n);
      EXPECT_EQ(lf::fit_rq(d, p)[0], s.quantile(p)) << "n=" << n << " p=" << p;
    }
  }
}

TEST(FitRq, ScaleEquivarianceIsExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const MatrixXd x = random_design(80, 3, rng);
  VectorXd y(80);
  for (int i = 0; i < 80; ++i) y[i] = x.row(i).sum() + nd(rng);
  for (double a : {2.0, 0.25, 1024.0}) {
    for (double p : {0.1, 0.5, 0.9}) {
      const auto b1 = lf::solve_rq(x, y, p).beta;
      const auto b2 = lf::solve_rq(x, a * y, p).beta;
      for (int j = 0; j < 3; ++j) EXPECT_EQ(b2[j], a * b1[j]);
    }
  }
}

TEST(FitRq, PerObservationLevels) {
  // Pseudo-observations with their own levels: a two-row median problem.
  MatrixXd x = MatrixXd::Ones(3, 1);
  const VectorXd y = (VectorXd(3) << 0.0, 1.0, 2.0).finished();
  const VectorXd tau = (VectorXd(3) << 0.9, 0.9, 0.1).finished();
  const auto sol = lf::solve_rq(x, y, tau);
  double best = 1e300;
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += lf::check_loss(tau[j], y[j] - y[i]);
    best = std::min(best, s);
  }
  EXPECT_NEAR(sol.objective, best, 1e-12);
}

TEST(FitRqGrid, MatchesPointwiseFitsAndThreads) {
  const auto data = homoscedastic(300, 5, ParametricDistribution::normal(0, 1));
  const auto grid = BetaGrid::default_grid(20);
  const BetaGrid g1 = lf::fit_rq_grid(data, grid, 1);
  const BetaGrid g3 = lf::fit_rq_grid(data, grid, 3);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const VectorXd b = lf::fit_rq(data, grid[k]);
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(g1.coefficients()(static_cast<Eigen::Index>(k), j), b[j]);
      EXPECT_EQ(g3.coefficients()(static_cast<Eigen::Index>(k), j), b[j]);
      EXPECT_NEAR(g1(grid[k])[j], b[j], 1e-13);
    }
  }
  EXPECT_THROW(g1(0.001), lf::SupportOutsideGrid);
  EXPECT_THROW(g1(0.999), lf::SupportOutsideGrid);
}

TEST(FitRqGrid, InterceptOnlyIsMonotone) {
  const auto y = lf::draw_sample(ParametricDistribution::gamma(2, 1), 101, 9);
  const RegressionData d(MatrixXd::Ones(101, 1), VectorXd::Map(y.data(), 101));
  const BetaGrid g = lf::fit_rq_grid(d, BetaGrid::default_grid(100), 1);
  for (Eigen::Index k = 1; k < 100; ++k) EXPECT_LE(g.coefficients()(k - 1, 0), g.coefficients()(k, 0));
}

TEST(NaturalSpline, InterpolatesAndReproducesLines) {
  const std::vector<double> x = {0.1, 0.25, 0.3, 0.6, 0.9};
  std::vector<double> lin;
  std::vector<double> wig;
  for (double t : x) {
    lin.push_back(3.0 - 2.0 * t);
    wig.push_back(std::sin(7 * t));
  }
  const lf::NaturalSpline s1(x, lin);
  const lf::NaturalSpline s2(x, wig);
  for (double t = 0.1; t <= 0.9; t += 0.01) EXPECT_NEAR(s1(t), 3.0 - 2.0 * t, 1e-14);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(s2(x[k]), wig[k], 1e-15);
  // Natural end conditions: zero curvature at the ends.
  const double h = 1e-4;
  EXPECT_NEAR((s2(0.1 + 2 * h) - 2 * s2(0.1 + h) + s2(0.1)) / (h * h), 0.0, 0.2);
  EXPECT_THROW(s2(0.05), lf::SupportOutsideGrid);
  EXPECT_THROW(lf::NaturalSpline({0.1, 0.1}, {1, 2}), lf::ValidationError);
}

TEST(Basis, Examples) {
  const auto lp1 = lf::make_basis("logpower:1", 2);
  const auto po = lf::make_basis("po", 2);
  const auto cox = lf::make_basis("cox", 2);
  const auto lp0 = lf::make_basis("logpower:1e-8", 2);
  for (double p : {0.01, 0.3, 0.5, 0.8, 0.999}) {
    EXPECT_NEAR(lp1.functions[0](Prob::of(p)), std::log(p / (1 - p)), 1e-12);
    EXPECT_NEAR(po.functions[0](Prob::of(p)), std::log(p / (1 - p)), 1e-12);
    EXPECT_EQ(cox.functions[1](Prob::of(p)), -1.0);
  }
  EXPECT_NEAR(lp0.functions[0](Prob::of(0.5)), std::log(std::log(2.0)), 1e-6);
  EXPECT_NEAR(cox.functions[0](Prob::of(0.5)), std::log(std::log(2.0)), 1e-15);
  // Masks: Cox fixes the unit coefficient on the baseline term and frees b.
  EXPECT_EQ(cox.psi(0, 0), 1.0);
  EXPECT_FALSE(cox.free(0, 0));
  EXPECT_FALSE(cox.free(0, 1));
  EXPECT_TRUE(cox.free(1, 1));
  const auto aft = lf::make_basis("aft:normal", 3);
  EXPECT_TRUE(aft.free.col(0).all());
  EXPECT_TRUE(aft.free(0, 1));
  EXPECT_FALSE(aft.free(1, 1));
  EXPECT_NEAR(aft.functions[1](Prob::of(0.975)), 1.959963984540054, 1e-12);
  EXPECT_THROW(lf::make_basis("logpower:0", 2), lf::ValidationError);
  EXPECT_THROW(lf::make_basis("logpower:-1", 2), lf::ValidationError);
  EXPECT_THROW(lf::make_basis("spline", 2), lf::ValidationError);
}

TEST(FitParametric, NoiselessAftIsExact) {
  MatrixXd x(40, 2);
  VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = 0.1 * i;
    y[i] = 1.5 - 0.75 * x(i, 1);
  }
  const auto fit = lf::fit_parametric(RegressionData(x, y), lf::make_basis("aft", 2));
  EXPECT_NEAR(fit.psi(0, 0), 1.5, 1e-10);
  EXPECT_NEAR(fit.psi(1, 0), -0.75, 1e-10);
  EXPECT_NEAR(fit.psi(0, 1), 0.0, 1e-10);
  EXPECT_NEAR(fit.objective, 0.0, 1e-10);
  EXPECT_EQ(fit.psi(1, 1), 0.0);
}

TEST(FitParametric, HomoscedasticNormalRecoversCoefficients) {
  const auto data = homoscedastic(2000, 21, ParametricDistribution::normal(0, 1));
  const auto fit = lf::fit_parametric(data, lf::make_basis("aft:normal", 2));
  // Least-squares standard error of the slope inflated by 1.5 for efficiency.
  const double sx = std::sqrt((data.x().col(1).array() - data.x().col(1).mean()).square().mean());
  const double se = 1.5 / (sx * std::sqrt(2000.0));
  EXPECT_NEAR(fit.psi(1, 0), 2.0, 3 * se);
  EXPECT_NEAR(fit.psi(0, 1), 1.0, 0.1);
  const VectorXd b = fit.curve(0.5);
  EXPECT_NEAR(b[0], fit.psi(0, 0), 1e-14);
}

TEST(FitParametric, InterceptOnlyNearMaximumLikelihood) {
  const auto y = lf::draw_sample(ParametricDistribution::normal(3, 2), 2000, 4);
  const RegressionData d(MatrixXd::Ones(2000, 1), VectorXd::Map(y.data(), 2000));
  const auto fit = lf::fit_parametric(d, lf::make_basis("aft", 1));
  const auto ml = lf::fit_ml(lf::EmpiricalSample(y), lf::Family::kNormal);
  EXPECT_NEAR(fit.psi(0, 0), ml.dist.param(0), 0.03);
  EXPECT_NEAR(fit.psi(0, 1), ml.dist.param(1), 0.05);
}

TEST(CondLinear, ConstantCurveAndLinearity) {
  std::vector<double> grid = BetaGrid::default_grid(10);
  MatrixXd coef(10, 3);
  for (int k = 0; k < 10; ++k) coef.row(k) << 1.0, -2.0, 0.5;
  const BetaGrid flat(grid, coef);
  const auto loc = lf::make_classical("trimmean", std::vector{0.1, 0.9}).numerator;
  const auto b = lf::cond_lfunctional_linear(flat.curve(), loc).b;
  EXPECT_NEAR(b[0], 1.0, 1e-13);
  EXPECT_NEAR(b[1], -2.0, 1e-13);
  EXPECT_NEAR(b[2], 0.5, 1e-13);

  const auto data = homoscedastic(400, 8, ParametricDistribution::gumbel(0, 1));
  const BetaGrid bg = lf::fit_rq_grid(data, BetaGrid::default_grid(40), 1);
  const auto g = windowed(SystemKind::kLegendre, bg.lo(), 3).plus(WeightMeasure::mass(0.5, 0.3));
  const auto cond = lf::cond_lfunctional_linear(bg.curve(), g);
  const auto curve = bg.curve();
  for (const VectorXd& x : {VectorXd((VectorXd(2) << 1.0, 0.3).finished()), VectorXd((VectorXd(2) << 1.0, 1.7).finished())}) {
    const double direct =
        lf::lfunctional(lf::QuantileSource([&](Prob p) { return x.dot(curve(p)); }), g).value;
    EXPECT_NEAR(cond(x), direct, 1e-11 * (1 + std::abs(direct)));
  }
  EXPECT_THROW(lf::cond_lfunctional_linear(bg.curve(), PolynomialSystem(SystemKind::kLegendre).weight(2)),
               lf::SupportOutsideGrid);
  EXPECT_THROW(lf::cond_lfunctional_linear(bg.curve(), WeightMeasure::mass(0.001)), lf::SupportOutsideGrid);
}

TEST(CondLinear, HermiteScaleRecoversSigma) {
  const auto data = homoscedastic(3000, 12, ParametricDistribution::normal(0, 1.5));
  const BetaGrid bg = lf::fit_rq_grid(data, BetaGrid::default_grid(50), 1);
  const auto g = windowed(SystemKind::kHermite, bg.lo(), 2);
  const auto b = lf::cond_lfunctional_linear(bg.curve(), g).b;
  const double target = 1.5 * lf::lfunctional(ParametricDistribution::normal(0, 1), g).value;
  EXPECT_NEAR(b[0], target, 0.08);
  EXPECT_NEAR(b[1], 0.0, 0.08);
}

TEST(CondRatio, IdenticalMeasuresGiveOne) {
  const auto data = homoscedastic(200, 3, ParametricDistribution::normal(0, 1));
  const BetaGrid bg = lf::fit_rq_grid(data, BetaGrid::default_grid(20), 1);
  const auto g = windowed(SystemKind::kLegendre, bg.lo(), 2);
  const auto ratio = lf::cond_ratio_linear(bg.curve(), g, g);
  EXPECT_DOUBLE_EQ(ratio(VectorXd::Ones(2)), 1.0);
  MatrixXd zero = MatrixXd::Zero(20, 2);
  const BetaGrid flat(BetaGrid::default_grid(20), zero);
  EXPECT_THROW(lf::cond_ratio_linear(flat.curve(), g, g)(VectorXd::Ones(2)), lf::ZeroDenominator);
}

TEST(CondRatio, InterceptOnlyTracksEmpiricalRatio) {
  const std::size_t n = 400;
  const auto y = lf::draw_sample(ParametricDistribution::gamma(3, 1), n, 17);
  const RegressionData d(MatrixXd::Ones(n, 1), VectorXd::Map(y.data(), n));
  // Grid at bin midpoints, so the spline interpolates the order statistics.
  const BetaGrid bg = lf::fit_rq_grid(d, BetaGrid::default_grid(static_cast<int>(n)), 1);
  const auto sys = lf::gram_schmidt_eps(PolynomialSystem(SystemKind::kLegendre), bg.lo(), 4);
  const double cond = lf::cond_ratio_linear(bg.curve(), sys.weight(3), sys.weight(2))(VectorXd::Ones(1));
  const double emp = lf::ratio_l(lf::EmpiricalSample(y), sys, 3, 2).value;
  EXPECT_NEAR(cond, emp, 0.01);
}

TEST(CondRatio, HeteroscedasticRatioIsFreeOfX) {
  // Y = b0 + b1 x + (1 + x) e, e ~ Exp(1): every conditional law is a rescaled
  // Exp(1), so location- and scale-free ratios do not depend on x.
  const std::size_t n = 6000;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ux(0.0, 2.0);
  const auto e = lf::draw_sample(ParametricDistribution::exponential(1), n, 42);
  MatrixXd x(static_cast<Eigen::Index>(n), 2);
  VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    x(k, 0) = 1.0;
    x(k, 1) = ux(rng);
    y[k] = 1.0 + 0.5 * x(k, 1) + (1.0 + x(k, 1)) * e[i];
  }
  const RegressionData d(x, y);
  const BetaGrid bg = lf::fit_rq_grid(d, BetaGrid::default_grid(40), 1);
  const auto sys = lf::gram_schmidt_eps(PolynomialSystem(SystemKind::kLegendre), bg.lo(), 4);
  const auto ratio = lf::cond_ratio_linear(bg.curve(), sys.weight(3), sys.weight(2));
  const double truth = lf::ratio_l(ParametricDistribution::exponential(1), sys, 3, 2).value;
  const double r0 = ratio((VectorXd(2) << 1.0, 0.2).finished());
  const double r1 = ratio((VectorXd(2) << 1.0, 1.8).finished());
  EXPECT_NEAR(r0, truth, 0.06);
  EXPECT_NEAR(r1, truth, 0.06);
}

TEST(CondLink, IdentityEqualsLinearAndLogitStaysInside) {
  const auto data = homoscedastic(300, 4, ParametricDistribution::normal(0, 1));
  const BetaGrid bg = lf::fit_rq_grid(data, BetaGrid::default_grid(25), 1);
  // Order-one weight on the window, normalized to a location measure.
  const auto w1 = windowed(SystemKind::kLegendre, bg.lo(), 1);
  const auto g = w1.scaled(1.0 / w1.total_mass());
  const VectorXd x = (VectorXd(2) << 1.0, 0.7).finished();
  EXPECT_EQ(lf::cond_lfunctional_link(bg.curve(), g, Link::identity(), x),
            lf::cond_lfunctional_linear(bg.curve(), g)(x));

  // Responses pushed into (80, 162) through the logit link.
  VectorXd yb(data.n());
  const Link h = Link::logit(80, 162);
  for (Eigen::Index i = 0; i < data.n(); ++i) yb[i] = h.inverse(2.0 * data.y()[i]);
  const RegressionData db(data.x(), yb, h);
  const BetaGrid bb = lf::fit_rq_grid(db, BetaGrid::default_grid(25), 1);
  for (double x1 : {-1.0, 0.0, 1.0, 3.0}) {
    const double t = lf::cond_lfunctional_link(bb.curve(), g, h, (VectorXd(2) << 1.0, x1).finished());
    EXPECT_GT(t, 80.0);
    EXPECT_LT(t, 162.0);
  }
}

TEST(CondLink, LogLinkNoiselessMatchesClosedForm) {
  MatrixXd x(30, 2);
  VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = 0.05 * i;
    y[i] = std::exp(0.2 + 1.3 * x(i, 1));
  }
  const RegressionData d(x, y, Link::log());
  const BetaGrid bg = lf::fit_rq_grid(d, BetaGrid::default_grid(20), 1);
  const auto trimmed = lf::make_classical("trimmean", std::vector{0.1, 0.9}).numerator;
  const VectorXd x0 = (VectorXd(2) << 1.0, 0.9).finished();
  EXPECT_NEAR(lf::cond_lfunctional_link(bg.curve(), trimmed, Link::log(), x0), std::exp(0.2 + 1.3 * 0.9), 1e-6);
}

TEST(EffectiveWeight, Examples) {
  const std::vector<double> grid = BetaGrid::default_grid(10);
  MatrixXd c(10, 2);
  for (int k = 0; k < 10; ++k) c.row(k) << 0.4, 0.2;
  const BetaGrid flat(grid, c);
  const auto g = windowed(SystemKind::kLegendre, flat.lo(), 2).plus(WeightMeasure::mass(0.5, 0.25));
  const VectorXd x = (VectorXd(2) << 1.0, 3.0).finished();
  const auto id = lf::effective_weight(g, Link::identity(), x, flat.curve());
  const auto lg = lf::effective_weight(g, Link::log(), x, flat.curve());
  for (double p : {0.1, 0.33, 0.8}) {
    EXPECT_DOUBLE_EQ(id.density_at(Prob::of(p)), g.density_at(Prob::of(p)));
    EXPECT_NEAR(lg.density_at(Prob::of(p)), std::exp(1.0) * g.density_at(Prob::of(p)), 1e-13);
  }
  EXPECT_NEAR(lg.point_masses().at(0).weight, 0.25 * std::exp(1.0), 1e-14);

  MatrixXd zero = MatrixXd::Zero(10, 2);
  const auto lo = lf::effective_weight(WeightMeasure::mass(0.5), Link::logit(0, 1), x, BetaGrid(grid, zero).curve());
  EXPECT_NEAR(lo.point_masses().at(0).weight, 0.25, 1e-15);
}

TEST(RegCov, InterceptOnlyReducesToScalarKernel) {
  const RegressionData d(MatrixXd::Ones(10, 1), VectorXd::LinSpaced(10, 0, 9));
  const auto n01 = ParametricDistribution::normal(0, 1);
  lf::RegCovSpec spec;
  spec.mode = lf::RegCovMode::kTrueDensity;
  spec.density = [n01](Eigen::Index, Prob p) { return n01.density(n01.quantile(p)); };
  const auto k = lf::reg_cov(d, spec);
  const auto scalar = lf::CovKernel::nonparametric(n01);
  for (double p : {0.1, 0.5, 0.9})
    for (double s : {0.2, 0.5, 0.95})
      EXPECT_NEAR(k(Prob::of(p), Prob::of(s))(0, 0), scalar(Prob::of(p), Prob::of(s))(0, 0), 1e-13);
  EXPECT_NEAR(lf::sigma_b(k, WeightMeasure::mass(0.5))(0, 0), std::numbers::pi / 2, 1e-13);
}

TEST(RegCov, HomoscedasticMatchesGeneralForm) {
  const auto data = homoscedastic(50, 2, ParametricDistribution::normal(0, 1));
  const auto f0 = ParametricDistribution::logistic(0, 2);
  lf::RegCovSpec homo;
  homo.mode = lf::RegCovMode::kHomoscedastic;
  homo.f0 = f0;
  lf::RegCovSpec tru;
  tru.mode = lf::RegCovMode::kTrueDensity;
  tru.density = [f0](Eigen::Index, Prob p) { return f0.density(f0.quantile(p)); };
  const auto k1 = lf::reg_cov(data, homo);
  const auto k2 = lf::reg_cov(data, tru);
  for (double p : {0.05, 0.5, 0.7})
    for (double s : {0.3, 0.7, 0.99})
      EXPECT_LT((k1(Prob::of(p), Prob::of(s)) - k2(Prob::of(p), Prob::of(s))).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RegCov, ParametricIdentityAft) {
  const auto data = homoscedastic(50, 2, ParametricDistribution::normal(0, 1));
  lf::RegCovSpec spec;
  spec.mode = lf::RegCovMode::kParametric;
  spec.basis = lf::make_basis("aft", 2);
  spec.v = MatrixXd::Identity(4, 4);
  const auto k = lf::reg_cov(data, spec);
  for (double p : {0.1, 0.6})
    for (double s : {0.25, 0.9}) {
      const double v = 1.0 + lf::normal_quantile(p) * lf::normal_quantile(s);
      EXPECT_LT((k(Prob::of(p), Prob::of(s)) - v * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(RegCov, EstimatedSparsityNearTruth) {
  const auto data = homoscedastic(4000, 31, ParametricDistribution::normal(0, 1));
  lf::RegCovSpec est;
  est.mode = lf::RegCovMode::kEstimated;
  est.grid = lf::fit_rq_grid(data, BetaGrid::default_grid(100), 1);
  lf::RegCovSpec homo;
  homo.mode = lf::RegCovMode::kHomoscedastic;
  homo.f0 = ParametricDistribution::normal(0, 1);
  const auto ke = lf::reg_cov(data, est);
  const auto kh = lf::reg_cov(data, homo);
  const MatrixXd a = ke(Prob::of(0.5), Prob::of(0.5));
  const MatrixXd b = kh(Prob::of(0.5), Prob::of(0.5));
  EXPECT_NEAR(a(0, 0) / b(0, 0), 1.0, 0.25);
  EXPECT_NEAR(a(1, 1) / b(1, 1), 1.0, 0.25);
}

TEST(SigmaB, FactoredFormsMatchDoubleQuadrature) {
  const auto data = homoscedastic(40, 2, ParametricDistribution::normal(0, 1));
  lf::RegCovSpec homo;
  homo.mode = lf::RegCovMode::kHomoscedastic;
  homo.f0 = ParametricDistribution::logistic(0, 1);
  const auto k = lf::reg_cov(data, homo);
  const lf::CovKernel generic([k](Prob p, Prob s) { return k(p, s); }, "generic", 2);
  const auto g1 = windowed(SystemKind::kLegendre, 0.01, 2).plus(WeightMeasure::mass(0.3, 0.5));
  const auto g2 = windowed(SystemKind::kLegendre, 0.01, 3);
  const MatrixXd a = lf::sigma_cross(k, g1, g2);
  const MatrixXd b = lf::sigma_cross(generic, g1, g2);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-7 * (1 + b.cwiseAbs().maxCoeff()));

  lf::RegCovSpec par;
  par.mode = lf::RegCovMode::kParametric;
  par.basis = lf::make_basis("aft:logistic", 2);
  par.v = MatrixXd::Identity(4, 4) + MatrixXd::Constant(4, 4, 0.2);
  const auto kp = lf::reg_cov(data, par);
  const lf::CovKernel gp([kp](Prob p, Prob s) { return kp(p, s); }, "generic", 2);
  EXPECT_LT((lf::sigma_cross(kp, g1, g2) - lf::sigma_cross(gp, g1, g2)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(SigmaB, RatioAndLinkIdentities) {
  const auto data = homoscedastic(40, 2, ParametricDistribution::normal(0, 1));
  lf::RegCovSpec homo;
  homo.mode = lf::RegCovMode::kHomoscedastic;
  homo.f0 = ParametricDistribution::normal(0, 1);
  const auto k = lf::reg_cov(data, homo);
  const auto g = windowed(SystemKind::kHermite, 0.01, 2);
  const VectorXd b = (VectorXd(2) << 0.7, 0.1).finished();
  const VectorXd x = (VectorXd(2) << 1.0, 0.5).finished();
  EXPECT_NEAR(lf::ratio_var(k, g, g, b, b, x), 0.0, 1e-12);
  const std::vector<double> grid = BetaGrid::default_grid(50);
  const MatrixXd c = MatrixXd::Constant(50, 2, 0.3);
  const auto gx = lf::effective_weight(g, Link::identity(), x, BetaGrid(grid, c).curve());
  EXPECT_DOUBLE_EQ(lf::link_var(k, gx, x), x.dot(lf::sigma_b(k, g) * x));
}

TEST(Consistency, CoefficientErrorShrinksWithN) {
  const auto f0 = ParametricDistribution::normal(0, 1);
  const auto g = windowed(SystemKind::kLegendre, 0.025, 1);
  const double loc = lf::lfunctional(f0, g).value;
  const VectorXd truth = (VectorXd(2) << 1.0 + loc, 2.0).finished();
  std::vector<double> medians;
  for (std::size_t n : {500u, 2000u, 8000u}) {
    std::vector<double> err;
    for (int rep = 0; rep < 20; ++rep) {
      const auto data = homoscedastic(n, lf::replicate_seed(77 + n, static_cast<std::uint64_t>(rep)), f0);
      const BetaGrid bg = lf::fit_rq_grid(data, BetaGrid::default_grid(20), 1);
      err.push_back((lf::cond_lfunctional_linear(bg.curve(), g).b - truth).lpNorm<1>());
    }
    std::nth_element(err.begin(), err.begin() + 10, err.end());
    medians.push_back(err[10]);
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}
