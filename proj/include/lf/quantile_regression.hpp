#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lf/lstatistics.hpp"
#include "lf/weights.hpp"

namespace lf {

// Strictly increasing transformation h applied to responses before fitting.
class Link {
 public:
  enum class Kind { kIdentity, kLogit, kLog, kBoxCox };

  static Link identity();
  // log((y - a) / (b - y)) on (a, b).
  static Link logit(double a, double b);
  static Link log();
  // (y^gamma - 1) / gamma; gamma = 0 is the log link.
  static Link boxcox(double gamma);
  // `identity`, `log`, `logit:a,b` or `boxcox:gamma`.
  static Link parse(std::string_view spec);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double gamma() const { return gamma_; }
  std::string name() const;

  bool in_domain(double y) const;
  double forward(double y) const;
  double derivative(double y) const;
  // Throws DomainError when z lies outside the range of h.
  double inverse(double z) const;

 private:
  Link(Kind k, double a, double b, double g) : kind_(k), a_(a), b_(b), gamma_(g) {}
  Kind kind_;
  double a_;
  double b_;
  double gamma_;
};

// Design and responses; the link is applied once at construction.
class RegressionData {
 public:
  RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y, Link link = Link::identity());

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  // h(y).
  const Eigen::VectorXd& z() const { return z_; }
  const Link& link() const { return link_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index q() const { return x_.cols(); }
  bool intercept_only() const;
  // max_i |x_i| / sqrt(n), reported as a design diagnostic.
  double leverage_ratio() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd z_;
  Link link_;
};

double check_loss(double p, double u);

struct RqSolution {
  Eigen::VectorXd beta;
  double objective = 0.0;
  // Indices of the observations interpolated by the vertex solution.
  std::vector<Eigen::Index> basis;
  int ip_iterations = 0;
  int pivots = 0;
};

// Minimizes sum_i rho_{tau_i}(y_i - x_i^T b) by a Frisch-Newton interior
// point method, then moves to an optimal vertex with simplex pivots.
RqSolution solve_rq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau);
RqSolution solve_rq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau);

// Largest violation of the subgradient optimality condition: per coordinate,
// |sum_{r_i != 0} x_ij (tau_i - 1(r_i < 0))| minus sum_{r_i = 0} |x_ij|.
// Nonpositive at an optimum.
double rq_optimality_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau,
                               const Eigen::VectorXd& beta, double zero_tol);

// Regression quantile of h(Y); the intercept-only design returns the
// left-continuous sample quantile of h(Y).
RqSolution fit_rq_detail(const RegressionData& data, double p);
Eigen::VectorXd fit_rq(const RegressionData& data, double p);

// A coefficient curve p -> beta(p) on its domain [lo, hi].
struct BetaCurve {
  std::function<Eigen::VectorXd(Prob)> eval;
  double lo = 0.0;
  double hi = 1.0;
  Eigen::Index q = 0;
  // Interior points where the curve has reduced smoothness (spline knots).
  std::vector<double> knots;

  Eigen::VectorXd operator()(Prob p) const { return eval(p); }
  Eigen::VectorXd operator()(double p) const { return eval(Prob::of(p)); }
};

// Natural cubic spline through (x_k, y_k); evaluation outside [x_1, x_K]
// throws SupportOutsideGrid.
class NaturalSpline {
 public:
  NaturalSpline() = default;
  NaturalSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives
};

class BetaGrid {
 public:
  BetaGrid(std::vector<double> grid, Eigen::MatrixXd coefficients);

  // K equispaced interior points (k - 0.5) / K.
  static std::vector<double> default_grid(int k = 100);

  const std::vector<double>& grid() const { return grid_; }
  // Row k holds beta_hat(p_k).
  const Eigen::MatrixXd& coefficients() const { return coef_; }
  Eigen::Index q() const { return coef_.cols(); }
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  Eigen::VectorXd operator()(double p) const;
  BetaCurve curve() const;

 private:
  std::vector<double> grid_;
  Eigen::MatrixXd coef_;
  std::vector<NaturalSpline> splines_;
};

// Per-p fits; `threads` = 0 uses hardware concurrency. Results do not depend
// on the thread count.
BetaGrid fit_rq_grid(const RegressionData& data, const std::vector<double>& grid, unsigned threads = 0);

// beta(p; psi) = sum_k psi_k beta^k(p) with psi a q x r matrix; entries with
// mask = false are held at their value in `psi`.
struct QuantileBasis {
  std::string name;
  std::vector<std::function<double(Prob)>> functions;
  Eigen::MatrixXd psi;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> free;

  Eigen::Index r() const { return static_cast<Eigen::Index>(functions.size()); }
  Eigen::VectorXd beta(const Eigen::MatrixXd& psi_value, Prob p) const;
};

// Kinds: `aft[:family]`, `homo[:family]`, `hetero[:family]` (family of Q0,
// default normal), `cox`, `po`, `logpower:gamma`. `q` is the design width.
QuantileBasis make_basis(std::string_view spec, Eigen::Index q);

struct ParametricFit {
  QuantileBasis basis;
  Eigen::MatrixXd psi;
  double objective = 0.0;
  BetaCurve curve;
};

// Minimizes sum_i int_delta^{1-delta} rho_p(h(Y_i) - x_i^T beta(p; psi)) dp with
// the integral replaced by a 64-node Gauss-Legendre rule.
ParametricFit fit_parametric(const RegressionData& data, const QuantileBasis& basis, double delta = 1e-3);

// Conditional L-functionals.
struct CondLinear {
  Eigen::VectorXd b;
  double operator()(const Eigen::VectorXd& x) const { return x.dot(b); }
};

// B = int beta(p) dG(p); G must live inside the curve's domain.
CondLinear cond_lfunctional_linear(const BetaCurve& beta, const WeightMeasure& g);

struct CondRatio {
  CondLinear numerator;
  CondLinear denominator;
  double operator()(const Eigen::VectorXd& x) const;
};

CondRatio cond_ratio_linear(const BetaCurve& beta, const WeightMeasure& g1, const WeightMeasure& g2);

// int h^{-1}(x^T beta(p)) dG(p).
double cond_lfunctional_link(const BetaCurve& beta, const WeightMeasure& g, const Link& link,
                             const Eigen::VectorXd& x);
double cond_ratio_link(const BetaCurve& beta, const WeightMeasure& g1, const WeightMeasure& g2, const Link& link,
                       const Eigen::VectorXd& x);

// dG_x(p) = dG(p) / h'(h^{-1}(x^T beta(p))).
WeightMeasure effective_weight(const WeightMeasure& g, const Link& link, const Eigen::VectorXd& x,
                               const BetaCurve& beta);

// Covariance kernels of sqrt(n)(beta_hat(p) - beta(p)).
enum class RegCovMode { kTrueDensity, kHomoscedastic, kEstimated, kParametric };

struct RegCovSpec {
  RegCovMode mode = RegCovMode::kHomoscedastic;
  // kTrueDensity: f_i(p), the conditional density of observation i at its
  // p-th conditional quantile.
  std::function<double(Eigen::Index, Prob)> density;
  // kHomoscedastic: error law F0 (including its scale).
  std::optional<ParametricDistribution> f0;
  // kEstimated: fitted grid for the difference-quotient sparsity.
  std::optional<BetaGrid> grid;
  // kParametric: basis and rq x rq covariance of vec(psi_hat).
  std::optional<QuantileBasis> basis;
  Eigen::MatrixXd v;
};

CovKernel reg_cov(const RegressionData& data, const RegCovSpec& spec);

// Sigma^{12} = int int R(p, s) dG1(p) dG2(s).
Eigen::MatrixXd sigma_cross(const CovKernel& kernel, const WeightMeasure& g1, const WeightMeasure& g2);
Eigen::MatrixXd sigma_b(const CovKernel& kernel, const WeightMeasure& g);

// Delta-method variance of x^T B1 / x^T B2.
double ratio_var(const CovKernel& kernel, const WeightMeasure& g1, const WeightMeasure& g2, const Eigen::VectorXd& b1,
                 const Eigen::VectorXd& b2, const Eigen::VectorXd& x);
// x^T Sigma_x x with the effective weight G_x.
double link_var(const CovKernel& kernel, const WeightMeasure& gx, const Eigen::VectorXd& x);
// Delta-method variance of T1 / T2 under a link, with effective weights.
double link_ratio_var(const CovKernel& kernel, const WeightMeasure& gx1, const WeightMeasure& gx2, double t1,
                      double t2, const Eigen::VectorXd& x);

}  // namespace lf
