#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lf/distributions.hpp"
#include "lf/lfunctionals.hpp"
#include "lf/weights.hpp"

namespace lf {

// w_i = G(((i - 1) / n, i / n]); a point mass at pi goes to bin ceil(n pi)
// (bin 1 for pi = 0), matching the left-continuous empirical quantile.
struct OrderStatisticWeights {
  std::size_t n = 0;
  std::vector<double> w;

  static OrderStatisticWeights from(const WeightMeasure& g, std::size_t n);
  double apply(const EmpiricalSample& s) const;
  double sum() const;
};

double lstatistic(const EmpiricalSample& s, const WeightMeasure& g);

struct MLFit {
  ParametricDistribution dist;
  int iterations = 0;
};

// Maximum-likelihood fit for normal, exponential, gamma and weibull. A
// sample with no spread yields a degenerate law at the common value.
MLFit fit_ml(const EmpiricalSample& s, Family family);
double parametric_plugin(const EmpiricalSample& s, Family family, const WeightMeasure& g);

// Asymptotic covariance kernel R(p, s) of the quantile process.
//
// Kernels built by the factories also expose a factored form with a left
// factor F(p) (dim x k) and a middle matrix M (k x k):
//   kBridge:  R(p, s) = (min(p, s) - p s) F(p) M F(s)^T
//   kProduct: R(p, s) = F(p) M F(s)^T
class CovKernel {
 public:
  using Fn = std::function<Eigen::MatrixXd(Prob, Prob)>;
  using Gradient = std::function<Eigen::VectorXd(Prob)>;
  using Factor = std::function<Eigen::MatrixXd(Prob)>;
  enum class Form { kGeneric, kBridge, kProduct };

  CovKernel(Fn f, std::string provenance, int dim);

  static CovKernel bridge(Factor f, Eigen::MatrixXd m, std::string provenance, int dim);
  static CovKernel product(Factor f, Eigen::MatrixXd m, std::string provenance, int dim);

  // (min(p, s) - p s) / (f(Q(p)) f(Q(s))).
  static CovKernel nonparametric(const ParametricDistribution& dist);
  // grad(p)^T V grad(s).
  static CovKernel parametric(Gradient grad, Eigen::MatrixXd v);

  Eigen::MatrixXd operator()(Prob p, Prob s) const { return fn_(p, s); }
  const std::string& provenance() const { return provenance_; }
  int dim() const { return dim_; }
  Form form() const { return form_; }
  const Factor& factor() const { return factor_; }
  const Eigen::MatrixXd& middle() const { return middle_; }

 private:
  Fn fn_;
  std::string provenance_;
  int dim_;
  Form form_ = Form::kGeneric;
  Factor factor_;
  Eigen::MatrixXd middle_;
};

struct VarianceValue {
  double value = 0.0;
  double error = 0.0;
};

// Sigma = int int R(p, s) dG(p) dG(s) with the nonparametric kernel; point
// masses enter as Kronecker terms.
VarianceValue asym_var_nonparam(const ParametricDistribution& dist, const WeightMeasure& g);

// B^T V B with B = int grad dG.
double asym_var_param(const CovKernel::Gradient& grad, const Eigen::MatrixXd& v, const WeightMeasure& g);

enum class WeightRole { kLocation, kScale };

// Location: -(log f0)''(Q0(p)) / I(f0). Scale: K [(log f0)' + x (log f0)''] at
// x = Q0(p), with K such that int Q0 g = 1. Closed forms for normal and
// logistic; second differences with step 1e-4 otherwise.
WeightMeasure optimal_weight(const ParametricDistribution& f0, WeightRole role);

// Derives the seed of replicate k from the master seed (splitmix64).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t k);
// Draws n values by inversion using the replicate's own stream.
std::vector<double> draw_sample(const ParametricDistribution& dist, std::size_t n, std::uint64_t seed);

// Anderson-Darling A^2 of standardized values against N(0, 1).
double anderson_darling(std::vector<double> z);

struct CltReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  double theta = 0.0;
  double mean_estimate = 0.0;
  // Variance of sqrt(n) (theta_hat - theta) across replicates.
  double empirical_variance = 0.0;
  double predicted_variance = 0.0;
  double ratio = 0.0;
  double anderson_darling = 0.0;
};

// Replicates run on `threads` workers (0 = hardware concurrency); results do
// not depend on the thread count.
CltReport clt_check(const ParametricDistribution& dist, const WeightMeasure& g, std::size_t n, std::size_t reps,
                    std::uint64_t seed, unsigned threads = 0);

}  // namespace lf
