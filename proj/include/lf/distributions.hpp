#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "lf/core.hpp"

namespace lf {

// Standard normal helpers. The quantile is a rational approximation refined
// by one Halley step against erfc.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);
double normal_quantile(Prob p);

enum class Family {
  kUniform,
  kNormal,
  kExponential,
  kBeta,
  kGamma,
  kWeibull,
  kStudentT,
  kLogistic,
  kGumbel,
  kBernoulli,
  kDegenerate,
};

class ParametricDistribution {
 public:
  static ParametricDistribution uniform(double a, double b);
  static ParametricDistribution normal(double mu, double sigma);
  static ParametricDistribution exponential(double scale);
  static ParametricDistribution beta(double a, double b);
  static ParametricDistribution gamma(double shape, double scale);
  static ParametricDistribution weibull(double shape, double scale);
  static ParametricDistribution student_t(double nu);
  static ParametricDistribution logistic(double location, double scale);
  // Minimum-type extreme value law: Q(p) = a + b log(-log(1 - p)), the law of
  // log T for an exponential T.
  static ParametricDistribution gumbel(double location, double scale);
  static ParametricDistribution bernoulli(double pi);
  // Point mass at c; used for degenerate Monte-Carlo checks.
  static ParametricDistribution degenerate(double c);

  // Parses `family:param1,param2`, case-insensitively (e.g. `norm:0,1`).
  static ParametricDistribution parse(std::string_view spec);

  Family family() const { return family_; }
  double param(int i) const { return params_[i]; }
  std::string name() const;

  bool continuous() const;
  bool has_density() const { return continuous(); }
  double support_lo() const;
  double support_hi() const;

  double quantile(double p) const { return quantile(Prob::of(p)); }
  double quantile(Prob p) const;
  double cdf(double y) const;
  double sf(double y) const;
  // Throws DomainError for families without a density.
  double density(double y) const;

 private:
  ParametricDistribution(Family f, double a, double b) : family_(f), params_{a, b} {}
  Family family_;
  std::array<double, 2> params_;
};

inline double quantile(const ParametricDistribution& d, double p) { return d.quantile(p); }
inline double cdf(const ParametricDistribution& d, double y) { return d.cdf(y); }
inline double density(const ParametricDistribution& d, double y) { return d.density(y); }

class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> values);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  // 1-based order statistic Y_(k).
  double order_stat(std::size_t k) const { return sorted_[k - 1]; }

  // Left-continuous inverse of the ECDF: Y_(ceil(n p)).
  double quantile(double p) const { return quantile(Prob::of(p)); }
  double quantile(Prob p) const;
  // Index k (1-based) selected at probability p.
  std::size_t rank_at(Prob p) const;

 private:
  std::vector<double> sorted_;
};

// ceil(n p) clamped to [1, n], computed on the complement for p > 0.5.
std::size_t rank_index(std::size_t n, Prob p);

inline double empirical_quantile(const EmpiricalSample& s, double p) { return s.quantile(p); }

}  // namespace lf
