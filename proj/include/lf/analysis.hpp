#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lf/distributions.hpp"
#include "lf/lfunctionals.hpp"
#include "lf/quantile_regression.hpp"
#include "lf/weights.hpp"

namespace lf {

using GroupKey = std::vector<double>;

// Response samples split by exact covariate vector. Groups are kept in
// lexicographic key order and weighted equally.
class GroupedData {
 public:
  struct Group {
    GroupKey key;
    EmpiricalSample sample;
  };

  explicit GroupedData(std::vector<Group> groups);
  // Row i of `covariates` is the key of y[i].
  static GroupedData from_rows(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y);

  const std::vector<Group>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  // Throws ValidationError for an unknown key.
  const Group& group(const GroupKey& key) const;
  std::size_t index_of(const GroupKey& key) const;

 private:
  std::vector<Group> groups_;
};

double empirical_cond_quantile(const GroupedData& gd, const GroupKey& x, double p);

// Quantile of the equally weighted mixture of the group ECDFs.
class PooledDistribution {
 public:
  explicit PooledDistribution(const GroupedData& gd);
  // Distinct values and the mixture CDF at each.
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& cdf() const { return cdf_; }
  double quantile(double p) const;
  QuantileSource source() const;

 private:
  std::vector<double> values_;
  std::vector<double> cdf_;
};

double pooled_quantile(const GroupedData& gd, double p);

struct RSquared {
  double value = 0.0;
  // Group-averaged approximation error and the pooled spread about T_1.
  double numerator = 0.0;
  double denominator = 0.0;
  double eps = 0.0;
};

// Q_appr from each group's own first m0 empirical L-moments. eps > 0
// re-orthonormalizes the system on (eps, 1 - eps). Trimmed systems are rejected.
RSquared r_squared_raw(const GroupedData& gd, const PolynomialSystem& sys, int m0, double eps = 0.0);

// Fitted conditional quantiles Q(p | x) = h^{-1}(d(x)^T beta(p)), d the design map.
struct ConditionalModel {
  BetaCurve curve;
  Link link = Link::identity();
  std::function<Eigen::VectorXd(const GroupKey&)> design;

  // Intercept followed by the key.
  static std::function<Eigen::VectorXd(const GroupKey&)> with_intercept();
};

// Q_appr(p | x) = sum_m theta_m(x) g_m(p) with theta_m the model-based
// conditional L-moments. eps defaults to the lower end of the curve's domain.
RSquared r_squared_model(const GroupedData& gd, const ConditionalModel& model, const PolynomialSystem& sys, int m0,
                         std::optional<double> eps = std::nullopt);

// Order codes: m for T_m, 10 m + l for T_m / T_l (32, 42, ...).
struct LCode {
  int m = 0;
  int l = 0;
  static LCode parse(int code);
  int code() const { return l == 0 ? m : 10 * m + l; }
};

// Vector of (ratios of) empirical L-moments of a sample.
Eigen::VectorXd lmoment_vector(const EmpiricalSample& s, const PolynomialSystem& sys, const std::vector<int>& codes);

struct BootstrapCloud {
  GroupKey key;
  std::vector<int> codes;
  Eigen::VectorXd center;
  // Row b is replicate b.
  Eigen::MatrixXd replicates;
  // (1/B) sum_b (theta*_b - center)(theta*_b - center)^T.
  Eigen::MatrixXd sigma;
};

// Case resampling within the group; replicate b uses replicate_seed(seed, b).
BootstrapCloud bootstrap_cloud(const GroupedData& gd, const GroupKey& x, const PolynomialSystem& sys,
                               const std::vector<int>& codes, int b = 200, std::uint64_t seed = 1);

struct MahalanobisValue {
  double value = 0.0;
  // Set when eigenvalues below 1e-10 times the largest were dropped.
  bool pseudo_inverse = false;
};

MahalanobisValue mahalanobis(const Eigen::VectorXd& d, const Eigen::MatrixXd& sigma);
MahalanobisValue mahalanobis_self(const BootstrapCloud& cloud, int b);
MahalanobisValue mahalanobis_between(const BootstrapCloud& c1, const BootstrapCloud& c2);
// The cloud restricted to the listed positions of its codes.
BootstrapCloud subset(const BootstrapCloud& cloud, const std::vector<int>& positions);

// Bird-arrival-like data: age (0 juvenile, 1 adult), sex (0 female, 1 male),
// year 1982..2019, integer day in [81, 161] from a logit model bounded by
// (80, 162).
struct BirdData {
  std::vector<int> age;
  std::vector<int> sex;
  std::vector<int> year;
  std::vector<double> day;
  std::size_t size() const { return day.size(); }
  // Columns age, sex, year - 2001.
  Eigen::MatrixXd covariates() const;
  Eigen::VectorXd response() const;
};

BirdData simulate_birds(std::uint64_t seed, double mean_group_size = 25.0);

}  // namespace lf
