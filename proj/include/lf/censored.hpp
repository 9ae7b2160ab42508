#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lf/distributions.hpp"
#include "lf/quantile_regression.hpp"

namespace lf {

// Right-continuous survival step function starting at 1.
class SurvivalCurve {
 public:
  SurvivalCurve() = default;
  SurvivalCurve(std::vector<double> times, std::vector<double> values);

  // Jump times (strictly increasing) and the survival value from each jump on.
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

// Product-limit estimate; deltas[i] = 1 marks an event. At tied times events
// are removed before censorings.
SurvivalCurve kaplan_meier(std::span<const double> times, std::span<const int> deltas);

// Right-censored responses. `censor` holds C_i when every censoring time is
// known (+inf for never censored).
class CensoredData {
 public:
  CensoredData(Eigen::MatrixXd x, Eigen::VectorXd observed, std::vector<int> delta,
               std::optional<Eigen::VectorXd> censor = std::nullopt, Link link = Link::identity());

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& observed() const { return observed_; }
  const std::vector<int>& delta() const { return delta_; }
  const std::optional<Eigen::VectorXd>& censor() const { return censor_; }
  const Link& link() const { return link_; }
  // h(observed) and h(C) (+inf where C is infinite or beyond the link's range).
  const Eigen::VectorXd& z() const { return z_; }
  const Eigen::VectorXd& z_censor() const { return zc_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index q() const { return x_.cols(); }
  // The same design with the censoring ignored.
  RegressionData naive() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd observed_;
  std::vector<int> delta_;
  std::optional<Eigen::VectorXd> censor_;
  Link link_;
  Eigen::VectorXd z_;
  Eigen::VectorXd zc_;
};

// Censoring distribution function on the transformed scale, t -> F_C(h^{-1}(t)).
using CensoringCdf = std::function<double(double)>;

// Marginal Kaplan-Meier of the censoring times: events are Delta = 0.
CensoringCdf censoring_km(const CensoredData& data);
// A known censoring law given on the original response scale.
CensoringCdf censoring_known(const ParametricDistribution& c, const Link& link);

double powell_objective(const CensoredData& data, double p, const Eigen::VectorXd& b);

struct PowellFit {
  Eigen::VectorXd beta;
  double objective = 0.0;
  double naive_objective = 0.0;
  int restarts = 0;
};

// Multistart local search: the naive fit plus `restarts` seeded
// perturbations, each refined by exact coordinate line searches and rq refits
// on the uncensored active set.
PowellFit powell_fit(const CensoredData& data, double p, std::uint64_t seed = 1, int restarts = 10);

struct LindgrenFit {
  Eigen::VectorXd beta;
  // Levels pi(x_i, p) used in the last fit.
  Eigen::VectorXd levels;
  int iterations = 0;
  bool converged = false;
};

LindgrenFit lindgren_fit(const CensoredData& data, double p, const CensoringCdf& fc, int max_iter = 50,
                         double tol = 1e-8);
LindgrenFit lindgren_fit(const CensoredData& data, double p);

// Score sum_i x_i [(1 - w_i(b)) / (1 - F_C(x_i'b)) - (1 - p)], w_i(b) = 1(z_i <= x_i'b).
// Throws DomainError when 1 - F_C(x_i'b) < trim for some i.
Eigen::VectorXd censored_score(const CensoredData& data, double p, const CensoringCdf& fc, const Eigen::VectorXd& b,
                               double trim = 0.05);

// Weighted L1 norm sum_j w_j |score_j| (w = 1 when empty), taking the
// smallest value over indicators in [0, 1] for observations with z_i = x_i'b.
// Without censoring this is zero exactly at the rq minimizers.
double censored_score_norm(const CensoredData& data, double p, const CensoringCdf& fc, const Eigen::VectorXd& b,
                           double trim = 0.05, const Eigen::VectorXd& weights = Eigen::VectorXd());

struct ScoreFit {
  Eigen::VectorXd beta;
  // Score norm with each component divided by the root-mean-square of its column.
  double score_norm = 0.0;
  int evaluations = 0;
};

ScoreFit score_fit(const CensoredData& data, double p, const CensoringCdf& fc, double trim = 0.05);
ScoreFit score_fit(const CensoredData& data, double p);

}  // namespace lf
