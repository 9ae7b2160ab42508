#include "lf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>

#include "lf/lstatistics.hpp"
#include "lf/quadrature.hpp"

namespace lf {

// ------------------------------------------------------------------ groups

GroupedData::GroupedData(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) throw ValidationError("grouped data needs at least one group");
  std::sort(groups_.begin(), groups_.end(), [](const Group& a, const Group& b) { return a.key < b.key; });
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].sample.size() == 0) throw ValidationError("empty group");
    if (g > 0 && groups_[g].key == groups_[g - 1].key) throw ValidationError("duplicate group key");
  }
}

GroupedData GroupedData::from_rows(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y) {
  if (covariates.rows() != y.size()) throw ValidationError("covariates and response differ in length");
  std::map<GroupKey, std::vector<double>> split;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    GroupKey key(static_cast<std::size_t>(covariates.cols()));
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) key[static_cast<std::size_t>(j)] = covariates(i, j);
    split[key].push_back(y[i]);
  }
  std::vector<Group> groups;
  for (auto& [key, values] : split) groups.push_back({key, EmpiricalSample(std::move(values))});
  return GroupedData(std::move(groups));
}

std::size_t GroupedData::index_of(const GroupKey& key) const {
  const auto it = std::lower_bound(groups_.begin(), groups_.end(), key,
                                   [](const Group& g, const GroupKey& k) { return g.key < k; });
  if (it == groups_.end() || it->key != key) throw ValidationError("unknown group");
  return static_cast<std::size_t>(it - groups_.begin());
}

const GroupedData::Group& GroupedData::group(const GroupKey& key) const { return groups_[index_of(key)]; }

double empirical_cond_quantile(const GroupedData& gd, const GroupKey& x, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  return gd.group(x).sample.quantile(p);
}

// ------------------------------------------------------------------ pooled

PooledDistribution::PooledDistribution(const GroupedData& gd) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t g = 0; g < gd.size(); ++g)
    for (double v : gd.groups()[g].sample.sorted()) all.emplace_back(v, g);
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> count(gd.size(), 0);
  const double groups = static_cast<double>(gd.size());
  for (std::size_t i = 0; i < all.size();) {
    const double v = all[i].first;
    for (; i < all.size() && all[i].first == v; ++i) ++count[all[i].second];
    double f = 0.0;
    for (std::size_t g = 0; g < gd.size(); ++g)
      f += static_cast<double>(count[g]) / static_cast<double>(gd.groups()[g].sample.size());
    values_.push_back(v);
    cdf_.push_back(i == all.size() ? 1.0 : f / groups);
  }
}

double PooledDistribution::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  // Mixture averages are rounded; a level within 1e-12 counts as reached.
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p - 1e-12);
  return values_[static_cast<std::size_t>(it - cdf_.begin())];
}

QuantileSource PooledDistribution::source() const {
  auto self = std::make_shared<const PooledDistribution>(*this);
  std::vector<double> jumps(cdf_.begin(), cdf_.end() - 1);
  return QuantileSource([self](Prob p) { return self->quantile(std::max(p.p, 1e-300)); }, std::move(jumps),
                        "pooled");
}

double pooled_quantile(const GroupedData& gd, double p) { return PooledDistribution(gd).quantile(p); }

// -------------------------------------------------------------- R squared

namespace {

// Pieces (value, length) of a step quantile function cut to [lo, hi].
struct Step {
  double value;
  double length;
};

std::vector<Step> sample_steps(const EmpiricalSample& s, double lo, double hi) {
  std::vector<Step> out;
  const double n = static_cast<double>(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double a = std::max(lo, static_cast<double>(k) / n);
    const double b = std::min(hi, static_cast<double>(k + 1) / n);
    if (b > a) out.push_back({s.sorted()[k], b - a});
  }
  return out;
}

std::vector<Step> pooled_steps(const PooledDistribution& pd, double lo, double hi) {
  std::vector<Step> out;
  double prev = 0.0;
  for (std::size_t k = 0; k < pd.values().size(); ++k) {
    const double a = std::max(lo, prev);
    const double b = std::min(hi, pd.cdf()[k]);
    if (b > a) out.push_back({pd.values()[k], b - a});
    prev = pd.cdf()[k];
  }
  return out;
}

// int (Q - c)^2 over the window with c the window mean of Q.
double centered_square(const std::vector<Step>& steps) {
  double len = 0.0;
  double sum = 0.0;
  for (const auto& s : steps) {
    len += s.length;
    sum += s.value * s.length;
  }
  const double c = sum / len;
  double out = 0.0;
  for (const auto& s : steps) out += (s.value - c) * (s.value - c) * s.length;
  return out;
}

PolynomialSystem windowed(const PolynomialSystem& sys, int m0, double eps) {
  if (sys.trim() > 0.0) throw ValidationError("R squared needs an untrimmed system");
  if (m0 < 1) throw ValidationError("m0 must be at least 1");
  if (eps < 0.0 || eps >= 0.5) throw ValidationError("eps must lie in [0, 0.5)");
  PolynomialSystem s = (eps > 0.0 && sys.eps() == 0.0) ? gram_schmidt_eps(sys, eps, m0) : sys;
  if (m0 > s.available_order()) throw ValidationError("m0 exceeds the available order");
  return s;
}

double pooled_denominator(const GroupedData& gd, const PolynomialSystem& s) {
  const double den = centered_square(pooled_steps(PooledDistribution(gd), s.window_lo(), s.window_hi()));
  if (!(den > 0.0)) throw ZeroDenominator("pooled response distribution is degenerate");
  return den;
}

}  // namespace

RSquared r_squared_raw(const GroupedData& gd, const PolynomialSystem& sys, int m0, double eps) {
  const PolynomialSystem s = windowed(sys, m0, eps);
  const double lo = s.window_lo();
  const double hi = s.window_hi();
  RSquared out;
  out.eps = lo;
  // g_1 is constant on the window, so T_1 g_1 is the window mean and the
  // remaining error follows from Parseval.
  double num = 0.0;
  for (const auto& g : gd.groups()) {
    double e = centered_square(sample_steps(g.sample, lo, hi));
    for (int m = 2; m <= m0; ++m) {
      const double t = OrderStatisticWeights::from(s.weight(m), g.sample.size()).apply(g.sample);
      e -= t * t;
    }
    num += std::max(e, 0.0);
  }
  out.numerator = num / static_cast<double>(gd.size());
  out.denominator = pooled_denominator(gd, s);
  out.value = 1.0 - out.numerator / out.denominator;
  return out;
}

std::function<Eigen::VectorXd(const GroupKey&)> ConditionalModel::with_intercept() {
  return [](const GroupKey& k) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(k.size()) + 1);
    x[0] = 1.0;
    for (std::size_t j = 0; j < k.size(); ++j) x[static_cast<Eigen::Index>(j) + 1] = k[j];
    return x;
  };
}

RSquared r_squared_model(const GroupedData& gd, const ConditionalModel& model, const PolynomialSystem& sys, int m0,
                         std::optional<double> eps) {
  const PolynomialSystem s = windowed(sys, m0, eps.value_or(model.curve.lo));
  const double lo = s.window_lo();
  const double hi = s.window_hi();
  std::vector<WeightMeasure> weights;
  for (int m = 1; m <= m0; ++m) weights.push_back(s.weight(m));
  auto design = model.design ? model.design : ConditionalModel::with_intercept();
  RSquared out;
  out.eps = lo;
  double num = 0.0;
  for (const auto& g : gd.groups()) {
    const Eigen::VectorXd x = design(g.key);
    std::vector<double> theta;
    for (const auto& w : weights) theta.push_back(cond_lfunctional_link(model.curve, w, model.link, x));
    std::vector<double> br;
    const double n = static_cast<double>(g.sample.size());
    for (std::size_t k = 1; k < g.sample.size(); ++k) br.push_back(static_cast<double>(k) / n);
    br.push_back(0.5);
    num += quad::integrate_prob(
               [&](Prob p) {
                 double a = 0.0;
                 for (int m = 1; m <= m0; ++m) a += theta[static_cast<std::size_t>(m - 1)] * s.value(m, p);
                 const double d = g.sample.quantile(p) - a;
                 return d * d;
               },
               lo, hi, br)
               .value;
  }
  out.numerator = num / static_cast<double>(gd.size());
  out.denominator = pooled_denominator(gd, s);
  out.value = 1.0 - out.numerator / out.denominator;
  return out;
}

// -------------------------------------------------------------- bootstrap

LCode LCode::parse(int code) {
  LCode c;
  if (code >= 1 && code <= 9) {
    c.m = code;
  } else if (code >= 11 && code <= 99 && code % 10 != 0) {
    c.m = code / 10;
    c.l = code % 10;
  } else {
    throw ValidationError("invalid L-moment code " + std::to_string(code));
  }
  return c;
}

namespace {

// Order-statistic weights per needed order for samples of size n.
class LMomentEvaluator {
 public:
  LMomentEvaluator(const PolynomialSystem& sys, const std::vector<int>& codes, std::size_t n) {
    for (int code : codes) {
      const LCode c = LCode::parse(code);
      codes_.push_back(c);
      for (int m : {c.m, c.l})
        if (m > 0 && !weights_.count(m)) weights_.emplace(m, OrderStatisticWeights::from(sys.weight(m), n));
    }
  }

  Eigen::VectorXd operator()(const EmpiricalSample& s) const {
    std::map<int, double> t;
    for (const auto& [m, w] : weights_) t[m] = w.apply(s);
    Eigen::VectorXd out(static_cast<Eigen::Index>(codes_.size()));
    for (std::size_t k = 0; k < codes_.size(); ++k) {
      const LCode c = codes_[k];
      if (c.l == 0) {
        out[static_cast<Eigen::Index>(k)] = t.at(c.m);
      } else {
        const double den = t.at(c.l);
        if (std::abs(den) < 1e-12) throw ZeroDenominator("L-moment ratio has a zero denominator");
        out[static_cast<Eigen::Index>(k)] = t.at(c.m) / den;
      }
    }
    return out;
  }

 private:
  std::vector<LCode> codes_;
  std::map<int, OrderStatisticWeights> weights_;
};

}  // namespace

Eigen::VectorXd lmoment_vector(const EmpiricalSample& s, const PolynomialSystem& sys, const std::vector<int>& codes) {
  return LMomentEvaluator(sys, codes, s.size())(s);
}

BootstrapCloud bootstrap_cloud(const GroupedData& gd, const GroupKey& x, const PolynomialSystem& sys,
                               const std::vector<int>& codes, int b, std::uint64_t seed) {
  if (b < 2) throw ValidationError("bootstrap needs at least 2 replicates");
  if (codes.empty()) throw ValidationError("no L-moment codes given");
  const auto& sample = gd.group(x).sample;
  const std::size_t n = sample.size();
  if (n < 2) throw ValidationError("degenerate group: bootstrap needs at least 2 observations");
  const LMomentEvaluator eval(sys, codes, n);
  BootstrapCloud cloud;
  cloud.key = x;
  cloud.codes = codes;
  cloud.center = eval(sample);
  const auto d = static_cast<Eigen::Index>(codes.size());
  cloud.replicates.resize(b, d);
  cloud.sigma = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> draw(n);
  for (int r = 0; r < b; ++r) {
    std::mt19937_64 rng(replicate_seed(seed, static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (auto& v : draw) v = sample.sorted()[pick(rng)];
    const Eigen::VectorXd theta = eval(EmpiricalSample(draw));
    cloud.replicates.row(r) = theta.transpose();
    const Eigen::VectorXd dev = theta - cloud.center;
    cloud.sigma += dev * dev.transpose();
  }
  cloud.sigma /= static_cast<double>(b);
  return cloud;
}

MahalanobisValue mahalanobis(const Eigen::VectorXd& d, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != d.size() || sigma.cols() != d.size()) throw ValidationError("dimension mismatch");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double top = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  MahalanobisValue out;
  double q = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (!(top > 0.0) || lambda[k] < 1e-10 * top) {
      out.pseudo_inverse = true;
      continue;
    }
    const double c = eig.eigenvectors().col(k).dot(d);
    q += c * c / lambda[k];
  }
  out.value = std::sqrt(q);
  return out;
}

MahalanobisValue mahalanobis_self(const BootstrapCloud& cloud, int b) {
  if (b < 0 || b >= cloud.replicates.rows()) throw ValidationError("replicate index out of range");
  return mahalanobis(cloud.replicates.row(b).transpose() - cloud.center, cloud.sigma);
}

MahalanobisValue mahalanobis_between(const BootstrapCloud& c1, const BootstrapCloud& c2) {
  if (c1.codes != c2.codes) throw ValidationError("clouds use different L-moment codes");
  return mahalanobis(c1.center - c2.center, 0.5 * (c1.sigma + c2.sigma));
}

BootstrapCloud subset(const BootstrapCloud& cloud, const std::vector<int>& positions) {
  BootstrapCloud out;
  out.key = cloud.key;
  const auto d = static_cast<Eigen::Index>(positions.size());
  out.center.resize(d);
  out.replicates.resize(cloud.replicates.rows(), d);
  out.sigma.resize(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const int i = positions[static_cast<std::size_t>(a)];
    if (i < 0 || i >= cloud.center.size()) throw ValidationError("subset position out of range");
    out.codes.push_back(cloud.codes[static_cast<std::size_t>(i)]);
    out.center[a] = cloud.center[i];
    out.replicates.col(a) = cloud.replicates.col(i);
    for (Eigen::Index c = 0; c < d; ++c) out.sigma(a, c) = cloud.sigma(i, positions[static_cast<std::size_t>(c)]);
  }
  return out;
}

// ------------------------------------------------------------------ birds

Eigen::MatrixXd BirdData::covariates() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(size()), 3);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = age[i];
    x(r, 1) = sex[i];
    x(r, 2) = year[i] - 2001;
  }
  return x;
}

Eigen::VectorXd BirdData::response() const {
  return Eigen::Map<const Eigen::VectorXd>(day.data(), static_cast<Eigen::Index>(day.size()));
}

BirdData simulate_birds(std::uint64_t seed, double mean_group_size) {
  if (!(mean_group_size >= 1.0)) throw ValidationError("mean group size must be at least 1");
  std::mt19937_64 rng(seed);
  std::poisson_distribution<int> extra(mean_group_size - 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  BirdData d;
  for (int y = 1982; y <= 2019; ++y) {
    for (int a = 0; a <= 1; ++a) {
      for (int s = 0; s <= 1; ++s) {
        const int count = 1 + (mean_group_size > 1.0 ? extra(rng) : 0);
        for (int k = 0; k < count; ++k) {
          // Adults and males pass earlier, all groups drift earlier over time,
          // and adults are more spread out.
          const double z = 0.2 - 0.35 * a - 0.12 * s - 0.012 * (y - 2001) + (0.45 + 0.1 * a) * noise(rng);
          const double day = std::clamp(std::round(80.0 + 82.0 / (1.0 + std::exp(-z))), 81.0, 161.0);
          d.age.push_back(a);
          d.sex.push_back(s);
          d.year.push_back(y);
          d.day.push_back(day);
        }
      }
    }
  }
  return d;
}

}  // namespace lf
