#include "lf/lstatistics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "lf/quadrature.hpp"

namespace lf {

// ---------------------------------------------------------------------------
// Order-statistic weights

OrderStatisticWeights OrderStatisticWeights::from(const WeightMeasure& g, std::size_t n) {
  if (n == 0) throw ValidationError("sample size must be positive");
  OrderStatisticWeights out;
  out.n = n;
  out.w.assign(n, 0.0);
  const double dn = static_cast<double>(n);
  if (g.has_density()) {
    const auto first = static_cast<std::size_t>(std::floor(g.support_lo() * dn));
    const auto last = std::min(n, static_cast<std::size_t>(std::ceil(g.support_hi() * dn)));
    for (std::size_t i = first; i < last; ++i)
      out.w[i] = g.density_mass(static_cast<double>(i) / dn, static_cast<double>(i + 1) / dn);
  }
  for (const auto& m : g.point_masses()) out.w[rank_index(n, Prob::of(m.at)) - 1] += m.weight;
  return out;
}

double OrderStatisticWeights::apply(const EmpiricalSample& s) const {
  if (s.size() != n) throw ValidationError("sample size does not match the weights");
  const auto& y = s.sorted();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w[i] * y[i];
  return sum;
}

double OrderStatisticWeights::sum() const { return std::accumulate(w.begin(), w.end(), 0.0); }

double lstatistic(const EmpiricalSample& s, const WeightMeasure& g) {
  return OrderStatisticWeights::from(g, s.size()).apply(s);
}

// ---------------------------------------------------------------------------
// Maximum likelihood

namespace {

void require_positive(const std::vector<double>& y, const char* family) {
  for (double v : y)
    if (!(v > 0.0)) throw ValidationError(std::string(family) + " fit requires positive observations");
}

MLFit fit_gamma(const std::vector<double>& y) {
  require_positive(y, "gamma");
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double mlog = 0.0;
  for (double v : y) mlog += std::log(v);
  mlog /= n;
  const double s = std::log(mean) - mlog;
  if (!(s > 1e-14)) return {ParametricDistribution::degenerate(mean), 0};
  // Minka's start for the shape equation log k - digamma(k) = s.
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 1; it <= 100; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = k / 2.0;
    const bool done = std::abs(next - k) <= 1e-12 * k;
    k = next;
    if (done) return {ParametricDistribution::gamma(k, mean / k), it};
  }
  throw ConvergenceError("gamma shape equation did not converge");
}

MLFit fit_weibull(const std::vector<double>& y) {
  require_positive(y, "weibull");
  const std::size_t n = y.size();
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = std::log(y[i]);
  const double lmax = *std::max_element(l.begin(), l.end());
  const double lmean = std::accumulate(l.begin(), l.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : l) var += (v - lmean) * (v - lmean);
  var /= static_cast<double>(n);
  if (!(var > 1e-28)) return {ParametricDistribution::degenerate(std::exp(lmean)), 0};

  // h(k) = sum y^k log y / sum y^k - 1/k - mean(log y) is increasing in k.
  auto eval = [&](double k, double* deriv) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double v : l) {
      const double e = std::exp(k * (v - lmax));
      s0 += e;
      s1 += e * v;
      s2 += e * v * v;
    }
    const double m1 = s1 / s0;
    if (deriv) *deriv = s2 / s0 - m1 * m1 + 1.0 / (k * k);
    return m1 - 1.0 / k - lmean;
  };
  const double k0 = std::numbers::pi / std::sqrt(6.0 * var);
  double lo = k0, hi = k0;
  while (eval(lo, nullptr) > 0.0) lo /= 2.0;
  while (eval(hi, nullptr) < 0.0) hi *= 2.0;
  double k = k0;
  for (int it = 1; it <= 200; ++it) {
    double d = 0.0;
    const double h = eval(k, &d);
    if (h < 0.0) lo = k; else hi = k;
    double next = k - h / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - k) <= 1e-12 * k;
    k = next;
    if (done || hi - lo <= 1e-13 * k) {
      double s0 = 0.0;
      for (double v : l) s0 += std::exp(k * (v - lmax));
      const double scale = std::exp(lmax + std::log(s0 / static_cast<double>(n)) / k);
      return {ParametricDistribution::weibull(k, scale), it};
    }
  }
  throw ConvergenceError("weibull shape equation did not converge");
}

}  // namespace

MLFit fit_ml(const EmpiricalSample& s, Family family) {
  const auto& y = s.sorted();
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  switch (family) {
    case Family::kNormal: {
      double ss = 0.0;
      for (double v : y) ss += (v - mean) * (v - mean);
      const double sigma = std::sqrt(ss / n);
      if (!(sigma > 0.0)) return {ParametricDistribution::degenerate(mean), 0};
      return {ParametricDistribution::normal(mean, sigma), 0};
    }
    case Family::kExponential:
      if (y.front() < 0.0 || !(mean > 0.0))
        throw ValidationError("exponential fit requires nonnegative observations with positive mean");
      return {ParametricDistribution::exponential(mean), 0};
    case Family::kGamma: return fit_gamma(y);
    case Family::kWeibull: return fit_weibull(y);
    default: throw ValidationError("maximum likelihood is available for normal, exponential, gamma and weibull");
  }
}

double parametric_plugin(const EmpiricalSample& s, Family family, const WeightMeasure& g) {
  return lfunctional(fit_ml(s, family).dist, g).value;
}

// ---------------------------------------------------------------------------
// Covariance kernels and asymptotic variances

namespace {

// f(Q(p)), rejecting points where the density vanishes.
double density_at_quantile(const ParametricDistribution& d, Prob p) {
  const double f = d.density(d.quantile(p));
  if (!(f > 0.0) || !std::isfinite(f))
    throw DomainError("density is zero at a required quantile of " + d.name());
  return f;
}

// min(p, s) - p s without cancellation.
double bridge_cov(Prob p, Prob s) { return p.p <= s.p ? p.p * s.c : s.p * p.c; }

}  // namespace

CovKernel::CovKernel(Fn f, std::string provenance, int dim)
    : fn_(std::move(f)), provenance_(std::move(provenance)), dim_(dim) {}

CovKernel CovKernel::bridge(Factor f, Eigen::MatrixXd m, std::string provenance, int dim) {
  if (m.rows() != m.cols()) throw ValidationError("middle matrix must be square");
  CovKernel k(
      [f, m](Prob p, Prob s) -> Eigen::MatrixXd { return bridge_cov(p, s) * (f(p) * m * f(s).transpose()); },
      std::move(provenance), dim);
  k.form_ = Form::kBridge;
  k.factor_ = std::move(f);
  k.middle_ = std::move(m);
  return k;
}

CovKernel CovKernel::product(Factor f, Eigen::MatrixXd m, std::string provenance, int dim) {
  if (m.rows() != m.cols()) throw ValidationError("middle matrix must be square");
  CovKernel k([f, m](Prob p, Prob s) -> Eigen::MatrixXd { return f(p) * m * f(s).transpose(); },
              std::move(provenance), dim);
  k.form_ = Form::kProduct;
  k.factor_ = std::move(f);
  k.middle_ = std::move(m);
  return k;
}

CovKernel CovKernel::nonparametric(const ParametricDistribution& dist) {
  if (!dist.continuous()) throw ValidationError("nonparametric kernel needs a continuous law");
  return bridge(
      [dist](Prob p) {
        Eigen::MatrixXd r(1, 1);
        r(0, 0) = 1.0 / density_at_quantile(dist, p);
        return r;
      },
      Eigen::MatrixXd::Identity(1, 1), "nonparametric", 1);
}

CovKernel CovKernel::parametric(Gradient grad, Eigen::MatrixXd v) {
  if (v.rows() != v.cols()) throw ValidationError("V must be square");
  const Eigen::Index d = v.rows();
  return product(
      [grad = std::move(grad), d](Prob p) -> Eigen::MatrixXd {
        const Eigen::VectorXd a = grad(p);
        if (a.size() != d) throw ValidationError("gradient dimension does not match V");
        return a.transpose();
      },
      std::move(v), "parametric", 1);
}

VarianceValue asym_var_nonparam(const ParametricDistribution& dist, const WeightMeasure& g) {
  if (!dist.continuous()) throw ValidationError("asymptotic variance needs a continuous law");
  auto h = [&](Prob p) {
    const double gv = g.density_at(p);
    return gv == 0.0 ? 0.0 : gv / density_at_quantile(dist, p);
  };
  const std::vector<double> br = g.breaks();
  const double lo = g.has_density() ? g.support_lo() : 0.0;
  const double hi = g.has_density() ? g.support_hi() : 0.0;
  // A(x) = int_lo^x s h(s) ds and C(x) = int_x^hi (1 - s) h(s) ds.
  auto left = [&](double x) {
    if (!(x > lo)) return 0.0;
    return quad::integrate_prob([&](Prob s) { return s.p * h(s); }, lo, std::min(x, hi), br).value;
  };
  auto right = [&](double x) {
    if (!(x < hi)) return 0.0;
    return quad::integrate_prob([&](Prob s) { return s.c * h(s); }, std::max(x, lo), hi, br).value;
  };

  VarianceValue out;
  if (g.has_density()) {
    // Double integral of the bridge kernel: 2 int (1 - s) h(s) A(s) ds.
    const auto r = quad::integrate_prob([&](Prob s) { return s.c * h(s) * left(s.p); }, lo, hi, br);
    out.value += 2.0 * r.value;
    out.error += 2.0 * r.error;
  }
  // Masses at 0 or 1 have zero bridge covariance with everything.
  std::vector<PointMass> inner;
  for (const auto& m : g.point_masses())
    if (m.at > 0.0 && m.at < 1.0) inner.push_back(m);
  std::vector<double> fq;
  for (const auto& m : inner) fq.push_back(density_at_quantile(dist, Prob::of(m.at)));
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const Prob pi = Prob::of(inner[i].at);
    for (std::size_t j = 0; j < inner.size(); ++j)
      out.value += inner[i].weight * inner[j].weight * bridge_cov(pi, Prob::of(inner[j].at)) / (fq[i] * fq[j]);
    if (g.has_density())
      out.value += 2.0 * inner[i].weight / fq[i] * (pi.c * left(pi.p) + pi.p * right(pi.p));
  }
  return out;
}

double asym_var_param(const CovKernel::Gradient& grad, const Eigen::MatrixXd& v, const WeightMeasure& g) {
  if (v.rows() != v.cols()) throw ValidationError("V must be square");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(v.rows());
  auto checked = [&](Prob p) {
    Eigen::VectorXd d = grad(p);
    if (d.size() != v.rows()) throw ValidationError("gradient dimension does not match V");
    return d;
  };
  for (const auto& m : g.point_masses()) b += m.weight * checked(Prob::of(m.at));
  if (g.has_density()) {
    b += quad::integrate_prob([&](Prob p) -> Eigen::VectorXd { return checked(p) * g.density_at(p); },
                              g.support_lo(), g.support_hi(), g.breaks())
             .value;
  }
  return b.dot(v * b);
}

// ---------------------------------------------------------------------------
// Optimal weights

namespace {

struct LogDensityDerivs {
  double d1;
  double d2;
};

LogDensityDerivs log_density_derivs(const ParametricDistribution& f0, double x, Prob p) {
  const double a = f0.param(0);
  const double b = f0.param(1);
  switch (f0.family()) {
    case Family::kNormal: return {-(x - a) / (b * b), -1.0 / (b * b)};
    case Family::kLogistic: return {(p.c - p.p) / b, -2.0 * p.p * p.c / (b * b)};
    default: break;
  }
  double h = 1e-4 * std::max(1.0, std::abs(x));
  const double lo = f0.support_lo();
  const double hi = f0.support_hi();
  if (std::isfinite(lo)) h = std::min(h, 0.5 * (x - lo));
  if (std::isfinite(hi)) h = std::min(h, 0.5 * (hi - x));
  const double fm = std::log(f0.density(x - h));
  const double f = std::log(f0.density(x));
  const double fp = std::log(f0.density(x + h));
  return {(fp - fm) / (2.0 * h), (fp - 2.0 * f + fm) / (h * h)};
}

}  // namespace

WeightMeasure optimal_weight(const ParametricDistribution& f0, WeightRole role) {
  if (!f0.continuous()) throw ValidationError("optimal weight needs a continuous reference law");
  const bool location = role == WeightRole::kLocation;
  if (location && f0.family() == Family::kNormal) {
    auto w = WeightMeasure::constant(1.0, 0.0, 1.0);
    w.label = "optimal-location";
    return w;
  }
  if (location && f0.family() == Family::kLogistic) {
    auto w = WeightMeasure::density([](Prob p) { return 6.0 * p.p * p.c; }, 0.0, 1.0, {},
                                    [](double p) { return p * p * (3.0 - 2.0 * p); });
    w.label = "optimal-location";
    return w;
  }
  auto raw = [f0, location](Prob p) {
    const double x = f0.quantile(p);
    const auto d = log_density_derivs(f0, x, p);
    return location ? -d.d2 : d.d1 + x * d.d2;
  };
  double norm;
  if (location) {
    norm = quad::integrate_prob(raw, 0.0, 1.0).value;
  } else {
    norm = quad::integrate_prob([&](Prob p) { return f0.quantile(p) * raw(p); }, 0.0, 1.0).value;
  }
  if (!(std::abs(norm) > 1e-300)) throw ZeroDenominator("optimal weight normalization vanishes");
  const double k = 1.0 / norm;
  auto w = WeightMeasure::density([raw, k](Prob p) { return k * raw(p); }, 0.0, 1.0);
  w.label = location ? "optimal-location" : "optimal-scale";
  return w;
}

// ---------------------------------------------------------------------------
// Monte-Carlo harness

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = master + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> draw_sample(const ParametricDistribution& dist, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    // Open interval (0, 1) on a 2^-53 lattice.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = dist.quantile(Prob::of(u));
  }
  return out;
}

double anderson_darling(std::vector<double> z) {
  const std::size_t n = z.size();
  if (n < 2) return std::nan("");
  const double dn = static_cast<double>(n);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / dn;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (dn - 1.0));
  if (!(sd > 0.0)) return std::nan("");
  for (auto& v : z) v = (v - mean) / sd;
  std::sort(z.begin(), z.end());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(normal_cdf(z[i])) + std::log(normal_sf(z[n - 1 - i])));
  return -dn - s / dn;
}

CltReport clt_check(const ParametricDistribution& dist, const WeightMeasure& g, std::size_t n, std::size_t reps,
                    std::uint64_t seed, unsigned threads) {
  if (n < 1 || reps < 2) throw ValidationError("clt_check needs n >= 1 and reps >= 2");
  CltReport out;
  out.n = n;
  out.reps = reps;
  out.theta = lfunctional(dist, g).value;
  const auto w = OrderStatisticWeights::from(g, n);
  std::vector<double> est(reps);

  constexpr std::size_t kChunk = 16;
  const std::size_t chunks = (reps + kChunk - 1) / kChunk;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++)
      for (std::size_t k = c * kChunk; k < std::min(reps, (c + 1) * kChunk); ++k)
        est[k] = w.apply(EmpiricalSample(draw_sample(dist, n, replicate_seed(seed, k))));
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const double rn = std::sqrt(static_cast<double>(n));
  std::vector<double> z(reps);
  for (std::size_t k = 0; k < reps; ++k) z[k] = rn * (est[k] - out.theta);
  const double dr = static_cast<double>(reps);
  out.mean_estimate = std::accumulate(est.begin(), est.end(), 0.0) / dr;
  const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / dr;
  double ss = 0.0;
  for (double v : z) ss += (v - zbar) * (v - zbar);
  out.empirical_variance = ss / (dr - 1.0);
  out.predicted_variance = dist.continuous() ? asym_var_nonparam(dist, g).value : std::nan("");
  out.ratio = out.empirical_variance / out.predicted_variance;
  out.anderson_darling = anderson_darling(z);
  return out;
}

}  // namespace lf
