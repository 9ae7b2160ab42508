#include "lf/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace lf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Wichura's PPND16 for p in (0, 0.5]; returns a value <= 0.
double ppnd16_lower(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

double normal_quantile_lower(double p) {
  if (p == 0.0) return -kInf;
  double x = ppnd16_lower(p);
  // Halley step on Phi(x) - p; skipped where exp(x^2/2) overflows.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// -log(1 - p) with the tail side taken from whichever component is exact.
double neg_log_sf(Prob p) { return p.p <= 0.5 ? -std::log1p(-p.p) : -std::log(p.c); }

// Solves I_x(a, b) = p by safeguarded Newton on u = log x against
// log I_x(a, b) - log p, which is increasing in u.
double beta_quantile_lower(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  const double logp = std::log(p);
  double lo = std::log(std::numeric_limits<double>::denorm_min());
  double hi = 0.0;
  // Small-x asymptote I_x ~ x^a / (a B(a, b)).
  double u = std::min(-1e-3, (logp + std::log(a) + std::log(boost::math::beta(a, b))) / a);
  u = std::max(u, lo);
  for (int it = 0; it < 200; ++it) {
    const double x = std::exp(u);
    const double f = boost::math::ibeta(a, b, x);
    if (f <= 0.0) {
      lo = u;
      u = 0.5 * (lo + hi);
      continue;
    }
    const double g = std::log(f) - logp;
    if (g < 0.0) lo = u; else hi = u;
    if (g == 0.0) return x;
    const double slope = x * boost::math::ibeta_derivative(a, b, x) / f;
    double next = u - g / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(u)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(u))) break;
  }
  return std::exp(u);
}

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(Prob p) {
  if (p.p <= 0.5) return normal_quantile_lower(p.p);
  return -normal_quantile_lower(p.c);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile requires 0 < p < 1");
  return normal_quantile(Prob::of(p));
}

ParametricDistribution ParametricDistribution::uniform(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform requires a < b");
  return {Family::kUniform, a, b};
}
ParametricDistribution ParametricDistribution::normal(double mu, double sigma) {
  require(std::isfinite(mu) && sigma > 0.0 && std::isfinite(sigma), "normal requires sigma > 0");
  return {Family::kNormal, mu, sigma};
}
ParametricDistribution ParametricDistribution::exponential(double scale) {
  require(scale > 0.0 && std::isfinite(scale), "exponential requires scale > 0");
  return {Family::kExponential, scale, 0.0};
}
ParametricDistribution ParametricDistribution::beta(double a, double b) {
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), "beta requires positive shapes");
  return {Family::kBeta, a, b};
}
ParametricDistribution ParametricDistribution::gamma(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0 && std::isfinite(shape) && std::isfinite(scale),
          "gamma requires positive shape and scale");
  return {Family::kGamma, shape, scale};
}
ParametricDistribution ParametricDistribution::weibull(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0 && std::isfinite(shape) && std::isfinite(scale),
          "weibull requires positive shape and scale");
  return {Family::kWeibull, shape, scale};
}
ParametricDistribution ParametricDistribution::student_t(double nu) {
  require(nu > 0.0 && std::isfinite(nu), "student-t requires nu > 0");
  return {Family::kStudentT, nu, 0.0};
}
ParametricDistribution ParametricDistribution::logistic(double location, double scale) {
  require(std::isfinite(location) && scale > 0.0 && std::isfinite(scale), "logistic requires scale > 0");
  return {Family::kLogistic, location, scale};
}
ParametricDistribution ParametricDistribution::gumbel(double location, double scale) {
  require(std::isfinite(location) && scale > 0.0 && std::isfinite(scale), "gumbel requires scale > 0");
  return {Family::kGumbel, location, scale};
}
ParametricDistribution ParametricDistribution::bernoulli(double pi) {
  require(pi > 0.0 && pi < 1.0, "bernoulli requires 0 < pi < 1");
  return {Family::kBernoulli, pi, 0.0};
}
ParametricDistribution ParametricDistribution::degenerate(double c) {
  require(std::isfinite(c), "degenerate requires a finite location");
  return {Family::kDegenerate, c, 0.0};
}

ParametricDistribution ParametricDistribution::parse(std::string_view spec) {
  const std::string s = lower_case(spec);
  const auto colon = s.find(':');
  const std::string fam = s.substr(0, colon);
  std::vector<double> v;
  if (colon != std::string::npos) {
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ValidationError("bad distribution parameter '" + item + "' in '" + std::string(spec) + "'");
      }
    }
  }
  auto arg = [&](std::size_t i, double fallback) {
    if (i < v.size()) return v[i];
    if (std::isnan(fallback))
      throw ValidationError("distribution '" + std::string(spec) + "' is missing parameters");
    return fallback;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (fam == "unif" || fam == "uniform") return uniform(arg(0, 0.0), arg(1, 1.0));
  if (fam == "norm" || fam == "normal") return normal(arg(0, 0.0), arg(1, 1.0));
  if (fam == "exp" || fam == "exponential") return exponential(arg(0, 1.0));
  if (fam == "beta") return beta(arg(0, nan), arg(1, nan));
  if (fam == "gamma") return gamma(arg(0, nan), arg(1, 1.0));
  if (fam == "wei" || fam == "weibull") return weibull(arg(0, nan), arg(1, 1.0));
  if (fam == "t" || fam == "student" || fam == "student-t") return student_t(arg(0, nan));
  if (fam == "logis" || fam == "logistic") return logistic(arg(0, 0.0), arg(1, 1.0));
  if (fam == "gumbel") return gumbel(arg(0, 0.0), arg(1, 1.0));
  if (fam == "bern" || fam == "bernoulli") return bernoulli(arg(0, nan));
  if (fam == "const" || fam == "degenerate") return degenerate(arg(0, nan));
  throw ValidationError("unknown distribution family '" + fam + "'");
}

std::string ParametricDistribution::name() const {
  std::ostringstream os;
  os.precision(6);
  switch (family_) {
    case Family::kUniform: os << "unif:" << params_[0] << "," << params_[1]; break;
    case Family::kNormal: os << "norm:" << params_[0] << "," << params_[1]; break;
    case Family::kExponential: os << "exp:" << params_[0]; break;
    case Family::kBeta: os << "beta:" << params_[0] << "," << params_[1]; break;
    case Family::kGamma: os << "gamma:" << params_[0] << "," << params_[1]; break;
    case Family::kWeibull: os << "wei:" << params_[0] << "," << params_[1]; break;
    case Family::kStudentT: os << "t:" << params_[0]; break;
    case Family::kLogistic: os << "logis:" << params_[0] << "," << params_[1]; break;
    case Family::kGumbel: os << "gumbel:" << params_[0] << "," << params_[1]; break;
    case Family::kBernoulli: os << "bern:" << params_[0]; break;
    case Family::kDegenerate: os << "const:" << params_[0]; break;
  }
  return os.str();
}

bool ParametricDistribution::continuous() const {
  return family_ != Family::kBernoulli && family_ != Family::kDegenerate;
}

double ParametricDistribution::support_lo() const {
  switch (family_) {
    case Family::kUniform: return params_[0];
    case Family::kExponential:
    case Family::kBeta:
    case Family::kGamma:
    case Family::kWeibull:
    case Family::kBernoulli: return 0.0;
    case Family::kDegenerate: return params_[0];
    default: return -kInf;
  }
}

double ParametricDistribution::support_hi() const {
  switch (family_) {
    case Family::kUniform: return params_[1];
    case Family::kBeta:
    case Family::kBernoulli: return 1.0;
    case Family::kDegenerate: return params_[0];
    default: return kInf;
  }
}

double ParametricDistribution::quantile(Prob p) const {
  if (!(p.p >= 0.0 && p.c >= 0.0 && p.p <= 1.0 && p.c <= 1.0))
    throw DomainError("quantile requires a probability in [0, 1]");
  if (p.p == 0.0 || p.c == 0.0) {
    const double edge = p.p == 0.0 ? support_lo() : support_hi();
    if (!std::isfinite(edge)) throw DomainError("quantile at 0 or 1 of an unbounded family");
    if (family_ == Family::kBernoulli) return p.p == 0.0 ? 0.0 : 1.0;
    return edge;
  }
  const bool lo = p.p <= 0.5;
  const double a = params_[0];
  const double b = params_[1];
  switch (family_) {
    case Family::kUniform: return lo ? a + (b - a) * p.p : b - (b - a) * p.c;
    case Family::kNormal: return a + b * normal_quantile(p);
    case Family::kExponential: return a * neg_log_sf(p);
    case Family::kBeta:
      // Upper tail through 1 - X ~ beta(b, a).
      return lo ? beta_quantile_lower(a, b, p.p) : 1.0 - beta_quantile_lower(b, a, p.c);
    case Family::kGamma:
      return b * (lo ? boost::math::gamma_p_inv(a, p.p) : boost::math::gamma_q_inv(a, p.c));
    case Family::kWeibull: return b * std::pow(neg_log_sf(p), 1.0 / a);
    case Family::kStudentT: {
      boost::math::students_t_distribution<double> t(a);
      return lo ? boost::math::quantile(t, p.p)
                : boost::math::quantile(boost::math::complement(t, p.c));
    }
    case Family::kLogistic: return a + b * std::log(p.p / p.c);
    case Family::kGumbel: return a + b * std::log(neg_log_sf(p));
    case Family::kBernoulli: return p.c >= a ? 0.0 : 1.0;
    case Family::kDegenerate: return a;
  }
  return 0.0;
}

double ParametricDistribution::cdf(double y) const {
  const double a = params_[0];
  const double b = params_[1];
  switch (family_) {
    case Family::kUniform: return std::clamp((y - a) / (b - a), 0.0, 1.0);
    case Family::kNormal: return normal_cdf((y - a) / b);
    case Family::kExponential: return y <= 0.0 ? 0.0 : -std::expm1(-y / a);
    case Family::kBeta:
      if (y <= 0.0) return 0.0;
      if (y >= 1.0) return 1.0;
      return boost::math::ibeta(a, b, y);
    case Family::kGamma: return y <= 0.0 ? 0.0 : boost::math::gamma_p(a, y / b);
    case Family::kWeibull: return y <= 0.0 ? 0.0 : -std::expm1(-std::pow(y / b, a));
    case Family::kStudentT:
      return boost::math::cdf(boost::math::students_t_distribution<double>(a), y);
    case Family::kLogistic: return 1.0 / (1.0 + std::exp(-(y - a) / b));
    case Family::kGumbel: return -std::expm1(-std::exp((y - a) / b));
    case Family::kBernoulli: return y < 0.0 ? 0.0 : (y < 1.0 ? 1.0 - a : 1.0);
    case Family::kDegenerate: return y < a ? 0.0 : 1.0;
  }
  return 0.0;
}

double ParametricDistribution::sf(double y) const {
  const double a = params_[0];
  const double b = params_[1];
  switch (family_) {
    case Family::kNormal: return normal_sf((y - a) / b);
    case Family::kExponential: return y <= 0.0 ? 1.0 : std::exp(-y / a);
    case Family::kBeta:
      if (y <= 0.0) return 1.0;
      if (y >= 1.0) return 0.0;
      return boost::math::ibetac(a, b, y);
    case Family::kGamma: return y <= 0.0 ? 1.0 : boost::math::gamma_q(a, y / b);
    case Family::kWeibull: return y <= 0.0 ? 1.0 : std::exp(-std::pow(y / b, a));
    case Family::kStudentT:
      return boost::math::cdf(boost::math::complement(boost::math::students_t_distribution<double>(a), y));
    case Family::kLogistic: return 1.0 / (1.0 + std::exp((y - a) / b));
    case Family::kGumbel: return std::exp(-std::exp((y - a) / b));
    default: return 1.0 - cdf(y);
  }
}

double ParametricDistribution::density(double y) const {
  const double a = params_[0];
  const double b = params_[1];
  switch (family_) {
    case Family::kUniform: return (y >= a && y <= b) ? 1.0 / (b - a) : 0.0;
    case Family::kNormal: return normal_pdf((y - a) / b) / b;
    case Family::kExponential: return y < 0.0 ? 0.0 : std::exp(-y / a) / a;
    case Family::kBeta:
      if (y < 0.0 || y > 1.0) return 0.0;
      return boost::math::pdf(boost::math::beta_distribution<double>(a, b), y);
    case Family::kGamma:
      if (y < 0.0) return 0.0;
      return boost::math::pdf(boost::math::gamma_distribution<double>(a, b), y);
    case Family::kWeibull: {
      if (y < 0.0) return 0.0;
      const double z = y / b;
      return a / b * std::pow(z, a - 1.0) * std::exp(-std::pow(z, a));
    }
    case Family::kStudentT:
      return boost::math::pdf(boost::math::students_t_distribution<double>(a), y);
    case Family::kLogistic: {
      const double e = std::exp(-std::abs(y - a) / b);
      return e / (b * (1.0 + e) * (1.0 + e));
    }
    case Family::kGumbel: {
      const double z = (y - a) / b;
      return std::exp(z - std::exp(z)) / b;
    }
    case Family::kBernoulli:
    case Family::kDegenerate: break;
  }
  throw DomainError("density unavailable for " + name());
}

EmpiricalSample::EmpiricalSample(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw ValidationError("empirical sample needs at least one observation");
  for (double v : sorted_)
    if (!std::isfinite(v)) throw ValidationError("empirical sample contains a non-finite value");
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t rank_index(std::size_t count, Prob p) {
  const double n = static_cast<double>(count);
  // Products within 1e-9 of an integer are snapped so that p = k/n picks k.
  auto snap = [](double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? r : x;
  };
  double k;
  if (p.p <= 0.5) {
    k = std::ceil(snap(n * p.p));
  } else {
    k = n - std::floor(snap(n * p.c));
  }
  return static_cast<std::size_t>(std::clamp(k, 1.0, n));
}

std::size_t EmpiricalSample::rank_at(Prob p) const { return rank_index(sorted_.size(), p); }

double EmpiricalSample::quantile(Prob p) const { return sorted_[rank_at(p) - 1]; }

}  // namespace lf
