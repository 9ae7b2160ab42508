#include "lf/weights.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "lf/quadrature.hpp"

namespace lf {

namespace {

bool above(Prob p, double x) { return p.p <= 0.5 ? p.p > x : p.c < 1.0 - x; }
bool below(Prob p, double x) { return p.p <= 0.5 ? p.p < x : p.c > 1.0 - x; }

quad::Options tight() {
  quad::Options o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-12;
  o.max_panels = 20000;
  return o;
}

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::string_view context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("bad number '" + s + "' in '" + std::string(context) + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightMeasure

WeightMeasure WeightMeasure::density(Density g, double lo, double hi, std::vector<double> breaks,
                                     Antiderivative anti) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) throw ValidationError("density support must lie in [0, 1]");
  WeightMeasure w;
  w.components_.push_back({std::move(g), lo, hi, std::move(breaks), std::move(anti)});
  return w;
}

WeightMeasure WeightMeasure::constant(double value, double lo, double hi) {
  return density([value](Prob) { return value; }, lo, hi, {},
                 [value, lo](double p) { return value * (p - lo); });
}

WeightMeasure WeightMeasure::mass(double at, double weight) {
  WeightMeasure w;
  w.add_mass(at, weight);
  return w;
}

WeightMeasure WeightMeasure::masses(std::vector<PointMass> m) {
  WeightMeasure w;
  for (const auto& pm : m) w.add_mass(pm.at, pm.weight);
  return w;
}

void WeightMeasure::add_mass(double at, double weight) {
  if (!(at >= 0.0 && at <= 1.0)) throw ValidationError("point mass location must lie in [0, 1]");
  if (!std::isfinite(weight)) throw ValidationError("point mass weight must be finite");
  auto it = std::lower_bound(masses_.begin(), masses_.end(), at,
                             [](const PointMass& a, double x) { return a.at < x; });
  if (it != masses_.end() && it->at == at) {
    it->weight += weight;
  } else {
    masses_.insert(it, {at, weight});
  }
}

double WeightMeasure::density_at(Prob p) const {
  double sum = 0.0;
  for (const auto& c : components_)
    if (above(p, c.lo) && below(p, c.hi)) sum += c.density(p);
  return sum;
}

double WeightMeasure::support_lo() const {
  double lo = 1.0;
  for (const auto& c : components_) lo = std::min(lo, c.lo);
  return components_.empty() ? 0.0 : lo;
}

double WeightMeasure::support_hi() const {
  double hi = 0.0;
  for (const auto& c : components_) hi = std::max(hi, c.hi);
  return components_.empty() ? 0.0 : hi;
}

std::vector<double> WeightMeasure::breaks() const {
  std::vector<double> out;
  for (const auto& c : components_) {
    out.push_back(c.lo);
    out.push_back(c.hi);
    out.insert(out.end(), c.breaks.begin(), c.breaks.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool WeightMeasure::has_antiderivative() const {
  for (const auto& c : components_)
    if (!c.antiderivative) return false;
  return true;
}

double WeightMeasure::density_mass(double a, double b) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    const double lo = std::max(a, c.lo);
    const double hi = std::min(b, c.hi);
    if (!(hi > lo)) continue;
    if (c.antiderivative) {
      sum += c.antiderivative(hi) - c.antiderivative(lo);
    } else {
      sum += quad::integrate_prob([&](Prob p) { return c.density(p); }, lo, hi, c.breaks, tight())
                 .value;
    }
  }
  return sum;
}

double WeightMeasure::total_mass() const {
  double sum = density_mass(0.0, 1.0);
  for (const auto& m : masses_) sum += m.weight;
  return sum;
}

double WeightMeasure::total_variation() const {
  double sum = 0.0;
  if (has_density()) {
    sum = quad::integrate_prob([&](Prob p) { return std::abs(density_at(p)); }, support_lo(),
                               support_hi(), breaks(), tight())
              .value;
  }
  for (const auto& m : masses_) sum += std::abs(m.weight);
  return sum;
}

WeightMeasure WeightMeasure::scaled(double k) const {
  WeightMeasure out;
  out.label = label;
  for (const auto& c : components_) {
    Component s = c;
    auto g = c.density;
    s.density = [g, k](Prob p) { return k * g(p); };
    if (c.antiderivative) {
      auto a = c.antiderivative;
      s.antiderivative = [a, k](double p) { return k * a(p); };
    }
    out.components_.push_back(std::move(s));
  }
  for (const auto& m : masses_) out.add_mass(m.at, k * m.weight);
  return out;
}

WeightMeasure WeightMeasure::plus(const WeightMeasure& other, double k) const {
  WeightMeasure out = *this;
  out.declared_order.reset();
  out.declared_symmetric.reset();
  WeightMeasure o = k == 1.0 ? other : other.scaled(k);
  for (auto& c : o.components_) out.components_.push_back(std::move(c));
  for (const auto& m : o.masses_) out.add_mass(m.at, m.weight);
  return out;
}

// ---------------------------------------------------------------------------
// Polynomials

double legendre_poly(int k, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int j = 1; j < k; ++j) {
    const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double hermite_poly(int k, double x) {
  if (k == 0) return 1.0;
  double h0 = 1.0;
  double h1 = x;
  for (int j = 1; j < k; ++j) {
    const double h2 = x * h1 - j * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double laguerre_poly(int k, double x) {
  if (k == 0) return 1.0;
  double l0 = 1.0;
  double l1 = 1.0 - x;
  for (int j = 1; j < k; ++j) {
    const double l2 = ((2.0 * j + 1.0 - x) * l1 - j * l0) / (j + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kLegendre: return "legendre";
    case SystemKind::kHermite: return "hermite";
    case SystemKind::kLaguerre: return "laguerre";
  }
  return "";
}

ParametricDistribution reference_distribution(SystemKind kind) {
  switch (kind) {
    case SystemKind::kLegendre: return ParametricDistribution::uniform(-std::sqrt(3.0), std::sqrt(3.0));
    case SystemKind::kHermite: return ParametricDistribution::normal(0.0, 1.0);
    case SystemKind::kLaguerre: return ParametricDistribution::exponential(1.0);
  }
  return ParametricDistribution::normal(0.0, 1.0);
}

// ---------------------------------------------------------------------------
// PolynomialSystem

namespace {

// All base values g_1..g_m at an untrimmed argument u.
void base_all(SystemKind kind, int m, Prob u, double* out) {
  switch (kind) {
    case SystemKind::kLegendre: {
      const double x = u.p - u.c;
      double p0 = 1.0;
      double p1 = x;
      out[0] = 1.0;
      if (m > 1) out[1] = std::sqrt(3.0) * x;
      for (int j = 1; j + 1 < m; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
        out[j + 1] = std::sqrt(2.0 * (j + 2) - 1.0) * p1;
      }
      break;
    }
    case SystemKind::kHermite: {
      const double z = normal_quantile(u);
      double h0 = 1.0;
      double h1 = z;
      double fact = 1.0;
      out[0] = 1.0;
      if (m > 1) out[1] = z;
      for (int j = 1; j + 1 < m; ++j) {
        const double h2 = z * h1 - j * h0;
        h0 = h1;
        h1 = h2;
        fact *= (j + 1);
        out[j + 1] = h1 / std::sqrt(fact);
      }
      break;
    }
    case SystemKind::kLaguerre: {
      const double t = u.p <= 0.5 ? -std::log1p(-u.p) : -std::log(u.c);
      double l0 = 1.0;
      double l1 = 1.0 - t;
      out[0] = 1.0;
      if (m > 1) out[1] = -l1;
      for (int j = 1; j + 1 < m; ++j) {
        const double l2 = ((2.0 * j + 1.0 - t) * l1 - j * l0) / (j + 1.0);
        l0 = l1;
        l1 = l2;
        out[j + 1] = (j % 2 == 0) ? -l1 : l1;
      }
      break;
    }
  }
}

// Integral of the untrimmed Legendre weight g_j from 0 to p.
double legendre_anti(int j, double p) {
  const double x = 2.0 * p - 1.0;
  if (j == 1) return p;
  return std::sqrt(2.0 * j - 1.0) / 2.0 * (legendre_poly(j, x) - legendre_poly(j - 2, x)) / (2.0 * j - 1.0);
}

}  // namespace

PolynomialSystem::PolynomialSystem(SystemKind kind, double trim, int max_order)
    : kind_(kind), trim_(trim), max_order_(max_order) {
  if (!(trim >= 0.0 && trim < 0.5)) throw ValidationError("trim must lie in [0, 0.5)");
  if (max_order < 1) throw ValidationError("max order must be positive");
}

double PolynomialSystem::base_value(int m, Prob p) const {
  if (m < 1 || m > max_order_) throw ValidationError("unsupported polynomial order " + std::to_string(m));
  double buf[64];
  if (trim_ > 0.0) {
    if (!(above(p, trim_) && below(p, 1.0 - trim_))) return 0.0;
    const double w = 1.0 - 2.0 * trim_;
    const Prob u{(p.p - trim_) / w, (p.c - trim_) / w};
    base_all(kind_, m, u, buf);
    return buf[m - 1] / w;
  }
  base_all(kind_, m, p, buf);
  return buf[m - 1];
}

double PolynomialSystem::value(int m, Prob p) const {
  if (eps_ == 0.0) return base_value(m, p);
  if (m < 1 || m > available_order())
    throw ValidationError("order " + std::to_string(m) + " exceeds the orthonormalized order");
  if (!(above(p, eps_) && below(p, 1.0 - eps_))) return 0.0;
  double buf[64];
  base_all(kind_, m, p, buf);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) sum += linv_(m - 1, j) * buf[j];
  return sum;
}

WeightMeasure PolynomialSystem::weight(int m) const {
  if (m < 1 || m > available_order())
    throw ValidationError("unsupported polynomial order " + std::to_string(m));
  auto self = std::make_shared<const PolynomialSystem>(*this);
  WeightMeasure::Antiderivative anti;
  if (kind_ == SystemKind::kLegendre && eps_ == 0.0) {
    const double t = trim_;
    anti = [m, t](double p) {
      // Same formula in the window coordinate: dp = w dx / 2 cancels the 1 / w.
      const double u = t > 0.0 ? (p - t) / (1.0 - 2.0 * t) : p;
      return legendre_anti(m, u) - legendre_anti(m, 0.0);
    };
  } else if (kind_ == SystemKind::kLegendre) {
    const double e = eps_;
    anti = [self, m, e](double p) {
      double sum = 0.0;
      for (int j = 1; j <= m; ++j)
        sum += self->linv_(m - 1, j - 1) * (legendre_anti(j, p) - legendre_anti(j, e));
      return sum;
    };
  }
  auto w = WeightMeasure::density([self, m](Prob p) { return self->value(m, p); }, window_lo(),
                                  window_hi(), {}, std::move(anti));
  w.label = name() + ":" + std::to_string(m);
  w.declared_order = m;
  if (kind_ != SystemKind::kLaguerre) w.declared_symmetric = true;
  return w;
}

std::string PolynomialSystem::name() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (trim_ > 0.0) os << ",trim=" << trim_;
  if (eps_ > 0.0) os << ",eps=" << eps_;
  return os.str();
}

PolynomialSystem gram_schmidt_eps(const PolynomialSystem& base, double eps, int m0) {
  if (!(eps >= 0.0 && eps < 0.5)) throw ValidationError("eps must lie in [0, 0.5)");
  if (m0 < 1 || m0 > base.max_order()) throw ValidationError("orthonormalization order out of range");
  if (base.eps() > 0.0) throw ValidationError("system is already orthonormalized");
  PolynomialSystem out = base;
  if (eps == 0.0) return out;
  if (base.trim() > 0.0) throw ValidationError("trim and eps cannot both be nonzero");

  const int npairs = m0 * (m0 + 1) / 2;
  auto products = [&](Prob p) {
    double buf[64];
    base_all(base.kind(), m0, p, buf);
    Eigen::VectorXd v(npairs);
    int idx = 0;
    for (int k = 0; k < m0; ++k)
      for (int l = 0; l <= k; ++l) v[idx++] = buf[k] * buf[l];
    return v;
  };
  const auto gram_v = quad::integrate_prob(products, eps, 1.0 - eps, {}, tight()).value;
  Eigen::MatrixXd gram(m0, m0);
  int idx = 0;
  for (int k = 0; k < m0; ++k)
    for (int l = 0; l <= k; ++l) {
      gram(k, l) = gram_v[idx];
      gram(l, k) = gram_v[idx];
      ++idx;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw RankDeficient("base weights are linearly dependent on the window");
  Eigen::MatrixXd l = llt.matrixL();
  const double dmax = l.diagonal().cwiseAbs().maxCoeff();
  if (l.diagonal().cwiseAbs().minCoeff() < 1e-12 * dmax)
    throw RankDeficient("base weights are numerically dependent on the window");
  out.linv_ = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(m0, m0));
  out.eps_ = eps;
  return out;
}

SystemSpec parse_system_spec(std::string_view spec) {
  const auto parts = split(lower_case(spec), ',');
  SystemSpec s;
  if (parts[0] == "legendre") {
    s.kind = SystemKind::kLegendre;
  } else if (parts[0] == "hermite") {
    s.kind = SystemKind::kHermite;
  } else if (parts[0] == "laguerre") {
    s.kind = SystemKind::kLaguerre;
  } else {
    throw ValidationError("unknown polynomial system '" + parts[0] + "'");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto kv = split(parts[i], '=');
    if (kv.size() != 2) throw ValidationError("bad system option '" + parts[i] + "'");
    const double v = parse_number(kv[1], spec);
    if (kv[0] == "trim") {
      s.trim = v;
    } else if (kv[0] == "eps") {
      s.eps = v;
    } else {
      throw ValidationError("unknown system option '" + kv[0] + "'");
    }
  }
  if (!(s.trim >= 0.0 && s.trim < 0.5)) throw ValidationError("trim must lie in [0, 0.5)");
  if (!(s.eps >= 0.0 && s.eps < 0.5)) throw ValidationError("eps must lie in [0, 0.5)");
  if (s.trim > 0.0 && s.eps > 0.0) throw ValidationError("trim and eps cannot both be nonzero");
  return s;
}

PolynomialSystem make_system(const SystemSpec& spec, int m0) {
  PolynomialSystem base(spec.kind, spec.trim, std::max(12, m0));
  return spec.eps > 0.0 ? gram_schmidt_eps(base, spec.eps, m0) : base;
}

// ---------------------------------------------------------------------------
// Classical functionals

namespace {

void need(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

WeightMeasure skew_constant(double lo_value, double hi_value) {
  return WeightMeasure::constant(lo_value, 0.0, 0.5).plus(WeightMeasure::constant(hi_value, 0.5, 1.0));
}

WeightMeasure tagged(WeightMeasure w, std::string label, int order, bool symmetric) {
  w.label = std::move(label);
  w.declared_order = order;
  w.declared_symmetric = symmetric;
  return w;
}

}  // namespace

ClassicalFunctional make_classical(std::string_view kind_sv, std::span<const double> params,
                                   const ClassicalOptions& opt) {
  const std::string kind = lower_case(kind_sv);
  auto arg = [&](std::size_t i, double fallback) {
    if (i < params.size()) return params[i];
    if (std::isnan(fallback)) throw ValidationError("missing parameter for '" + kind + "'");
    return fallback;
  };
  const double nan = std::nan("");
  const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);
  ClassicalFunctional f;
  f.name = kind;

  if (kind == "quantile" || kind == "median") {
    const double pi = kind == "median" ? 0.5 : arg(0, nan);
    need(pi >= 0.0 && pi <= 1.0, "quantile level must lie in [0, 1]");
    f.numerator = tagged(WeightMeasure::mass(pi), kind, 1, pi == 0.5);
  } else if (kind == "midrange") {
    f.numerator = tagged(WeightMeasure::masses({{0.0, 0.5}, {1.0, 0.5}}), kind, 1, true);
  } else if (kind == "smoothq") {
    const double pi = arg(0, nan);
    const double b = arg(1, nan);
    need(b > 0.0 && pi - b >= 0.0 && pi + b <= 1.0, "smoothq requires 0 <= pi - b < pi + b <= 1");
    // Epanechnikov kernel.
    auto g = [pi, b](Prob p) {
      const double x = (p.p - pi) / b;
      return std::abs(x) < 1.0 ? 0.75 * (1.0 - x * x) / b : 0.0;
    };
    auto anti = [pi, b](double p) {
      const double x = std::clamp((p - pi) / b, -1.0, 1.0);
      return 0.75 * (x - x * x * x / 3.0) + 0.5;
    };
    f.numerator = tagged(WeightMeasure::density(g, pi - b, pi + b, {}, anti), kind, 1, pi == 0.5);
  } else if (kind == "trimmean" || kind == "mean") {
    const double p0 = kind == "mean" ? 0.0 : arg(0, nan);
    const double p1 = kind == "mean" ? 1.0 : arg(1, nan);
    need(p0 >= 0.0 && p0 < p1 && p1 <= 1.0, "trimmean requires 0 <= pi0 < pi1 <= 1");
    f.numerator = tagged(WeightMeasure::constant(1.0 / (p1 - p0), p0, p1), kind, 1,
                         std::abs(p0 + p1 - 1.0) < 1e-15);
  } else if (kind == "iqr") {
    const double pi = arg(0, 0.75);
    need(pi > 0.5 && pi <= 1.0, "iqr requires 0.5 < pi <= 1");
    f.numerator = tagged(WeightMeasure::masses({{1.0 - pi, -1.0}, {pi, 1.0}}), kind, 2, true);
    // Standardized against N(0, 1); the full range has no normal reference.
    f.scale = pi < 1.0 ? 1.0 / (normal_quantile(pi) - normal_quantile(1.0 - pi)) : 1.0;
  } else if (kind == "gini") {
    auto g = [](Prob p) { return 0.5 * (p.p - p.c); };
    auto anti = [](double p) { return 0.5 * (p * p - p); };
    f.numerator = tagged(WeightMeasure::density(g, 0.0, 1.0, {}, anti), kind, 2, true);
    // Reference value of the N(0, 1) denominator is 1 / (2 sqrt(pi)).
    f.scale = 2.0 * std::sqrt(std::numbers::pi);
  } else if (kind == "meandev") {
    f.numerator = tagged(skew_constant(-1.0, 1.0), kind, 2, true);
    f.scale = sqrt2pi / 2.0;
  } else if (kind == "galton") {
    const double pi = arg(0, 0.25);
    need(pi > 0.0 && pi < 0.5, "galton requires 0 < pi < 0.5");
    f.numerator = tagged(WeightMeasure::masses({{pi, 1.0}, {0.5, -2.0}, {1.0 - pi, 1.0}}), kind, 3, true);
    f.denominator = tagged(WeightMeasure::masses({{pi, -1.0}, {1.0 - pi, 1.0}}), "iqr", 2, true);
  } else if (kind == "gm") {
    f.numerator = tagged(WeightMeasure::constant(1.0, 0.0, 1.0).plus(WeightMeasure::mass(0.5, -1.0)), kind,
                         3, true);
    f.denominator = tagged(skew_constant(-1.0, 1.0), "meandev", 2, true);
  } else if (kind == "moors") {
    f.numerator = tagged(
        WeightMeasure::masses({{0.125, -1.0}, {0.375, 1.0}, {0.625, -1.0}, {0.875, 1.0}}), kind, 4, true);
    f.denominator = tagged(WeightMeasure::masses({{0.25, -1.0}, {0.75, 1.0}}), "iqr", 2, true);
    f.centering = 1.23;
  } else if (kind == "gilchrist") {
    f.numerator = tagged(WeightMeasure::masses({{0.1, -1.0}, {0.9, 1.0}}), kind, 2, true);
    f.denominator = tagged(WeightMeasure::masses({{0.25, -1.0}, {0.75, 1.0}}), "iqr", 2, true);
    f.centering = (normal_quantile(0.9) - normal_quantile(0.1)) / (normal_quantile(0.75) - normal_quantile(0.25));
  } else if (kind == "hogg") {
    const double p0 = arg(0, 0.05);
    const double p1 = arg(1, 0.5);
    need(p0 > 0.0 && p0 < p1 && p1 <= 0.5, "hogg requires 0 < pi0 < pi1 <= 0.5");
    auto tails = [](double pi) {
      return WeightMeasure::constant(-1.0, 0.0, pi).plus(WeightMeasure::constant(1.0, 1.0 - pi, 1.0));
    };
    f.numerator = tagged(tails(p0), kind, 2, true);
    f.denominator = tagged(tails(p1), "hogg-scale", 2, true);
    f.centering = 2.59;
  } else if (kind == "hill") {
    const double pi = arg(0, 0.1);
    need(pi > 0.0 && pi < 1.0, "hill requires 0 < pi < 1");
    const double height = opt.strict_hill ? 1.0 / (1.0 - pi) : 1.0 / pi;
    f.numerator = WeightMeasure::constant(height, 1.0 - pi, 1.0).plus(WeightMeasure::mass(1.0 - pi, -1.0));
    f.numerator.label = kind;
  } else {
    throw ValidationError("unknown classical measure '" + kind + "'");
  }
  return f;
}

ClassicalFunctional parse_measure_spec(std::string_view spec) {
  const std::string s = lower_case(spec);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (head == "legendre" || head == "hermite" || head == "laguerre") {
    const auto parts = split(rest, ',');
    const auto orders = split(parts[0], ':');
    if (orders.empty() || orders.size() > 2 || orders[0].empty())
      throw ValidationError("system measure needs an order, e.g. legendre:2 or legendre:4:2");
    std::string sys_spec = head;
    for (std::size_t i = 1; i < parts.size(); ++i) sys_spec += "," + parts[i];
    const int m = static_cast<int>(parse_number(orders[0], spec));
    const int l = orders.size() == 2 ? static_cast<int>(parse_number(orders[1], spec)) : 0;
    const auto sys = make_system(parse_system_spec(sys_spec), std::max(m, l));
    ClassicalFunctional f;
    f.name = std::string(spec);
    f.numerator = sys.weight(m);
    if (l > 0) f.denominator = sys.weight(l);
    return f;
  }
  std::vector<double> params;
  ClassicalOptions opt;
  if (!rest.empty()) {
    for (const auto& tok : split(rest, ',')) {
      if (tok == "strict") {
        opt.strict_hill = true;
      } else {
        params.push_back(parse_number(tok, spec));
      }
    }
  }
  auto f = make_classical(head, params, opt);
  f.name = std::string(spec);
  return f;
}

// ---------------------------------------------------------------------------
// Order classification

std::optional<OrderClass> classify_order(const WeightMeasure& g, const ClassifyOptions& opt) {
  struct Atom {
    double at;
    double value;
  };
  std::vector<Atom> atoms;
  const int n = opt.grid;
  std::vector<double> dens(n, 0.0);
  if (g.has_density()) {
    for (int j = 0; j < n; ++j) {
      const double p = (j + 0.5) / n;
      dens[j] = g.density_at(Prob::of(p));
      atoms.push_back({p, dens[j] / n});
    }
    // Geometric probes into both tails, where unbounded weights change sign
    // beyond the last uniform midpoint.
    for (int k = 1; k <= 50; ++k) {
      const double t = std::ldexp(0.5 / n, -k);
      atoms.push_back({t, g.density_at(Prob::lower(t)) / n});
      atoms.push_back({1.0 - t, g.density_at(Prob::upper(t)) / n});
    }
  }
  for (const auto& m : g.point_masses()) atoms.push_back({m.at, m.weight});
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.at < b.at; });
  double amax = 0.0;
  for (const auto& a : atoms) amax = std::max(amax, std::abs(a.value));
  if (amax == 0.0) return std::nullopt;
  const double tol = opt.tolerance * amax;

  int runs = 0;
  int last_sign = 0;
  for (const auto& a : atoms) {
    if (std::abs(a.value) <= tol) continue;
    const int s = a.value > 0 ? 1 : -1;
    if (s != last_sign) {
      ++runs;
      last_sign = s;
    }
  }
  if (runs == 0 || runs > opt.max_order || last_sign != 1) return std::nullopt;

  const double total = g.total_mass();
  const double target = runs == 1 ? 1.0 : 0.0;
  if (std::abs(total - target) > 1e-6 * std::max(1.0, g.total_variation())) return std::nullopt;

  OrderClass out{runs, true};
  const double sign = (runs % 2 == 1) ? 1.0 : -1.0;
  double dmax = 0.0;
  for (double d : dens) dmax = std::max(dmax, std::abs(d));
  for (int j = 0; j < n && out.symmetric; ++j)
    if (std::abs(dens[j] - sign * dens[n - 1 - j]) > 1e-9 * std::max(dmax, 1e-300) && dmax > 0.0)
      out.symmetric = false;
  const auto& masses = g.point_masses();
  for (const auto& m : masses) {
    if (!out.symmetric) break;
    bool found = false;
    for (const auto& o : masses)
      if (std::abs(o.at - (1.0 - m.at)) < 1e-12 &&
          std::abs(o.weight - sign * m.weight) <= 1e-9 * std::abs(m.weight))
        found = true;
    if (!found) out.symmetric = false;
  }
  return out;
}

}  // namespace lf
