#include "lf/lfunctionals.hpp"

#include <algorithm>
#include <cmath>

namespace lf {

QuantileSource::QuantileSource(ParametricDistribution d) : name_(d.name()), dist_(d) {
  fn_ = [d](Prob p) { return d.quantile(p); };
  if (d.family() == Family::kBernoulli) jumps_.push_back(1.0 - d.param(0));
}

QuantileSource::QuantileSource(EmpiricalSample s)
    : name_("empirical"), sample_(std::make_shared<const EmpiricalSample>(std::move(s))) {
  auto sp = sample_;
  fn_ = [sp](Prob p) { return sp->quantile(p); };
  const auto& y = sample_->sorted();
  const double n = static_cast<double>(y.size());
  for (std::size_t k = 1; k < y.size(); ++k)
    if (y[k] > y[k - 1]) jumps_.push_back(static_cast<double>(k) / n);
}

QuantileSource::QuantileSource(Fn q, std::vector<double> jumps, std::string name)
    : fn_(std::move(q)), jumps_(std::move(jumps)), name_(std::move(name)) {}

LFunctionalValue lfunctional(const QuantileSource& q, const WeightMeasure& g, const quad::Options& opt) {
  LFunctionalValue out;
  out.tag = g.label;
  out.provenance = q.name();
  double value = 0.0;
  for (const auto& m : g.point_masses()) value += m.weight * q(Prob::of(m.at));
  if (g.has_density()) {
    std::vector<double> br = g.breaks();
    br.insert(br.end(), q.jumps().begin(), q.jumps().end());
    br.push_back(0.25);
    br.push_back(0.75);
    auto r = quad::integrate_prob([&](Prob p) { return q(p) * g.density_at(p); }, g.support_lo(),
                                  g.support_hi(), br, opt);
    value += r.value;
    out.error = r.error;
  }
  out.value = value;
  return out;
}

LFunctionalValue lmoment(const QuantileSource& q, const PolynomialSystem& sys, int m) {
  auto v = lfunctional(q, sys.weight(m));
  v.tag = std::to_string(m);
  v.provenance = sys.name();
  return v;
}

LFunctionalValue ratio_of(const LFunctionalValue& num, const LFunctionalValue& den) {
  if (std::abs(den.value) < 1e-12) throw ZeroDenominator("ratio denominator below 1e-12");
  LFunctionalValue out;
  out.value = num.value / den.value;
  out.error = (num.error + std::abs(out.value) * den.error) / std::abs(den.value);
  out.numerator = num.value;
  out.denominator = den.value;
  out.tag = num.tag + ":" + den.tag;
  out.provenance = num.provenance;
  return out;
}

LFunctionalValue ratio_l(const QuantileSource& q, const PolynomialSystem& sys, int m, int l) {
  return ratio_of(lmoment(q, sys, m), lmoment(q, sys, l));
}

LFunctionalValue evaluate(const QuantileSource& q, const ClassicalFunctional& f) {
  auto num = lfunctional(q, f.numerator);
  LFunctionalValue out;
  if (f.denominator) {
    out = ratio_of(num, lfunctional(q, *f.denominator));
    out.value = f.scale * (out.value - f.centering);
    out.error *= std::abs(f.scale);
  } else {
    out = num;
    out.value *= f.scale;
    out.error *= std::abs(f.scale);
  }
  out.tag = f.name;
  out.provenance = q.name();
  return out;
}

double QuantileApproximation::operator()(Prob p) const {
  double sum = 0.0;
  for (std::size_t m = 0; m < coefficients.size(); ++m)
    sum += coefficients[m] * system.value(static_cast<int>(m) + 1, p);
  return system.expansion_factor() * sum;
}

QuantileApproximation approx_quantile(const QuantileSource& q, const PolynomialSystem& sys, int m0) {
  if (m0 < 1) throw ValidationError("m0 must be positive");
  QuantileApproximation a{sys, {}, {}};
  for (int m = 1; m <= m0; ++m) {
    const auto v = lmoment(q, sys, m);
    a.coefficients.push_back(v.value);
    a.errors.push_back(v.error);
  }
  return a;
}

SeriesFit series_fit(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps) {
  const PolynomialSystem s = (eps > 0.0 && sys.eps() == 0.0) ? gram_schmidt_eps(sys, eps, m0) : sys;
  SeriesFit fit{approx_quantile(q, s, m0), 0.0, 0.0, 0.0};
  const double lo = s.window_lo();
  const double hi = s.window_hi();
  std::vector<double> br = q.jumps();
  br.push_back(0.25);
  br.push_back(0.75);
  fit.ise = quad::integrate_prob(
                [&](Prob p) {
                  const double d = q(p) - fit.approx(p);
                  return d * d;
                },
                lo, hi, br)
                .value;
  fit.total = quad::integrate_prob(
                  [&](Prob p) {
                    const double v = q(p);
                    return v * v;
                  },
                  lo, hi, br)
                  .value;
  if (!(fit.total > 0.0)) throw ZeroDenominator("quantile function vanishes on the window");
  fit.delta = 1.0 - fit.ise / fit.total;
  return fit;
}

double ise(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps) {
  return series_fit(q, sys, m0, eps).ise;
}

double delta(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps) {
  return series_fit(q, sys, m0, eps).delta;
}

Standardized standardize(const WeightMeasure& raw, Role role, const StandardizeRefs& refs) {
  auto t = [](const QuantileSource& q, const WeightMeasure& g) { return lfunctional(q, g).value; };
  auto nonzero = [](double v, const char* what) {
    if (std::abs(v) < 1e-12) throw ZeroDenominator(what);
    return v;
  };
  Standardized out;
  switch (role) {
    case Role::kScale: {
      out.factor = 1.0 / nonzero(t(refs.f0, raw), "reference scale functional is zero");
      out.measure = raw.scaled(out.factor);
      break;
    }
    case Role::kSkew: {
      if (!refs.scale) throw ValidationError("skew standardization needs a scale measure");
      const double s0 = nonzero(t(refs.f0, *refs.scale), "reference scale functional is zero");
      out.factor = s0 / nonzero(t(refs.f0, raw), "reference skewness functional is zero");
      out.measure = raw.scaled(out.factor);
      break;
    }
    case Role::kHeavy: {
      if (!refs.scale) throw ValidationError("heavy-tail standardization needs a scale measure");
      const double s0 = nonzero(t(refs.f0, *refs.scale), "reference scale functional is zero");
      out.centering = t(refs.f0, raw) / s0;
      WeightMeasure centered = raw.plus(*refs.scale, -out.centering);
      if (refs.f1) {
        const double s1 = nonzero(t(*refs.f1, *refs.scale), "scale functional at F1 is zero");
        out.factor = s1 / nonzero(t(*refs.f1, centered), "centered functional at F1 is zero");
      }
      out.measure = centered.scaled(out.factor);
      break;
    }
  }
  out.measure.label = raw.label;
  return out;
}

double tail_split_point(const PolynomialSystem& sys, int m) {
  const QuantileSource q0(reference_distribution(sys.kind()));
  const WeightMeasure g = sys.weight(m);
  auto h = [&](double pi) {
    const double lo = 1.0 - pi;
    return quad::integrate_prob([&](Prob p) { return q0(p) * g.density_at(p); }, lo, 1.0, {}).value;
  };
  // Scan geometrically from the extreme tail for the first sign change.
  double prev_pi = 1e-8;
  double prev = h(prev_pi);
  for (int k = 1; k <= 400; ++k) {
    const double pi = 1e-8 * std::pow(0.999 / 1e-8, k / 400.0);
    const double cur = h(pi);
    if ((prev < 0.0) != (cur < 0.0)) {
      double a = prev_pi;
      double b = pi;
      double fa = prev;
      for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = h(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    prev_pi = pi;
    prev = cur;
  }
  throw ConvergenceError("no interior tail split point found");
}

}  // namespace lf
