#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lf/distributions.hpp"
#include "lf/quadrature.hpp"
#include "lf/weights.hpp"

namespace lf {

// Anything with a quantile function: a parametric law, an empirical sample,
// or a callable such as a fitted conditional quantile curve.
class QuantileSource {
 public:
  using Fn = std::function<double(Prob)>;

  QuantileSource(ParametricDistribution d);  // NOLINT(google-explicit-constructor)
  QuantileSource(EmpiricalSample s);         // NOLINT(google-explicit-constructor)
  QuantileSource(Fn q, std::vector<double> jumps = {}, std::string name = "custom");

  double operator()(Prob p) const { return fn_(p); }
  double operator()(double p) const { return fn_(Prob::of(p)); }
  // Probabilities where Q jumps; quadrature panels are split there.
  const std::vector<double>& jumps() const { return jumps_; }
  const std::string& name() const { return name_; }
  const ParametricDistribution* parametric() const { return dist_ ? &*dist_ : nullptr; }
  const EmpiricalSample* empirical() const { return sample_.get(); }

 private:
  Fn fn_;
  std::vector<double> jumps_;
  std::string name_;
  std::optional<ParametricDistribution> dist_;
  std::shared_ptr<const EmpiricalSample> sample_;
};

struct LFunctionalValue {
  double value = 0.0;
  // Quadrature error estimate (first-order propagated for ratios).
  double error = 0.0;
  std::string tag;
  std::string provenance;
  // Component values of a ratio; NaN otherwise.
  double numerator = std::numeric_limits<double>::quiet_NaN();
  double denominator = std::numeric_limits<double>::quiet_NaN();
};

LFunctionalValue lfunctional(const QuantileSource& q, const WeightMeasure& g,
                             const quad::Options& opt = quad::defaults());
LFunctionalValue lmoment(const QuantileSource& q, const PolynomialSystem& sys, int m);
LFunctionalValue ratio_l(const QuantileSource& q, const PolynomialSystem& sys, int m, int l);
// Ratio of two already computed values; throws ZeroDenominator below 1e-12.
LFunctionalValue ratio_of(const LFunctionalValue& num, const LFunctionalValue& den);
LFunctionalValue evaluate(const QuantileSource& q, const ClassicalFunctional& f);

struct QuantileApproximation {
  PolynomialSystem system;
  std::vector<double> coefficients;
  std::vector<double> errors;

  double operator()(Prob p) const;
  double operator()(double p) const { return (*this)(Prob::of(p)); }
};

// Truncated expansion sum_{m <= m0} T_m g_m (scaled by 1 - 2 trim for
// trimmed systems).
QuantileApproximation approx_quantile(const QuantileSource& q, const PolynomialSystem& sys, int m0);

struct SeriesFit {
  QuantileApproximation approx;
  double ise = 0.0;
  // Integral of Q^2 over the window.
  double total = 0.0;
  double delta = 0.0;
};

// ISE and explained fraction on the system window; eps > 0 re-orthonormalizes
// the base system on (eps, 1 - eps) first.
SeriesFit series_fit(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps = 0.0);
double ise(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps = 0.0);
double delta(const QuantileSource& q, const PolynomialSystem& sys, int m0, double eps = 0.0);

enum class Role { kScale, kSkew, kHeavy };

struct StandardizeRefs {
  QuantileSource f0;
  std::optional<QuantileSource> f1;
  // Scale measure of the ratio; required for skew and heavy roles.
  std::optional<WeightMeasure> scale;
};

struct Standardized {
  WeightMeasure measure;
  // Multiplier K (K1 for the heavy role).
  double factor = 1.0;
  // Centering K0 (heavy role only).
  double centering = 0.0;
};

// Scale: K = 1 / T(F0). Skew: K = T_scale(F0) / T_uskew(F0). Heavy:
// K0 = T_uheavy(F0) / T_scale(F0), the measure becomes G - K0 G_scale, and K1
// rescales it so that the ratio equals 1 at F1 (K1 = 1 without F1).
Standardized standardize(const WeightMeasure& raw, Role role, const StandardizeRefs& refs);

// The pi in (0, 1) at which the upper-tail part of T_m vanishes at the
// system's own reference law, found by bisection.
double tail_split_point(const PolynomialSystem& sys, int m);

}  // namespace lf
