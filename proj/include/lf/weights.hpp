#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lf/core.hpp"
#include "lf/distributions.hpp"

namespace lf {

struct PointMass {
  double at;
  double weight;
};

// Signed measure on [0, 1]: a sum of density components plus point masses.
// Each component is zero outside its own support [lo, hi], which lets
// quadrature split panels exactly at window edges.
class WeightMeasure {
 public:
  using Density = std::function<double(Prob)>;
  using Antiderivative = std::function<double(double)>;

  struct Component {
    Density density;
    double lo = 0.0;
    double hi = 1.0;
    // Interior discontinuities of the density.
    std::vector<double> breaks;
    // Optional F(p) = integral of the density from lo to p, for p in [lo, hi].
    Antiderivative antiderivative;
  };

  WeightMeasure() = default;

  static WeightMeasure density(Density g, double lo = 0.0, double hi = 1.0,
                               std::vector<double> breaks = {}, Antiderivative anti = {});
  static WeightMeasure constant(double value, double lo, double hi);
  static WeightMeasure mass(double at, double weight = 1.0);
  static WeightMeasure masses(std::vector<PointMass> m);

  bool has_density() const { return !components_.empty(); }
  double density_at(Prob p) const;
  // Smallest interval containing every density component.
  double support_lo() const;
  double support_hi() const;
  // Component edges and interior discontinuities, sorted.
  std::vector<double> breaks() const;
  const std::vector<Component>& components() const { return components_; }
  const std::vector<PointMass>& point_masses() const { return masses_; }
  bool has_antiderivative() const;

  // Density mass on (a, b], exact when every component has an antiderivative.
  double density_mass(double a, double b) const;
  double total_mass() const;
  double total_variation() const;

  WeightMeasure scaled(double k) const;
  // this + k * other.
  WeightMeasure plus(const WeightMeasure& other, double k = 1.0) const;

  std::string label;
  std::optional<int> declared_order;
  std::optional<bool> declared_symmetric;

 private:
  std::vector<Component> components_;
  std::vector<PointMass> masses_;
  void add_mass(double at, double weight);
};

enum class SystemKind { kLegendre, kHermite, kLaguerre };

std::string to_string(SystemKind kind);

// Reference distribution generating each system: U(-sqrt3, sqrt3), N(0, 1)
// and Exp(1).
ParametricDistribution reference_distribution(SystemKind kind);

class PolynomialSystem {
 public:
  explicit PolynomialSystem(SystemKind kind, double trim = 0.0, int max_order = 12);

  SystemKind kind() const { return kind_; }
  double trim() const { return trim_; }
  double eps() const { return eps_; }
  int max_order() const { return max_order_; }
  // Highest order available (the Gram-Schmidt order when eps > 0).
  int available_order() const { return eps_ > 0.0 ? static_cast<int>(linv_.rows()) : max_order_; }
  // Support of every weight: (trim, 1 - trim) or (eps, 1 - eps).
  double window_lo() const { return eps_ > 0.0 ? eps_ : trim_; }
  double window_hi() const { return 1.0 - window_lo(); }
  // Factor w with Q / w expanded by the system on its window (1 - 2 trim).
  double expansion_factor() const { return 1.0 - 2.0 * trim_; }

  // Base weight g_m (windowed when trim > 0), before Gram-Schmidt.
  double base_value(int m, Prob p) const;
  // Weight g_m, orthonormalized on the eps window when eps > 0.
  double value(int m, Prob p) const;
  WeightMeasure weight(int m) const;
  // Rows are the orthonormalization coefficients; identity when eps = 0.
  const Eigen::MatrixXd& coefficients() const { return linv_; }

  std::string name() const;

 private:
  friend PolynomialSystem gram_schmidt_eps(const PolynomialSystem& base, double eps, int m0);
  SystemKind kind_;
  double trim_;
  double eps_ = 0.0;
  int max_order_;
  Eigen::MatrixXd linv_;
};

inline WeightMeasure system_weight(const PolynomialSystem& sys, int m) { return sys.weight(m); }

// Re-orthonormalizes the first m0 base weights on (eps, 1 - eps).
PolynomialSystem gram_schmidt_eps(const PolynomialSystem& base, double eps, int m0);

struct SystemSpec {
  SystemKind kind = SystemKind::kLegendre;
  double trim = 0.0;
  double eps = 0.0;
};

// Parses `legendre|hermite|laguerre[,trim=x][,eps=y]`.
SystemSpec parse_system_spec(std::string_view spec);
PolynomialSystem make_system(const SystemSpec& spec, int m0);

// Polynomials used by the systems.
double legendre_poly(int k, double x);
double hermite_poly(int k, double x);   // probabilists' He_k
double laguerre_poly(int k, double x);  // La_k

// Numerator/denominator pair evaluated as
//   scale * T(numerator)                                (no denominator)
//   scale * (T(numerator) / T(denominator) - centering)  (ratio form)
struct ClassicalFunctional {
  std::string name;
  WeightMeasure numerator;
  std::optional<WeightMeasure> denominator;
  double scale = 1.0;
  double centering = 0.0;
};

struct ClassicalOptions {
  // Hill density normalized by 1 / (1 - pi) instead of 1 / pi.
  bool strict_hill = false;
};

// Kinds: quantile, median, midrange, smoothq, trimmean, mean, iqr, gini,
// meandev, galton, gm, moors, gilchrist, hogg, hill.
ClassicalFunctional make_classical(std::string_view kind, std::span<const double> params = {},
                                   const ClassicalOptions& opt = {});

// Parses a measure spec: a classical spec such as `hogg:0.05,0.5`, or a
// system weight such as `legendre:2`, `hermite:3,trim=0.1`, `legendre:4:2`
// (ratio of orders 4 and 2).
ClassicalFunctional parse_measure_spec(std::string_view spec);

struct OrderClass {
  int order = 0;
  bool symmetric = false;
};

struct ClassifyOptions {
  int grid = 2048;
  double tolerance = 1e-9;
  int max_order = 12;
};

// Order number and symmetry of a weight measure; nullopt if unclassified.
std::optional<OrderClass> classify_order(const WeightMeasure& g, const ClassifyOptions& opt = {});

}  // namespace lf
