#include "lf/table1.hpp"

#include <cmath>
#include <limits>

#include "lf/lfunctionals.hpp"

namespace lf {

std::vector<Table1Cell> table1_cells() {
  struct Row {
    const char* name;
    ParametricDistribution dist;
    double eps[3];
    double ref[3];
  };
  const std::vector<Row> rows = {
      {"U(0,1)", ParametricDistribution::uniform(0, 1), {0, 0, 0}, {100, 99.87, 99.61}},
      {"beta(0.1,0.1)", ParametricDistribution::beta(0.1, 0.1), {0, 0, 0}, {98.23, 93.27, 93.96}},
      {"N(0,1)", ParametricDistribution::normal(0, 1), {0, 0, 0}, {98.84, 100, 94.31}},
      {"t10", ParametricDistribution::student_t(10), {0, 1e-5, 0}, {97.36, 99.998, 92.19}},
      {"Exp(1)", ParametricDistribution::exponential(1), {0, 1e-5, 0}, {96.88, 99.99, 100}},
      {"Exp(1)", ParametricDistribution::exponential(1), {1e-5, 1e-5, 1e-5}, {96.87, 99.99, 100}},
      {"Exp(10)", ParametricDistribution::exponential(10), {0, 1e-5, 0}, {96.88, 99.99, 100}},
      {"Gamma(10,1)", ParametricDistribution::gamma(10, 1), {0, 0, 1e-7}, {99.84, 100, 99.80}},
      {"Wei(3,1)", ParametricDistribution::weibull(3, 1), {0, 1e-5, 1e-6}, {99.91, 99.999, 99.57}},
      {"Wei(1/2,1)", ParametricDistribution::weibull(0.5, 1), {0, 0, 0}, {73.78, 97.95, 100}},
  };
  const SystemKind kinds[3] = {SystemKind::kLegendre, SystemKind::kHermite, SystemKind::kLaguerre};
  std::vector<Table1Cell> out;
  for (const auto& r : rows)
    for (int k = 0; k < 3; ++k) out.push_back({r.name, r.dist, kinds[k], r.eps[k], r.ref[k]});
  return out;
}

bool Table1Result::within(double tolerance_pp) const {
  return std::isfinite(value) && std::abs(value - cell.reference) <= tolerance_pp;
}

std::vector<Table1Result> compute_table1() {
  std::vector<Table1Result> out;
  for (const auto& c : table1_cells()) {
    Table1Result r{c, std::numeric_limits<double>::quiet_NaN(), ""};
    try {
      r.value = 100.0 * delta(c.dist, PolynomialSystem(c.system), 4, c.eps);
    } catch (const NumericalError& e) {
      r.note = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lf
