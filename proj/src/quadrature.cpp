#include "lf/quadrature.hpp"

namespace lf::quad {

Options& defaults() {
  static Options opt;
  return opt;
}

std::vector<Interval> prob_intervals(double a, double b, std::span<const double> breaks) {
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  if (a < 0.5 && b > 0.5) cuts.push_back(0.5);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    if (hi <= 0.5) {
      out.push_back({lo, hi, Chart::kLower});
    } else {
      // Complement chart: c runs over [1 - hi, 1 - lo].
      out.push_back({1.0 - hi, 1.0 - lo, Chart::kUpper});
    }
  }
  return out;
}

}  // namespace lf::quad
