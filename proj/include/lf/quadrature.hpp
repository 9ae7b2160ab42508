#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration.
//
// Integrals over probabilities use two coordinate charts: the lower half
// (0, 0.5] is integrated in p, the upper half [0.5, 1) in c = 1 - p, and the
// integrand receives a Prob carrying both. Quantile functions with a
// singularity at p -> 1 therefore see exact tail arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "lf/core.hpp"

namespace lf::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_panels = 4000;
  // Checkpoint spacing (in subdivisions) for divergence detection.
  int checkpoint_every = 64;
};

// Process-wide defaults; the CLI may tighten or loosen them once at startup.
Options& defaults();

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

enum class Chart { kPlain, kLower, kUpper };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  Chart chart = Chart::kPlain;
};

// Splits [a, b] within [0, 1] at 0.5 and at every break strictly inside,
// returning intervals in chart coordinates.
std::vector<Interval> prob_intervals(double a, double b,
                                     std::span<const double> breaks = {});

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}
inline bool all_finite(double v) { return std::isfinite(v); }
template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

template <class T>
struct Panel {
  double lo;
  double hi;
  int chart;
  T value;
  double error;
};

template <class T>
struct PanelLess {
  bool operator()(const Panel<T>& a, const Panel<T>& b) const {
    return a.error < b.error;
  }
};

// One Gauss-Kronrod 15 panel. The error follows the QUADPACK scaling for
// scalars and the raw Kronrod-Gauss difference for vector values.
template <class T, class G>
Panel<T> gk15(G& g, double lo, double hi, int chart) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  T fc = g(center);
  if (!all_finite(fc)) throw DivergentTail("non-finite integrand value");
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  std::array<T, 7> f1;
  std::array<T, 7> f2;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    if (!all_finite(f1[j]) || !all_finite(f2[j]))
      throw DivergentTail("non-finite integrand value");
    kronrod = kronrod + (f1[j] + f2[j]) * kWgk[j];
    if (j % 2 == 1) gauss = gauss + (f1[j] + f2[j]) * kWg[j / 2];
  }
  double err = magnitude(T((kronrod - gauss) * half));
  if constexpr (std::is_same_v<T, double>) {
    const double mean = kronrod * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
      resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    resasc *= std::abs(half);
    if (resasc != 0.0 && err != 0.0)
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  return Panel<T>{lo, hi, chart, T(kronrod * half), err};
}

}  // namespace detail

// Integrates over chart intervals. `f` takes a Prob for kLower/kUpper charts
// and the plain abscissa (as Prob::lower) for kPlain.
template <class F>
auto integrate_intervals(F&& f, const std::vector<Interval>& intervals,
                         const Options& opt = defaults())
    -> Result<std::decay_t<decltype(f(Prob{}))>> {
  using T = std::decay_t<decltype(f(Prob{}))>;
  using detail::Panel;
  auto eval = [&](int chart, double x) -> T {
    if (chart == static_cast<int>(Chart::kUpper)) return f(Prob::upper(x));
    return f(Prob::lower(x));
  };

  std::vector<Panel<T>> heap;
  std::vector<Panel<T>> frozen;
  Result<T> out;
  bool have_zero = false;
  T zero{};
  for (const auto& iv : intervals) {
    if (!(iv.hi > iv.lo)) continue;
    const int chart = static_cast<int>(iv.chart);
    auto g = [&](double x) { return eval(chart, x); };
    heap.push_back(detail::gk15<T>(g, iv.lo, iv.hi, chart));
    if (!have_zero) {
      zero = T(heap.back().value * 0.0);
      have_zero = true;
    }
  }
  if (heap.empty()) {
    if constexpr (std::is_same_v<T, double>) {
      out.value = 0.0;
    } else {
      out.value = T(f(Prob{}) * 0.0);
    }
    return out;
  }
  std::make_heap(heap.begin(), heap.end(), detail::PanelLess<T>{});

  auto totals = [&](T& value, double& error) {
    value = zero;
    error = 0.0;
    for (const auto& pn : heap) {
      value = value + pn.value;
      error += pn.error;
    }
    for (const auto& pn : frozen) {
      value = value + pn.value;
      error += pn.error;
    }
  };

  T value;
  double error;
  totals(value, error);
  std::vector<T> checkpoints;
  int panels = static_cast<int>(heap.size());
  int since_check = 0;
  while (!heap.empty()) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value));
    if (error <= tol) break;
    if (panels >= opt.max_panels) {
      // Out of budget: accept only if the estimate has settled.
      int moving = 0;
      const int k = static_cast<int>(checkpoints.size());
      for (int i = std::max(1, k - 4); i < k; ++i)
        if (detail::magnitude(T(checkpoints[i] - checkpoints[i - 1])) > tol) ++moving;
      if (k >= 5 && moving >= 4)
        throw DivergentTail("adaptive quadrature did not stabilize");
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), detail::PanelLess<T>{});
    Panel<T> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 1e-14 * std::abs(mid) || (worst.hi - worst.lo) < 1e-300) {
      frozen.push_back(worst);
      continue;
    }
    auto g = [&](double x) { return eval(worst.chart, x); };
    auto left = detail::gk15<T>(g, worst.lo, mid, worst.chart);
    auto right = detail::gk15<T>(g, mid, worst.hi, worst.chart);
    value = value + (left.value + right.value - worst.value);
    error += left.error + right.error - worst.error;
    heap.push_back(std::move(left));
    std::push_heap(heap.begin(), heap.end(), detail::PanelLess<T>{});
    heap.push_back(std::move(right));
    std::push_heap(heap.begin(), heap.end(), detail::PanelLess<T>{});
    ++panels;
    if (++since_check >= opt.checkpoint_every) {
      // Resum to shed accumulated cancellation in the running totals.
      totals(value, error);
      checkpoints.push_back(value);
      since_check = 0;
    }
  }
  out.value = value;
  out.error = error;
  out.panels = panels;
  return out;
}

// Integral over [a, b] within [0, 1] of f(Prob) dp.
template <class F>
auto integrate_prob(F&& f, double a, double b, std::span<const double> breaks = {},
                    const Options& opt = defaults()) {
  return integrate_intervals(std::forward<F>(f), prob_intervals(a, b, breaks), opt);
}

// Integral over a finite real interval [a, b] of f(double) dx.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = defaults()) {
  auto wrapped = [&](Prob x) { return f(x.p); };
  std::vector<Interval> ivs;
  if (b > a) ivs.push_back({a, b, Chart::kPlain});
  return integrate_intervals(wrapped, ivs, opt);
}

}  // namespace lf::quad
