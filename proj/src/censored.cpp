#include "lf/censored.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/LU>
#include <Eigen/QR>

namespace lf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond this many exact ties the vertex enumeration is skipped.
constexpr std::size_t kMaxTied = 8;

double rho(double p, double u) { return u < 0.0 ? (p - 1.0) * u : p * u; }

}  // namespace

// ------------------------------------------------------------- survival

SurvivalCurve::SurvivalCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) throw ValidationError("survival times and values differ in length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (i > 0 && !(times_[i] > times_[i - 1])) throw ValidationError("survival jump times must increase");
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) throw ValidationError("survival values must lie in [0, 1]");
    if (i > 0 && values_[i] > values_[i - 1]) throw ValidationError("survival values must not increase");
  }
}

double SurvivalCurve::operator()(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

SurvivalCurve kaplan_meier(std::span<const double> times, std::span<const int> deltas) {
  if (times.size() != deltas.size()) throw ValidationError("times and indicators differ in length");
  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> jt;
  std::vector<double> jv;
  // Between censorings the product telescopes, so S = base (1 - removed / start).
  double base = 1.0;
  std::size_t start = n;
  std::size_t removed = 0;
  std::size_t at_risk = n;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    if (!std::isfinite(t)) throw ValidationError("survival times must be finite");
    std::size_t events = 0;
    std::size_t censored = 0;
    for (; i < n && times[order[i]] == t; ++i) {
      const int d = deltas[order[i]];
      if (d != 0 && d != 1) throw ValidationError("event indicators must be 0 or 1");
      (d == 1 ? events : censored) += 1;
    }
    if (events > 0) {
      removed += events;
      const double s = base * (1.0 - static_cast<double>(removed) / static_cast<double>(start));
      jt.push_back(t);
      jv.push_back(s);
    }
    at_risk -= events + censored;
    if (censored > 0) {
      base = jv.empty() ? 1.0 : jv.back();
      start = at_risk;
      removed = 0;
    }
  }
  return SurvivalCurve(std::move(jt), std::move(jv));
}

// ------------------------------------------------------------- data

CensoredData::CensoredData(Eigen::MatrixXd x, Eigen::VectorXd observed, std::vector<int> delta,
                           std::optional<Eigen::VectorXd> censor, Link link)
    : x_(std::move(x)), observed_(std::move(observed)), delta_(std::move(delta)), censor_(std::move(censor)),
      link_(link) {
  if (x_.rows() == 0) throw ValidationError("censored data needs at least one observation");
  if (static_cast<Eigen::Index>(delta_.size()) != observed_.size())
    throw ValidationError("indicator and response lengths differ");
  for (int d : delta_)
    if (d != 0 && d != 1) throw ValidationError("censoring indicators must be 0 or 1");
  const RegressionData check(x_, observed_, link_);
  z_ = check.z();
  zc_ = Eigen::VectorXd::Constant(observed_.size(), kInf);
  if (censor_) {
    if (censor_->size() != observed_.size()) throw ValidationError("censoring column has the wrong length");
    for (Eigen::Index i = 0; i < observed_.size(); ++i) {
      const double c = (*censor_)[i];
      if (std::isnan(c) || observed_[i] > c) throw ValidationError("observed time exceeds its censoring time");
      if (c == kInf) continue;
      if (link_.in_domain(c)) {
        zc_[i] = link_.forward(c);
      } else if (link_.kind() != Link::Kind::kLogit || c < link_.b()) {
        throw DomainError("censoring time outside the domain of the link");
      }
    }
  }
}

RegressionData CensoredData::naive() const { return RegressionData(x_, observed_, link_); }

CensoringCdf censoring_km(const CensoredData& data) {
  std::vector<double> t(data.z().data(), data.z().data() + data.n());
  std::vector<int> ev(data.delta().size());
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = 1 - data.delta()[i];
  const SurvivalCurve s = kaplan_meier(t, ev);
  return [s](double u) { return 1.0 - s(u); };
}

CensoringCdf censoring_known(const ParametricDistribution& c, const Link& link) {
  return [c, link](double u) {
    if (u == kInf) return 1.0;
    if (u == -kInf) return 0.0;
    double y;
    try {
      y = link.inverse(u);
    } catch (const DomainError&) {
      return 0.0;  // below the range of h
    }
    return c.cdf(y);
  };
}

// ------------------------------------------------------------- Powell

double powell_objective(const CensoredData& data, double p, const Eigen::VectorXd& b) {
  const Eigen::VectorXd fit = data.x() * b;
  double s = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) s += rho(p, data.z()[i] - std::min(fit[i], data.z_censor()[i]));
  return s;
}

namespace {

// Exact minimizer of the Powell objective along coordinate j: the objective is
// piecewise linear in b_j with kinks where x_i'b meets z_i or h(C_i).
double coordinate_minimum(const CensoredData& data, double p, const Eigen::VectorXd& b, Eigen::Index j) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd rest = data.x() * b - data.x().col(j) * b[j];
  const auto& z = data.z();
  const auto& zc = data.z_censor();
  auto term_slope = [&](Eigen::Index i, double t) {
    const double c = data.x()(i, j);
    const double u = rest[i] + c * t;
    if (u >= zc[i]) return 0.0;
    return c * (u < z[i] ? -p : 1.0 - p);
  };
  struct Kink {
    double t;
    Eigen::Index i;
  };
  std::vector<Kink> kinks;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = data.x()(i, j);
    if (c == 0.0) continue;
    kinks.push_back({(z[i] - rest[i]) / c, i});
    if (zc[i] < kInf) kinks.push_back({(zc[i] - rest[i]) / c, i});
  }
  if (kinks.empty()) return b[j];
  std::sort(kinks.begin(), kinks.end(), [](const Kink& a, const Kink& b) { return a.t < b.t; });
  auto value_at = [&](double t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += rho(p, z[i] - std::min(rest[i] + data.x()(i, j) * t, zc[i]));
    return s;
  };
  std::vector<double> slopes(static_cast<std::size_t>(n), 0.0);
  double slope = 0.0;
  const double t0 = kinks.front().t;
  std::size_t k = 0;
  double f = value_at(t0);
  double best_f = f;
  double best_t = t0;
  // Slopes on the first interval.
  std::size_t e0 = 0;
  while (e0 < kinks.size() && kinks[e0].t == t0) ++e0;
  const double probe0 = e0 < kinks.size() ? 0.5 * (t0 + kinks[e0].t) : t0 + 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    slopes[static_cast<std::size_t>(i)] = term_slope(i, probe0);
    slope += slopes[static_cast<std::size_t>(i)];
  }
  while (k < kinks.size()) {
    const double t = kinks[k].t;
    std::size_t e = k;
    while (e < kinks.size() && kinks[e].t == t) ++e;
    if (k > 0) {
      const double next = e < kinks.size() ? kinks[e].t : t + 1.0;
      const double probe = 0.5 * (t + next);
      for (std::size_t m = k; m < e; ++m) {
        const auto i = static_cast<std::size_t>(kinks[m].i);
        const double s = term_slope(kinks[m].i, probe);
        slope += s - slopes[i];
        slopes[i] = s;
      }
    }
    if (e >= kinks.size()) break;
    f += slope * (kinks[e].t - t);
    if (f < best_f) {
      best_f = f;
      best_t = kinks[e].t;
    }
    k = e;
  }
  return best_t;
}

Eigen::VectorXd column_scales(const CensoredData& data) {
  const double mz = data.z().mean();
  const double sz = std::sqrt((data.z().array() - mz).square().mean());
  Eigen::VectorXd s(data.q());
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    const double rms = std::sqrt(data.x().col(j).array().square().mean());
    s[j] = (sz > 0.0 ? sz : 1.0) / (rms > 0.0 ? rms : 1.0);
  }
  return s;
}

double powell_local(const CensoredData& data, double p, Eigen::VectorXd& b) {
  double f = powell_objective(data, p, b);
  for (int round = 0; round < 200; ++round) {
    bool improved = false;
    for (Eigen::Index j = 0; j < data.q(); ++j) {
      Eigen::VectorXd trial = b;
      trial[j] = coordinate_minimum(data, p, b, j);
      const double ft = powell_objective(data, p, trial);
      if (ft < f - 1e-12 * (1.0 + std::abs(f))) {
        b = trial;
        f = ft;
        improved = true;
      }
    }
    // Refit on observations whose fitted quantile lies below their censoring point.
    const Eigen::VectorXd fit = data.x() * b;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      if (fit[i] < data.z_censor()[i]) active.push_back(i);
    if (static_cast<Eigen::Index>(active.size()) > data.q()) {
      Eigen::MatrixXd xa(static_cast<Eigen::Index>(active.size()), data.q());
      Eigen::VectorXd za(static_cast<Eigen::Index>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k) {
        xa.row(static_cast<Eigen::Index>(k)) = data.x().row(active[k]);
        za[static_cast<Eigen::Index>(k)] = data.z()[active[k]];
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xa);
      qr.setThreshold(1e-10);
      if (qr.rank() == data.q()) {
        const Eigen::VectorXd trial = solve_rq(xa, za, p).beta;
        const double ft = powell_objective(data, p, trial);
        if (ft < f - 1e-12 * (1.0 + std::abs(f))) {
          b = trial;
          f = ft;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return f;
}

}  // namespace

PowellFit powell_fit(const CensoredData& data, double p, std::uint64_t seed, int restarts) {
  if (!data.censor()) throw ValidationError("Powell's estimator needs the censoring-time column");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  if (restarts < 0) throw ValidationError("restart count must be nonnegative");
  PowellFit out;
  const Eigen::VectorXd naive = fit_rq(data.naive(), p);
  out.naive_objective = powell_objective(data, p, naive);
  out.beta = naive;
  out.objective = powell_local(data, p, out.beta);
  const Eigen::VectorXd scale = column_scales(data);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd b = naive;
    for (Eigen::Index j = 0; j < data.q(); ++j) b[j] += 0.5 * (std::abs(naive[j]) + scale[j]) * nd(rng);
    const double f = powell_local(data, p, b);
    if (f < out.objective - 1e-12 * (1.0 + std::abs(out.objective))) {
      out.objective = f;
      out.beta = b;
    }
  }
  out.restarts = restarts;
  return out;
}

// ------------------------------------------------------------- Lindgren

LindgrenFit lindgren_fit(const CensoredData& data, double p, const CensoringCdf& fc, int max_iter, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  const RegressionData naive = data.naive();
  LindgrenFit out;
  out.beta = fit_rq(naive, p);
  out.levels = Eigen::VectorXd::Constant(data.n(), p);
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    const Eigen::VectorXd fit = data.x() * out.beta;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double f = std::clamp(fc(fit[i]), 0.0, 1.0);
      // Levels at 1 have no finite regression quantile; keep them just below.
      out.levels[i] = std::min(1.0 - (1.0 - p) * (1.0 - f), 1.0 - 1e-10);
    }
    const bool common = (out.levels.array() == out.levels[0]).all();
    const Eigen::VectorXd next =
        common ? fit_rq(naive, out.levels[0]) : solve_rq(data.x(), data.z(), out.levels).beta;
    const double change = (next - out.beta).cwiseAbs().maxCoeff();
    out.beta = next;
    if (change <= tol * (1.0 + out.beta.cwiseAbs().maxCoeff())) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, max_iter);
  return out;
}

LindgrenFit lindgren_fit(const CensoredData& data, double p) { return lindgren_fit(data, p, censoring_km(data)); }

// ------------------------------------------------------------- score

Eigen::VectorXd censored_score(const CensoredData& data, double p, const CensoringCdf& fc, const Eigen::VectorXd& b,
                               double trim) {
  const Eigen::VectorXd fit = data.x() * b;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(data.q());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double surv = 1.0 - fc(fit[i]);
    if (!(surv >= trim)) throw DomainError("censoring survival below the trimming threshold");
    const double up = data.z()[i] <= fit[i] ? 0.0 : 1.0;
    s += data.x().row(i).transpose() * (up / surv - (1.0 - p));
  }
  return s;
}

namespace {

// min ||a + B u||_1 over the box 0 <= u <= 1. The optimum sits at a vertex
// cut out by k independent hyperplanes drawn from the rows {a_j + B_j u = 0}
// and the box faces, so the vertices are enumerated directly.
double min_l1_box(const Eigen::VectorXd& a, const Eigen::MatrixXd& B) {
  const Eigen::Index q = B.rows();
  const Eigen::Index k = B.cols();
  double best = a.lpNorm<1>();
  if (k == 0) return best;
  std::vector<int> choice(static_cast<std::size_t>(k), 0);  // per variable: 0 free, 1 at 0, 2 at 1
  std::vector<Eigen::Index> rows;
  auto consider = [&]() {
    std::vector<Eigen::Index> free;
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (choice[static_cast<std::size_t>(i)] == 0)
        free.push_back(i);
      else
        fixed[i] = choice[static_cast<std::size_t>(i)] == 2 ? 1.0 : 0.0;
    }
    if (free.size() != rows.size()) return;
    Eigen::VectorXd u = fixed;
    if (!free.empty()) {
      const auto m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd sys(m, m);
      Eigen::VectorXd rhs(m);
      const Eigen::VectorXd base = a + B * fixed;
      for (Eigen::Index r = 0; r < m; ++r) {
        rhs[r] = -base[rows[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < m; ++c) sys(r, c) = B(rows[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd sol = lu.solve(rhs);
      for (Eigen::Index c = 0; c < m; ++c) {
        if (sol[c] < -1e-12 || sol[c] > 1.0 + 1e-12) return;
        u[free[static_cast<std::size_t>(c)]] = std::clamp(sol[c], 0.0, 1.0);
      }
    }
    best = std::min(best, (a + B * u).lpNorm<1>());
  };
  // Rows are chosen as an increasing subset; variables cycle through their three states.
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index var) {
    if (var == k) {
      std::function<void(Eigen::Index, std::size_t)> pick = [&](Eigen::Index from, std::size_t need) {
        if (rows.size() == need) {
          consider();
          return;
        }
        for (Eigen::Index j = from; j < q; ++j) {
          rows.push_back(j);
          pick(j + 1, need);
          rows.pop_back();
        }
      };
      const auto nfree = static_cast<std::size_t>(std::count(choice.begin(), choice.end(), 0));
      if (nfree <= static_cast<std::size_t>(q)) pick(0, nfree);
      return;
    }
    for (int c = 0; c < 3; ++c) {
      choice[static_cast<std::size_t>(var)] = c;
      rec(var + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

double censored_score_norm(const CensoredData& data, double p, const CensoringCdf& fc, const Eigen::VectorXd& b,
                           double trim, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd fit = data.x() * b;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(data.q());
  std::vector<Eigen::Index> tied;
  std::vector<double> tied_surv;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double surv = 1.0 - fc(fit[i]);
    if (!(surv >= trim)) throw DomainError("censoring survival below the trimming threshold");
    const double r = data.z()[i] - fit[i];
    if (std::abs(r) <= 1e-9 * (1.0 + std::abs(data.z()[i]))) {
      tied.push_back(i);
      tied_surv.push_back(surv);
    }
    const double up = r <= 0.0 ? 0.0 : 1.0;
    s += data.x().row(i).transpose() * (up / surv - (1.0 - p));
  }
  const Eigen::VectorXd w = weights.size() == 0 ? Eigen::VectorXd::Ones(data.q()) : weights;
  // Tied observations enter with the indicator anywhere in [0, 1].
  if (tied.empty() || tied.size() > kMaxTied) return s.cwiseProduct(w).lpNorm<1>();
  Eigen::MatrixXd B(data.q(), static_cast<Eigen::Index>(tied.size()));
  for (std::size_t t = 0; t < tied.size(); ++t) {
    const double up = data.z()[tied[t]] - fit[tied[t]] <= 0.0 ? 0.0 : 1.0;
    s -= data.x().row(tied[t]).transpose() * (up / tied_surv[t]);
    B.col(static_cast<Eigen::Index>(t)) = data.x().row(tied[t]).transpose() / tied_surv[t];
  }
  return min_l1_box(s.cwiseProduct(w), w.asDiagonal() * B);
}

namespace {

// Nelder-Mead on f from x0 with per-coordinate initial steps.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& step, int max_evals, int& evals) {
  const Eigen::Index d = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
  std::vector<double> val(static_cast<std::size_t>(d + 1));
  for (Eigen::Index j = 0; j < d; ++j) pts[static_cast<std::size_t>(j + 1)][j] += step[j];
  for (std::size_t k = 0; k < pts.size(); ++k) val[k] = f(pts[k]);
  evals = static_cast<int>(pts.size());
  std::vector<std::size_t> idx(pts.size());
  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    {
      std::vector<Eigen::VectorXd> p2;
      std::vector<double> v2;
      for (auto k : idx) {
        p2.push_back(pts[k]);
        v2.push_back(val[k]);
      }
      pts = std::move(p2);
      val = std::move(v2);
    }
    double diameter = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k)
      diameter = std::max(diameter, (pts[k] - pts[0]).cwiseQuotient(step).cwiseAbs().maxCoeff());
    if (diameter < 1e-10) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) centroid += pts[k];
    centroid /= static_cast<double>(d);
    const Eigen::VectorXd& worst = pts.back();
    const Eigen::VectorXd xr = centroid + (centroid - worst);
    const double fr = f(xr);
    ++evals;
    if (fr < val.front()) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts.back() = xe;
        val.back() = fe;
      } else {
        pts.back() = xr;
        val.back() = fr;
      }
      continue;
    }
    if (fr < val[val.size() - 2]) {
      pts.back() = xr;
      val.back() = fr;
      continue;
    }
    const bool outside = fr < val.back();
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
    const double fcv = f(xc);
    ++evals;
    if (fcv < (outside ? fr : val.back())) {
      pts.back() = xc;
      val.back() = fcv;
      continue;
    }
    for (std::size_t k = 1; k < pts.size(); ++k) {
      pts[k] = pts[0] + 0.5 * (pts[k] - pts[0]);
      val[k] = f(pts[k]);
      ++evals;
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (val[k] < val[best]) best = k;
  return pts[best];
}

}  // namespace

ScoreFit score_fit(const CensoredData& data, double p, const CensoringCdf& fc, double trim) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  const Eigen::VectorXd seed = fit_rq(data.naive(), p);
  // Score components are measured per unit root-mean-square of their column,
  // which makes the fit equivariant to column rescaling.
  Eigen::VectorXd colw(data.q());
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    const double rms = std::sqrt(data.x().col(j).array().square().mean());
    colw[j] = rms > 0.0 ? 1.0 / rms : 1.0;
  }
  // Probes that violate the trimming rule are rejected rather than fatal.
  auto norm = [&](const Eigen::VectorXd& b) {
    try {
      return censored_score_norm(data, p, fc, b, trim, colw);
    } catch (const DomainError&) {
      return kInf;
    }
  };
  const double f_seed = norm(seed);
  if (f_seed == kInf) throw DomainError("censoring survival below the trimming threshold at the naive fit");
  const Eigen::VectorXd scale = column_scales(data);
  Eigen::VectorXd step(data.q());
  for (Eigen::Index j = 0; j < data.q(); ++j) step[j] = 0.05 * (std::abs(seed[j]) + scale[j]);
  ScoreFit out;
  const int max_evals = 400 * static_cast<int>(data.q() + 1);
  // Search in step units about the seed so column rescaling leaves the path unchanged.
  auto unit = [&](const Eigen::VectorXd& u) { return norm(seed + step.cwiseProduct(u)); };
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(data.q());
  Eigen::VectorXd b =
      seed + step.cwiseProduct(nelder_mead(unit, Eigen::VectorXd::Zero(data.q()), ones, max_evals, out.evaluations));
  double fb = norm(b);
  if (f_seed <= fb) {
    b = seed;
    fb = f_seed;
  } else {
    // The score is piecewise constant; among equally good points prefer those
    // nearest the seed by bisecting along the segment towards it.
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (norm(b + mid * (seed - b)) <= fb)
        lo = mid;
      else
        hi = mid;
    }
    b = b + lo * (seed - b);
    fb = norm(b);
    out.evaluations += 61;
  }
  out.beta = b;
  out.score_norm = fb;
  return out;
}

ScoreFit score_fit(const CensoredData& data, double p) { return score_fit(data, p, censoring_km(data)); }

}  // namespace lf
