#include "lf/quantile_regression.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/quadrature/gauss.hpp>

#include "lf/quadrature.hpp"

namespace lf {

namespace {

std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad number '" + item + "' in " + std::string(what));
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- links

Link Link::identity() { return Link(Kind::kIdentity, 0.0, 0.0, 1.0); }

Link Link::logit(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw ValidationError("logit link needs a < b");
  return Link(Kind::kLogit, a, b, 0.0);
}

Link Link::log() { return Link(Kind::kLog, 0.0, 0.0, 0.0); }

Link Link::boxcox(double gamma) {
  if (!std::isfinite(gamma)) throw ValidationError("Box-Cox exponent must be finite");
  if (gamma == 0.0) return log();
  return Link(Kind::kBoxCox, 0.0, 0.0, gamma);
}

Link Link::parse(std::string_view spec) {
  std::string s(spec);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "identity" || kind == "id") return identity();
  if (kind == "log") return log();
  if (kind == "logit") {
    const auto v = parse_numbers(rest, "logit bounds");
    if (v.size() != 2) throw ValidationError("logit link needs bounds a,b");
    return logit(v[0], v[1]);
  }
  if (kind == "boxcox") {
    const auto v = parse_numbers(rest, "Box-Cox exponent");
    if (v.size() != 1) throw ValidationError("boxcox link needs one exponent");
    return boxcox(v[0]);
  }
  throw ValidationError("unknown link '" + std::string(spec) + "'");
}

std::string Link::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kLog: return "log";
    case Kind::kLogit: os << "logit:" << a_ << "," << b_; return os.str();
    case Kind::kBoxCox: os << "boxcox:" << gamma_; return os.str();
  }
  return "?";
}

bool Link::in_domain(double y) const {
  if (!std::isfinite(y)) return false;
  switch (kind_) {
    case Kind::kIdentity: return true;
    case Kind::kLogit: return y > a_ && y < b_;
    case Kind::kLog:
    case Kind::kBoxCox: return y > 0.0;
  }
  return false;
}

double Link::forward(double y) const {
  if (!in_domain(y)) throw DomainError("response outside the domain of the " + name() + " link");
  switch (kind_) {
    case Kind::kIdentity: return y;
    case Kind::kLogit: return std::log((y - a_) / (b_ - y));
    case Kind::kLog: return std::log(y);
    case Kind::kBoxCox: return std::expm1(gamma_ * std::log(y)) / gamma_;
  }
  return y;
}

double Link::derivative(double y) const {
  if (!in_domain(y)) throw DomainError("argument outside the domain of the " + name() + " link");
  switch (kind_) {
    case Kind::kIdentity: return 1.0;
    case Kind::kLogit: return (b_ - a_) / ((y - a_) * (b_ - y));
    case Kind::kLog: return 1.0 / y;
    case Kind::kBoxCox: return std::pow(y, gamma_ - 1.0);
  }
  return 1.0;
}

double Link::inverse(double z) const {
  if (!std::isfinite(z)) throw DomainError("non-finite argument to the inverse " + name() + " link");
  switch (kind_) {
    case Kind::kIdentity: return z;
    case Kind::kLogit:
      // Written so that each half keeps relative accuracy near its bound.
      return z <= 0.0 ? a_ + (b_ - a_) / (1.0 + std::exp(-z)) : b_ - (b_ - a_) / (1.0 + std::exp(z));
    case Kind::kLog: return std::exp(z);
    case Kind::kBoxCox: {
      const double t = gamma_ * z;
      if (!(t > -1.0)) throw DomainError("argument outside the range of the " + name() + " link");
      return std::exp(std::log1p(t) / gamma_);
    }
  }
  return z;
}

// ------------------------------------------------------------- data

RegressionData::RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y, Link link)
    : x_(std::move(x)), y_(std::move(y)), link_(link) {
  if (x_.rows() != y_.size()) throw ValidationError("design and response lengths differ");
  if (x_.cols() < 1) throw ValidationError("design needs at least one column");
  if (x_.rows() <= x_.cols()) throw ValidationError("need more observations than covariates");
  if (!x_.allFinite()) throw ValidationError("design contains non-finite values");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_);
  qr.setThreshold(1e-10);
  if (qr.rank() < x_.cols()) throw RankDeficient("design matrix is rank deficient");
  z_.resize(y_.size());
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (!link_.in_domain(y_[i])) throw DomainError("response outside the domain of the " + link_.name() + " link");
    z_[i] = link_.forward(y_[i]);
  }
}

bool RegressionData::intercept_only() const { return x_.cols() == 1 && (x_.array() == 1.0).all(); }

double RegressionData::leverage_ratio() const {
  return x_.rowwise().norm().maxCoeff() / std::sqrt(static_cast<double>(x_.rows()));
}

double check_loss(double p, double u) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("check loss needs 0 < p < 1");
  return u < 0.0 ? (p - 1.0) * u : p * u;
}

// ------------------------------------------------------------- LP solver

namespace {

double rq_objective(const Eigen::VectorXd& r, const Eigen::VectorXd& tau) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += r[i] < 0.0 ? (tau[i] - 1.0) * r[i] : tau[i] * r[i];
  return s;
}

double step_bound(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double b = 1e20;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) b = std::min(b, -v[i] / dv[i]);
  return b;
}

// Frisch-Newton interior point on the dual: max c'x s.t. X'x = X'(1 - tau),
// 0 <= x <= 1, with c = -y. Returns the primal coefficients.
Eigen::VectorXd frisch_newton(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau,
                              int& iterations) {
  const Eigen::Index n = x.rows();
  const double beta = 0.99995;
  const int max_it = 100;
  const Eigen::VectorXd c = -y;
  Eigen::VectorXd xv = Eigen::VectorXd::Ones(n) - tau;
  Eigen::VectorXd dual = x.colPivHouseholderQr().solve(c);
  Eigen::VectorXd r = c - x * dual;
  Eigen::VectorXd z = r.cwiseMax(0.0);
  Eigen::VectorXd w = z - r;
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n) - xv;
  double gap = z.dot(xv) + w.dot(s);
  iterations = 0;
  while (iterations < max_it) {
    const double obj = rq_objective(y + x * dual, tau);
    if (gap <= 1e-9 * (1.0 + std::abs(obj))) break;
    ++iterations;
    const Eigen::VectorXd q = (z.cwiseQuotient(xv) + w.cwiseQuotient(s)).cwiseInverse();
    r = z - w;
    const Eigen::MatrixXd aqa = x.transpose() * q.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> chol(aqa);
    if (chol.info() != Eigen::Success) break;
    Eigen::VectorXd rhs = x.transpose() * q.cwiseProduct(r);
    Eigen::VectorXd dy = chol.solve(rhs);
    Eigen::VectorXd dx = q.cwiseProduct(x * dy - r);
    Eigen::VectorXd ds = -dx;
    Eigen::VectorXd dz = -z.cwiseProduct(dx.cwiseQuotient(xv) + Eigen::VectorXd::Ones(n));
    Eigen::VectorXd dw = -w.cwiseProduct(ds.cwiseQuotient(s) + Eigen::VectorXd::Ones(n));
    double fp = std::min(beta * std::min(step_bound(xv, dx), step_bound(s, ds)), 1.0);
    double fd = std::min(beta * std::min(step_bound(w, dw), step_bound(z, dz)), 1.0);
    if (std::min(fp, fd) < 1.0) {
      double mu = z.dot(xv) + w.dot(s);
      const double g = (z + fd * dz).dot(xv + fp * dx) + (w + fd * dw).dot(s + fp * ds);
      mu = mu * std::pow(g / mu, 3) / (2.0 * static_cast<double>(n));
      const Eigen::VectorXd dxdz = dx.cwiseProduct(dz);
      const Eigen::VectorXd dsdw = ds.cwiseProduct(dw);
      const Eigen::VectorXd xinv = xv.cwiseInverse();
      const Eigen::VectorXd sinv = s.cwiseInverse();
      const Eigen::VectorXd xi = mu * (xinv - sinv);
      rhs += x.transpose() * q.cwiseProduct(dxdz - dsdw - xi);
      dy = chol.solve(rhs);
      dx = q.cwiseProduct(x * dy + xi - r - dxdz + dsdw);
      ds = -dx;
      dz = mu * xinv - z - xinv.cwiseProduct(z).cwiseProduct(dx) - dxdz;
      dw = mu * sinv - w - sinv.cwiseProduct(w).cwiseProduct(ds) - dsdw;
      fp = std::min(beta * std::min(step_bound(xv, dx), step_bound(s, ds)), 1.0);
      fd = std::min(beta * std::min(step_bound(w, dw), step_bound(z, dz)), 1.0);
    }
    xv += fp * dx;
    s += fp * ds;
    dual += fd * dy;
    w += fd * dw;
    z += fd * dz;
    gap = z.dot(xv) + w.dot(s);
    if (!std::isfinite(gap)) break;
  }
  return -dual;
}

// Picks q linearly independent observations with the smallest |residual|.
std::vector<Eigen::Index> initial_basis(const Eigen::MatrixXd& x, const Eigen::VectorXd& r) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(r[a]) < std::abs(r[b]); });
  std::vector<Eigen::Index> basis;
  Eigen::MatrixXd ortho(q, q);
  for (Eigen::Index i : order) {
    Eigen::VectorXd v = x.row(i).transpose();
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < basis.size(); ++k) v -= ortho.col(static_cast<Eigen::Index>(k)).dot(v) *
                                                           ortho.col(static_cast<Eigen::Index>(k));
    const double norm = v.norm();
    if (norm <= 1e-8 * norm0) continue;
    ortho.col(static_cast<Eigen::Index>(basis.size())) = v / norm;
    basis.push_back(i);
    if (static_cast<Eigen::Index>(basis.size()) == q) return basis;
  }
  throw RankDeficient("no nonsingular basis among the observations");
}

struct Crossing {
  double t;
  double slope;
  Eigen::Index i;
};

// Exact simplex descent over vertices (observation bases) of the check-loss
// problem, starting from `basis`.
void simplex_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau,
                     std::vector<Eigen::Index>& basis, Eigen::VectorXd& beta, int& pivots) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  const double yscale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double ztol = 1e-11 * yscale;
  const double dtol = 1e-11 * std::max(1.0, x.cwiseAbs().sum() / static_cast<double>(q));
  const int max_pivots = 50 * static_cast<int>(n) + 1000;
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd xh(q, q);
  Eigen::VectorXd yh(q);
  std::vector<Crossing> cross;
  for (pivots = 0;; ++pivots) {
    if (pivots > max_pivots) throw ConvergenceError("simplex descent exceeded its pivot budget");
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (Eigen::Index j = 0; j < q; ++j) {
      xh.row(j) = x.row(basis[static_cast<std::size_t>(j)]);
      yh[j] = y[basis[static_cast<std::size_t>(j)]];
      in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(j)])] = 1;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xh);
    if (!lu.isInvertible()) throw RankDeficient("singular simplex basis");
    beta = lu.solve(yh);
    Eigen::VectorXd r = y - x * beta;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) {
        r[i] = 0.0;
        continue;
      }
      if (std::abs(r[i]) <= ztol) r[i] = 0.0;
      const double psi = r[i] < 0.0 ? tau[i] - 1.0 : tau[i];
      g += psi * x.row(i).transpose();
    }
    const Eigen::VectorXd v = lu.transpose().solve(g);
    const Eigen::MatrixXd xhinv = lu.inverse();

    // Steepest edge among the 2q directions, counting degenerate crossings at t = 0.
    double best = -dtol;
    Eigen::Index best_j = -1;
    int best_sigma = 0;
    Eigen::VectorXd best_a;
    for (Eigen::Index j = 0; j < q; ++j) {
      const double tj = tau[basis[static_cast<std::size_t>(j)]];
      const Eigen::VectorXd a = x * xhinv.col(j);
      for (int sigma : {1, -1}) {
        double slope = sigma > 0 ? (1.0 - tj) - v[j] : tj + v[j];
        if (slope >= best) continue;
        for (Eigen::Index i = 0; i < n; ++i)
          if (!in_basis[static_cast<std::size_t>(i)] && r[i] == 0.0 && sigma * a[i] > 0.0) slope += sigma * a[i];
        if (slope < best) {
          best = slope;
          best_j = j;
          best_sigma = sigma;
          best_a = a;
        }
      }
    }
    if (best_j < 0) return;

    // Ratio test: walk the breakpoints until the slope turns nonnegative.
    cross.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      const double a = best_sigma * best_a[i];
      if (a == 0.0) continue;
      if (r[i] == 0.0) {
        // Degenerate zero moving positive: its kink sits at t = 0 and is already behind.
        if (a < 0.0) continue;
        cross.push_back({0.0, 0.0, i});
        continue;
      }
      const double t = r[i] / a;
      if (t > 0.0) cross.push_back({t, std::abs(a), i});
    }
    std::sort(cross.begin(), cross.end(), [](const Crossing& a, const Crossing& b) {
      return a.t < b.t || (a.t == b.t && a.i < b.i);
    });
    double slope = best;
    Eigen::Index enter = -1;
    for (const auto& c : cross) {
      slope += c.slope;
      if (slope >= 0.0) {
        enter = c.i;
        break;
      }
    }
    if (enter < 0) {
      // Degenerate zeros with positive a were already counted; any of them can enter.
      for (const auto& c : cross)
        if (c.t == 0.0) {
          enter = c.i;
          break;
        }
      if (enter < 0) throw ConvergenceError("check-loss objective unbounded along a simplex edge");
    }
    basis[static_cast<std::size_t>(best_j)] = enter;
  }
}

}  // namespace

double rq_optimality_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau,
                               const Eigen::VectorXd& beta, double zero_tol) {
  const Eigen::VectorXd r = y - x * beta;
  const Eigen::Index q = x.cols();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd hi = Eigen::VectorXd::Zero(q);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (std::abs(r[i]) <= zero_tol) {
      for (Eigen::Index j = 0; j < q; ++j) {
        const double a = x(i, j) * (tau[i] - 1.0);
        const double b = x(i, j) * tau[i];
        lo[j] += std::min(a, b);
        hi[j] += std::max(a, b);
      }
    } else {
      s += (r[i] < 0.0 ? tau[i] - 1.0 : tau[i]) * x.row(i).transpose();
    }
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < q; ++j) worst = std::max(worst, std::max(lo[j] + s[j], -s[j] - hi[j]));
  return worst;
}

RqSolution solve_rq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& tau) {
  if (x.rows() != y.size() || tau.size() != y.size()) throw ValidationError("solve_rq: dimension mismatch");
  if (x.rows() < x.cols()) throw ValidationError("solve_rq: fewer observations than coefficients");
  for (Eigen::Index i = 0; i < tau.size(); ++i)
    if (!(tau[i] > 0.0 && tau[i] < 1.0)) throw ValidationError("quantile levels must lie in (0, 1)");
  RqSolution out;
  const Eigen::VectorXd b_ip = frisch_newton(x, y, tau, out.ip_iterations);
  out.basis = initial_basis(x, y - x * b_ip);
  simplex_descent(x, y, tau, out.basis, out.beta, out.pivots);
  const Eigen::VectorXd r = y - x * out.beta;
  out.objective = rq_objective(r, tau);
  const double ztol = 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * std::max(1.0, x.cwiseAbs().sum());
  if (rq_optimality_violation(x, y, tau, out.beta, ztol) > tol)
    throw ConvergenceError("regression quantile fails the subgradient optimality check");
  return out;
}

RqSolution solve_rq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau) {
  return solve_rq(x, y, Eigen::VectorXd::Constant(y.size(), tau));
}

RqSolution fit_rq_detail(const RegressionData& data, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("fit_rq needs 0 < p < 1");
  if (data.intercept_only()) {
    const auto n = static_cast<std::size_t>(data.n());
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const Eigen::VectorXd& z = data.z();
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return z[a] < z[b]; });
    const Eigen::Index k = idx[rank_index(n, Prob::of(p)) - 1];
    RqSolution out;
    out.beta = Eigen::VectorXd::Constant(1, z[k]);
    out.basis = {k};
    Eigen::VectorXd tau = Eigen::VectorXd::Constant(data.n(), p);
    out.objective = rq_objective(z - Eigen::VectorXd::Constant(data.n(), z[k]), tau);
    return out;
  }
  return solve_rq(data.x(), data.z(), p);
}

Eigen::VectorXd fit_rq(const RegressionData& data, double p) { return fit_rq_detail(data, p).beta; }

// ------------------------------------------------------------- splines

NaturalSpline::NaturalSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t k = x_.size();
  if (k < 2 || y_.size() != k) throw ValidationError("spline needs at least two points");
  for (std::size_t i = 1; i < k; ++i)
    if (!(x_[i] > x_[i - 1])) throw ValidationError("spline abscissae must increase strictly");
  m_.assign(k, 0.0);
  if (k == 2) return;
  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  const std::size_t m = k - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double lower = x_[i + 1] - x_[i];
    const double f = lower / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  std::vector<double> sol(m);
  sol[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
  for (std::size_t i = 0; i < m; ++i) m_[i + 1] = sol[i];
}

double NaturalSpline::operator()(double t) const {
  const double span = x_.back() - x_.front();
  const double slack = 1e-12 * std::max(1.0, span);
  if (!(t >= x_.front() - slack && t <= x_.back() + slack))
    throw SupportOutsideGrid("evaluation point outside the spline's grid");
  t = std::clamp(t, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i >= x_.size() - 1) i = x_.size() - 2;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

BetaGrid::BetaGrid(std::vector<double> grid, Eigen::MatrixXd coefficients)
    : grid_(std::move(grid)), coef_(std::move(coefficients)) {
  if (grid_.size() < 2) throw ValidationError("coefficient grid needs at least two points");
  if (static_cast<Eigen::Index>(grid_.size()) != coef_.rows())
    throw ValidationError("grid and coefficient rows differ");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0 && grid_[i] < 1.0)) throw ValidationError("grid points must lie in (0, 1)");
    if (i > 0 && !(grid_[i] > grid_[i - 1])) throw ValidationError("grid must increase strictly");
  }
  if (!coef_.allFinite()) throw ValidationError("non-finite coefficients in grid");
  for (Eigen::Index j = 0; j < coef_.cols(); ++j) {
    std::vector<double> col(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) col[k] = coef_(static_cast<Eigen::Index>(k), j);
    splines_.emplace_back(grid_, std::move(col));
  }
}

std::vector<double> BetaGrid::default_grid(int k) {
  if (k < 2) throw ValidationError("grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] = (i + 0.5) / k;
  return g;
}

Eigen::VectorXd BetaGrid::operator()(double p) const {
  Eigen::VectorXd out(q());
  for (Eigen::Index j = 0; j < q(); ++j) out[j] = splines_[static_cast<std::size_t>(j)](p);
  return out;
}

BetaCurve BetaGrid::curve() const {
  BetaCurve c;
  auto self = std::make_shared<BetaGrid>(*this);
  c.eval = [self](Prob p) { return (*self)(p.p); };
  c.lo = lo();
  c.hi = hi();
  c.q = q();
  c.knots.assign(grid_.begin() + 1, grid_.end() - 1);
  return c;
}

BetaGrid fit_rq_grid(const RegressionData& data, const std::vector<double>& grid, unsigned threads) {
  if (grid.empty()) throw ValidationError("empty grid");
  const std::size_t k = grid.size();
  Eigen::MatrixXd coef(static_cast<Eigen::Index>(k), data.q());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(k));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(k);
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < k;) {
      try {
        coef.row(static_cast<Eigen::Index>(i)) = fit_rq(data, grid[i]).transpose();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return BetaGrid(grid, std::move(coef));
}

// ------------------------------------------------------------- parametric

Eigen::VectorXd QuantileBasis::beta(const Eigen::MatrixXd& psi_value, Prob p) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(psi_value.rows());
  for (Eigen::Index k = 0; k < r(); ++k) out += psi_value.col(k) * functions[static_cast<std::size_t>(k)](p);
  return out;
}

QuantileBasis make_basis(std::string_view spec, Eigen::Index q) {
  if (q < 1) throw ValidationError("basis needs a design width of at least one");
  std::string s(spec);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  QuantileBasis b;
  b.name = s;
  b.psi = Eigen::MatrixXd::Zero(q, 2);
  b.free = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(q, 2, false);
  auto one = [](Prob) { return 1.0; };
  if (kind == "aft" || kind == "hetero") {
    const ParametricDistribution f0 = ParametricDistribution::parse(rest.empty() ? "normal:0,1" : rest);
    if (!f0.continuous()) throw ValidationError("basis reference law must be continuous");
    b.functions.push_back(one);
    b.free.col(0).setConstant(true);
    if (kind == "aft") {
      b.functions.push_back([f0](Prob p) { return f0.quantile(p); });
      b.psi(0, 1) = 1.0;
      b.free(0, 1) = true;
    } else {
      const double med = f0.quantile(0.5);
      b.functions.push_back([f0, med](Prob p) { return f0.quantile(p) - med; });
      b.psi(0, 1) = 1.0;
      b.free.col(1).setConstant(true);
    }
    return b;
  }
  if (kind == "cox" || kind == "po" || kind == "logpower") {
    if (kind == "cox") {
      if (!rest.empty()) throw ValidationError("cox basis takes no parameters");
      b.functions.push_back([](Prob p) { return std::log(-(p.p <= 0.5 ? std::log1p(-p.p) : std::log(p.c))); });
    } else if (kind == "po") {
      if (!rest.empty()) throw ValidationError("po basis takes no parameters");
      b.functions.push_back([](Prob p) { return std::log(p.p) - std::log(p.c); });
    } else {
      const auto v = parse_numbers(rest, "log power exponent");
      if (v.size() != 1 || !(v[0] > 0.0) || !std::isfinite(v[0]))
        throw ValidationError("log power basis needs one exponent gamma > 0");
      const double gamma = v[0];
      b.functions.push_back([gamma](Prob p) {
        const double lc = p.p <= 0.5 ? std::log1p(-p.p) : std::log(p.c);
        return std::log(std::expm1(-gamma * lc) / gamma);
      });
    }
    b.psi(0, 0) = 1.0;
    b.functions.push_back([](Prob) { return -1.0; });
    for (Eigen::Index j = 1; j < q; ++j) b.free(j, 1) = true;
    return b;
  }
  throw ValidationError("unknown basis '" + std::string(spec) + "'");
}

ParametricFit fit_parametric(const RegressionData& data, const QuantileBasis& basis, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw ValidationError("truncation delta must lie in (0, 0.5)");
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  const Eigen::Index r = basis.r();
  if (basis.psi.rows() != q || basis.psi.cols() != r || basis.free.rows() != q || basis.free.cols() != r)
    throw ValidationError("basis coefficient shape does not match the design");

  using Rule = boost::math::quadrature::gauss<double, 64>;
  std::vector<double> nodes;
  std::vector<double> weights;
  const double half = 0.5 - delta;
  for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
    const double a = Rule::abscissa()[k];
    const double w = Rule::weights()[k] * half;
    nodes.push_back(0.5 - half * a);
    weights.push_back(w);
    if (a != 0.0) {
      nodes.push_back(0.5 + half * a);
      weights.push_back(w);
    }
  }
  const std::size_t m = nodes.size();
  Eigen::MatrixXd bvals(r, static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k)
    for (Eigen::Index l = 0; l < r; ++l) {
      const double v = basis.functions[static_cast<std::size_t>(l)](Prob::of(nodes[k]));
      if (!std::isfinite(v)) throw DomainError("basis function is not finite inside (delta, 1 - delta)");
      bvals(l, static_cast<Eigen::Index>(k)) = v;
    }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> free_idx;
  for (Eigen::Index l = 0; l < r; ++l)
    for (Eigen::Index j = 0; j < q; ++j)
      if (basis.free(j, l)) free_idx.emplace_back(j, l);
  const auto d = static_cast<Eigen::Index>(free_idx.size());
  const Eigen::Index rows = n * static_cast<Eigen::Index>(m);

  // The discretized objective is a check loss with one pseudo-observation per
  // (i, node): weight w_k, level p_k, response z_i minus the fixed part.
  Eigen::MatrixXd xs(rows, d);
  Eigen::VectorXd ys(rows);
  Eigen::VectorXd taus(rows);
  Eigen::MatrixXd fixed_psi = basis.psi;
  for (const auto& [j, l] : free_idx) fixed_psi(j, l) = 0.0;
  const Eigen::MatrixXd fixed_fit = data.x() * fixed_psi * bvals;  // n x m
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const Eigen::Index row = i * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(k);
      const double w = weights[k];
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto [j, l] = free_idx[static_cast<std::size_t>(c)];
        xs(row, c) = w * data.x()(i, j) * bvals(l, static_cast<Eigen::Index>(k));
      }
      ys[row] = w * (data.z()[i] - fixed_fit(i, static_cast<Eigen::Index>(k)));
      taus[row] = nodes[k];
    }

  ParametricFit out;
  out.basis = basis;
  out.psi = basis.psi;
  if (d > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < d) throw RankDeficient("free basis coefficients are not identified by the design");
    const RqSolution sol = solve_rq(xs, ys, taus);
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto [j, l] = free_idx[static_cast<std::size_t>(c)];
      out.psi(j, l) = sol.beta[c];
    }
    out.objective = sol.objective;
  } else {
    out.objective = rq_objective(ys, taus);
  }
  auto shared = std::make_shared<QuantileBasis>(basis);
  const Eigen::MatrixXd psi = out.psi;
  out.curve.eval = [shared, psi](Prob p) { return shared->beta(psi, p); };
  out.curve.lo = 0.0;
  out.curve.hi = 1.0;
  out.curve.q = q;
  return out;
}

// ------------------------------------------------------- conditional functionals

namespace {

void check_support(const BetaCurve& beta, const WeightMeasure& g) {
  const double slack = 1e-12;
  auto inside = [&](double p) { return p >= beta.lo - slack && p <= beta.hi + slack; };
  if (g.has_density() && !(inside(g.support_lo()) && inside(g.support_hi())))
    throw SupportOutsideGrid("weight support extends beyond the coefficient grid");
  for (const auto& m : g.point_masses())
    if (!inside(m.at)) throw SupportOutsideGrid("weight mass lies outside the coefficient grid");
}

std::vector<double> merged_breaks(const BetaCurve& beta, const WeightMeasure& g) {
  std::vector<double> br = g.breaks();
  for (double k : beta.knots)
    if (k > g.support_lo() && k < g.support_hi()) br.push_back(k);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

Prob clamp_to(const BetaCurve& beta, Prob p) {
  if (p.p < beta.lo) return Prob::of(beta.lo);
  if (p.p > beta.hi) return Prob::of(beta.hi);
  return p;
}

}  // namespace

CondLinear cond_lfunctional_linear(const BetaCurve& beta, const WeightMeasure& g) {
  check_support(beta, g);
  CondLinear out;
  out.b = Eigen::VectorXd::Zero(beta.q);
  for (const auto& m : g.point_masses()) out.b += m.weight * beta(clamp_to(beta, Prob::of(m.at)));
  if (g.has_density()) {
    const auto br = merged_breaks(beta, g);
    out.b += quad::integrate_prob(
                 [&](Prob p) -> Eigen::VectorXd {
                   const double w = g.density_at(p);
                   if (w == 0.0) return Eigen::VectorXd::Zero(beta.q);
                   return beta(clamp_to(beta, p)) * w;
                 },
                 g.support_lo(), g.support_hi(), br)
                 .value;
  }
  return out;
}

double CondRatio::operator()(const Eigen::VectorXd& x) const {
  const double den = denominator(x);
  if (den == 0.0 || !std::isfinite(den)) throw ZeroDenominator("conditional ratio has a zero denominator");
  return numerator(x) / den;
}

CondRatio cond_ratio_linear(const BetaCurve& beta, const WeightMeasure& g1, const WeightMeasure& g2) {
  return CondRatio{cond_lfunctional_linear(beta, g1), cond_lfunctional_linear(beta, g2)};
}

double cond_lfunctional_link(const BetaCurve& beta, const WeightMeasure& g, const Link& link,
                             const Eigen::VectorXd& x) {
  check_support(beta, g);
  if (x.size() != beta.q) throw ValidationError("covariate vector has the wrong length");
  if (link.kind() == Link::Kind::kIdentity) return cond_lfunctional_linear(beta, g)(x);
  auto path = [&](Prob p) { return link.inverse(x.dot(beta(clamp_to(beta, p)))); };
  double out = 0.0;
  for (const auto& m : g.point_masses()) out += m.weight * path(Prob::of(m.at));
  if (g.has_density()) {
    const auto br = merged_breaks(beta, g);
    out += quad::integrate_prob(
               [&](Prob p) {
                 const double w = g.density_at(p);
                 return w == 0.0 ? 0.0 : path(p) * w;
               },
               g.support_lo(), g.support_hi(), br)
               .value;
  }
  return out;
}

double cond_ratio_link(const BetaCurve& beta, const WeightMeasure& g1, const WeightMeasure& g2, const Link& link,
                       const Eigen::VectorXd& x) {
  if (link.kind() == Link::Kind::kIdentity) return cond_ratio_linear(beta, g1, g2)(x);
  const double den = cond_lfunctional_link(beta, g2, link, x);
  if (den == 0.0 || !std::isfinite(den)) throw ZeroDenominator("conditional ratio has a zero denominator");
  return cond_lfunctional_link(beta, g1, link, x) / den;
}

WeightMeasure effective_weight(const WeightMeasure& g, const Link& link, const Eigen::VectorXd& x,
                               const BetaCurve& beta) {
  check_support(beta, g);
  if (x.size() != beta.q) throw ValidationError("covariate vector has the wrong length");
  auto factor = [link, x, beta](Prob p) {
    const double y = link.inverse(x.dot(beta(clamp_to(beta, p))));
    const double d = link.in_domain(y) ? link.derivative(y) : 0.0;
    if (!(d >= 1e-12) || !std::isfinite(d)) throw NumericalError("link derivative underflow along the path");
    return 1.0 / d;
  };
  WeightMeasure out;
  for (const auto& c : g.components()) {
    auto dens = c.density;
    out = out.plus(WeightMeasure::density([dens, factor](Prob p) {
                     const double v = dens(p);
                     return v == 0.0 ? 0.0 : v * factor(p);
                   },
                                          c.lo, c.hi, c.breaks));
  }
  std::vector<PointMass> masses;
  for (const auto& m : g.point_masses()) masses.push_back({m.at, m.weight * factor(Prob::of(m.at))});
  if (!masses.empty()) out = out.plus(WeightMeasure::masses(std::move(masses)));
  out.label = g.label + "@" + link.name();
  return out;
}

// ------------------------------------------------------------- covariance

CovKernel reg_cov(const RegressionData& data, const RegCovSpec& spec) {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  const Eigen::MatrixXd x = data.x();
  const Eigen::MatrixXd a = x.transpose() * x / static_cast<double>(n);
  const int dim = static_cast<int>(q);
  auto inverse_of = [](const Eigen::MatrixXd& d) -> Eigen::MatrixXd {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw NumericalError("sparsity matrix D(p) is singular");
    return lu.inverse();
  };
  switch (spec.mode) {
    case RegCovMode::kHomoscedastic: {
      if (!spec.f0) throw ValidationError("homoscedastic kernel needs the error law");
      const ParametricDistribution f0 = *spec.f0;
      if (!f0.continuous()) throw ValidationError("homoscedastic kernel needs a continuous error law");
      const Eigen::MatrixXd ainv = inverse_of(a);
      return CovKernel::bridge(
          [f0, q](Prob p) -> Eigen::MatrixXd {
            const double f = f0.density(f0.quantile(p));
            if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("error density vanishes at a required quantile");
            return Eigen::MatrixXd::Identity(q, q) / f;
          },
          ainv, "homoscedastic", dim);
    }
    case RegCovMode::kTrueDensity: {
      if (!spec.density) throw ValidationError("true-density kernel needs conditional densities");
      auto dens = spec.density;
      return CovKernel::bridge(
          [x, n, dens, inverse_of](Prob p) -> Eigen::MatrixXd {
            Eigen::VectorXd f(n);
            for (Eigen::Index i = 0; i < n; ++i) f[i] = dens(i, p);
            return inverse_of(x.transpose() * f.asDiagonal() * x / static_cast<double>(n));
          },
          a, "nonparametric-true", dim);
    }
    case RegCovMode::kEstimated: {
      if (!spec.grid) throw ValidationError("estimated kernel needs a fitted coefficient grid");
      const BetaGrid grid = *spec.grid;
      if (grid.q() != q) throw ValidationError("coefficient grid width does not match the design");
      const double hb = std::pow(static_cast<double>(n), -1.0 / 3.0);
      return CovKernel::bridge(
          [x, n, grid, hb, inverse_of](Prob p) -> Eigen::MatrixXd {
            // Symmetric window shrunk to stay inside the grid span.
            const double lo = std::max(grid.lo(), p.p - hb);
            const double hi = std::min(grid.hi(), p.p + hb);
            if (!(hi > lo)) throw SupportOutsideGrid("no room for a difference quotient inside the grid");
            const Eigen::VectorXd diff = grid(hi) - grid(lo);
            const Eigen::VectorXd fitted = x * diff;
            Eigen::VectorXd f(n);
            for (Eigen::Index i = 0; i < n; ++i) {
              const double v = fitted[i] > 0.0 ? (hi - lo) / fitted[i] : 0.0;
              f[i] = std::max(v, 1e-8);
            }
            return inverse_of(x.transpose() * f.asDiagonal() * x / static_cast<double>(n));
          },
          a, "nonparametric-estimated", dim);
    }
    case RegCovMode::kParametric: {
      if (!spec.basis) throw ValidationError("parametric kernel needs the basis");
      const QuantileBasis basis = *spec.basis;
      const Eigen::Index r = basis.r();
      if (spec.v.rows() != r * q || spec.v.cols() != r * q)
        throw ValidationError("parametric kernel needs an rq x rq covariance");
      return CovKernel::product(
          [basis, q, r](Prob p) -> Eigen::MatrixXd {
            Eigen::MatrixXd f(q, r * q);
            for (Eigen::Index k = 0; k < r; ++k)
              f.block(0, k * q, q, q) =
                  basis.functions[static_cast<std::size_t>(k)](p) * Eigen::MatrixXd::Identity(q, q);
            return f;
          },
          spec.v, "parametric", dim);
    }
  }
  throw ValidationError("unknown covariance mode");
}

namespace {

using Mat = Eigen::MatrixXd;

// int F(p) u(p) dG_density(p) over [a, b] for a scalar weight u.
template <class U>
Mat factor_integral(const CovKernel& k, const WeightMeasure& g, double a, double b, U u, Eigen::Index rows,
                    Eigen::Index cols) {
  if (!g.has_density() || !(b > a)) return Mat::Zero(rows, cols);
  return quad::integrate_prob(
             [&](Prob p) -> Mat {
               const double w = g.density_at(p);
               if (w == 0.0) return Mat::Zero(rows, cols);
               return k.factor()(p) * (w * u(p));
             },
             a, b, g.breaks())
      .value;
}

// Density-density part for the bridge form:
//   int_{p<s} p c_s F(p) M F(s)' dG1 dG2 + int_{s<p} s c_p F(p) M F(s)' dG1 dG2.
Mat bridge_density_part(const CovKernel& k, const WeightMeasure& g1, const WeightMeasure& g2, Eigen::Index dim,
                        Eigen::Index cols) {
  const Mat& m = k.middle();
  auto lower = [&](const WeightMeasure& g, double s) {
    return factor_integral(k, g, g.support_lo(), std::min(s, g.support_hi()), [](Prob p) { return p.p; }, dim, cols);
  };
  Mat out = Mat::Zero(dim, dim);
  const auto br2 = g2.breaks();
  out += quad::integrate_prob(
             [&](Prob s) -> Mat {
               const double w = g2.density_at(s);
               if (w == 0.0 || s.p <= g1.support_lo()) return Mat::Zero(dim, dim);
               return (lower(g1, s.p) * m * k.factor()(s).transpose()) * (w * s.c);
             },
             g2.support_lo(), g2.support_hi(), br2)
             .value;
  const auto br1 = g1.breaks();
  out += quad::integrate_prob(
             [&](Prob p) -> Mat {
               const double w = g1.density_at(p);
               if (w == 0.0 || p.p <= g2.support_lo()) return Mat::Zero(dim, dim);
               return (k.factor()(p) * m * lower(g2, p.p).transpose()) * (w * p.c);
             },
             g1.support_lo(), g1.support_hi(), br1)
             .value;
  return out;
}

// int R(p, s) dG_density(s) for fixed p (or with arguments swapped).
Mat kernel_against_density(const CovKernel& k, Prob fixed, const WeightMeasure& g, bool fixed_first,
                           Eigen::Index dim) {
  if (!g.has_density()) return Mat::Zero(dim, dim);
  std::vector<double> br = g.breaks();
  if (fixed.p > g.support_lo() && fixed.p < g.support_hi()) br.push_back(fixed.p);
  std::sort(br.begin(), br.end());
  return quad::integrate_prob(
             [&](Prob s) -> Mat {
               const double w = g.density_at(s);
               if (w == 0.0) return Mat::Zero(dim, dim);
               return (fixed_first ? k(fixed, s) : k(s, fixed)) * w;
             },
             g.support_lo(), g.support_hi(), br)
      .value;
}

}  // namespace

Eigen::MatrixXd sigma_cross(const CovKernel& kernel, const WeightMeasure& g1, const WeightMeasure& g2) {
  const Eigen::Index dim = kernel.dim();
  Mat out = Mat::Zero(dim, dim);
  // Mass-mass and mass-density terms.
  for (const auto& a : g1.point_masses())
    for (const auto& b : g2.point_masses()) out += a.weight * b.weight * kernel(Prob::of(a.at), Prob::of(b.at));
  for (const auto& a : g1.point_masses())
    out += a.weight * kernel_against_density(kernel, Prob::of(a.at), g2, true, dim);
  for (const auto& b : g2.point_masses())
    out += b.weight * kernel_against_density(kernel, Prob::of(b.at), g1, false, dim);
  if (!g1.has_density() || !g2.has_density()) return out;

  switch (kernel.form()) {
    case CovKernel::Form::kProduct: {
      const Eigen::Index cols = kernel.middle().rows();
      auto unit = [](Prob) { return 1.0; };
      const Mat l1 = factor_integral(kernel, g1, g1.support_lo(), g1.support_hi(), unit, dim, cols);
      const Mat l2 = factor_integral(kernel, g2, g2.support_lo(), g2.support_hi(), unit, dim, cols);
      out += l1 * kernel.middle() * l2.transpose();
      break;
    }
    case CovKernel::Form::kBridge:
      out += bridge_density_part(kernel, g1, g2, dim, kernel.middle().rows());
      break;
    case CovKernel::Form::kGeneric:
      out += quad::integrate_prob(
                 [&](Prob p) -> Mat {
                   const double w = g1.density_at(p);
                   if (w == 0.0) return Mat::Zero(dim, dim);
                   return kernel_against_density(kernel, p, g2, true, dim) * w;
                 },
                 g1.support_lo(), g1.support_hi(), g1.breaks())
                 .value;
      break;
  }
  return out;
}

Eigen::MatrixXd sigma_b(const CovKernel& kernel, const WeightMeasure& g) {
  const Mat s = sigma_cross(kernel, g, g);
  return 0.5 * (s + s.transpose());
}

double ratio_var(const CovKernel& kernel, const WeightMeasure& g1, const WeightMeasure& g2, const Eigen::VectorXd& b1,
                 const Eigen::VectorXd& b2, const Eigen::VectorXd& x) {
  const double t1 = x.dot(b1);
  const double t2 = x.dot(b2);
  if (t2 == 0.0) throw ZeroDenominator("ratio variance needs a nonzero denominator");
  const double s11 = x.dot(sigma_b(kernel, g1) * x);
  const double s22 = x.dot(sigma_b(kernel, g2) * x);
  const double s12 = x.dot(sigma_cross(kernel, g1, g2) * x);
  return s11 / (t2 * t2) - 2.0 * t1 * s12 / (t2 * t2 * t2) + t1 * t1 * s22 / (t2 * t2 * t2 * t2);
}

double link_var(const CovKernel& kernel, const WeightMeasure& gx, const Eigen::VectorXd& x) {
  return x.dot(sigma_b(kernel, gx) * x);
}

double link_ratio_var(const CovKernel& kernel, const WeightMeasure& gx1, const WeightMeasure& gx2, double t1,
                      double t2, const Eigen::VectorXd& x) {
  if (t2 == 0.0) throw ZeroDenominator("ratio variance needs a nonzero denominator");
  const double s11 = x.dot(sigma_b(kernel, gx1) * x);
  const double s22 = x.dot(sigma_b(kernel, gx2) * x);
  const double s12 = x.dot(sigma_cross(kernel, gx1, gx2) * x);
  return s11 / (t2 * t2) - 2.0 * t1 * s12 / (t2 * t2 * t2) + t1 * t1 * s22 / (t2 * t2 * t2 * t2);
}

}  // namespace lf
