#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "lf/analysis.hpp"
#include "lf/censored.hpp"
#include "lf/lfunctionals.hpp"
#include "lf/lstatistics.hpp"
#include "lf/quadrature.hpp"
#include "lf/quantile_regression.hpp"
#include "lf/table1.hpp"
#include "lf/weights.hpp"

namespace {

using namespace lf;
using cli::Cell;
using cli::Report;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitThreshold = 4;

struct Output {
  std::string out = "-";
  std::string format = "csv";
};

void add_output(CLI::App* sub, Output& o) {
  sub->add_option("--out", o.out, "Output path ('-' for stdout)");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Report& r, const Output& o) { cli::emit(r, cli::parse_format(o.format), o.out); }

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("LF_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("LF_SEED must be a nonnegative integer");
  }
  return flag;
}

void apply_quad_tolerance() {
  if (const char* env = std::getenv("LF_QUAD_TOL")) {
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(env, &used);
      if (used != std::string(env).size()) v = 0.0;
    } catch (const std::exception&) {
      v = 0.0;
    }
    if (!(v > 0.0 && v < 1.0)) throw ValidationError("LF_QUAD_TOL must lie in (0, 1)");
    quad::defaults().rel_tol = v;
    quad::defaults().abs_tol = v;
  }
}

std::vector<std::string> names_list(const std::string& s) {
  if (s.empty()) return {};
  return cli::split(s, ',');
}

std::map<std::string, double> parse_centers(const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const auto& s : specs) {
    const auto kv = cli::split(s, '=');
    if (kv.size() != 2 || kv[0].empty()) throw ValidationError("--center expects COLUMN=VALUE");
    out[kv[0]] = cli::parse_list(kv[1], "--center")[0];
  }
  return out;
}

Link make_link(const std::string& link, const std::string& bounds) {
  if (link == "logit") {
    if (bounds.empty()) throw ValidationError("the logit link needs --bounds a,b");
    return Link::parse("logit:" + bounds);
  }
  if (!bounds.empty() && link.rfind("logit", 0) != 0) throw ValidationError("--bounds applies to the logit link only");
  return Link::parse(link);
}

// "m" or "m:l".
LCode parse_order(const std::string& s) {
  const auto parts = cli::split(s, ':');
  if (parts.empty() || parts.size() > 2) throw ValidationError("bad order '" + s + "'");
  LCode c;
  c.m = static_cast<int>(cli::parse_list(parts[0], "order")[0]);
  if (parts.size() == 2) c.l = static_cast<int>(cli::parse_list(parts[1], "order")[0]);
  if (c.m < 1 || c.l < 0) throw ValidationError("bad order '" + s + "'");
  return c;
}

std::vector<LCode> parse_orders(const std::string& s) {
  std::vector<LCode> out;
  for (const auto& tok : cli::split(s, ',')) out.push_back(parse_order(tok));
  if (out.empty()) throw ValidationError("no orders given");
  return out;
}

std::string order_label(const LCode& c) {
  return c.l == 0 ? std::to_string(c.m) : std::to_string(c.m) + ":" + std::to_string(c.l);
}

int max_order(const std::vector<LCode>& codes) {
  int m = 1;
  for (const auto& c : codes) m = std::max({m, c.m, c.l});
  return m;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// ------------------------------------------------------------ source

struct SourceOpts {
  std::string dist;
  std::string input;
  std::string column = "y";
};

void add_source(CLI::App* sub, SourceOpts& o) {
  sub->add_option("--dist", o.dist, "Distribution spec family:params, e.g. norm:0,1");
  sub->add_option("--input", o.input, "CSV file with a sample (used when --dist is empty)");
  sub->add_option("--column", o.column, "Sample column in --input");
}

QuantileSource make_source(const SourceOpts& o) {
  if (!o.dist.empty() && !o.input.empty()) throw ValidationError("give either --dist or --input, not both");
  if (!o.dist.empty()) return QuantileSource(ParametricDistribution::parse(o.dist));
  if (o.input.empty()) throw ValidationError("--dist or --input is required");
  return QuantileSource(cli::ingest_sample(o.input, o.column));
}

// ------------------------------------------------------------ commands

struct LMomentsOpts {
  SourceOpts src;
  std::string system = "legendre";
  std::string orders = "1,2,3,4,3:2,4:2";
  Output out;
};

int run_lmoments(const LMomentsOpts& o) {
  const auto src = make_source(o.src);
  const auto codes = parse_orders(o.orders);
  const auto sys = make_system(parse_system_spec(o.system), max_order(codes));
  Report r{{"system", "m", "value", "error_estimate"}, {}};
  for (const auto& c : codes) {
    const auto v = c.l == 0 ? lmoment(src, sys, c.m) : ratio_l(src, sys, c.m, c.l);
    r.add({sys.name(), order_label(c), v.value, v.error});
  }
  emit(r, o.out);
  return 0;
}

struct ApproxOpts {
  SourceOpts src;
  std::string system = "legendre";
  int m0 = 4;
  int points = 512;
  Output out;
};

int run_approx(const ApproxOpts& o) {
  if (o.points < 1) throw ValidationError("--points must be positive");
  if (o.m0 < 1) throw ValidationError("--m0 must be positive");
  const auto src = make_source(o.src);
  const auto sys = make_system(parse_system_spec(o.system), o.m0);
  const auto approx = approx_quantile(src, sys, o.m0);
  Report r{{"p", "Q", "Q_appr"}, {}};
  for (int k = 1; k <= o.points; ++k) {
    const double p = (k - 0.5) / o.points;
    r.add({p, src(p), approx(p)});
  }
  emit(r, o.out);
  return 0;
}

struct Table1Opts {
  double tolerance = 0.5;
  Output out;
};

int run_table1(const Table1Opts& o) {
  Report r{{"distribution", "system", "eps", "delta4", "reference", "diff", "note"}, {}};
  bool ok = true;
  for (const auto& res : compute_table1()) {
    const double diff = res.value - res.cell.reference;
    ok = ok && res.within(o.tolerance);
    r.add({res.cell.distribution, to_string(res.cell.system), res.cell.eps, res.value, res.cell.reference, diff,
           res.note});
  }
  emit(r, o.out);
  if (!ok) {
    std::cerr << "lf: table1 cell outside " << o.tolerance << " percentage points\n";
    return kExitThreshold;
  }
  return 0;
}

struct LstatOpts {
  std::string input;
  std::string column = "y";
  std::string measure;
  Output out;
};

int run_lstat(const LstatOpts& o) {
  const auto sample = cli::ingest_sample(o.input, o.column);
  const auto f = parse_measure_spec(o.measure);
  const auto v = evaluate(QuantileSource(sample), f);
  Report r{{"measure", "n", "value"}, {}};
  r.add({o.measure, static_cast<double>(sample.size()), v.value});
  emit(r, o.out);
  return 0;
}

struct CltOpts {
  std::string dist;
  std::string measure;
  std::size_t n = 2000;
  std::size_t reps = 2000;
  std::uint64_t seed = 7;
  unsigned threads = 0;
  Output out;
};

int run_cltcheck(const CltOpts& o) {
  const auto dist = ParametricDistribution::parse(o.dist);
  const auto f = parse_measure_spec(o.measure);
  if (f.denominator) throw ValidationError("cltcheck needs a linear measure, not a ratio");
  const auto rep = clt_check(dist, f.numerator.scaled(f.scale), o.n, o.reps, effective_seed(o.seed), o.threads);
  Report r{{"dist", "measure", "n", "reps", "theta", "mean_estimate", "empirical_variance", "predicted_variance",
            "ratio", "anderson_darling"},
           {}};
  r.add({o.dist, o.measure, static_cast<double>(rep.n), static_cast<double>(rep.reps), rep.theta + f.centering,
         rep.mean_estimate + f.centering, rep.empirical_variance, rep.predicted_variance, rep.ratio,
         rep.anderson_darling});
  emit(r, o.out);
  return 0;
}

struct ModelOpts {
  std::string input;
  std::string response = "y";
  std::string covariates;
  std::string link = "identity";
  std::string bounds;
  std::vector<std::string> centers;
};

void add_model(CLI::App* sub, ModelOpts& o) {
  sub->add_option("--input", o.input, "CSV data file")->required();
  sub->add_option("--response", o.response, "Response column");
  sub->add_option("--covariates", o.covariates, "Comma-separated covariate columns (empty: intercept only)");
  sub->add_option("--link", o.link, "Link: identity, log, logit, boxcox:g");
  sub->add_option("--bounds", o.bounds, "Logit bounds a,b");
  sub->add_option("--center", o.centers, "Center a numeric covariate, COLUMN=VALUE (year defaults to 2001)");
}

struct QregOpts {
  ModelOpts model;
  int grid = 100;
  std::string basis;
  double delta = 1e-3;
  unsigned threads = 0;
  Output out;
};

int run_qreg(const QregOpts& o) {
  if (o.grid < 3) throw ValidationError("--grid must be at least 3");
  const auto t = cli::read_csv(o.model.input);
  const auto in = cli::ingest_regression(t, o.model.response, names_list(o.model.covariates),
                                         parse_centers(o.model.centers));
  const RegressionData data(in.x, in.y, make_link(o.model.link, o.model.bounds));
  const auto grid = BetaGrid::default_grid(o.grid);
  Report r;
  r.columns.push_back("p");
  for (Eigen::Index j = 1; j <= data.q(); ++j) r.columns.push_back("beta_" + std::to_string(j));
  auto add_row = [&](double p, const Eigen::VectorXd& b) {
    std::vector<Cell> row{p};
    for (Eigen::Index j = 0; j < b.size(); ++j) row.emplace_back(b[j]);
    r.add(std::move(row));
  };
  if (o.basis.empty()) {
    const auto fit = fit_rq_grid(data, grid, o.threads);
    for (std::size_t k = 0; k < grid.size(); ++k) add_row(grid[k], fit.coefficients().row(static_cast<Eigen::Index>(k)));
  } else {
    const auto fit = fit_parametric(data, make_basis(o.basis, data.q()), o.delta);
    for (double p : grid) add_row(p, fit.curve(p));
  }
  emit(r, o.out);
  return 0;
}

struct CondOpts {
  std::string beta;
  std::string system = "legendre";
  std::string orders = "1,2,3:2,4:2";
  std::string x;
  std::string link = "identity";
  std::string bounds;
  Output out;
};

int run_cond(const CondOpts& o) {
  const auto grid = cli::read_beta_grid(o.beta);
  const auto curve = grid.curve();
  const auto codes = parse_orders(o.orders);
  auto spec = parse_system_spec(o.system);
  // Weights must live on the fitted range: the window defaults to the first grid point.
  if (spec.trim == 0.0 && spec.eps < grid.lo()) spec.eps = grid.lo();
  const auto sys = make_system(spec, max_order(codes));
  const auto xv = cli::parse_list(o.x, "--x");
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), static_cast<Eigen::Index>(xv.size()));
  const Link link = make_link(o.link, o.bounds);
  Report r{{"order", "value"}, {}};
  for (const auto& c : codes) {
    const double v = c.l == 0 ? cond_lfunctional_link(curve, sys.weight(c.m), link, x)
                              : cond_ratio_link(curve, sys.weight(c.m), sys.weight(c.l), link, x);
    r.add({order_label(c), v});
  }
  emit(r, o.out);
  return 0;
}

struct CensOpts {
  ModelOpts model;
  std::string status = "delta";
  std::string censor_col;
  std::string method = "powell";
  double p = 0.5;
  std::uint64_t seed = 1;
  int restarts = 10;
  double trim = 0.05;
  Output out;
};

int run_qreg_cens(const CensOpts& o) {
  const auto t = cli::read_csv(o.model.input);
  const auto in = cli::ingest_regression(t, o.model.response, names_list(o.model.covariates),
                                         parse_centers(o.model.centers));
  std::vector<int> delta;
  for (double d : cli::numeric_column(t, o.status)) delta.push_back(static_cast<int>(d));
  std::optional<Eigen::VectorXd> censor;
  if (!o.censor_col.empty()) {
    const auto c = cli::numeric_column(t, o.censor_col);
    censor = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  }
  const CensoredData data(in.x, in.y, delta, censor, make_link(o.model.link, o.model.bounds));
  Eigen::VectorXd beta;
  double criterion = 0.0;
  if (o.method == "powell") {
    if (!censor) throw ValidationError("the powell method needs --censor-col");
    const auto fit = powell_fit(data, o.p, effective_seed(o.seed), o.restarts);
    beta = fit.beta;
    criterion = fit.objective;
  } else if (o.method == "lindgren") {
    const auto fit = lindgren_fit(data, o.p);
    beta = fit.beta;
    criterion = fit.iterations;
  } else {
    const auto fit = score_fit(data, o.p, censoring_km(data), o.trim);
    beta = fit.beta;
    criterion = fit.score_norm;
  }
  Report r;
  r.columns = {"method", "p"};
  for (Eigen::Index j = 1; j <= beta.size(); ++j) r.columns.push_back("beta_" + std::to_string(j));
  r.columns.push_back("criterion");
  std::vector<Cell> row{o.method, o.p};
  for (Eigen::Index j = 0; j < beta.size(); ++j) row.emplace_back(beta[j]);
  row.emplace_back(criterion);
  r.add(std::move(row));
  emit(r, o.out);
  return 0;
}

struct R2Opts {
  std::string input;
  std::string response = "y";
  std::string groupby;
  std::vector<std::string> systems = {"legendre"};
  std::string m0 = "1,2,3,4";
  double eps = 0.0;
  std::string model;
  std::string link = "identity";
  std::string bounds;
  std::vector<std::string> centers;
  Output out;
};

int run_r2(const R2Opts& o) {
  const auto t = cli::read_csv(o.input);
  const auto in = cli::ingest_grouped(t, o.response, names_list(o.groupby), parse_centers(o.centers));
  std::vector<int> m0s;
  for (double v : cli::parse_list(o.m0, "--m0")) m0s.push_back(static_cast<int>(v));
  std::optional<ConditionalModel> model;
  if (!o.model.empty()) {
    const auto grid = cli::read_beta_grid(o.model);
    if (grid.q() != static_cast<Eigen::Index>(in.covariates.names.size()) + 1)
      throw ValidationError("coefficient file width does not match intercept plus grouping covariates");
    model = ConditionalModel{grid.curve(), make_link(o.link, o.bounds), ConditionalModel::with_intercept()};
  }
  Report r;
  r.columns = {"covariates", "mode", "link", "system"};
  for (int m : m0s) r.columns.push_back("R2_" + std::to_string(m));
  for (const auto& s : o.systems) {
    const auto spec = parse_system_spec(s);
    const PolynomialSystem base(spec.kind, spec.trim);
    const double eps = spec.eps > 0.0 ? spec.eps : o.eps;
    std::vector<Cell> row{o.groupby, model ? "model" : "raw", model ? model->link.name() : "none", s};
    for (int m : m0s) {
      const auto v = model ? r_squared_model(in.data, *model, base, m, eps > 0.0 ? std::optional(eps) : std::nullopt)
                           : r_squared_raw(in.data, base, m, eps);
      row.emplace_back(v.value);
    }
    r.add(std::move(row));
  }
  emit(r, o.out);
  return 0;
}

struct MahalOpts {
  std::string input;
  std::string response = "y";
  std::string groupby;
  std::string system = "legendre";
  std::string orders = "1,2,32,42";
  std::vector<std::string> pairs;
  int bootstrap = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> centers;
  Output out;
};

int run_mahal(const MahalOpts& o) {
  const auto t = cli::read_csv(o.input);
  const auto in = cli::ingest_grouped(t, o.response, names_list(o.groupby), parse_centers(o.centers));
  std::vector<int> codes;
  for (double v : cli::parse_list(o.orders, "--orders")) codes.push_back(static_cast<int>(v));
  int top = 1;
  for (int c : codes) top = std::max({top, LCode::parse(c).m, LCode::parse(c).l});
  const auto sys = make_system(parse_system_spec(o.system), top);
  const std::uint64_t seed = effective_seed(o.seed);
  std::map<GroupKey, BootstrapCloud> clouds;
  auto cloud = [&](const GroupKey& k) -> const BootstrapCloud& {
    auto it = clouds.find(k);
    if (it == clouds.end()) {
      const auto g = static_cast<std::uint64_t>(in.data.index_of(k));
      it = clouds.emplace(k, bootstrap_cloud(in.data, k, sys, codes, o.bootstrap, replicate_seed(seed, g))).first;
    }
    return it->second;
  };
  // Nonempty subsets by size, then lexicographically by position.
  const int d = static_cast<int>(codes.size());
  std::vector<std::vector<int>> subsets;
  for (int mask = 1; mask < (1 << d); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < d; ++i)
      if (mask & (1 << i)) s.push_back(i);
    subsets.push_back(s);
  }
  std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  Report r{{"x1", "x2", "I", "M", "pseudo_inverse"}, {}};
  if (o.pairs.empty()) throw ValidationError("give at least one --pairs \"x1|x2\"");
  for (const auto& pair : o.pairs) {
    const auto sides = cli::split(pair, '|');
    if (sides.size() != 2) throw ValidationError("--pairs expects \"x1|x2\"");
    const GroupKey k1 = in.covariates.encode(cli::split(sides[0], ','));
    const GroupKey k2 = in.covariates.encode(cli::split(sides[1], ','));
    const auto& c1 = cloud(k1);
    const auto& c2 = cloud(k2);
    for (const auto& s : subsets) {
      const auto m = mahalanobis_between(subset(c1, s), subset(c2, s));
      std::vector<std::string> label;
      for (int i : s) label.push_back(std::to_string(codes[static_cast<std::size_t>(i)]));
      r.add({sides[0], sides[1], "{" + join(label, ";") + "}", m.value, m.pseudo_inverse ? 1.0 : 0.0});
    }
  }
  emit(r, o.out);
  return 0;
}

struct SimOpts {
  std::string kind = "birds";
  std::uint64_t seed = 1;
  double group_size = 25.0;
  std::size_t n = 200;
  std::string dist = "norm:0,1";
  std::string censor_dist = "norm:2.5,1";
  Output out;
};

int run_simulate(const SimOpts& o) {
  const std::uint64_t seed = effective_seed(o.seed);
  Report r;
  if (o.kind == "birds") {
    const auto b = simulate_birds(seed, o.group_size);
    r.columns = {"year", "age", "sex", "day"};
    for (std::size_t i = 0; i < b.size(); ++i)
      r.add({static_cast<double>(b.year[i]), b.age[i] ? "adult" : "juvenile", b.sex[i] ? "M" : "F", b.day[i]});
  } else if (o.kind == "censored") {
    const auto e = draw_sample(ParametricDistribution::parse(o.dist), o.n, seed);
    const auto c = draw_sample(ParametricDistribution::parse(o.censor_dist), o.n, seed + 1);
    const auto u = draw_sample(ParametricDistribution::uniform(0, 1), o.n, seed + 2);
    r.columns = {"x", "time", "delta", "c"};
    for (std::size_t i = 0; i < o.n; ++i) {
      const double y = 1.0 + 2.0 * u[i] + e[i];
      const double ci = 2.0 * u[i] + c[i];
      r.add({u[i], std::min(y, ci), y <= ci ? 1.0 : 0.0, ci});
    }
  } else if (o.kind == "sample") {
    r.columns = {"y"};
    for (double v : draw_sample(ParametricDistribution::parse(o.dist), o.n, seed)) r.add({v});
  } else {
    throw ValidationError("unknown --kind '" + o.kind + "'");
  }
  emit(r, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L-functionals of distributions and of conditional quantile models", "lf"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  LMomentsOpts lm;
  auto* s_lm = app.add_subcommand("lmoments", "L-moments and ratios of a distribution or sample");
  add_source(s_lm, lm.src);
  s_lm->add_option("--system", lm.system, "System spec legendre|hermite|laguerre[,trim=t][,eps=e]");
  s_lm->add_option("--orders", lm.orders, "Orders m or ratios m:l");
  add_output(s_lm, lm.out);

  ApproxOpts ap;
  auto* s_ap = app.add_subcommand("approx", "Series approximation of a quantile function on a p grid");
  add_source(s_ap, ap.src);
  s_ap->add_option("--system", ap.system, "System spec legendre|hermite|laguerre[,trim=t][,eps=e]");
  s_ap->add_option("--m0", ap.m0, "Number of terms");
  s_ap->add_option("--points", ap.points, "Grid points (k - 0.5) / points");
  add_output(s_ap, ap.out);

  Table1Opts t1;
  auto* s_t1 = app.add_subcommand("table1", "Explained fraction of four-term expansions for ten reference laws");
  s_t1->add_option("--tolerance", t1.tolerance, "Allowed deviation from the reference values, percentage points");
  add_output(s_t1, t1.out);

  LstatOpts ls;
  auto* s_ls = app.add_subcommand("lstat", "L-statistic of a sample column");
  s_ls->add_option("--input", ls.input, "CSV data file")->required();
  s_ls->add_option("--column", ls.column, "Sample column");
  s_ls->add_option("--measure", ls.measure, "Measure spec, e.g. legendre:2, gini, trimmean:0.1,0.9")->required();
  add_output(s_ls, ls.out);

  CltOpts clt;
  auto* s_clt = app.add_subcommand("cltcheck", "Monte-Carlo check of the asymptotic variance");
  s_clt->add_option("--dist", clt.dist, "Distribution spec")->required();
  s_clt->add_option("--measure", clt.measure, "Linear measure spec")->required();
  s_clt->add_option("--n", clt.n, "Sample size");
  s_clt->add_option("--reps", clt.reps, "Replicates");
  s_clt->add_option("--seed", clt.seed, "Master seed (LF_SEED overrides)");
  s_clt->add_option("--threads", clt.threads, "Worker threads (0: hardware concurrency)");
  add_output(s_clt, clt.out);

  QregOpts qr;
  auto* s_qr = app.add_subcommand("qreg", "Quantile regression coefficients on a p grid");
  add_model(s_qr, qr.model);
  s_qr->add_option("--grid", qr.grid, "Grid size K, points (k - 0.5) / K");
  s_qr->add_option("--basis", qr.basis, "Parametric basis: aft[:family], hetero[:family], cox, po, logpower:g");
  s_qr->add_option("--delta", qr.delta, "Integration window (delta, 1 - delta) of the parametric fit");
  s_qr->add_option("--threads", qr.threads, "Worker threads (0: hardware concurrency)");
  add_output(s_qr, qr.out);

  CondOpts cd;
  auto* s_cd = app.add_subcommand("cond", "Conditional L-functionals from a coefficient grid");
  s_cd->add_option("--beta", cd.beta, "Coefficient CSV with columns p, beta_1..beta_q")->required();
  s_cd->add_option("--system", cd.system, "System spec; eps defaults to the first grid point");
  s_cd->add_option("--orders", cd.orders, "Orders m or ratios m:l");
  s_cd->add_option("--x", cd.x, "Design vector including the intercept")->required();
  s_cd->add_option("--link", cd.link, "Link: identity, log, logit, boxcox:g");
  s_cd->add_option("--bounds", cd.bounds, "Logit bounds a,b");
  add_output(s_cd, cd.out);

  CensOpts cs;
  auto* s_cs = app.add_subcommand("qreg-cens", "Censored quantile regression at one level");
  add_model(s_cs, cs.model);
  s_cs->add_option("--status", cs.status, "Indicator column, 1 = uncensored");
  s_cs->add_option("--censor-col", cs.censor_col, "Censoring time column (required by powell)");
  s_cs->add_option("--method", cs.method, "Estimator")->check(CLI::IsMember({"powell", "lindgren", "score"}));
  s_cs->add_option("--p", cs.p, "Quantile level");
  s_cs->add_option("--seed", cs.seed, "Multistart seed (LF_SEED overrides)");
  s_cs->add_option("--restarts", cs.restarts, "Random restarts of the powell search");
  s_cs->add_option("--trim", cs.trim, "Survival trimming threshold of the score method");
  add_output(s_cs, cs.out);

  R2Opts r2;
  auto* s_r2 = app.add_subcommand("r2", "Coefficient of determination of conditional series approximations");
  s_r2->add_option("--input", r2.input, "CSV data file")->required();
  s_r2->add_option("--response", r2.response, "Response column");
  s_r2->add_option("--groupby", r2.groupby, "Comma-separated grouping columns")->required();
  s_r2->add_option("--system", r2.systems, "System spec (repeatable)");
  s_r2->add_option("--m0", r2.m0, "Comma-separated numbers of terms");
  s_r2->add_option("--eps", r2.eps, "Window eps (model mode defaults to the first grid point)");
  s_r2->add_option("--model", r2.model, "Coefficient CSV for model mode");
  s_r2->add_option("--link", r2.link, "Link of the model: identity, log, logit, boxcox:g");
  s_r2->add_option("--bounds", r2.bounds, "Logit bounds a,b");
  s_r2->add_option("--center", r2.centers, "Center a numeric covariate, COLUMN=VALUE (year defaults to 2001)");
  add_output(s_r2, r2.out);

  MahalOpts mh;
  auto* s_mh = app.add_subcommand("mahal", "Bootstrap Mahalanobis distances between groups");
  s_mh->add_option("--input", mh.input, "CSV data file")->required();
  s_mh->add_option("--response", mh.response, "Response column");
  s_mh->add_option("--groupby", mh.groupby, "Comma-separated grouping columns")->required();
  s_mh->add_option("--system", mh.system, "System spec");
  s_mh->add_option("--orders", mh.orders, "Codes m or 10 m + l for ratios");
  s_mh->add_option("--pairs", mh.pairs, "Group pair \"v1,v2,..|w1,w2,..\" in groupby order (repeatable)");
  s_mh->add_option("--bootstrap", mh.bootstrap, "Bootstrap replicates B");
  s_mh->add_option("--seed", mh.seed, "Master seed (LF_SEED overrides)");
  s_mh->add_option("--center", mh.centers, "Center a numeric covariate, COLUMN=VALUE (year defaults to 2001)");
  add_output(s_mh, mh.out);

  SimOpts sm;
  auto* s_sm = app.add_subcommand("simulate", "Synthetic data sets");
  s_sm->add_option("--kind", sm.kind, "birds, censored or sample")->check(CLI::IsMember({"birds", "censored", "sample"}));
  s_sm->add_option("--seed", sm.seed, "Seed (LF_SEED overrides)");
  s_sm->add_option("--group-size", sm.group_size, "Mean group size of the birds design");
  s_sm->add_option("--n", sm.n, "Observations for censored and sample");
  s_sm->add_option("--dist", sm.dist, "Error law (censored) or sampling law (sample)");
  s_sm->add_option("--censor-dist", sm.censor_dist, "Censoring law shifted by 2x (censored)");
  add_output(s_sm, sm.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    apply_quad_tolerance();
    if (s_lm->parsed()) return run_lmoments(lm);
    if (s_ap->parsed()) return run_approx(ap);
    if (s_t1->parsed()) return run_table1(t1);
    if (s_ls->parsed()) return run_lstat(ls);
    if (s_clt->parsed()) return run_cltcheck(clt);
    if (s_qr->parsed()) return run_qreg(qr);
    if (s_cd->parsed()) return run_cond(cd);
    if (s_cs->parsed()) return run_qreg_cens(cs);
    if (s_r2->parsed()) return run_r2(r2);
    if (s_mh->parsed()) return run_mahal(mh);
    if (s_sm->parsed()) return run_simulate(sm);
  } catch (const ValidationError& e) {
    std::cerr << "lf: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "lf: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "lf: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}
