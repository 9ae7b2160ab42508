#include "cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lf/core.hpp"

namespace lf::cli {

void Report::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ValidationError("report row has the wrong number of cells");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string render(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// One record; quoted fields may hold commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line, std::size_t row) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"' && trim(cur).empty()) {
      quoted = was_quoted = true;
      cur.clear();
    } else if (ch == ',') {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ValidationError("row " + std::to_string(row) + ": unterminated quoted field");
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

}  // namespace

std::string to_csv(const Report& r) {
  std::ostringstream os;
  for (std::size_t j = 0; j < r.columns.size(); ++j) os << (j ? "," : "") << csv_field(r.columns[j]);
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_field(render(row[j]));
    os << '\n';
  }
  return os.str();
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::string text = render(row[j]);
      const double* d = std::get_if<double>(&row[j]);
      if (d && std::isfinite(*d))
        obj[r.columns[j]] = std::stod(text);
      else
        obj[r.columns[j]] = text;
    }
    out.push_back(std::move(obj));
  }
  return out.dump(2) + "\n";
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  throw ValidationError("unknown output format '" + s + "'");
}

void emit(const Report& r, Format f, const std::string& path) {
  const std::string text = f == Format::kCsv ? to_csv(r) : to_json(r);
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write '" + path + "'");
  os << text;
  if (!os) throw ValidationError("cannot write '" + path + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ValidationError("bad number '" + tok + "' in " + what);
    out.push_back(v);
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  CsvTable t;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_record(line, have_header ? row + 1 : 0);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    ++row;
    if (fields.size() != t.header.size())
      throw ValidationError("row " + std::to_string(row) + ": expected " + std::to_string(t.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ValidationError("empty file");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return parse_csv(os.str());
}

double parse_cell(const std::string& s, std::size_t row, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size())
    throw ValidationError("row " + std::to_string(row) + ", column '" + column + "': non-numeric value '" + s + "'");
  return v;
}

std::vector<double> numeric_column(const CsvTable& t, const std::string& name) {
  const std::size_t j = t.column(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) out.push_back(parse_cell(t.rows[i][j], i + 1, name));
  return out;
}

std::vector<std::string> ColumnCoder::coded_names() const {
  if (!categorical) return {name};
  std::vector<std::string> out;
  for (std::size_t k = 1; k < levels.size(); ++k) out.push_back(name + "=" + levels[k]);
  return out;
}

void ColumnCoder::encode(const std::string& raw, std::size_t row, std::vector<double>& out) const {
  if (!categorical) {
    out.push_back(parse_cell(raw, row, name) - center);
    return;
  }
  const auto it = std::find(levels.begin(), levels.end(), raw);
  if (it == levels.end()) throw ValidationError("unknown level '" + raw + "' of column '" + name + "'");
  for (std::size_t k = 1; k < levels.size(); ++k) out.push_back(it == levels.begin() + static_cast<long>(k) ? 1.0 : 0.0);
}

GroupKey Covariates::encode(const std::vector<std::string>& raw) const {
  if (raw.size() != coders.size()) throw ValidationError("covariate record has the wrong length");
  GroupKey out;
  for (std::size_t j = 0; j < coders.size(); ++j) coders[j].encode(raw[j], 0, out);
  return out;
}

Covariates encode_covariates(const CsvTable& t, const std::vector<std::string>& columns,
                             std::map<std::string, double> centers) {
  Covariates c;
  std::vector<std::size_t> idx;
  for (const auto& name : columns) {
    idx.push_back(t.column(name));
    ColumnCoder coder;
    coder.name = name;
    bool numeric = true;
    std::set<std::string> levels;
    for (const auto& row : t.rows) {
      const std::string& s = row[idx.back()];
      levels.insert(s);
      std::size_t used = 0;
      try {
        std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (s.empty() || used != s.size()) numeric = false;
    }
    coder.categorical = !numeric;
    if (coder.categorical) {
      coder.levels.assign(levels.begin(), levels.end());
    } else {
      const auto it = centers.find(name);
      coder.center = it != centers.end() ? it->second : (name == "year" ? 2001.0 : 0.0);
    }
    for (const auto& n : coder.coded_names()) c.names.push_back(n);
    c.coders.push_back(std::move(coder));
  }
  c.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(c.names.size()));
  std::vector<double> buf;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    buf.clear();
    for (std::size_t j = 0; j < c.coders.size(); ++j) c.coders[j].encode(t.rows[i][idx[j]], i + 1, buf);
    for (std::size_t k = 0; k < buf.size(); ++k)
      c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = buf[k];
  }
  return c;
}

EmpiricalSample ingest_sample(const std::string& path, const std::string& column) {
  const auto t = read_csv(path);
  auto v = numeric_column(t, column);
  if (v.empty()) throw ValidationError("column '" + column + "' has no data");
  return EmpiricalSample(std::move(v));
}

RegressionInput ingest_regression(const CsvTable& t, const std::string& response,
                                  const std::vector<std::string>& covariates,
                                  const std::map<std::string, double>& centers) {
  RegressionInput in;
  const auto y = numeric_column(t, response);
  if (y.empty()) throw ValidationError("no data rows");
  in.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  in.covariates = encode_covariates(t, covariates, centers);
  in.x.resize(in.y.size(), in.covariates.values.cols() + 1);
  in.x.col(0).setOnes();
  in.x.rightCols(in.covariates.values.cols()) = in.covariates.values;
  in.names.push_back("intercept");
  for (const auto& n : in.covariates.names) in.names.push_back(n);
  return in;
}

GroupedInput ingest_grouped(const CsvTable& t, const std::string& response, const std::vector<std::string>& groupby,
                            const std::map<std::string, double>& centers) {
  const auto y = numeric_column(t, response);
  if (y.empty()) throw ValidationError("no data rows");
  auto cov = encode_covariates(t, groupby, centers);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  return {GroupedData::from_rows(cov.values, yv), std::move(cov)};
}

BetaGrid read_beta_grid(const std::string& path) {
  const auto t = read_csv(path);
  if (t.header.empty() || t.header[0] != "p") throw ValidationError("coefficient file must start with a p column");
  if (t.rows.empty()) throw ValidationError("coefficient file has no rows");
  std::vector<double> grid;
  Eigen::MatrixXd coef(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size() - 1));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    grid.push_back(parse_cell(t.rows[i][0], i + 1, "p"));
    for (std::size_t j = 1; j < t.header.size(); ++j)
      coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = parse_cell(t.rows[i][j], i + 1, t.header[j]);
  }
  return BetaGrid(std::move(grid), std::move(coef));
}

}  // namespace lf::cli
