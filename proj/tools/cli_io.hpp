#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lf/analysis.hpp"
#include "lf/distributions.hpp"
#include "lf/quantile_regression.hpp"

namespace lf::cli {

using Cell = std::variant<double, std::string>;

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row);
};

// Six significant digits; NaN renders as NA.
std::string format_number(double v);
std::string to_csv(const Report& r);
std::string to_json(const Report& r);

enum class Format { kCsv, kJson };
Format parse_format(const std::string& s);
// `path` "-" writes to stdout.
void emit(const Report& r, Format f, const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  // Data rows; row k of the file's data is rows[k - 1].
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
// Numeric cell; errors name the 1-based data row and the column.
double parse_cell(const std::string& s, std::size_t row, const std::string& column);
std::vector<double> numeric_column(const CsvTable& t, const std::string& name);

// Covariate coding: numeric columns pass through (minus an optional center);
// other columns become 0/1 dummies for every level but the alphabetically
// first.
struct ColumnCoder {
  std::string name;
  bool categorical = false;
  std::vector<std::string> levels;
  double center = 0.0;
  std::vector<std::string> coded_names() const;
  void encode(const std::string& raw, std::size_t row, std::vector<double>& out) const;
};

struct Covariates {
  std::vector<ColumnCoder> coders;
  // n x k coded values, no intercept.
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  // Codes one raw record given in coder order.
  GroupKey encode(const std::vector<std::string>& raw) const;
};

// Centers default to year = 2001 when a column named "year" is bound.
Covariates encode_covariates(const CsvTable& t, const std::vector<std::string>& columns,
                             std::map<std::string, double> centers = {});

EmpiricalSample ingest_sample(const std::string& path, const std::string& column);

struct RegressionInput {
  Eigen::MatrixXd x;  // intercept first
  Eigen::VectorXd y;
  std::vector<std::string> names;
  Covariates covariates;
};

RegressionInput ingest_regression(const CsvTable& t, const std::string& response,
                                  const std::vector<std::string>& covariates,
                                  const std::map<std::string, double>& centers = {});

struct GroupedInput {
  GroupedData data;
  Covariates covariates;
};

GroupedInput ingest_grouped(const CsvTable& t, const std::string& response, const std::vector<std::string>& groupby,
                            const std::map<std::string, double>& centers = {});

// Columns p, beta_1..beta_q.
BetaGrid read_beta_grid(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);
std::vector<double> parse_list(const std::string& s, const std::string& what);

}  // namespace lf::cli
