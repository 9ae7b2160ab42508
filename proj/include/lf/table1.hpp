#pragma once

#include <string>
#include <vector>

#include "lf/distributions.hpp"
#include "lf/weights.hpp"

namespace lf {

// Explained fraction Delta_4 of the four-term series, for ten reference laws
// under the three systems, with the window eps used for each cell.
struct Table1Cell {
  std::string distribution;
  ParametricDistribution dist;
  SystemKind system;
  double eps = 0.0;
  // Published value in percent.
  double reference = 0.0;
};

std::vector<Table1Cell> table1_cells();

struct Table1Result {
  Table1Cell cell;
  // Percent; NaN when the quadrature failed (see note).
  double value = 0.0;
  std::string note;
  bool within(double tolerance_pp) const;
};

std::vector<Table1Result> compute_table1();

}  // namespace lf
