#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uglt/model.hpp"

namespace uglt {

// One retained posterior draw. Only the r active columns are kept, in the
// sampler's storage order; the support lists (row, column) pairs ordered by
// column then row, with `loadings` aligned to it.
struct DrawRecord {
  int chain = 0;
  long iter = 0;
  int m = 0;
  int r = 0;
  int r_sp = 0;
  std::vector<std::pair<int, int>> support;
  std::vector<double> loadings;
  std::vector<double> sigma2;
  std::vector<double> tau;
  double alpha = 0.0;
  double gamma = 0.0;
  std::optional<double> kappa;
  std::vector<double> theta;
  std::vector<long> counters;

  int d() const { return static_cast<int>(support.size()); }
  SparsityMatrix delta() const;
  Eigen::MatrixXd lambda() const;
};

}  // namespace uglt
