#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "uglt/model.hpp"

namespace uglt {

// CSV with a header of feature names, one observation per line. Rows are
// time points and columns are features; the result is stored m x T.
Dataset read_csv(const std::string& path);
Dataset parse_csv(const std::string& text);
void write_csv(const std::string& path, const Dataset& data);

struct LoadOptions {
  bool demean = true;
  bool standardize = true;  // implies demeaning
};

// read_csv followed by the requested transformation; fewer than three
// features is an error.
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});
void demean(Dataset& data);

// Indicator matrix as text: one line per row, 0/1 entries separated by
// spaces or commas.
SparsityMatrix read_indicator_matrix(const std::string& path);
SparsityMatrix parse_indicator_matrix(const std::string& text);
void write_indicator_matrix(const std::string& path, const SparsityMatrix& delta);

struct SimulationSpec {
  int T = 100;
  SparsityMatrix delta;         // m x r ground-truth structure, unordered GLT
  double loading_scale = 1.0;
  Eigen::VectorXd sigma2;        // m entries, all positive
  std::uint64_t seed = 1;
  bool fixed_pivots = false;     // pivot loadings equal loading_scale exactly
};

struct SimulatedData {
  Dataset data;
  Eigen::MatrixXd lambda;
  Eigen::VectorXd sigma2;
  Eigen::MatrixXd factors;
  SparsityMatrix delta;
};

// Loadings are loading_scale * sign * |N(0, 1)| on the support, with positive
// pivot loadings; y_t = Lambda f_t + e_t with f_t ~ N(0, I), e_t ~ N(0, Sigma).
SimulatedData simulate_dataset(const SimulationSpec& spec);

// Dedicated block structure: column j has its pivot at row j * floor(m / r)
// and loads on the next floor(m / r) - 1 rows (the last block takes the rest).
SparsityMatrix block_structure(int m, int r);

}  // namespace uglt
