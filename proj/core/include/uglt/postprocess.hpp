#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uglt/draws.hpp"
#include "uglt/model.hpp"

namespace uglt {

struct FilterResult {
  std::vector<DrawRecord> kept;
  long total = 0;
  double p_v = 0.0;
};

// Keep draws whose active structure satisfies the counting rule. Throws when
// no draw survives.
FilterResult filter_variance_identified(const std::vector<DrawRecord>& draws);

struct DimensionPosterior {
  std::map<int, double> prob;
  int mode = 0;  // ties resolved toward the smaller r
};
DimensionPosterior factor_dimension_posterior(const std::vector<DrawRecord>& draws);

struct PivotSequence {
  std::vector<int> pivots;
  double prob = 0.0;
};

enum class PivotChoice { Modal, Hpm, Explicit };

struct SummaryOptions {
  std::optional<int> target_r;
  PivotChoice choice = PivotChoice::Modal;
  std::vector<int> pivots;  // 0-based rows, used with PivotChoice::Explicit
};

// R2_ij = lambda_ij^2 / (sum_l lambda_il^2 + sigma2_i) and their row sums.
struct Communalities {
  Eigen::MatrixXd by_factor;
  Eigen::VectorXd total;
};
Communalities communalities(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& sigma2);

struct PosteriorSummary {
  long total_draws = 0;
  long identified_draws = 0;
  double p_v = 0.0;
  DimensionPosterior r_posterior;

  // Highest posterior structure among identified draws (ordered GLT form).
  SparsityMatrix hpm_delta;
  double p_h = 0.0;
  int r_h = 0;
  int d_h = 0;
  std::vector<int> hpm_pivots;

  std::vector<double> pivot_prob;   // per row, share of draws where the row is a pivot
  std::vector<int> l_star;          // modal pivot sequence
  double p_l = 0.0;
  int r_star = 0;
  std::vector<PivotSequence> top_pivots;

  // Averages over draws whose ordered pivots equal `chosen_pivots`.
  std::vector<int> chosen_pivots;
  long bma_draws = 0;
  Eigen::MatrixXd mean_lambda;
  Eigen::MatrixXd inclusion;
  Eigen::MatrixXd communality;
  SparsityMatrix mpm_delta;
  int d_m = 0;
  Eigen::VectorXd mean_sigma2;

  Eigen::VectorXd row_zero_prob;
  double d_mean = 0.0, d_q25 = 0.0, d_median = 0.0, d_q75 = 0.0;
  double alpha_mean = 0.0, gamma_mean = 0.0;
  long unorderable = 0;
};

PosteriorSummary summarize(const std::vector<DrawRecord>& draws, const SummaryOptions& opts = {});

// Write report.txt and the CSV tables into `dir`.
void write_summary_files(const PosteriorSummary& s, const std::string& dir, const std::vector<std::string>& names);

}  // namespace uglt
