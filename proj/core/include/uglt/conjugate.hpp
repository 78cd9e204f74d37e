#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uglt/random.hpp"

namespace uglt {

class CholeskyError : public std::runtime_error {
 public:
  CholeskyError(int row, const std::string& what)
      : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

// How a row's regression prior is formed. Hierarchical slabs contribute
// V0 = diag(prior_var) (scaled by sigma2); the fractional slab uses a fraction
// b of the likelihood instead.
struct SlabSpec {
  bool fractional = false;
  double fraction = 0.0;
};

struct IdioHyper {
  double c0 = 2.5;
  double C0 = 1.0;
};

// Sufficient statistics of y_i regressed on a subset of the factors.
struct RowSystem {
  int row = -1;
  int T = 0;
  double yy = 0.0;
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  Eigen::VectorXd prior_var;  // hierarchical only
  int q() const { return static_cast<int>(xty.size()); }
};

struct RowPosterior {
  Eigen::MatrixXd chol;   // lower Cholesky factor of V_T^{-1}
  Eigen::VectorXd x;      // chol^{-1} X'y, so x'x = c' V_T c
  double ssr = 0.0;       // y'y - x'x
  double cT = 0.0;
  double CT = 0.0;
  double log_det_VT = 0.0;

  Eigen::VectorXd mean() const;        // V_T X'y
  Eigen::MatrixXd covariance() const;  // V_T
};

// Null-row (no loadings) posterior of sigma2: InvGamma(c0 + T/2, C0 + y'y/2).
struct NullRowPosterior {
  double cT = 0.0;
  double CT = 0.0;
};

RowPosterior row_posterior(const RowSystem& sys, const SlabSpec& slab, const IdioHyper& idio);
NullRowPosterior null_row_posterior(double yy, int T, const IdioHyper& idio);

// log p(y_i | delta_i, F) with loadings and sigma2 integrated out. q = 0 gives
// the null-row marginal.
double row_log_marginal(const RowSystem& sys, const SlabSpec& slab, const IdioHyper& idio);

// Draw (beta, sigma2) from the row posterior.
struct RowDraw {
  Eigen::VectorXd beta;
  double sigma2 = 0.0;
};
RowDraw sample_row(const RowPosterior& post, Rng& rng);

// Cross products of the working factors with themselves and the data.
struct CrossProducts {
  int T = 0;
  Eigen::MatrixXd gram;  // n x n
  Eigen::MatrixXd fy;    // n x m
  Eigen::VectorXd yy;    // m
};

CrossProducts cross_products(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& y);
CrossProducts cross_products(const Eigen::MatrixXd& factors, const Eigen::MatrixXd& y, const Eigen::VectorXd& yy);

RowSystem assemble_row(const CrossProducts& cp, int row, const std::vector<int>& cols,
                       const Eigen::VectorXd& prior_var);

// Log likelihood odds O_ij = log p(y_i | delta_ij = 1, rest) - log p(y_i | delta_ij = 0, rest)
// via one Cholesky factorisation with column j ordered last. `others` are the
// other columns with delta = 1 in row i.
double indicator_log_odds(const CrossProducts& cp, int row, const std::vector<int>& others,
                          const Eigen::VectorXd& others_prior_var, int j, double prior_var_j,
                          const SlabSpec& slab, const IdioHyper& idio);

}  // namespace uglt
