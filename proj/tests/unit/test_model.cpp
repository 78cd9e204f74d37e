#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "uglt/dataset_io.hpp"
#include "uglt/model.hpp"

using uglt::ColumnClass;
using uglt::ModelState;
using uglt::SparsityMatrix;

TEST_CASE("implied covariance of zero loadings is the idiosyncratic diagonal") {
  ModelState s(3, 2, 4);
  s.sigma2 << 0.5, 1.0, 2.0;
  const Eigen::MatrixXd omega = uglt::implied_covariance(s);
  CHECK(omega.isApprox(Eigen::MatrixXd(s.sigma2.asDiagonal())));
}

TEST_CASE("implied covariance for a single column") {
  ModelState s(2, 1, 3);
  s.delta.set(0, 0, true);
  s.delta.set(1, 0, true);
  s.lambda << 1.0, 2.0;
  s.sigma2 << 1.0, 1.0;
  const Eigen::MatrixXd omega = uglt::implied_covariance(s);
  CHECK(omega(0, 0) == 2.0);
  CHECK(omega(0, 1) == 2.0);
  CHECK(omega(1, 0) == 2.0);
  CHECK(omega(1, 1) == 5.0);
}

TEST_CASE("implied covariance rejects non-finite states") {
  ModelState s(3, 1, 2);
  s.sigma2(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(uglt::implied_covariance(s), std::domain_error);
}

TEST_CASE("EFA and CFA covariances agree on random states with spurious columns") {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 8, k = 4;
    SparsityMatrix d = oracle::random_uglt(m, 2, 0.6, eng);
    SparsityMatrix full(m, k);
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < m; ++i) full.set(i, j, d(i, j));
    ModelState s = oracle::random_state(full, 5, eng);
    std::vector<int> rows;
    std::vector<double> xi;
    const auto pivots = full.pivots();
    for (int i = 0; i < m && rows.size() < 2; ++i)
      if (std::find(pivots.begin(), pivots.end(), i) == pivots.end()) {
        rows.push_back(i);
        xi.push_back(u(eng) * std::sqrt(s.sigma2(i)));
      }
    uglt::expand_cfa_to_efa(s, rows, xi);
    const Eigen::MatrixXd efa = uglt::implied_covariance(s, uglt::CovarianceForm::Efa);
    const Eigen::MatrixXd cfa = uglt::implied_covariance(s, uglt::CovarianceForm::Cfa);
    CHECK((efa - cfa).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("classify_columns on the documented cases") {
  SparsityMatrix zero(4, 3);
  auto cz = uglt::classify_columns(zero);
  CHECK(cz.r == 0);
  CHECK(cz.r_sp == 0);
  CHECK(cz.zero == 3);

  SparsityMatrix d(4, 3);
  d.set(0, 0, true);
  d.set(1, 0, true);
  d.set(3, 0, true);
  d.set(2, 1, true);
  auto c = uglt::classify_columns(d);
  CHECK(c.classes[0] == ColumnClass::Active);
  CHECK(c.classes[1] == ColumnClass::Spurious);
  CHECK(c.classes[2] == ColumnClass::Zero);
  CHECK(c.r == 1);
  CHECK(c.r_sp == 1);
  CHECK(c.zero == 1);
}

TEST_CASE("classify_columns agrees with an independent recount") {
  std::mt19937_64 eng(2);
  for (int rep = 0; rep < 500; ++rep) {
    const SparsityMatrix d = oracle::random_binary(6, 5, 0.2, eng);
    const auto c = uglt::classify_columns(d);
    int r = 0, sp = 0, z = 0;
    for (int j = 0; j < 5; ++j) {
      int n = 0;
      for (int i = 0; i < 6; ++i) n += d(i, j) ? 1 : 0;
      if (n >= 2) ++r;
      else if (n == 1) ++sp;
      else ++z;
    }
    CHECK(c.r == r);
    CHECK(c.r_sp == sp);
    CHECK(c.zero == z);
    CHECK(c.r + c.r_sp + c.zero == 5);
  }
}

TEST_CASE("pivot bookkeeping and UGLT") {
  SparsityMatrix d(3, 2);
  d.set(0, 0, true);
  d.set(1, 1, true);
  d.set(2, 1, true);
  CHECK(d.pivot(0) == 0);
  CHECK(d.pivot(1) == 1);
  CHECK(d.next_below(1, 1) == 2);
  CHECK(d.next_below(1, 2) == -1);
  CHECK(d.is_uglt());
  SparsityMatrix bad(3, 2);
  bad.set(0, 0, true);
  bad.set(0, 1, true);
  CHECK_FALSE(bad.is_uglt());
  SparsityMatrix with_zero(3, 3);
  with_zero.set(0, 0, true);
  with_zero.set(2, 2, true);
  CHECK(with_zero.is_uglt());
}

TEST_CASE("expand with no spurious columns leaves the state unchanged") {
  std::mt19937_64 eng(3);
  SparsityMatrix d(5, 3);
  d.set(0, 0, true);
  d.set(2, 0, true);
  ModelState s = oracle::random_state(d, 4, eng);
  const ModelState before = s;
  uglt::expand_cfa_to_efa(s, {}, {});
  CHECK(s.delta == before.delta);
  CHECK(s.lambda == before.lambda);
  CHECK(s.sigma2 == before.sigma2);
}

TEST_CASE("expand moves the spurious loading out of sigma2") {
  ModelState s(3, 2, 2);
  s.delta.set(0, 0, true);
  s.delta.set(2, 0, true);
  s.lambda(0, 0) = 1.0;
  s.lambda(2, 0) = 0.5;
  s.sigma2 << 1.0, 1.0, 1.0;
  const auto placed = uglt::expand_cfa_to_efa(s, {1}, {0.6});
  REQUIRE(placed.size() == 1);
  CHECK(s.sigma2(1) == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(s.lambda(1, placed[0]) == 0.6);
  CHECK(s.delta.column_class(placed[0]) == ColumnClass::Spurious);
  CHECK(s.n_spurious == 1);
}

TEST_CASE("expand rejects loadings outside the variance bound and occupied pivots") {
  ModelState s(3, 2, 2);
  s.delta.set(0, 0, true);
  s.delta.set(1, 0, true);
  s.sigma2 << 1.0, 1.0, 1.0;
  CHECK_THROWS(uglt::expand_cfa_to_efa(s, {2}, {1.0}));
  CHECK_THROWS(uglt::expand_cfa_to_efa(s, {0}, {0.1}));
}

TEST_CASE("collapse after expand restores the CFA state and keeps the covariance") {
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int rep = 0; rep < 300; ++rep) {
    const int m = 9, k = 5;
    SparsityMatrix d(m, k);
    const SparsityMatrix a = oracle::random_uglt(m, 2, 0.5, eng);
    // A single-entry column is already spurious and would be folded too.
    if (a.col_count(0) < 2 || a.col_count(1) < 2) continue;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < m; ++i) d.set(i, j, a(i, j));
    ModelState s = oracle::random_state(d, 3, eng);
    const ModelState before = s;
    std::vector<int> rows;
    std::vector<double> xi;
    const auto piv = d.pivots();
    for (int i = m - 1; i >= 0 && rows.size() < 3; --i)
      if (std::find(piv.begin(), piv.end(), i) == piv.end()) {
        rows.push_back(i);
        xi.push_back(u(eng) * std::sqrt(s.sigma2(i)));
      }
    uglt::expand_cfa_to_efa(s, rows, xi);
    CHECK((uglt::implied_covariance(s) - uglt::implied_covariance(before)).cwiseAbs().maxCoeff() < 1e-12);
    uglt::collapse_efa_to_cfa(s);
    CHECK(s.delta == before.delta);
    CHECK((s.sigma2 - before.sigma2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.lambda - before.lambda).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("implied covariance is invariant under signed column permutations") {
  std::mt19937_64 eng(5);
  SparsityMatrix d = oracle::random_uglt(7, 3, 0.6, eng);
  ModelState s = oracle::random_state(d, 3, eng);
  ModelState t = s;
  t.swap_columns(0, 2);
  t.lambda.col(1) *= -1.0;
  CHECK((uglt::implied_covariance(s) - uglt::implied_covariance(t)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("check_invariants flags loadings outside the support") {
  ModelState s(3, 1, 2);
  s.delta.set(0, 0, true);
  s.delta.set(1, 0, true);
  s.lambda(0, 0) = 1.0;
  s.lambda(2, 0) = 0.3;
  CHECK_THROWS_AS(uglt::check_invariants(s), std::logic_error);
  s.lambda(2, 0) = 0.0;
  CHECK_NOTHROW(uglt::check_invariants(s));
  s.sigma2(0) = 0.0;
  CHECK_THROWS_AS(uglt::check_invariants(s), std::logic_error);
}

TEST_CASE("standardize centres and scales each feature") {
  uglt::Dataset d;
  d.y.resize(3, 6);
  d.y << 1, 2, 3, 4, 5, 7, 10, 0, 3, 3, 1, 2, -1, -2, -4, 0, 5, 1;
  uglt::standardize(d);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(d.y.row(i).mean()) < 1e-12);
    const double var = d.y.row(i).squaredNorm() / 5.0;
    CHECK(std::abs(var - 1.0) < 1e-12);
  }
  uglt::Dataset c;
  c.y = Eigen::MatrixXd::Ones(3, 4);
  c.y(0, 1) = 2.0;
  c.y(2, 3) = 0.0;
  CHECK_THROWS_AS(uglt::standardize(c), std::invalid_argument);
}
