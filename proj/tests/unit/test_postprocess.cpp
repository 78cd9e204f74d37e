#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "uglt/identification.hpp"
#include "uglt/postprocess.hpp"

using uglt::DrawRecord;
using uglt::SparsityMatrix;

namespace {

DrawRecord make_draw(const SparsityMatrix& d, const Eigen::MatrixXd& l, const Eigen::VectorXd& sigma2, int r_sp = 0) {
  DrawRecord rec;
  rec.m = d.rows();
  rec.r = d.cols();
  rec.r_sp = r_sp;
  for (int j = 0; j < d.cols(); ++j)
    for (int i = 0; i < d.rows(); ++i)
      if (d(i, j)) {
        rec.support.emplace_back(i, j);
        rec.loadings.push_back(l(i, j));
      }
  rec.sigma2.assign(sigma2.data(), sigma2.data() + sigma2.size());
  rec.tau.assign(d.cols(), 0.5);
  rec.alpha = 1.0;
  rec.gamma = 1.0;
  return rec;
}

// Two dedicated columns on six rows with pivots in rows 1 and 4.
SparsityMatrix two_blocks() {
  SparsityMatrix d(6, 2);
  for (int i = 0; i < 3; ++i) d.set(i, 0, true);
  for (int i = 3; i < 6; ++i) d.set(i, 1, true);
  return d;
}

Eigen::MatrixXd loadings_for(const SparsityMatrix& d, double base) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  for (int j = 0; j < d.cols(); ++j)
    for (int i = 0; i < d.rows(); ++i)
      if (d(i, j)) l(i, j) = base + 0.1 * i;
  return l;
}

}  // namespace

TEST_CASE("filter keeps counting-rule structures and reports p_V") {
  const Eigen::VectorXd s2 = Eigen::VectorXd::Ones(6);
  SparsityMatrix bad(6, 1);
  bad.set(0, 0, true);
  bad.set(1, 0, true);
  const SparsityMatrix good = two_blocks();
  std::vector<DrawRecord> draws = {make_draw(good, loadings_for(good, 1.0), s2),
                                   make_draw(bad, loadings_for(bad, 1.0), s2),
                                   make_draw(good, loadings_for(good, 0.5), s2)};
  const auto fr = uglt::filter_variance_identified(draws);
  CHECK(fr.total == 3);
  CHECK(fr.kept.size() == 2);
  CHECK(fr.p_v == doctest::Approx(2.0 / 3.0));
  for (const auto& d : fr.kept) CHECK(uglt::counting_rule_check(d.delta()).identified);
  CHECK_THROWS_AS(uglt::filter_variance_identified({draws[1]}), std::runtime_error);
}

TEST_CASE("dimension posterior and its mode") {
  const Eigen::VectorXd s2 = Eigen::VectorXd::Ones(6);
  const SparsityMatrix two = two_blocks();
  SparsityMatrix one(6, 1);
  for (int i = 0; i < 6; ++i) one.set(i, 0, true);
  std::vector<DrawRecord> draws;
  for (int n = 0; n < 3; ++n) draws.push_back(make_draw(two, loadings_for(two, 1.0), s2));
  for (int n = 0; n < 3; ++n) draws.push_back(make_draw(one, loadings_for(one, 1.0), s2));
  const auto dp = uglt::factor_dimension_posterior(draws);
  CHECK(dp.prob.at(1) == doctest::Approx(0.5));
  CHECK(dp.prob.at(2) == doctest::Approx(0.5));
  CHECK(dp.mode == 1);
}

TEST_CASE("communalities on the documented cases") {
  Eigen::MatrixXd l(1, 1);
  l << 1.0;
  Eigen::VectorXd s2(1);
  s2 << 1.0;
  const auto c = uglt::communalities(l, s2);
  CHECK(c.by_factor(0, 0) == doctest::Approx(0.5));

  std::mt19937_64 eng(3);
  std::normal_distribution<double> z;
  Eigen::MatrixXd L(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) L(i, j) = z(eng);
  Eigen::VectorXd sig = Eigen::VectorXd::LinSpaced(5, 0.3, 1.5);
  const auto cc = uglt::communalities(L, sig);
  const Eigen::MatrixXd omega = L * L.transpose() + Eigen::MatrixXd(sig.asDiagonal());
  for (int i = 0; i < 5; ++i) CHECK(cc.total(i) == doctest::Approx(1.0 - sig(i) / omega(i, i)).epsilon(1e-12));
}

TEST_CASE("single draw summary reproduces the draw") {
  const SparsityMatrix d = two_blocks();
  const Eigen::MatrixXd l = loadings_for(d, 0.9);
  const Eigen::VectorXd s2 = Eigen::VectorXd::LinSpaced(6, 0.2, 0.7);
  const auto s = uglt::summarize({make_draw(d, l, s2)});
  CHECK(s.p_v == 1.0);
  CHECK(s.p_h == 1.0);
  CHECK(s.p_l == 1.0);
  CHECK(s.l_star == std::vector<int>{0, 3});
  CHECK(s.mpm_delta == d);
  CHECK((s.mean_lambda - l).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((s.mean_sigma2 - s2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.d_mean == 6.0);
}

TEST_CASE("signed column permutations of one structure give p_H = 1") {
  const SparsityMatrix d = two_blocks();
  const Eigen::MatrixXd l = loadings_for(d, 0.7);
  const Eigen::VectorXd s2 = Eigen::VectorXd::Ones(6);
  std::vector<DrawRecord> draws;
  for (int n = 0; n < 8; ++n) {
    SparsityMatrix dd = d;
    Eigen::MatrixXd ll = l;
    if (n % 2) {
      dd.swap_columns(0, 1);
      ll.col(0).swap(ll.col(1));
    }
    if (n % 4 >= 2) ll.col(0) *= -1.0;
    draws.push_back(make_draw(dd, ll, s2));
  }
  const auto s = uglt::summarize(draws);
  CHECK(s.p_h == 1.0);
  CHECK(s.p_l == 1.0);
  CHECK(s.bma_draws == 8);
  // Ordered GLT form has positive pivots, so the averages equal the original loadings.
  CHECK((s.mean_lambda - l).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unknown pivot sequences are reported with the most frequent ones") {
  const SparsityMatrix d = two_blocks();
  const auto s2 = Eigen::VectorXd::Ones(6).eval();
  uglt::SummaryOptions opts;
  opts.choice = uglt::PivotChoice::Explicit;
  opts.pivots = {1, 4};
  try {
    uglt::summarize({make_draw(d, loadings_for(d, 1.0), s2)}, opts);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2,5)") != std::string::npos);
    CHECK(msg.find("(1,4)=1") != std::string::npos);
  }
  uglt::SummaryOptions target;
  target.target_r = 3;
  CHECK_THROWS_AS(uglt::summarize({make_draw(d, loadings_for(d, 1.0), s2)}, target), std::runtime_error);
}

TEST_CASE("summary properties on random draw sets") {
  std::mt19937_64 eng(41);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 9;
    std::vector<DrawRecord> draws;
    std::vector<SparsityMatrix> pool;
    for (int p = 0; p < 4; ++p) pool.push_back(oracle::random_uglt(m, 1 + p % 3, 0.6, eng));
    for (int n = 0; n < 60; ++n) {
      const SparsityMatrix& d = pool[eng() % pool.size()];
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, d.cols());
      for (int j = 0; j < d.cols(); ++j)
        for (int i = 0; i < m; ++i)
          if (d(i, j)) l(i, j) = z(eng);
      draws.push_back(make_draw(d, l, Eigen::VectorXd::Ones(m)));
    }
    bool any = false;
    for (const auto& d : draws) any = any || uglt::counting_rule_check(d.delta()).identified;
    if (!any) continue;
    const auto s = uglt::summarize(draws);
    CHECK(s.p_h <= s.p_l + 1e-12);
    double total = 0.0;
    for (const auto& [r, p] : s.r_posterior.prob) total += p;
    CHECK(total == doctest::Approx(1.0));
    // Every MPM entry appears in some ordered draw with the chosen pivots.
    for (int j = 0; j < s.mpm_delta.cols(); ++j)
      for (int i = 0; i < m; ++i)
        if (s.mpm_delta(i, j)) CHECK(s.inclusion(i, j) >= 0.5);
    for (int j = 0; j < s.mpm_delta.cols(); ++j) CHECK(s.mpm_delta(s.chosen_pivots[j], j));
  }
}
