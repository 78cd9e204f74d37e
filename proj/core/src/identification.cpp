#include "uglt/identification.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uglt {

namespace {

using Words = std::vector<std::uint64_t>;

struct SubsetSearch {
  const std::vector<Words>& sets;
  int words;
  int q;
  std::vector<int> chosen;
  std::vector<Words> unions;  // unions[depth] = union of the first depth chosen sets

  bool violates(int depth, int start) {
    if (depth == q) {
      int count = 0;
      for (int w = 0; w < words; ++w) count += std::popcount(unions[depth][w]);
      return count < 2 * q + 1;
    }
    const int n = static_cast<int>(sets.size());
    for (int c = start; c <= n - (q - depth); ++c) {
      chosen[depth] = c;
      for (int w = 0; w < words; ++w) unions[depth + 1][w] = unions[depth][w] | sets[c][w];
      if (violates(depth + 1, c + 1)) return true;
    }
    return false;
  }
};

}  // namespace

CountingRuleResult counting_rule_check(const SparsityMatrix& delta, int cap) {
  if (cap > kCountingRuleHardCap) cap = kCountingRuleHardCap;
  const int m = delta.rows();
  const int words = (m + 63) / 64;
  std::vector<int> columns;
  std::vector<Words> sets;
  for (int j = 0; j < delta.cols(); ++j) {
    if (delta.col_count(j) == 0) continue;
    Words s(words, 0);
    for (int i = 0; i < m; ++i)
      if (delta(i, j)) s[i / 64] |= std::uint64_t{1} << (i % 64);
    columns.push_back(j);
    sets.push_back(std::move(s));
  }
  const int r = static_cast<int>(columns.size());
  if (r > cap)
    throw std::length_error("counting_rule_check: " + std::to_string(r) + " nonzero columns exceed the cap of " +
                            std::to_string(cap));

  CountingRuleResult result;
  for (int q = 1; q <= r; ++q) {
    SubsetSearch search{sets, words, q, std::vector<int>(q), std::vector<Words>(q + 1, Words(words, 0))};
    if (search.violates(0, 0)) {
      result.identified = false;
      for (int c : search.chosen) result.witness.push_back(columns[c]);
      return result;
    }
  }
  return result;
}

int max_factors(int m) {
  if (m < 3) throw std::invalid_argument("max_factors: need at least 3 features, got " + std::to_string(m));
  return (m - 1) / 2;
}

OrderedStructure order_to_glt(const SparsityMatrix& delta, const Eigen::MatrixXd& lambda,
                              const Eigen::MatrixXd* factors) {
  const int m = delta.rows();
  std::vector<std::pair<int, int>> piv;  // (pivot row, storage column)
  for (int j = 0; j < delta.cols(); ++j) {
    const int p = delta.pivot(j);
    if (p >= 0) piv.emplace_back(p, j);
  }
  std::sort(piv.begin(), piv.end());
  for (std::size_t n = 1; n < piv.size(); ++n)
    if (piv[n].first == piv[n - 1].first) throw std::invalid_argument("order_to_glt: pivots are not distinct");

  const int r = static_cast<int>(piv.size());
  OrderedStructure out;
  out.delta = SparsityMatrix(m, r);
  out.lambda = Eigen::MatrixXd::Zero(m, r);
  if (factors) out.factors = Eigen::MatrixXd::Zero(r, factors->cols());
  for (int c = 0; c < r; ++c) {
    const auto [p, j] = piv[c];
    const double lead = lambda(p, j);
    if (lead == 0.0)
      throw std::domain_error("order_to_glt: pivot loading of column " + std::to_string(j) + " is zero");
    const int sign = lead > 0.0 ? 1 : -1;
    for (int i = 0; i < m; ++i) {
      out.delta.set(i, c, delta(i, j));
      out.lambda(i, c) = sign * lambda(i, j);
    }
    if (factors) out.factors->row(c) = sign * factors->row(j);
    out.perm.order.push_back(j);
    out.perm.signs.push_back(sign);
    out.pivots.push_back(p);
  }
  return out;
}

}  // namespace uglt
