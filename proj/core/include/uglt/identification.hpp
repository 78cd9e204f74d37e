#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "uglt/model.hpp"

namespace uglt {

inline constexpr int kDefaultCountingRuleCap = 25;
inline constexpr int kCountingRuleHardCap = 31;

struct CountingRuleResult {
  bool identified = true;
  // Lexicographically smallest violating column subset at the smallest size;
  // empty when identified.
  std::vector<int> witness;
};

// Every q-subset of the nonzero columns (q = 1..r) must touch at least 2q + 1
// rows. Zero columns are ignored. Throws when the number of nonzero columns
// exceeds `cap` (at most kCountingRuleHardCap).
CountingRuleResult counting_rule_check(const SparsityMatrix& delta, int cap = kDefaultCountingRuleCap);

// Largest r with 2r + 1 <= m. Throws for m < 3.
int max_factors(int m);

// Ordered GLT representation of an unordered structure.
struct SignedPermutation {
  std::vector<int> order;   // order[c] = source column placed at position c
  std::vector<int> signs;   // +1 or -1 applied to the placed column
};

struct OrderedStructure {
  SparsityMatrix delta;
  Eigen::MatrixXd lambda;
  std::optional<Eigen::MatrixXd> factors;  // rows follow the column order
  SignedPermutation perm;
  std::vector<int> pivots;                 // ascending
};

// Sort the nonzero columns by pivot and flip signs so every pivot loading is
// positive. Zero columns are dropped. Throws when a pivot loading is zero.
OrderedStructure order_to_glt(const SparsityMatrix& delta, const Eigen::MatrixXd& lambda,
                              const Eigen::MatrixXd* factors = nullptr);

}  // namespace uglt
