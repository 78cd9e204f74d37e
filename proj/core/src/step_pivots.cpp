#include <algorithm>
#include <cmath>
#include <limits>

#include "uglt/sampler.hpp"

namespace uglt {

namespace {

// Rows in [0, limit) that are not a pivot of any active column other than j.
std::vector<int> free_rows_above(const SparsityMatrix& delta, int r, int j, int limit) {
  std::vector<char> taken(delta.rows(), 0);
  for (int c = 0; c < r; ++c) {
    if (c == j) continue;
    const int p = delta.pivot(c);
    if (p >= 0) taken[p] = 1;
  }
  std::vector<int> rows;
  for (int i = 0; i < limit; ++i)
    if (!taken[i]) rows.push_back(i);
  return rows;
}

bool is_other_pivot(const SparsityMatrix& delta, int r, int j, int row) {
  for (int c = 0; c < r; ++c)
    if (c != j && delta.col_count(c) > 0 && delta.pivot(c) == row) return true;
  return false;
}

}  // namespace

void Sampler::step_l() {
  if (r_ == 0) return;
  const CrossProducts cp = active_cross_products();
  std::vector<int> order(r_);
  for (int j = 0; j < r_; ++j) order[j] = j;
  rng_.shuffle(order);

  const double p_shift = prior_.tuning.p_shift;
  const double p_switch = prior_.tuning.p_switch;
  for (int j : order) {
    if (s_.delta.col_count(j) == 0) continue;
    const double u = rng_.uniform();
    if (u < p_shift) {
      pivot_shift(cp, j);
    } else if (u < p_shift + p_switch) {
      pivot_switch(cp, j);
    } else {
      pivot_add_delete(cp, j);
    }
  }
  compact();
}

void Sampler::pivot_shift(const CrossProducts& cp, int j) {
  const int m = data_.m();
  const int pivot = s_.delta.pivot(j);
  const int next = s_.delta.next_below(j, pivot);
  if (next < 0) return;
  const std::vector<int> cand = free_rows_above(s_.delta, r_, j, next);
  const int target = cand[rng_.index(cand.size())];
  if (target == pivot) return;
  ++counters_.shift_prop;
  const int d = s_.delta.col_count(j);
  const EspParameters e = esp();
  double log_acc;
  try {
    log_acc = cell_log_odds(cp, target, j) - cell_log_odds(cp, pivot, j) + log_column_prior(e, m, target, d) -
              log_column_prior(e, m, pivot, d);
  } catch (const CholeskyError&) {
    ++counters_.fallback_rows;
    return;
  }
  if (std::log(rng_.uniform()) <= log_acc) {
    s_.delta.set(pivot, j, false);
    s_.lambda(pivot, j) = 0.0;
    s_.delta.set(target, j, true);
    ++counters_.shift_acc;
  }
}

void Sampler::pivot_switch(const CrossProducts& cp, int j) {
  std::vector<int> others;
  for (int c = 0; c < r_; ++c)
    if (c != j && s_.delta.col_count(c) > 0) others.push_back(c);
  if (others.empty()) return;
  const int l = others[rng_.index(others.size())];
  const int m = data_.m();
  const int pj = s_.delta.pivot(j), pl = s_.delta.pivot(l);
  const int lo = std::min(pj, pl), hi = std::max(pj, pl);
  std::vector<int> rows;
  for (int i = lo; i <= hi; ++i)
    if (s_.delta(i, j) != s_.delta(i, l)) rows.push_back(i);
  ++counters_.switch_prop;

  const EspParameters e = esp();
  const int dj = s_.delta.col_count(j), dl = s_.delta.col_count(l);
  double log_acc = -log_column_prior(e, m, pj, dj) - log_column_prior(e, m, pl, dl);
  try {
    for (int i : rows) log_acc -= row_marginal(cp, i, row_columns(i));
    for (int i : rows) {
      s_.delta.flip(i, j);
      s_.delta.flip(i, l);
    }
    for (int i : rows) log_acc += row_marginal(cp, i, row_columns(i));
  } catch (const CholeskyError&) {
    ++counters_.fallback_rows;
    log_acc = -std::numeric_limits<double>::infinity();
  }
  log_acc += log_column_prior(e, m, s_.delta.pivot(j), s_.delta.col_count(j)) +
             log_column_prior(e, m, s_.delta.pivot(l), s_.delta.col_count(l));

  if (std::log(rng_.uniform()) <= log_acc) {
    ++counters_.switch_acc;
    for (int i : rows) {
      if (!s_.delta(i, j)) s_.lambda(i, j) = 0.0;
      if (!s_.delta(i, l)) s_.lambda(i, l) = 0.0;
    }
    if (options_.demote_spurious) {
      if (s_.delta.col_count(j) == 1) demote(j);
      if (s_.delta.col_count(l) == 1) demote(l);
    }
  } else {
    for (int i : rows) {
      s_.delta.flip(i, j);
      s_.delta.flip(i, l);
    }
  }
}

void Sampler::pivot_add_delete(const CrossProducts& cp, int j) {
  const int m = data_.m();
  const int pivot = s_.delta.pivot(j);
  const int d = s_.delta.col_count(j);
  const double pa = prior_.tuning.p_add;
  const std::vector<int> above = free_rows_above(s_.delta, r_, j, pivot);
  const int next = s_.delta.next_below(j, pivot);
  const bool can_add = !above.empty();
  const bool can_delete = next >= 0 && !is_other_pivot(s_.delta, r_, j, next);
  if (!can_add && !can_delete) return;
  const double p_add = (can_add && can_delete) ? pa : (can_add ? 1.0 : 0.0);
  const EspParameters e = esp();

  if (rng_.uniform() < p_add) {
    ++counters_.add_prop;
    const int target = above[rng_.index(above.size())];
    const bool new_can_add = !free_rows_above(s_.delta, r_, j, target).empty();
    const double p_add_new = new_can_add ? pa : 0.0;
    double log_acc;
    try {
      log_acc = log_add_acceptance(cell_log_odds(cp, target, j), e, m, pivot, target, d,
                                   static_cast<int>(above.size()), p_add, p_add_new);
    } catch (const CholeskyError&) {
      ++counters_.fallback_rows;
      return;
    }
    if (std::log(rng_.uniform()) <= log_acc) {
      s_.delta.set(target, j, true);
      ++counters_.add_acc;
    }
    return;
  }

  ++counters_.delete_prop;
  const std::vector<int> above_new = free_rows_above(s_.delta, r_, j, next);
  const int next2 = s_.delta.next_below(j, next);
  const bool new_can_delete = next2 >= 0 && !is_other_pivot(s_.delta, r_, j, next2);
  const double p_add_new = new_can_delete ? pa : 1.0;
  double log_acc;
  try {
    log_acc = log_delete_acceptance(cell_log_odds(cp, pivot, j), e, m, pivot, next, d,
                                    static_cast<int>(above_new.size()), p_add, p_add_new);
  } catch (const CholeskyError&) {
    ++counters_.fallback_rows;
    return;
  }
  if (std::log(rng_.uniform()) <= log_acc) {
    s_.delta.set(pivot, j, false);
    s_.lambda(pivot, j) = 0.0;
    ++counters_.delete_acc;
    if (options_.demote_spurious && s_.delta.col_count(j) == 1) demote(j);
  }
}

}  // namespace uglt
