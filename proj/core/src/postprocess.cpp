#include "uglt/postprocess.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "uglt/identification.hpp"

namespace uglt {

namespace {

std::string support_key(const SparsityMatrix& d) {
  std::string key;
  key.reserve(static_cast<std::size_t>(d.rows() * d.cols()) + 8);
  key += std::to_string(d.cols());
  key += ':';
  for (int j = 0; j < d.cols(); ++j)
    for (int i = 0; i < d.rows(); ++i) key += d(i, j) ? '1' : '0';
  return key;
}

std::string pivots_text(const std::vector<int>& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t n = 0; n < p.size(); ++n) os << (n ? "," : "") << p[n] + 1;
  os << ')';
  return os.str();
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Communalities communalities(const Eigen::MatrixXd& lambda, const Eigen::VectorXd& sigma2) {
  Communalities c;
  const Eigen::VectorXd total = lambda.rowwise().squaredNorm() + sigma2;
  c.by_factor = lambda.cwiseAbs2().array().colwise() / total.array();
  c.total = c.by_factor.rowwise().sum();
  return c;
}

FilterResult filter_variance_identified(const std::vector<DrawRecord>& draws) {
  FilterResult out;
  out.total = static_cast<long>(draws.size());
  std::unordered_map<std::string, bool> cache;
  for (const DrawRecord& d : draws) {
    const SparsityMatrix delta = d.delta();
    const std::string key = support_key(delta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, counting_rule_check(delta).identified).first;
    if (it->second) out.kept.push_back(d);
  }
  if (out.kept.empty())
    throw std::runtime_error("post-processing: none of the " + std::to_string(out.total) +
                             " draws is variance identified");
  out.p_v = static_cast<double>(out.kept.size()) / static_cast<double>(out.total);
  return out;
}

DimensionPosterior factor_dimension_posterior(const std::vector<DrawRecord>& draws) {
  DimensionPosterior out;
  if (draws.empty()) throw std::runtime_error("factor_dimension_posterior: no draws");
  std::map<int, long> counts;
  for (const DrawRecord& d : draws) ++counts[d.r];
  long best = -1;
  for (const auto& [r, c] : counts) {
    out.prob[r] = static_cast<double>(c) / static_cast<double>(draws.size());
    if (c > best) {
      best = c;
      out.mode = r;
    }
  }
  return out;
}

PosteriorSummary summarize(const std::vector<DrawRecord>& draws, const SummaryOptions& opts) {
  PosteriorSummary s;
  const FilterResult fr = filter_variance_identified(draws);
  s.total_draws = fr.total;
  s.identified_draws = static_cast<long>(fr.kept.size());
  s.p_v = fr.p_v;
  s.r_posterior = factor_dimension_posterior(fr.kept);
  const int m = fr.kept.front().m;

  struct Ordered {
    const DrawRecord* rec;
    OrderedStructure os;
    std::string key;
  };
  std::vector<Ordered> ordered;
  ordered.reserve(fr.kept.size());
  for (const DrawRecord& d : fr.kept) {
    try {
      OrderedStructure os = order_to_glt(d.delta(), d.lambda());
      std::string key = support_key(os.delta);
      ordered.push_back({&d, std::move(os), std::move(key)});
    } catch (const std::domain_error&) {
      ++s.unorderable;
    }
  }
  if (ordered.empty()) throw std::runtime_error("post-processing: no draw could be put in ordered GLT form");
  const double n = static_cast<double>(ordered.size());

  // Highest posterior structure.
  std::map<std::string, long> structure_counts;
  for (const auto& o : ordered) ++structure_counts[o.key];
  long best = -1;
  std::string best_key;
  for (const auto& [key, c] : structure_counts)
    if (c > best) {
      best = c;
      best_key = key;
    }
  for (const auto& o : ordered)
    if (o.key == best_key) {
      s.hpm_delta = o.os.delta;
      s.hpm_pivots = o.os.pivots;
      s.r_h = o.os.delta.cols();
      s.d_h = o.os.delta.total();
      break;
    }
  s.p_h = static_cast<double>(best) / n;

  // Pivot posterior.
  s.pivot_prob.assign(m, 0.0);
  std::map<std::vector<int>, long> seq_counts;
  for (const auto& o : ordered) {
    for (int p : o.os.pivots) s.pivot_prob[p] += 1.0 / n;
    if (!opts.target_r || o.os.delta.cols() == *opts.target_r) ++seq_counts[o.os.pivots];
  }
  if (seq_counts.empty())
    throw std::runtime_error("summarize: no identified draw has r = " + std::to_string(*opts.target_r));
  std::vector<std::pair<std::vector<int>, long>> seqs(seq_counts.begin(), seq_counts.end());
  std::stable_sort(seqs.begin(), seqs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t t = 0; t < std::min<std::size_t>(5, seqs.size()); ++t)
    s.top_pivots.push_back({seqs[t].first, static_cast<double>(seqs[t].second) / n});
  s.l_star = seqs.front().first;
  s.p_l = static_cast<double>(seqs.front().second) / n;
  s.r_star = static_cast<int>(s.l_star.size());

  // Model averaging conditional on the chosen pivots.
  switch (opts.choice) {
    case PivotChoice::Modal: s.chosen_pivots = s.l_star; break;
    case PivotChoice::Hpm: s.chosen_pivots = s.hpm_pivots; break;
    case PivotChoice::Explicit: s.chosen_pivots = opts.pivots; break;
  }
  const int rc = static_cast<int>(s.chosen_pivots.size());
  s.mean_lambda = Eigen::MatrixXd::Zero(m, rc);
  s.inclusion = Eigen::MatrixXd::Zero(m, rc);
  s.communality = Eigen::MatrixXd::Zero(m, rc);
  s.mean_sigma2 = Eigen::VectorXd::Zero(m);
  for (const auto& o : ordered) {
    if (o.os.pivots != s.chosen_pivots) continue;
    ++s.bma_draws;
    const Eigen::MatrixXd& L = o.os.lambda;
    const Eigen::VectorXd sig = Eigen::Map<const Eigen::VectorXd>(o.rec->sigma2.data(), m);
    s.mean_lambda += L;
    s.communality += communalities(L, sig).by_factor;
    for (int j = 0; j < rc; ++j)
      for (int i = 0; i < m; ++i) s.inclusion(i, j) += o.os.delta(i, j) ? 1.0 : 0.0;
    s.mean_sigma2 += sig;
  }
  if (s.bma_draws == 0) {
    std::ostringstream os;
    os << "summarize: no identified draw has pivots " << pivots_text(s.chosen_pivots) << "; most frequent:";
    for (const auto& t : s.top_pivots) os << ' ' << pivots_text(t.pivots) << '=' << t.prob;
    throw std::runtime_error(os.str());
  }
  const double nb = static_cast<double>(s.bma_draws);
  s.mean_lambda /= nb;
  s.inclusion /= nb;
  s.communality /= nb;
  s.mean_sigma2 /= nb;
  s.mpm_delta = SparsityMatrix(m, rc);
  for (int j = 0; j < rc; ++j)
    for (int i = 0; i < m; ++i)
      if (s.inclusion(i, j) >= 0.5) s.mpm_delta.set(i, j, true);
  s.d_m = s.mpm_delta.total();

  s.row_zero_prob = Eigen::VectorXd::Zero(m);
  std::vector<double> ds;
  for (const auto& o : ordered) {
    for (int i = 0; i < m; ++i)
      if (o.os.delta.row_count(i) == 0) s.row_zero_prob(i) += 1.0 / n;
    ds.push_back(static_cast<double>(o.os.delta.total()));
  }
  double dsum = 0.0;
  for (double v : ds) dsum += v;
  s.d_mean = dsum / n;
  s.d_q25 = quantile(ds, 0.25);
  s.d_median = quantile(ds, 0.5);
  s.d_q75 = quantile(ds, 0.75);
  for (const auto& o : ordered) {
    s.alpha_mean += o.rec->alpha / n;
    s.gamma_mean += o.rec->gamma / n;
  }
  return s;
}

void write_summary_files(const PosteriorSummary& s, const std::string& dir, const std::vector<std::string>& names) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const int m = static_cast<int>(s.pivot_prob.size());
  auto name = [&](int i) { return i < static_cast<int>(names.size()) ? names[i] : "y" + std::to_string(i + 1); };
  auto open = [&](const std::string& file) {
    std::ofstream out(fs::path(dir) / file);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / file).string());
    out.precision(10);
    return out;
  };

  {
    std::ofstream out = open("report.txt");
    out << "total_draws: " << s.total_draws << "\n";
    out << "identified_draws: " << s.identified_draws << "\n";
    out << "p_V: " << s.p_v << "\n";
    out << "r_mode: " << s.r_posterior.mode << "\n";
    for (const auto& [r, p] : s.r_posterior.prob) out << "r_posterior[" << r << "]: " << p << "\n";
    out << "r_H: " << s.r_h << "\n";
    out << "d_H: " << s.d_h << "\n";
    out << "p_H: " << s.p_h << "\n";
    out << "pivots_H: " << pivots_text(s.hpm_pivots) << "\n";
    out << "r_star: " << s.r_star << "\n";
    out << "pivots_star: " << pivots_text(s.l_star) << "\n";
    out << "p_L: " << s.p_l << "\n";
    for (std::size_t t = 0; t < s.top_pivots.size(); ++t)
      out << "top_pivots[" << t + 1 << "]: " << pivots_text(s.top_pivots[t].pivots) << " " << s.top_pivots[t].prob
          << "\n";
    out << "chosen_pivots: " << pivots_text(s.chosen_pivots) << "\n";
    out << "bma_draws: " << s.bma_draws << "\n";
    out << "d_M: " << s.d_m << "\n";
    out << "d_mean: " << s.d_mean << "\n";
    out << "d_quartiles: " << s.d_q25 << " " << s.d_median << " " << s.d_q75 << "\n";
    out << "alpha_mean: " << s.alpha_mean << "\n";
    out << "gamma_mean: " << s.gamma_mean << "\n";
    out << "unorderable_draws: " << s.unorderable << "\n";
  }
  {
    std::ofstream out = open("r_posterior.csv");
    out << "r,prob\n";
    for (const auto& [r, p] : s.r_posterior.prob) out << r << ',' << p << "\n";
  }
  {
    std::ofstream out = open("pivot_posterior.csv");
    out << "row,feature,prob,row_zero_prob\n";
    for (int i = 0; i < m; ++i) out << i + 1 << ',' << name(i) << ',' << s.pivot_prob[i] << ',' << s.row_zero_prob(i) << "\n";
  }
  auto matrix_csv = [&](const std::string& file, const Eigen::MatrixXd& M) {
    std::ofstream out = open(file);
    out << "feature";
    for (int j = 0; j < M.cols(); ++j) out << ",f" << j + 1;
    out << "\n";
    for (int i = 0; i < M.rows(); ++i) {
      out << name(i);
      for (int j = 0; j < M.cols(); ++j) out << ',' << M(i, j);
      out << "\n";
    }
  };
  matrix_csv("inclusion.csv", s.inclusion);
  matrix_csv("loadings.csv", s.mean_lambda);
  matrix_csv("communalities.csv", s.communality);
  {
    std::ofstream out = open("sigma2.csv");
    out << "feature,mean_sigma2\n";
    for (int i = 0; i < s.mean_sigma2.size(); ++i) out << name(i) << ',' << s.mean_sigma2(i) << "\n";
  }
}

}  // namespace uglt
