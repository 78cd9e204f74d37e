#include <atomic>
#include <chrono>
#include <csignal>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uglt/config.hpp"
#include "uglt/dataset_io.hpp"
#include "uglt/drawstore.hpp"
#include "uglt/identification.hpp"
#include "uglt/postprocess.hpp"
#include "uglt/sampler.hpp"
#include "uglt/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& M, const std::string& row_prefix,
                      const std::string& col_prefix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id";
  for (int j = 0; j < M.cols(); ++j) out << ',' << col_prefix << j + 1;
  out << '\n';
  for (int i = 0; i < M.rows(); ++i) {
    out << row_prefix << i + 1;
    for (int j = 0; j < M.cols(); ++j) out << ',' << uglt::format_double(M(i, j));
    out << '\n';
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int m = 15;
  int T = 500;
  int r = 3;
  std::string delta_path;
  double loading_scale = 1.0;
  double sigma2 = 0.3;
  std::uint64_t seed = 1;
  bool fixed_pivots = false;
  std::string out = "sim";
};

int run_simulate(const SimulateArgs& a) {
  uglt::SimulationSpec spec;
  spec.delta = a.delta_path.empty() ? uglt::block_structure(a.m, a.r) : uglt::read_indicator_matrix(a.delta_path);
  const int m = spec.delta.rows();
  if (!spec.delta.is_uglt()) throw std::runtime_error("simulate: the structure is not UGLT (repeated pivots)");
  const auto check = uglt::counting_rule_check(spec.delta);
  if (!check.identified) throw std::runtime_error("simulate: the structure fails the counting rule");
  if (!(a.loading_scale > 0.0)) throw std::runtime_error("simulate: loading scale must be positive");
  spec.T = a.T;
  spec.loading_scale = a.loading_scale;
  spec.sigma2 = Eigen::VectorXd::Constant(m, a.sigma2);
  spec.seed = a.seed;
  spec.fixed_pivots = a.fixed_pivots;
  const uglt::SimulatedData sim = uglt::simulate_dataset(spec);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  uglt::write_csv((dir / "data.csv").string(), sim.data);
  write_matrix_csv(dir / "truth_lambda.csv", sim.lambda, "y", "f");
  write_matrix_csv(dir / "truth_sigma2.csv", sim.sigma2, "y", "sigma2_");
  write_matrix_csv(dir / "truth_factors.csv", sim.factors.transpose(), "t", "f");
  uglt::write_indicator_matrix((dir / "truth_delta.txt").string(), sim.delta);
  std::cout << "wrote " << m << " x " << a.T << " dataset with r = " << sim.delta.cols() << " to " << dir.string()
            << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string data;
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<long> draws, burnin, thin, progress;
  std::optional<int> chains, k;
  std::string out = "fit";
  bool binary = false;
};

// Configuration problems are usage errors: the run never starts.
uglt::RunConfig resolve_config(const FitArgs& a) {
  try {
    uglt::RunConfig cfg = a.config.empty() ? uglt::RunConfig{} : uglt::load_config_file(a.config);
    if (!a.overrides.empty()) {
      std::string text;
      for (const auto& o : a.overrides) text += o + "\n";
      uglt::apply_key_values(cfg, uglt::parse_key_values(text));
    }
    if (a.seed) cfg.chain.seed = *a.seed;
    if (a.draws) cfg.chain.draws = *a.draws;
    if (a.burnin) cfg.chain.burnin = *a.burnin;
    if (a.thin) cfg.chain.thin = *a.thin;
    if (a.chains) cfg.chain.chains = *a.chains;
    if (a.k) cfg.chain.k = *a.k;
    if (a.progress) cfg.chain.progress_every = *a.progress;
    if (cfg.chain.chains < 1) throw std::invalid_argument("chains must be at least 1");
    uglt::validate(cfg.prior);
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("configuration", e.what());
  }
}

int run_fit(const FitArgs& a) {
  uglt::RunConfig cfg = resolve_config(a);
  const uglt::Dataset data = uglt::load_dataset(a.data, {cfg.demean, cfg.standardize});
  if (cfg.chain.k <= 0) cfg.chain.k = uglt::max_factors(data.m());

  const std::string config_text = uglt::to_config_text(cfg);
  uglt::StoreManifest base;
  base.library_version = uglt::kVersion;
  base.config_text = config_text;
  base.config_hash = uglt::hex64(uglt::fnv1a(config_text));
  base.data_fingerprint = uglt::hex64(uglt::fingerprint(data));
  base.m = data.m();
  base.k = cfg.chain.k;
  base.seed = cfg.chain.seed;
  base.names = data.names;

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  {
    std::ofstream cf(dir / "config.txt");
    cf << config_text;
  }
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();

  std::signal(SIGINT, on_sigint);
  const int n = cfg.chain.chains;
  std::vector<uglt::ChainSummary> summaries(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::string> files(n);
  std::mutex log_mutex;
  auto run_one = [&](int c) {
    try {
      uglt::StoreManifest man = base;
      man.chain = c;
      files[c] = "chain" + std::to_string(c + 1) + (a.binary ? ".bin" : ".draws");
      uglt::StoreWriter writer((dir / files[c]).string(), man,
                               a.binary ? uglt::StoreFormat::Binary : uglt::StoreFormat::Text);
      auto progress = [&](const std::string& line) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << line << '\n';
      };
      summaries[c] = uglt::run_chain(
          data, cfg.prior, cfg.chain, c, [&](const uglt::DrawRecord& rec) { writer.write(rec); }, progress, &g_stop);
      writer.close();
    } catch (...) {
      errors[c] = std::current_exception();
      g_stop.store(true);
    }
  };
  if (n == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> threads;
    for (int c = 0; c < n; ++c) threads.emplace_back(run_one, c);
    for (auto& t : threads) t.join();
  }
  std::signal(SIGINT, SIG_DFL);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool interrupted = false;
  nlohmann::ordered_json run;
  run["software_version"] = uglt::kVersion;
  run["config_hash"] = base.config_hash;
  run["data_fingerprint"] = base.data_fingerprint;
  run["data_path"] = a.data;
  run["seed"] = cfg.chain.seed;
  run["m"] = data.m();
  run["T"] = data.T();
  run["k"] = cfg.chain.k;
  run["started"] = started;
  run["finished"] = utc_timestamp();
  run["elapsed_seconds"] = seconds;
  run["config"] = config_text;
  auto rate = [](long acc, long prop) { return prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0; };
  for (int c = 0; c < n; ++c) {
    const auto& s = summaries[c];
    interrupted = interrupted || s.interrupted;
    nlohmann::ordered_json ch;
    ch["chain"] = c;
    ch["store"] = files[c];
    ch["sweeps"] = s.sweeps;
    ch["interrupted"] = s.interrupted;
    const auto& k = s.counters;
    ch["acceptance"] = {{"shift", rate(k.shift_acc, k.shift_prop)},   {"switch", rate(k.switch_acc, k.switch_prop)},
                        {"add", rate(k.add_acc, k.add_prop)},         {"delete", rate(k.delete_acc, k.delete_prop)},
                        {"split", rate(k.split_acc, k.split_prop)},   {"merge", rate(k.merge_acc, k.merge_prop)},
                        {"alpha", rate(k.alpha_acc, k.alpha_prop)},   {"gamma", rate(k.gamma_acc, k.gamma_prop)}};
    const auto arr = k.as_array();
    const auto names = uglt::MoveCounters::names();
    nlohmann::ordered_json counters;
    for (int q = 0; q < uglt::MoveCounters::kSize; ++q) counters[names[q]] = arr[q];
    ch["counters"] = counters;
    run["chains"].push_back(ch);
  }
  run["interrupted"] = interrupted;
  {
    std::ofstream mf(dir / "manifest.json");
    mf << run.dump(2) << '\n';
  }
  if (interrupted) {
    std::cerr << "interrupted: partial stores written to " << dir.string() << '\n';
    return kExitRuntime;
  }
  std::cout << "wrote " << n << " chain store(s) to " << dir.string() << " in " << seconds << " s\n";
  return kExitOk;
}

// --------------------------------------------------------------- summarize

struct SummarizeArgs {
  std::vector<std::string> stores;
  std::optional<int> target_r;
  std::string pivots;
  std::string choice = "modal";
  std::string out = "summary";
};

std::vector<std::string> expand_store_paths(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& p : in) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (ext == ".draws" || ext == ".bin") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw std::runtime_error("no draw stores in " + p);
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<int> parse_pivot_list(const std::string& text, int m) {
  std::vector<int> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != tok.size() || v < 1 || v > m)
      throw CLI::ValidationError("--pivots", "entries must be row numbers between 1 and " + std::to_string(m));
    if (std::find(out.begin(), out.end(), v - 1) != out.end())
      throw CLI::ValidationError("--pivots", "repeated row " + tok);
    out.push_back(v - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_summarize(const SummarizeArgs& a) {
  std::vector<uglt::StoreContents> stores;
  for (const auto& p : expand_store_paths(a.stores)) stores.push_back(uglt::read_store(p));
  uglt::StoreContents all = uglt::merge_stores(std::move(stores));
  for (const auto& w : all.warnings) std::cerr << "warning: " << w << '\n';
  if (all.draws.empty()) throw std::runtime_error("the stores contain no draws");

  uglt::SummaryOptions opts;
  opts.target_r = a.target_r;
  opts.choice = a.choice == "hpm" ? uglt::PivotChoice::Hpm : uglt::PivotChoice::Modal;
  if (!a.pivots.empty()) {
    opts.choice = uglt::PivotChoice::Explicit;
    opts.pivots = parse_pivot_list(a.pivots, all.manifest.m);
  }
  const uglt::PosteriorSummary s = uglt::summarize(all.draws, opts);
  uglt::write_summary_files(s, a.out, all.manifest.names);
  std::ifstream report(fs::path(a.out) / "report.txt");
  std::cout << report.rdbuf();
  return kExitOk;
}

// ---------------------------------------------------------------- check-id

int run_check_id(const std::string& path) {
  const uglt::SparsityMatrix delta = uglt::read_indicator_matrix(path);
  if (!delta.is_uglt()) std::cerr << "warning: pivots are not distinct, so the structure is not UGLT\n";
  const auto res = uglt::counting_rule_check(delta);
  if (res.identified) {
    std::cout << "identified\n";
  } else {
    std::cout << "not identified: columns";
    for (int j : res.witness) std::cout << ' ' << j + 1;
    std::cout << " violate the counting rule\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Bayesian exploratory factor analysis with an unknown number of factors"};
  app.set_version_flag("--version", std::string(uglt::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset and its ground truth");
  sim_cmd->add_option("--m", sim.m, "Number of features for the default block structure")->check(CLI::Range(3, 1000));
  sim_cmd->add_option("--T", sim.T, "Number of observations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--r", sim.r, "Number of factors for the default block structure")->check(CLI::Range(1, 500));
  sim_cmd->add_option("--delta", sim.delta_path, "Indicator matrix file replacing the block structure")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--loading-scale", sim.loading_scale, "Scale of the loadings");
  sim_cmd->add_option("--sigma2", sim.sigma2, "Idiosyncratic variance of every feature");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_flag("--fixed-pivots", sim.fixed_pivots, "Set every pivot loading to the loading scale");
  sim_cmd->add_option("--out", sim.out, "Output directory");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run the sampler and write draw stores");
  fit_cmd->add_option("--data", fit.data, "CSV file, one observation per row")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--config", fit.config, "Key-value configuration file")->check(CLI::ExistingFile);
  fit_cmd->add_option("--set", fit.overrides, "Extra key=value setting (repeatable)");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--draws", fit.draws, "Retained draws per chain")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--burnin", fit.burnin, "Burn-in sweeps")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--thin", fit.thin, "Thinning interval")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--chains", fit.chains, "Number of chains, run in parallel")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--k", fit.k, "Maximum number of columns")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--progress", fit.progress, "Print a progress line every N sweeps");
  fit_cmd->add_flag("--binary", fit.binary, "Write compact binary stores");
  fit_cmd->add_option("--out", fit.out, "Output directory");

  SummarizeArgs sum;
  auto* sum_cmd = app.add_subcommand("summarize", "Post-process draw stores");
  sum_cmd->add_option("--store", sum.stores, "Store files or fit directories")->required();
  sum_cmd->add_option("--target-r", sum.target_r, "Restrict the pivot posterior to this number of factors")
      ->check(CLI::PositiveNumber);
  sum_cmd->add_option("--pivots", sum.pivots, "Comma-separated 1-based pivot rows for model averaging");
  sum_cmd->add_option("--pivot-choice", sum.choice, "Pivots for model averaging when --pivots is absent")
      ->check(CLI::IsMember({"modal", "hpm"}));
  sum_cmd->add_option("--out", sum.out, "Output directory");

  std::string delta_path;
  auto* id_cmd = app.add_subcommand("check-id", "Apply the counting rule to an indicator matrix file");
  id_cmd->add_option("delta", delta_path, "Indicator matrix file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim_cmd) return run_simulate(sim);
    if (*fit_cmd) return run_fit(fit);
    if (*sum_cmd) return run_summarize(sum);
    if (*id_cmd) return run_check_id(delta_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
