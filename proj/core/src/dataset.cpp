#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uglt/config.hpp"
#include "uglt/dataset_io.hpp"
#include "uglt/random.hpp"

namespace uglt {

namespace {

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == sep && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV: empty input");
  Dataset d;
  d.names = split_fields(line, ',');
  const std::size_t m = d.names.size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != m)
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(m) +
                                  " fields, found " + std::to_string(fields.size()));
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) {
      try {
        row[i] = parse_double(fields[i]);
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument("CSV line " + std::to_string(lineno) + ", column '" + d.names[i] +
                                    "': not a number: '" + fields[i] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("CSV: no observations");
  d.y.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t i = 0; i < m; ++i) d.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[t][i];
  return d;
}

Dataset read_csv(const std::string& path) { return parse_csv(slurp(path)); }

void demean(Dataset& data) {
  data.means = data.y.rowwise().mean();
  data.y.colwise() -= data.means;
  data.sds = Eigen::VectorXd::Ones(data.m());
  data.demeaned = true;
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  Dataset d = read_csv(path);
  if (d.m() < 3)
    throw std::invalid_argument(path + ": need at least 3 features, found " + std::to_string(d.m()));
  if (options.standardize) standardize(d);
  else if (options.demean) demean(d);
  return d;
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < data.m(); ++i) {
    if (i) out << ',';
    out << (i < static_cast<int>(data.names.size()) ? data.names[i] : "y" + std::to_string(i + 1));
  }
  out << '\n';
  for (int t = 0; t < data.T(); ++t) {
    for (int i = 0; i < data.m(); ++i) {
      if (i) out << ',';
      out << format_double(data.y(i, t));
    }
    out << '\n';
  }
}

SparsityMatrix parse_indicator_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<int>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (char& c : line)
      if (c == ',' || c == '\t' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::vector<int> row;
    std::string tok;
    while (ls >> tok) {
      if (tok != "0" && tok != "1")
        throw std::invalid_argument("indicator matrix line " + std::to_string(lineno) + ": entries must be 0 or 1");
      row.push_back(tok == "1");
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("indicator matrix line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("indicator matrix: no rows");
  SparsityMatrix d(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) d.set(static_cast<int>(i), static_cast<int>(j), rows[i][j] != 0);
  return d;
}

SparsityMatrix read_indicator_matrix(const std::string& path) { return parse_indicator_matrix(slurp(path)); }

void write_indicator_matrix(const std::string& path, const SparsityMatrix& delta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < delta.rows(); ++i) {
    for (int j = 0; j < delta.cols(); ++j) out << (j ? " " : "") << (delta(i, j) ? 1 : 0);
    out << '\n';
  }
}

SimulatedData simulate_dataset(const SimulationSpec& spec) {
  const int m = spec.delta.rows(), r = spec.delta.cols(), T = spec.T;
  if (m < 1 || T < 1) throw std::invalid_argument("simulate: need m >= 1 and T >= 1");
  if (spec.sigma2.size() != m) throw std::invalid_argument("simulate: sigma2 must have m entries");
  for (int i = 0; i < m; ++i)
    if (!(spec.sigma2(i) > 0.0))
      throw std::invalid_argument("simulate: idiosyncratic variance of row " + std::to_string(i) + " must be positive");
  if (!spec.delta.is_uglt()) throw std::invalid_argument("simulate: pivots of the structure are not distinct");

  Rng rng(spec.seed);
  SimulatedData out;
  out.delta = spec.delta;
  out.sigma2 = spec.sigma2;
  out.lambda = Eigen::MatrixXd::Zero(m, r);
  for (int j = 0; j < r; ++j) {
    const int p = spec.delta.pivot(j);
    for (int i = 0; i < m; ++i) {
      if (!spec.delta(i, j)) continue;
      const double mag = std::abs(rng.normal());
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (i == p) out.lambda(i, j) = spec.fixed_pivots ? spec.loading_scale : spec.loading_scale * mag;
      else out.lambda(i, j) = spec.loading_scale * sign * mag;
    }
  }
  out.factors.resize(r, T);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < r; ++j) out.factors(j, t) = rng.normal();
  out.data.y = out.lambda * out.factors;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) out.data.y(i, t) += std::sqrt(spec.sigma2(i)) * rng.normal();
  for (int i = 0; i < m; ++i) out.data.names.push_back("y" + std::to_string(i + 1));
  return out;
}

SparsityMatrix block_structure(int m, int r) {
  if (r < 1 || m < 2 * r) throw std::invalid_argument("block_structure: need m >= 2 r and r >= 1");
  SparsityMatrix d(m, r);
  const int size = m / r;
  for (int j = 0; j < r; ++j) {
    const int start = j * size;
    const int stop = j + 1 == r ? m : start + size;
    for (int i = start; i < stop; ++i) d.set(i, j, true);
  }
  return d;
}

}  // namespace uglt
