#include "uglt/drawstore.hpp"

#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "uglt/config.hpp"
#include "uglt/sampler.hpp"

namespace uglt {

namespace {

constexpr const char* kTextHeader = "uglt-draws 1";
constexpr char kBinaryMagic[8] = {'U', 'G', 'L', 'T', 'B', 'I', 'N', '1'};

void put_doubles(std::ostringstream& os, const std::vector<double>& v) {
  for (std::size_t n = 0; n < v.size(); ++n) os << (n ? " " : "") << format_double(v[n]);
}

// Splits a record into its '|' separated groups of whitespace tokens.
std::vector<std::vector<std::string>> split_groups(const std::string& line) {
  std::vector<std::vector<std::string>> groups(1);
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok == "|") groups.emplace_back();
    else groups.back().push_back(tok);
  }
  return groups;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::vector<double> parse_doubles(const std::vector<std::string>& g) {
  std::vector<double> v;
  v.reserve(g.size());
  for (const auto& s : g) v.push_back(parse_double(s));
  return v;
}

// Binary payloads: little-endian int64 and IEEE doubles, in the same field
// order as the text layout.
struct ByteWriter {
  std::string buf;
  void i64(std::int64_t v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); }
  void f64(double v) { buf.append(reinterpret_cast<const char*>(&v), sizeof v); }
  void doubles(const std::vector<double>& v) {
    i64(static_cast<std::int64_t>(v.size()));
    for (double x : v) f64(x);
  }
};

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw std::invalid_argument("record payload too short");
  }
  std::int64_t i64() {
    need(8);
    std::int64_t v;
    std::memcpy(&v, buf.data() + pos, 8);
    pos += 8;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, buf.data() + pos, 8);
    pos += 8;
    return v;
  }
  std::vector<double> doubles() {
    const std::int64_t n = i64();
    if (n < 0 || static_cast<std::size_t>(n) > buf.size()) throw std::invalid_argument("bad vector length");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = f64();
    return v;
  }
};

std::string encode_binary(const DrawRecord& r) {
  ByteWriter w;
  w.i64(r.chain);
  w.i64(r.iter);
  w.i64(r.m);
  w.i64(r.r);
  w.i64(r.r_sp);
  w.i64(r.d());
  for (const auto& [i, j] : r.support) {
    w.i64(i);
    w.i64(j);
  }
  w.doubles(r.loadings);
  w.doubles(r.sigma2);
  w.doubles(r.tau);
  w.f64(r.alpha);
  w.f64(r.gamma);
  w.i64(r.kappa ? 1 : 0);
  if (r.kappa) w.f64(*r.kappa);
  w.doubles(r.theta);
  w.i64(static_cast<std::int64_t>(r.counters.size()));
  for (long c : r.counters) w.i64(c);
  return w.buf;
}

void validate_record(const DrawRecord& r) {
  if (r.m < 1 || r.r < 0 || r.r_sp < 0) throw std::invalid_argument("bad dimensions");
  if (r.loadings.size() != r.support.size()) throw std::invalid_argument("loadings do not match the support");
  if (static_cast<int>(r.sigma2.size()) != r.m) throw std::invalid_argument("sigma2 has the wrong length");
  if (static_cast<int>(r.tau.size()) != r.r) throw std::invalid_argument("tau has the wrong length");
  for (const auto& [i, j] : r.support)
    if (i < 0 || i >= r.m || j < 0 || j >= r.r) throw std::invalid_argument("support entry out of range");
}

DrawRecord decode_binary(const std::string& buf) {
  ByteReader rd{buf};
  DrawRecord r;
  r.chain = static_cast<int>(rd.i64());
  r.iter = static_cast<long>(rd.i64());
  r.m = static_cast<int>(rd.i64());
  r.r = static_cast<int>(rd.i64());
  r.r_sp = static_cast<int>(rd.i64());
  const std::int64_t d = rd.i64();
  if (d < 0 || static_cast<std::size_t>(d) > buf.size()) throw std::invalid_argument("bad support size");
  for (std::int64_t n = 0; n < d; ++n) {
    const int i = static_cast<int>(rd.i64());
    const int j = static_cast<int>(rd.i64());
    r.support.emplace_back(i, j);
  }
  r.loadings = rd.doubles();
  r.sigma2 = rd.doubles();
  r.tau = rd.doubles();
  r.alpha = rd.f64();
  r.gamma = rd.f64();
  if (rd.i64()) r.kappa = rd.f64();
  r.theta = rd.doubles();
  const std::int64_t nc = rd.i64();
  if (nc < 0 || static_cast<std::size_t>(nc) > buf.size()) throw std::invalid_argument("bad counter count");
  for (std::int64_t n = 0; n < nc; ++n) r.counters.push_back(static_cast<long>(rd.i64()));
  if (rd.pos != buf.size()) throw std::invalid_argument("trailing bytes in record");
  validate_record(r);
  return r;
}

StoreContents read_text_store(std::istream& in, const std::string& path) {
  StoreContents out;
  std::string line;
  std::getline(in, line);
  if (line != kTextHeader) throw std::runtime_error(path + ": not a draw store (bad header)");
  int lineno = 1;
  bool have_manifest = false;
  while (std::getline(in, line)) {
    ++lineno;
    const bool complete = !in.eof();
    if (line.empty()) continue;
    if (line.rfind("#manifest ", 0) == 0) {
      try {
        out.manifest = manifest_from_json(line.substr(10));
      } catch (const std::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad manifest: " + e.what());
      }
      have_manifest = true;
      continue;
    }
    if (line[0] == '#') continue;
    try {
      out.draws.push_back(parse_record(line));
    } catch (const std::exception& e) {
      if (!complete) {
        out.warnings.push_back(path + ":" + std::to_string(lineno) + ": dropped truncated final record");
        break;
      }
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": corrupt record: " + e.what());
    }
    if (!complete)
      out.warnings.push_back(path + ":" + std::to_string(lineno) + ": final record has no line terminator");
  }
  if (!have_manifest) throw std::runtime_error(path + ": missing manifest");
  return out;
}

StoreContents read_binary_store(std::istream& in, const std::string& path) {
  StoreContents out;
  auto read_block = [&](std::string& buf) -> int {
    std::int64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    if (in.gcount() == 0) return 0;
    if (in.gcount() != 8 || len < 0 || len > (std::int64_t{1} << 31)) return -1;
    buf.assign(static_cast<std::size_t>(len), '\0');
    in.read(buf.data(), len);
    return in.gcount() == len ? 1 : -1;
  };
  std::string buf;
  if (read_block(buf) != 1) throw std::runtime_error(path + ": missing manifest");
  out.manifest = manifest_from_json(buf);
  long index = 0;
  while (true) {
    const int status = read_block(buf);
    if (status == 0) break;
    ++index;
    if (status < 0) {
      out.warnings.push_back(path + ": record " + std::to_string(index) + ": dropped truncated final record");
      break;
    }
    try {
      out.draws.push_back(decode_binary(buf));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": record " + std::to_string(index) + ": corrupt record: " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string manifest_to_json(const StoreManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["library_version"] = m.library_version;
  j["config_hash"] = m.config_hash;
  j["data_fingerprint"] = m.data_fingerprint;
  j["m"] = m.m;
  j["k"] = m.k;
  j["chain"] = m.chain;
  j["seed"] = m.seed;
  j["names"] = m.names;
  j["config"] = m.config_text;
  return j.dump();
}

StoreManifest manifest_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  StoreManifest m;
  m.version = j.at("version").get<int>();
  if (m.version != 1) throw std::runtime_error("unsupported store version " + std::to_string(m.version));
  m.library_version = j.value("library_version", "");
  m.config_hash = j.at("config_hash").get<std::string>();
  m.data_fingerprint = j.value("data_fingerprint", "");
  m.m = j.at("m").get<int>();
  m.k = j.at("k").get<int>();
  m.chain = j.value("chain", 0);
  m.seed = j.value("seed", std::uint64_t{0});
  m.names = j.value("names", std::vector<std::string>{});
  m.config_text = j.value("config", "");
  return m;
}

std::string format_record(const DrawRecord& r) {
  std::ostringstream os;
  os << r.chain << ' ' << r.iter << ' ' << r.m << ' ' << r.r << ' ' << r.r_sp << ' ' << r.d() << " |";
  for (const auto& [i, j] : r.support) os << ' ' << i << ' ' << j;
  os << " | ";
  put_doubles(os, r.loadings);
  os << " | ";
  put_doubles(os, r.sigma2);
  os << " | ";
  put_doubles(os, r.tau);
  os << " | " << format_double(r.alpha) << ' ' << format_double(r.gamma) << " | ";
  os << (r.kappa ? format_double(*r.kappa) : std::string("-")) << " | ";
  put_doubles(os, r.theta);
  os << " |";
  for (long c : r.counters) os << ' ' << c;
  return os.str();
}

DrawRecord parse_record(const std::string& line) {
  const auto g = split_groups(line);
  if (g.size() != 9) throw std::invalid_argument("expected 9 field groups, found " + std::to_string(g.size()));
  if (g[0].size() != 6) throw std::invalid_argument("header group must have 6 fields");
  DrawRecord r;
  r.chain = static_cast<int>(parse_long(g[0][0]));
  r.iter = parse_long(g[0][1]);
  r.m = static_cast<int>(parse_long(g[0][2]));
  r.r = static_cast<int>(parse_long(g[0][3]));
  r.r_sp = static_cast<int>(parse_long(g[0][4]));
  const long d = parse_long(g[0][5]);
  if (static_cast<long>(g[1].size()) != 2 * d) throw std::invalid_argument("support size does not match d");
  for (long n = 0; n < d; ++n)
    r.support.emplace_back(static_cast<int>(parse_long(g[1][2 * n])), static_cast<int>(parse_long(g[1][2 * n + 1])));
  r.loadings = parse_doubles(g[2]);
  r.sigma2 = parse_doubles(g[3]);
  r.tau = parse_doubles(g[4]);
  if (g[5].size() != 2) throw std::invalid_argument("expected alpha and gamma");
  r.alpha = parse_double(g[5][0]);
  r.gamma = parse_double(g[5][1]);
  if (g[6].size() != 1) throw std::invalid_argument("expected one kappa field");
  if (g[6][0] != "-") r.kappa = parse_double(g[6][0]);
  r.theta = parse_doubles(g[7]);
  for (const auto& s : g[8]) r.counters.push_back(parse_long(s));
  if (r.counters.size() != MoveCounters::names().size())
    throw std::invalid_argument("expected " + std::to_string(MoveCounters::names().size()) + " counters");
  validate_record(r);
  return r;
}

StoreWriter::StoreWriter(const std::string& path, const StoreManifest& manifest, StoreFormat format)
    : out_(path, std::ios::binary | std::ios::trunc), format_(format) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  const std::string json = manifest_to_json(manifest);
  if (format_ == StoreFormat::Text) {
    out_ << kTextHeader << '\n' << "#manifest " << json << '\n';
  } else {
    out_.write(kBinaryMagic, 8);
    const auto len = static_cast<std::int64_t>(json.size());
    out_.write(reinterpret_cast<const char*>(&len), 8);
    out_.write(json.data(), len);
  }
}

void StoreWriter::write(const DrawRecord& rec) {
  if (format_ == StoreFormat::Text) {
    out_ << format_record(rec) << '\n';
  } else {
    const std::string payload = encode_binary(rec);
    const auto len = static_cast<std::int64_t>(payload.size());
    out_.write(reinterpret_cast<const char*>(&len), 8);
    out_.write(payload.data(), len);
  }
  if (!out_) throw std::runtime_error("write to draw store failed");
  ++written_;
}

void StoreWriter::flush() { out_.flush(); }

void StoreWriter::close() {
  if (out_.is_open()) out_.close();
}

StoreContents read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8] = {};
  in.read(magic, 8);
  StoreContents out;
  if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0) {
    out = read_binary_store(in, path);
  } else {
    in.clear();
    in.seekg(0);
    out = read_text_store(in, path);
  }
  const std::string recomputed = hex64(fnv1a(out.manifest.config_text));
  if (recomputed != out.manifest.config_hash)
    out.warnings.push_back(path + ": manifest configuration hash " + out.manifest.config_hash +
                           " does not match its configuration text (" + recomputed + ")");
  return out;
}

StoreContents merge_stores(std::vector<StoreContents> stores) {
  if (stores.empty()) throw std::invalid_argument("merge_stores: no stores");
  StoreContents out;
  out.manifest = stores.front().manifest;
  std::set<int> used;
  for (std::size_t s = 0; s < stores.size(); ++s) {
    auto& st = stores[s];
    out.warnings.insert(out.warnings.end(), st.warnings.begin(), st.warnings.end());
    if (st.manifest.config_hash != out.manifest.config_hash)
      out.warnings.push_back("store " + std::to_string(s + 1) + ": configuration hash " + st.manifest.config_hash +
                             " differs from " + out.manifest.config_hash);
    if (st.manifest.data_fingerprint != out.manifest.data_fingerprint)
      out.warnings.push_back("store " + std::to_string(s + 1) + ": data fingerprint differs");
    if (st.manifest.m != out.manifest.m)
      throw std::runtime_error("store " + std::to_string(s + 1) + ": number of features differs");
    std::set<int> ids;
    for (const auto& d : st.draws) ids.insert(d.chain);
    std::map<int, int> remap;
    for (int id : ids) {
      int target = id;
      if (used.count(target)) {
        target = used.empty() ? 0 : *used.rbegin() + 1;
        out.warnings.push_back("store " + std::to_string(s + 1) + ": chain id " + std::to_string(id) +
                               " already present, renumbered to " + std::to_string(target));
      }
      remap[id] = target;
      used.insert(target);
    }
    for (auto& d : st.draws) {
      d.chain = remap[d.chain];
      out.draws.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace uglt
