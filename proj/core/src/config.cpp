#include "uglt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace uglt {

std::string to_string(EspFamily f) { return f == EspFamily::OneParameter ? "1pb" : "2pb"; }

std::string to_string(SlabFamily f) {
  switch (f) {
    case SlabFamily::GaussianFixed: return "gaussian_fixed";
    case SlabFamily::GaussianColumn: return "gaussian_column";
    case SlabFamily::GaussianTriple: return "gaussian_triple";
    case SlabFamily::Fractional: return "fractional";
  }
  return "?";
}

std::string to_string(ScaleFamily f) {
  switch (f) {
    case ScaleFamily::Fixed: return "fixed";
    case ScaleFamily::InvGamma: return "invgamma";
    case ScaleFamily::F: return "f";
  }
  return "?";
}

std::string to_string(IdioScaling f) { return f == IdioScaling::Fixed ? "fixed" : "heywood"; }

std::string to_string(BoostMode f) {
  switch (f) {
    case BoostMode::None: return "none";
    case BoostMode::Asis: return "asis";
    case BoostMode::Mda: return "mda";
    case BoostMode::Column: return "column";
    case BoostMode::Auto: return "auto";
  }
  return "?";
}

std::string to_string(AsisAnchor f) { return f == AsisAnchor::MaxAbs ? "max" : "pivot"; }

BoostMode effective_boost_mode(const PriorConfig& p) {
  if (p.boost.mode != BoostMode::Auto) return p.boost.mode;
  if (p.slab == SlabFamily::Fractional) return BoostMode::Asis;
  if (p.has_column_scale() && p.theta.family != ScaleFamily::Fixed) return BoostMode::Column;
  return BoostMode::None;
}

void validate(const PriorConfig& p) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid prior configuration: " + what);
  };
  need(p.alpha.shape > 0 && p.alpha.rate > 0, "alpha hyperprior must have positive shape and rate");
  need(p.gamma.shape > 0 && p.gamma.rate > 0, "gamma hyperprior must have positive shape and rate");
  need(p.A0 > 0, "slab.A0 must be positive");
  need(p.fraction >= 0 && p.fraction < 1, "slab.fraction must lie in [0, 1)");
  auto check_scale = [&](const ScalePrior& s, const std::string& name, bool allow_fixed) {
    if (s.family == ScaleFamily::Fixed) {
      need(allow_fixed, name + ".family cannot be fixed");
      need(s.value > 0, name + ".value must be positive");
    } else if (s.family == ScaleFamily::InvGamma) {
      need(s.c > 0 && s.b > 0, name + " inverse gamma needs positive c and b");
    } else {
      need(s.a > 0 && s.c > 0, name + " F prior needs positive a and c");
    }
  };
  if (p.has_column_scale()) {
    check_scale(p.theta, "theta", true);
    check_scale(p.kappa, "kappa", true);
  }
  if (p.has_local_scale()) check_scale(p.omega, "omega", false);
  need(p.idio.c0 > 0, "idio.c0 must be positive");
  if (p.idio.scaling == IdioScaling::Fixed) need(p.idio.C0 > 0, "idio.C0 must be positive");
  else need(p.idio.c0 > 1 && p.idio.nu_o > 0 && p.idio.s_o > 0, "Heywood scaling needs c0 > 1, nu_o > 0 and s_o > 0");
  const TuningConfig& t = p.tuning;
  need(t.p_split > 0 && t.p_split <= 0.5, "tuning.p_split must lie in (0, 0.5]");
  need(t.p_shift >= 0 && t.p_switch >= 0 && t.p_shift + t.p_switch <= 1, "tuning.p_shift + tuning.p_switch must be at most 1");
  need(t.p_add > 0 && t.p_add < 1, "tuning.p_add must lie in (0, 1)");
  need(t.rw_sd_alpha >= 0 && t.rw_sd_gamma >= 0, "random-walk scales must be non-negative");
  const BoostMode mode = effective_boost_mode(p);
  if (mode == BoostMode::Asis || mode == BoostMode::Mda)
    need(p.slab == SlabFamily::Fractional, "boost.mode asis and mda require the fractional slab");
  if (mode == BoostMode::Column)
    need(p.has_column_scale() && p.theta.family != ScaleFamily::Fixed,
         "boost.mode column requires a gaussian_column or gaussian_triple slab with a random theta");
  if (mode == BoostMode::Mda) need(p.boost.mda_nu > 0 && p.boost.mda_q > 0, "boost.mda_nu and boost.mda_q must be positive");
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class Getter>
Field real_field(const std::string& key, Getter ref) {
  return {key, [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(v); }};
}

template <class Getter>
Field long_field(const std::string& key, Getter ref) {
  return {key, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, const std::string& v) {
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(parse_long(v));
          }};
}

template <class E, class Getter>
Field enum_field(const std::string& key, Getter ref, std::initializer_list<E> values) {
  std::vector<E> vals(values);
  return {key, [ref](const RunConfig& c) { return to_string(ref(const_cast<RunConfig&>(c))); },
          [ref, vals](RunConfig& c, const std::string& v) {
            for (E e : vals)
              if (to_string(e) == v) {
                ref(c) = e;
                return;
              }
            std::string allowed;
            for (E e : vals) allowed += (allowed.empty() ? "" : "|") + to_string(e);
            throw std::invalid_argument("expected one of " + allowed + ", got '" + v + "'");
          }};
}

void add_scale(std::vector<Field>& f, const std::string& name, ScalePrior PriorConfig::*member) {
  f.push_back(enum_field<ScaleFamily>(name + ".family", [member](RunConfig& c) -> ScaleFamily& { return (c.prior.*member).family; },
                                      {ScaleFamily::Fixed, ScaleFamily::InvGamma, ScaleFamily::F}));
  f.push_back(real_field(name + ".a", [member](RunConfig& c) -> double& { return (c.prior.*member).a; }));
  f.push_back(real_field(name + ".b", [member](RunConfig& c) -> double& { return (c.prior.*member).b; }));
  f.push_back(real_field(name + ".c", [member](RunConfig& c) -> double& { return (c.prior.*member).c; }));
  f.push_back(real_field(name + ".value", [member](RunConfig& c) -> double& { return (c.prior.*member).value; }));
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> f;
    using R = RunConfig;
    f.push_back(enum_field<EspFamily>("esp.family", [](R& c) -> EspFamily& { return c.prior.esp; },
                                      {EspFamily::OneParameter, EspFamily::TwoParameter}));
    f.push_back(real_field("esp.alpha.shape", [](R& c) -> double& { return c.prior.alpha.shape; }));
    f.push_back(real_field("esp.alpha.rate", [](R& c) -> double& { return c.prior.alpha.rate; }));
    f.push_back(real_field("esp.gamma.shape", [](R& c) -> double& { return c.prior.gamma.shape; }));
    f.push_back(real_field("esp.gamma.rate", [](R& c) -> double& { return c.prior.gamma.rate; }));
    f.push_back(enum_field<SlabFamily>("slab.family", [](R& c) -> SlabFamily& { return c.prior.slab; },
                                       {SlabFamily::GaussianFixed, SlabFamily::GaussianColumn,
                                        SlabFamily::GaussianTriple, SlabFamily::Fractional}));
    f.push_back(real_field("slab.A0", [](R& c) -> double& { return c.prior.A0; }));
    f.push_back(real_field("slab.fraction", [](R& c) -> double& { return c.prior.fraction; }));
    add_scale(f, "theta", &PriorConfig::theta);
    add_scale(f, "omega", &PriorConfig::omega);
    add_scale(f, "kappa", &PriorConfig::kappa);
    f.push_back(real_field("idio.c0", [](R& c) -> double& { return c.prior.idio.c0; }));
    f.push_back(enum_field<IdioScaling>("idio.scaling", [](R& c) -> IdioScaling& { return c.prior.idio.scaling; },
                                        {IdioScaling::Fixed, IdioScaling::Heywood}));
    f.push_back(real_field("idio.C0", [](R& c) -> double& { return c.prior.idio.C0; }));
    f.push_back(real_field("idio.nu_o", [](R& c) -> double& { return c.prior.idio.nu_o; }));
    f.push_back(real_field("idio.s_o", [](R& c) -> double& { return c.prior.idio.s_o; }));
    f.push_back(real_field("tuning.p_split", [](R& c) -> double& { return c.prior.tuning.p_split; }));
    f.push_back(real_field("tuning.p_shift", [](R& c) -> double& { return c.prior.tuning.p_shift; }));
    f.push_back(real_field("tuning.p_switch", [](R& c) -> double& { return c.prior.tuning.p_switch; }));
    f.push_back(real_field("tuning.p_add", [](R& c) -> double& { return c.prior.tuning.p_add; }));
    f.push_back(real_field("tuning.rw_sd_alpha", [](R& c) -> double& { return c.prior.tuning.rw_sd_alpha; }));
    f.push_back(real_field("tuning.rw_sd_gamma", [](R& c) -> double& { return c.prior.tuning.rw_sd_gamma; }));
    f.push_back(enum_field<BoostMode>("boost.mode", [](R& c) -> BoostMode& { return c.prior.boost.mode; },
                                      {BoostMode::None, BoostMode::Asis, BoostMode::Mda, BoostMode::Column,
                                       BoostMode::Auto}));
    f.push_back(enum_field<AsisAnchor>("boost.anchor", [](R& c) -> AsisAnchor& { return c.prior.boost.anchor; },
                                       {AsisAnchor::MaxAbs, AsisAnchor::Pivot}));
    f.push_back(real_field("boost.mda_nu", [](R& c) -> double& { return c.prior.boost.mda_nu; }));
    f.push_back(real_field("boost.mda_q", [](R& c) -> double& { return c.prior.boost.mda_q; }));
    f.push_back(long_field("chain.k", [](R& c) -> int& { return c.chain.k; }));
    f.push_back(long_field("chain.draws", [](R& c) -> long& { return c.chain.draws; }));
    f.push_back(long_field("chain.burnin", [](R& c) -> long& { return c.chain.burnin; }));
    f.push_back(long_field("chain.thin", [](R& c) -> long& { return c.chain.thin; }));
    f.push_back({"chain.seed", [](const R& c) { return std::to_string(c.chain.seed); },
                 [](R& c, const std::string& v) {
                   std::uint64_t s = 0;
                   const auto res = std::from_chars(v.data(), v.data() + v.size(), s);
                   if (res.ec != std::errc() || res.ptr != v.data() + v.size())
                     throw std::invalid_argument("not a seed: '" + v + "'");
                   c.chain.seed = s;
                 }});
    f.push_back(long_field("chain.chains", [](R& c) -> int& { return c.chain.chains; }));
    f.push_back(long_field("chain.progress_every", [](R& c) -> long& { return c.chain.progress_every; }));
    f.push_back(long_field("init.r", [](R& c) -> int& { return c.chain.init.r; }));
    f.push_back(long_field("init.r_sp", [](R& c) -> int& { return c.chain.init.r_sp; }));
    f.push_back(long_field("init.u1", [](R& c) -> int& { return c.chain.init.u1; }));
    f.push_back(real_field("init.p_zero", [](R& c) -> double& { return c.chain.init.p_zero; }));
    f.push_back(long_field("init.gibbs_iters", [](R& c) -> int& { return c.chain.init.gibbs_iters; }));
    f.push_back(long_field("init.max_tries", [](R& c) -> int& { return c.chain.init.max_tries; }));
    f.push_back({"data.demean", [](const R& c) { return std::string(c.demean ? "true" : "false"); },
                 [](R& c, const std::string& v) { c.demean = parse_bool(v); }});
    f.push_back({"data.standardize", [](const R& c) { return std::string(c.standardize ? "true" : "false"); },
                 [](R& c, const std::string& v) { c.standardize = parse_bool(v); }});
    std::sort(f.begin(), f.end(), [](const Field& a, const Field& b) { return a.key < b.key; });
    return f;
  }();
  return f;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  const auto& f = fields();
  for (const auto& [key, value] : kv) {
    const auto it = std::lower_bound(f.begin(), f.end(), key, [](const Field& x, const std::string& k) { return x.key < k; });
    if (it == f.end() || it->key != key) throw std::invalid_argument("unknown config key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  apply_key_values(cfg, parse_key_values(ss.str()));
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace uglt
