#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "uglt/prior.hpp"

namespace uglt {

struct RunConfig {
  PriorConfig prior;
  ChainConfig chain;
  bool demean = true;
  bool standardize = true;  // implies demeaning
};

// Flat "key = value" text with dotted keys; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Apply key-value pairs on top of `cfg`. Unknown keys and malformed values
// throw std::invalid_argument naming the key.
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv);

RunConfig load_config_file(const std::string& path);

// Canonical text listing every key in sorted order; parsing it back gives
// the same configuration.
std::string to_config_text(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace uglt
