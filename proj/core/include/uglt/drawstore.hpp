#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "uglt/draws.hpp"

namespace uglt {

// Run metadata written at the top of every store. It holds nothing
// time-dependent, so identical runs produce identical files.
struct StoreManifest {
  int version = 1;
  std::string library_version;
  std::string config_text;
  std::string config_hash;
  std::string data_fingerprint;
  int m = 0;
  int k = 0;
  int chain = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> names;
};

enum class StoreFormat { Text, Binary };

std::string manifest_to_json(const StoreManifest& m);
StoreManifest manifest_from_json(const std::string& json);

// Text layout: a first line "uglt-draws 1", then "#manifest <json>", then one
// line per draw: chain iter m r r_sp d | row col pairs | loadings | sigma2 |
// tau | alpha gamma | kappa or - | theta | counters. Doubles use the shortest
// round-trip representation.
std::string format_record(const DrawRecord& rec);
DrawRecord parse_record(const std::string& line);

class StoreWriter {
 public:
  StoreWriter(const std::string& path, const StoreManifest& manifest, StoreFormat format = StoreFormat::Text);
  void write(const DrawRecord& rec);
  void flush();
  void close();
  long written() const { return written_; }

 private:
  std::ofstream out_;
  StoreFormat format_;
  long written_ = 0;
};

struct StoreContents {
  StoreManifest manifest;
  std::vector<DrawRecord> draws;
  std::vector<std::string> warnings;
};

// A truncated final record is dropped with a warning; any other malformed
// record throws std::runtime_error naming the line.
StoreContents read_store(const std::string& path);

// Concatenate stores of one run. Differing configuration hashes or data
// fingerprints produce warnings; repeated chain ids are renumbered.
StoreContents merge_stores(std::vector<StoreContents> stores);

}  // namespace uglt
