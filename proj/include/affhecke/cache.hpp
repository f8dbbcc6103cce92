#pragma once

#include <cstdint>
#include <string>

#include "affhecke/cocenter.hpp"

namespace ahk {

// $AFFHECKE_CACHE_DIR, else .affhecke-cache in the working directory
std::string default_cache_dir();

struct CacheStats {
  size_t loaded = 0;
  size_t corrupt = 0;     // bad checksum or unparsable line, never used
  size_t stale = 0;       // header bound to another datum
  size_t written = 0;
  size_t removed_files = 0;
};

// Append-only JSON lines of class polynomials for one datum. The first line binds the
// datum hash; each entry carries an FNV-1a checksum of its payload.
class DiskCache {
 public:
  DiskCache(std::string dir, const RootDatum& d);
  const std::string& path() const { return path_; }
  CacheStats load(Cocenter& cc);
  // appends memo entries not yet on disk
  CacheStats save(Cocenter& cc);

  // drops corrupt and duplicate entries, deletes files whose header is broken or does not
  // match their name
  static CacheStats gc(const std::string& dir);

 private:
  std::string dir_, path_;
  uint64_t hash_;
  std::string name_;
  absl::flat_hash_set<std::string> on_disk_;
};

}  // namespace ahk
