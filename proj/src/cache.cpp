#include "affhecke/cache.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

namespace ahk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "affhecke-cache/1";

std::string hex(uint64_t h) { return fmt::format("{:016x}", h); }

std::string file_for(const std::string& dir, uint64_t h) { return (fs::path(dir) / ("affhecke-" + hex(h) + ".jsonl")).string(); }

// payload on success, nullopt when the line is unusable
std::optional<json> checked_payload(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("p") || !j.contains("ck") || !j["ck"].is_string())
    return std::nullopt;
  if (hex(fnv1a(j["p"].dump())) != j["ck"].get<std::string>()) return std::nullopt;
  return j["p"];
}

std::optional<uint64_t> header_hash(const std::string& line) {
  json h = json::parse(line, nullptr, false);
  if (h.is_discarded() || !h.is_object() || h.value("format", "") != kFormat || !h.contains("datum_hash"))
    return std::nullopt;
  try {
    return std::stoull(h["datum_hash"].get<std::string>(), nullptr, 16);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string default_cache_dir() {
  if (const char* d = std::getenv("AFFHECKE_CACHE_DIR"); d && *d) return d;
  return ".affhecke-cache";
}

DiskCache::DiskCache(std::string dir, const RootDatum& d) : dir_(std::move(dir)), hash_(datum_hash(d)), name_(d.name) {
  path_ = file_for(dir_, hash_);
}

CacheStats DiskCache::load(Cocenter& cc) {
  CacheStats st;
  std::ifstream in(path_);
  if (!in) return st;
  std::string line;
  if (!std::getline(in, line) || header_hash(line) != hash_) {
    st.stale = 1;
    return st;
  }
  const Engine& E = cc.engine();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto p = checked_payload(line);
    if (!p) {
      ++st.corrupt;
      continue;
    }
    try {
      std::string es = p->at("elt").get<std::string>();
      Elt w = E.parse(es);
      ClassPolys f;
      for (const auto& e : p->at("f")) {
        Elt m = E.parse(e.at(0).get<std::string>());
        f[cc.lab().class_id(m)] = XiPoly{e.at(1).get<std::vector<int64_t>>()};
      }
      cc.seed_memo(w, f);
      on_disk_.insert(es);
      ++st.loaded;
    } catch (const std::exception&) {
      ++st.corrupt;
    }
  }
  return st;
}

CacheStats DiskCache::save(Cocenter& cc) {
  CacheStats st;
  fs::create_directories(dir_);
  bool fresh = true;
  {
    std::ifstream in(path_);
    std::string line;
    if (in && std::getline(in, line) && header_hash(line) == hash_) fresh = false;
  }
  if (fresh) on_disk_.clear();
  std::ofstream out(path_, fresh ? std::ios::trunc : std::ios::app);
  if (!out) throw std::runtime_error("cannot write cache " + path_);
  if (fresh) out << json{{"format", kFormat}, {"datum_hash", hex(hash_)}, {"datum", name_}}.dump() << "\n";
  const Engine& E = cc.engine();
  for (const auto& [w, f] : cc.memo_entries()) {
    std::string es = E.format(w);
    if (on_disk_.contains(es)) continue;
    json fs_ = json::array();
    for (const auto& [id, p] : f) fs_.push_back({E.format(cc.lab().key(id).canonical_min), p.c});
    json payload = {{"elt", es}, {"f", fs_}};
    out << json{{"p", payload}, {"ck", hex(fnv1a(payload.dump()))}}.dump() << "\n";
    on_disk_.insert(es);
    ++st.written;
  }
  return st;
}

CacheStats DiskCache::gc(const std::string& dir) {
  CacheStats st;
  if (!fs::is_directory(dir)) return st;
  std::vector<fs::path> files;
  for (const auto& ent : fs::directory_iterator(dir)) {
    std::string fname = ent.path().filename().string();
    if (ent.is_regular_file() && fname.rfind("affhecke-", 0) == 0 && ent.path().extension() == ".jsonl")
      files.push_back(ent.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string header;
    auto h = std::getline(in, header) ? header_hash(header) : std::nullopt;
    if (!h || fs::path(file_for(dir, *h)).filename() != path.filename()) {
      in.close();
      fs::remove(path);
      ++st.removed_files;
      continue;
    }
    std::vector<std::string> keep;
    absl::flat_hash_set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto p = checked_payload(line);
      if (!p || !p->contains("elt") || !(*p)["elt"].is_string()) {
        ++st.corrupt;
        continue;
      }
      if (seen.insert((*p)["elt"].get<std::string>()).second) keep.push_back(line);
    }
    in.close();
    fs::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << header << "\n";
      for (const auto& l : keep) out << l << "\n";
    }
    fs::rename(tmp, path);
    st.loaded += keep.size();
  }
  return st;
}

}  // namespace ahk
