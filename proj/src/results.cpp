// Copyright 2026 The Photocount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "photocount/results.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "photocount/config.hpp"
#include "photocount/errors.hpp"

namespace photocount::results {

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot read '" + p.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  f << content;
  f.close();
  if (!f) throw IoError("short write to '" + p.string() + "'");
}

}  // namespace

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path results_root(const std::string& configured) {
  if (const char* env = std::getenv("PHOTOCOUNT_RESULTS_DIR"); env && *env) return env;
  return configured;
}

std::optional<Stored> lookup(const fs::path& root, const std::string& kind, const std::string& key) {
  fs::path dir = root / (kind + "-" + key);
  fs::path manifest = dir / "manifest.json";
  std::error_code ec;
  if (!fs::is_regular_file(manifest, ec)) return std::nullopt;
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest));
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // not ours or damaged; a fresh run goes to -rN
  }
  if (m.value("kind", "") != kind || m.value("key", "") != key) return std::nullopt;
  Stored s;
  s.dir = dir;
  s.manifest = manifest;
  s.summary = m.value("summary", nlohmann::json::object());
  s.cache_hit = true;
  return s;
}

Writer::Writer(fs::path root, std::string kind, std::string key, nlohmann::json config)
    : root_(std::move(root)), kind_(std::move(kind)), key_(std::move(key)), config_(std::move(config)),
      started_(utc_timestamp()) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create results root '" + root_.string() + "': " + ec.message());
  std::random_device rd;
  std::uniform_int_distribution<unsigned long long> dist;
  char tag[17];
  std::snprintf(tag, sizeof tag, "%016llx", dist(rd));
  tmp_ = root_ / (".tmp-" + kind_ + "-" + tag);
  fs::create_directory(tmp_, ec);
  if (ec) throw IoError("cannot create '" + tmp_.string() + "': " + ec.message());
}

Writer::~Writer() {
  if (committed_) return;
  std::error_code ec;
  fs::remove_all(tmp_, ec);
}

void Writer::add_file(const std::string& name, const std::string& content) {
  if (committed_) throw IoError("result directory already committed");
  write_file(tmp_ / name, content);
  files_.emplace_back(name, config::fnv1a64_hex(content));
}

Stored Writer::commit(const nlohmann::json& summary, const nlohmann::json& extra) {
  nlohmann::json manifest;
  manifest["kind"] = kind_;
  manifest["key"] = key_;
  manifest["version"] = PHOTOCOUNT_VERSION;
  manifest["started"] = started_;
  manifest["finished"] = utc_timestamp();
  manifest["config"] = config_;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, hash] : files_) files[name] = {{"fnv1a64", hash}};
  manifest["files"] = files;
  manifest["summary"] = summary;
  for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
  write_file(tmp_ / "manifest.json", manifest.dump(2) + "\n");

  const std::string base = kind_ + "-" + key_;
  fs::path target;
  for (int r = 1;; ++r) {
    target = root_ / (r == 1 ? base : base + "-r" + std::to_string(r));
    std::error_code ec;
    if (fs::exists(target, ec)) continue;
    // rename(2) refuses to replace a non-empty directory, so a concurrent
    // writer that wins the same name just pushes us to the next suffix
    fs::rename(tmp_, target, ec);
    if (!ec) break;
    if (!fs::exists(target)) throw IoError("cannot move results into '" + target.string() + "': " + ec.message());
  }
  committed_ = true;

  std::ofstream index(root_ / "index.jsonl", std::ios::app);
  if (index) {
    index << nlohmann::json{{"dir", target.filename().string()}, {"kind", kind_}, {"key", key_},
                            {"finished", manifest["finished"]}}
                 .dump()
          << "\n";
  }

  Stored s;
  s.dir = target;
  s.manifest = target / "manifest.json";
  s.summary = summary;
  return s;
}

}  // namespace photocount::results
