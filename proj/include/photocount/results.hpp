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

#pragma once

// Result directories. Each completed run lives in <root>/<kind>-<key> with a
// manifest.json that records the resolved config, a hash of every file and a
// summary. Directories are built under a temporary name and renamed into
// place, so an interrupted run leaves nothing behind that looks complete.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace photocount::results {

namespace fs = std::filesystem;

/// PHOTOCOUNT_RESULTS_DIR wins over the configured directory.
fs::path results_root(const std::string& configured);

struct Stored {
  fs::path dir;
  fs::path manifest;
  nlohmann::json summary;
  bool cache_hit = false;
};

/// The completed run for (kind, key), if any. Reruns made with --force
/// (suffix -rN) are not considered.
std::optional<Stored> lookup(const fs::path& root, const std::string& kind, const std::string& key);

class Writer {
 public:
  Writer(fs::path root, std::string kind, std::string key, nlohmann::json config);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void add_file(const std::string& name, const std::string& content);
  /// Writes the manifest and moves the directory into place. When the base
  /// name is taken the first free <kind>-<key>-rN is used; existing
  /// manifests are never touched.
  Stored commit(const nlohmann::json& summary, const nlohmann::json& extra = nlohmann::json::object());

 private:
  fs::path root_, tmp_;
  std::string kind_, key_;
  nlohmann::json config_;
  std::vector<std::pair<std::string, std::string>> files_;  // name, fnv1a64
  std::string started_;
  bool committed_ = false;
};

std::string utc_timestamp();

}  // namespace photocount::results
