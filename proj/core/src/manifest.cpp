// Copyright 2026 The cmfal Authors
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

#include "cmfal/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cmfal/types.hpp"

namespace cmfal {

std::string tool_version() { return "0.1.0"; }

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot fingerprint missing file: " + path.string());
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001B3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_path"] = manifest.config_path;
  j["config"] = manifest.resolved_config;
  j["inputs"] = manifest.input_fingerprints;
  j["outputs"] = manifest.outputs;
  j["tool_version"] = manifest.tool_version;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace cmfal
