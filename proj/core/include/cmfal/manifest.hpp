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

#ifndef CMFAL_MANIFEST_HPP
#define CMFAL_MANIFEST_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cmfal {

/// Provenance record written next to every output; two runs with equal
/// manifests produce byte-identical result files.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::map<std::string, std::string> resolved_config;
  std::map<std::string, std::string> input_fingerprints;  // path -> fnv1a hash
  std::vector<std::string> outputs;
  std::string tool_version;
};

std::string tool_version();

/// FNV-1a (64-bit) over the file bytes, as a hex string.
std::string file_fingerprint(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace cmfal

#endif  // CMFAL_MANIFEST_HPP
