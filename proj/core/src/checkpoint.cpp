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

#include "cmfal/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cmfal {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

// header format: # {"k": 10, "lambda": 0.1, "eta": 0.02, "epochs": 200, "seed": 42}
std::string header_line(const CheckpointMeta& meta) {
  std::ostringstream os;
  os << "# {\"k\": " << meta.k << ", \"lambda\": " << format_double(meta.lambda)
     << ", \"eta\": " << format_double(meta.eta) << ", \"epochs\": " << meta.epochs
     << ", \"seed\": " << meta.seed << "}";
  return os.str();
}

std::string header_field(const std::string& header, const std::string& name) {
  const std::string needle = "\"" + name + "\":";
  const auto pos = header.find(needle);
  if (pos == std::string::npos) {
    throw DataError("checkpoint header missing field '" + name + "'");
  }
  std::size_t start = pos + needle.size();
  while (start < header.size() && header[start] == ' ') ++start;
  std::size_t end = start;
  while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  return header.substr(start, end - start);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Database& db,
                     const LatentMatrix& phi, const CheckpointMeta& meta) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out << header_line(meta) << "\n";
  for (EntityId id = 0; id < db.registry().size(); ++id) {
    out << to_string(db.registry().kind_of(id)) << ':' << db.registry().key_of(id);
    const auto v = phi.vec(id);
    for (int d = 0; d < phi.k(); ++d) out << '\t' << format_double(v[d]);
    out << "\n";
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Database& db) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw DataError(path.string() + ": missing checkpoint header line");
  }
  Checkpoint ckpt;
  ckpt.meta.k = std::stoi(header_field(line, "k"));
  ckpt.meta.lambda = std::stod(header_field(line, "lambda"));
  ckpt.meta.eta = std::stod(header_field(line, "eta"));
  ckpt.meta.epochs = std::stoi(header_field(line, "epochs"));
  ckpt.meta.seed = std::stoull(header_field(line, "seed"));
  if (ckpt.meta.k <= 0) throw DataError("checkpoint k must be positive");

  ckpt.phi = LatentMatrix(ckpt.meta.k, db.registry().size());
  std::vector<bool> seen(db.registry().size(), false);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (static_cast<int>(f.size()) != ckpt.meta.k + 1) {
      throw DataError(path.string() + ": row with wrong column count");
    }
    const auto colon = f[0].find(':');
    if (colon == std::string::npos) {
      throw DataError(path.string() + ": entity key missing kind prefix");
    }
    const auto id =
        db.registry().find(kind_from_string(f[0].substr(0, colon)), f[0].substr(colon + 1));
    if (!id) {
      throw DataError(path.string() + ": entity '" + f[0] + "' not in registry");
    }
    seen[*id] = true;
    for (int d = 0; d < ckpt.meta.k; ++d) ckpt.phi.vec(*id)[d] = std::stod(f[d + 1]);
  }
  for (EntityId id = 0; id < seen.size(); ++id) {
    if (!seen[id]) {
      throw DataError(path.string() + ": missing factors for registered entity " +
                      db.registry().key_of(id));
    }
  }
  return ckpt;
}

}  // namespace cmfal
