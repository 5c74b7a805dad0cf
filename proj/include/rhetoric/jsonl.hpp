// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhetoric/csv.hpp"
#include "rhetoric/error.hpp"

namespace rhetoric::jsonl {

using Json = nlohmann::ordered_json;

/// One compact JSON object per line, each terminated by '\n'. An empty input
/// produces an empty file.
inline void write(const std::string& path, const std::vector<Json>& lines) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IO, "cannot write " + path);
  for (const auto& j : lines) out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
  if (!out) throw Error(ErrorKind::IO, "write failed for " + path);
}

/// Parses every non-blank line; a line that is not a JSON object, or that
/// `visit` rejects with a json exception, becomes SchemaViolation(line_no).
inline void read(const std::string& path, const std::function<void(const Json&, std::size_t)>& visit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IO, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(line_no, e.what());
    }
    if (!j.is_object()) throw SchemaError(line_no, "not a JSON object");
    try {
      visit(j, line_no);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(line_no, e.what());
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SchemaViolation || e.kind() == ErrorKind::OutOfRange ||
          e.kind() == ErrorKind::InvalidArgument) {
        throw SchemaError(line_no, e.what());
      }
      throw;
    }
  }
}

inline std::vector<Json> read_all(const std::string& path) {
  std::vector<Json> out;
  read(path, [&](const Json& j, std::size_t) { out.push_back(j); });
  return out;
}

inline void write_json(const std::string& path, const Json& j) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IO, "cannot write " + path);
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(csv::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaViolation, path + ": " + e.what());
  }
}

}  // namespace rhetoric::jsonl
