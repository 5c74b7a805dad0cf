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

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rhetoric/error.hpp"

namespace rhetoric::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::SchemaViolation, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IO, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A CSV file with a header row; cells are looked up by column name.
class Table {
 public:
  static Table from_text(std::string_view text, const std::string& origin = "<csv>") {
    Table t;
    auto rows = parse(text);
    if (rows.empty()) throw Error(ErrorKind::SchemaViolation, origin + ": missing header row");
    t.header_ = std::move(rows.front());
    for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != t.header_.size()) {
        throw SchemaError(r + 1, origin + ": expected " + std::to_string(t.header_.size()) +
                                     " fields, got " + std::to_string(rows[r].size()));
      }
      t.rows_.push_back(std::move(rows[r]));
    }
    return t;
  }

  static Table from_file(const std::string& path) { return from_text(read_file(path), path); }

  bool has_column(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorKind::SchemaViolation, "missing column '" + name + "'");
    return it->second;
  }

  std::size_t size() const { return rows_.size(); }
  const Row& row(std::size_t i) const { return rows_[i]; }
  const std::string& at(std::size_t r, const std::string& name) const { return rows_[r][column(name)]; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& header() const { return header_; }

 private:
  Row header_;
  std::vector<Row> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Quotes a field only when it needs it.
inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace rhetoric::csv
