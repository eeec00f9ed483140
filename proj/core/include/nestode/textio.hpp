// Copyright 2026 The Nestode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NESTODE_TEXTIO_HPP
#define NESTODE_TEXTIO_HPP

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace nestode {

/// Shortest decimal representation that round-trips to the same double.
std::string FormatDouble(double value);

double ParseDouble(const std::string& text);

/// One section of a flat key-value record. Section "" holds top-level keys;
/// repeated sections (e.g. several [run] blocks) appear in file order.
struct TextSection {
  std::string name;
  std::map<std::string, std::string> keys;

  bool Has(const std::string& key) const { return keys.count(key) > 0; }
  const std::string& Get(const std::string& key) const;
  std::string GetOr(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key) const;
  double GetDoubleOr(const std::string& key, double fallback) const;
  long GetLong(const std::string& key) const;
  long GetLongOr(const std::string& key, long fallback) const;
};

struct TextRecord {
  std::vector<TextSection> sections;

  TextSection& Top();
  const TextSection& Top() const;
  std::vector<const TextSection*> Named(const std::string& name) const;
};

/// Parses the flat "key = value" format with optional [section] headers.
/// Lines starting with '#' and blank lines are ignored. Throws
/// std::runtime_error with a line number on malformed input.
TextRecord ParseTextRecord(const std::string& content);
TextRecord LoadTextRecord(const std::string& path);
void SaveTextRecord(const TextRecord& record, const std::string& path);

/// Matrix helpers for the instance serialization format: a matrix is stored
/// as "key = rows cols v00 v01 ..." row-major with round-trip decimals.
std::string EncodeMatrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd DecodeMatrix(const std::string& text);
std::string EncodeVector(const Eigen::VectorXd& v);
Eigen::VectorXd DecodeVector(const std::string& text);

}  // namespace nestode

#endif  // NESTODE_TEXTIO_HPP
