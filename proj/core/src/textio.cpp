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

#include "nestode/textio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nestode {

std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("not a number: '" + text + "'");
  }
  return value;
}

const std::string& TextSection::Get(const std::string& key) const {
  auto it = keys.find(key);
  if (it == keys.end()) {
    throw std::runtime_error("missing key '" + key + "' in section [" + name +
                             "]");
  }
  return it->second;
}

std::string TextSection::GetOr(const std::string& key,
                               const std::string& fallback) const {
  auto it = keys.find(key);
  return it == keys.end() ? fallback : it->second;
}

double TextSection::GetDouble(const std::string& key) const {
  return ParseDouble(Get(key));
}

double TextSection::GetDoubleOr(const std::string& key,
                                double fallback) const {
  auto it = keys.find(key);
  return it == keys.end() ? fallback : ParseDouble(it->second);
}

long TextSection::GetLong(const std::string& key) const {
  return static_cast<long>(ParseDouble(Get(key)));
}

long TextSection::GetLongOr(const std::string& key, long fallback) const {
  auto it = keys.find(key);
  return it == keys.end() ? fallback : static_cast<long>(ParseDouble(it->second));
}

TextSection& TextRecord::Top() {
  if (sections.empty() || !sections.front().name.empty()) {
    sections.insert(sections.begin(), TextSection{});
  }
  return sections.front();
}

const TextSection& TextRecord::Top() const {
  static const TextSection kEmpty{};
  if (sections.empty() || !sections.front().name.empty()) return kEmpty;
  return sections.front();
}

std::vector<const TextSection*> TextRecord::Named(
    const std::string& name) const {
  std::vector<const TextSection*> out;
  for (const auto& s : sections) {
    if (s.name == name) out.push_back(&s);
  }
  return out;
}

namespace {

std::string Trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

TextRecord ParseTextRecord(const std::string& content) {
  TextRecord record;
  record.sections.push_back(TextSection{});  // top-level
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": unterminated section header");
      }
      TextSection section;
      section.name = Trim(t.substr(1, t.size() - 2));
      record.sections.push_back(std::move(section));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": empty key");
    }
    record.sections.back().keys[key] = value;
  }
  return record;
}

TextRecord LoadTextRecord(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseTextRecord(ss.str());
}

void SaveTextRecord(const TextRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& section : record.sections) {
    if (!section.name.empty()) out << "[" << section.name << "]\n";
    for (const auto& [key, value] : section.keys) {
      out << key << " = " << value << "\n";
    }
    out << "\n";
  }
}

std::string EncodeMatrix(const Eigen::MatrixXd& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += " " + FormatDouble(m(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd DecodeMatrix(const std::string& text) {
  std::istringstream in(text);
  Eigen::Index rows = 0, cols = 0;
  in >> rows >> cols;
  Eigen::MatrixXd m(rows, cols);
  std::string tok;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> tok)) throw std::runtime_error("truncated matrix record");
      m(i, j) = ParseDouble(tok);
    }
  }
  return m;
}

std::string EncodeVector(const Eigen::VectorXd& v) {
  std::string out = std::to_string(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out += " " + FormatDouble(v[i]);
  return out;
}

Eigen::VectorXd DecodeVector(const std::string& text) {
  std::istringstream in(text);
  Eigen::Index n = 0;
  in >> n;
  Eigen::VectorXd v(n);
  std::string tok;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> tok)) throw std::runtime_error("truncated vector record");
    v[i] = ParseDouble(tok);
  }
  return v;
}

}  // namespace nestode
