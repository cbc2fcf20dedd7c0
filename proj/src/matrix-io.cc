// src/matrix-io.cc

// Copyright 2026  The grasslid Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "grasslid/matrix-io.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "grasslid/error.h"

namespace grasslid {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'M', '1'};
// Refuse headers that would need more than 8 GiB of payload.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 30;

template <typename T>
T ToLittleEndian(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

void WriteU64(std::ostream &os, std::uint64_t v) {
  v = ToLittleEndian(v);
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

std::uint64_t ReadU64(std::istream &is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof(v)))
    GRASSLID_THROW(FormatError, "truncated matrix header");
  return ToLittleEndian(v);
}

}  // namespace

void WriteMatrix(std::ostream &os, const Matrix &m) {
  os.write(kMagic, 4);
  WriteU64(os, static_cast<std::uint64_t>(m.rows()));
  WriteU64(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = ToLittleEndian(m(r, c));
      os.write(reinterpret_cast<const char *>(&v), sizeof(v));
    }
  }
  if (!os) GRASSLID_THROW(FormatError, "failed writing matrix");
}

Matrix ReadMatrix(std::istream &is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    GRASSLID_THROW(FormatError, "bad matrix magic (expected GSM1)");
  std::uint64_t rows = ReadU64(is), cols = ReadU64(is);
  if (rows != 0 && cols > kMaxEntries / rows)
    GRASSLID_THROW(FormatError, "matrix header too large: ", rows, "x", cols);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v;
      if (!is.read(reinterpret_cast<char *>(&v), sizeof(v)))
        GRASSLID_THROW(FormatError, "truncated matrix payload");
      m(r, c) = ToLittleEndian(v);
    }
  }
  return m;
}

void WriteMatrixFile(const std::filesystem::path &path, const Matrix &m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  WriteMatrix(os, m);
}

Matrix ReadMatrixFile(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) GRASSLID_THROW(FormatError, "cannot open: ", path);
  try {
    Matrix m = ReadMatrix(is);
    if (is.peek() != std::char_traits<char>::eof())
      GRASSLID_THROW(FormatError, "trailing bytes after matrix payload");
    return m;
  } catch (const FormatError &e) {
    GRASSLID_THROW(FormatError, path.string(), ": ", e.what());
  }
}

Matrix ReadCsvMatrix(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) GRASSLID_THROW(FormatError, "cannot open: ", path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (Trim(line).empty()) continue;
    std::vector<double> row;
    for (const std::string &field : SplitString(line, ','))
      row.push_back(ParseDouble(Trim(field)));
    if (!rows.empty() && row.size() != rows[0].size())
      GRASSLID_THROW(FormatError, path.string(), ": ragged CSV row");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void WriteCsvMatrix(const std::filesystem::path &path, const Matrix &m) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << (c ? "," : "") << FormatDouble(m(r, c));
    os << '\n';
  }
}

KeyValueList ParseKeyValues(std::istream &is) {
  KeyValueList kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      GRASSLID_THROW(FormatError, "line ", lineno, ": expected key=value");
    std::string key = Trim(line.substr(0, eq));
    if (key.empty())
      GRASSLID_THROW(FormatError, "line ", lineno, ": empty key");
    kv.emplace_back(std::move(key), Trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValueList ReadKeyValueFile(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) GRASSLID_THROW(FormatError, "cannot open: ", path);
  try {
    return ParseKeyValues(is);
  } catch (const FormatError &e) {
    GRASSLID_THROW(FormatError, path.string(), ": ", e.what());
  }
}

void WriteKeyValueFile(const std::filesystem::path &path,
                       const KeyValueList &kv) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (const auto &[k, v] : kv) os << k << '=' << v << '\n';
}

const std::string *FindKey(const KeyValueList &kv, const std::string &key) {
  const std::string *found = nullptr;
  for (const auto &[k, v] : kv)
    if (k == key) found = &v;
  return found;
}

const std::string &LookupKey(const KeyValueList &kv, const std::string &key) {
  const std::string *v = FindKey(kv, key);
  if (v == nullptr) GRASSLID_THROW(FormatError, "missing key '", key, "'");
  return *v;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string &text) {
  double v = 0.0;
  const char *begin = text.data(), *end = text.data() + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    GRASSLID_THROW(FormatError, "not a number: '", text, "'");
  return v;
}

long long ParseInt(const std::string &text) {
  long long v = 0;
  const char *begin = text.data(), *end = text.data() + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    GRASSLID_THROW(FormatError, "not an integer: '", text, "'");
  return v;
}

std::vector<std::string> SplitString(const std::string &s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, delim)) out.push_back(cur);
  if (!s.empty() && s.back() == delim) out.emplace_back();
  return out;
}

std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace grasslid
