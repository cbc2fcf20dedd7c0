// grasslid/matrix-io.h

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

#ifndef GRASSLID_MATRIX_IO_H_
#define GRASSLID_MATRIX_IO_H_

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace grasslid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/*
  Binary matrix format shared by every artifact in the project:

    bytes 0..3    magic "GSM1"
    bytes 4..11   rows, unsigned 64-bit little-endian
    bytes 12..19  cols, unsigned 64-bit little-endian
    then          rows*cols IEEE-754 doubles, little-endian, row-major
*/
void WriteMatrix(std::ostream &os, const Matrix &m);
Matrix ReadMatrix(std::istream &is);

void WriteMatrixFile(const std::filesystem::path &path, const Matrix &m);
Matrix ReadMatrixFile(const std::filesystem::path &path);

/// Comma separated text, one row per line.  Blank lines are skipped.
Matrix ReadCsvMatrix(const std::filesystem::path &path);
void WriteCsvMatrix(const std::filesystem::path &path, const Matrix &m);

/// Ordered key=value pairs; '#' starts a comment, whitespace around keys
/// and values is trimmed.  Duplicate keys are kept in order.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;

KeyValueList ParseKeyValues(std::istream &is);
KeyValueList ReadKeyValueFile(const std::filesystem::path &path);
void WriteKeyValueFile(const std::filesystem::path &path,
                       const KeyValueList &kv);
/// Returns the last value for `key`, or throws FormatError.
const std::string &LookupKey(const KeyValueList &kv, const std::string &key);
/// Returns nullptr when the key is absent.
const std::string *FindKey(const KeyValueList &kv, const std::string &key);

/// Shortest decimal text that parses back to the identical double.
std::string FormatDouble(double value);
double ParseDouble(const std::string &text);
long long ParseInt(const std::string &text);

std::vector<std::string> SplitString(const std::string &s, char delim);
std::string Trim(const std::string &s);

}  // namespace grasslid

#endif  // GRASSLID_MATRIX_IO_H_
