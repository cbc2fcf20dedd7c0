// grasslid/error.h

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

#ifndef GRASSLID_ERROR_H_
#define GRASSLID_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace grasslid {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose ambient dimensions (row counts) do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A requested rank is outside the admissible range, or two ranks differ
/// where they must agree.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Malformed numeric input: non-finite entries, negative probabilities,
/// non-stochastic rows, empty segments, bad labels.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Stacked dimension exceeds the number of phonetic vectors (K < D).
class ShortUtteranceError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed, e.g. a Gram matrix that is not PSD.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents or I/O failure.
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace internal {

template <typename... Args>
std::string StrCat(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace internal

}  // namespace grasslid

#define GRASSLID_THROW(Type, ...) \
  throw ::grasslid::Type(::grasslid::internal::StrCat(__VA_ARGS__))

#endif  // GRASSLID_ERROR_H_
