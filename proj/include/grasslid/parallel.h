// grasslid/parallel.h

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

#ifndef GRASSLID_PARALLEL_H_
#define GRASSLID_PARALLEL_H_

#include <cstdint>
#include <functional>
#include <string_view>

namespace grasslid {

/// Worker count: hardware concurrency, capped by the GRASS_THREADS
/// environment variable when it holds a positive integer.
int WorkerCount();

/// Calls fn(i) for every i in [0, n).  Iterations must write only to
/// disjoint outputs; results are therefore independent of the thread count.
/// The first exception thrown by any iteration is rethrown after all
/// workers join.
void ParallelFor(int n, const std::function<void(int)> &fn);

/// Stable 64-bit FNV-1a hash of a byte string.
std::uint64_t StableHash(std::string_view text);

/// Derives an independent child seed from a parent seed and a label, e.g.
/// DeriveSeed(global, "construct/utt-0007/1").  Stable across platforms.
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view label);

}  // namespace grasslid

#endif  // GRASSLID_PARALLEL_H_
