// tools/make-fixtures.cc

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

// Writes the committed task specs under fixtures/:
//
//   fixture-a     3 order-2 languages over 10 units with distinct trigram
//                 rules, 100 train / 50 test each, 2 pseudo-recognizers.
//   control       2 languages with identical tables (chance-level control).
//   trigram-only  3 order-2 languages whose unigram and bigram marginals are
//                 all uniform; they differ only in the skip-gram (a, _, c).
//
// Usage: make-fixtures <fixtures-dir>

#include <cstdlib>
#include <iostream>

#include "grasslid/error.h"
#include "grasslid/synthlab.h"

namespace {

using grasslid::SyntheticLanguage;
using grasslid::TaskSpec;

constexpr int kUnits = 10;

// P(c | a, b) = strength * [c == (p a + q b + r) mod M] + (1 - strength) / M.
SyntheticLanguage RuleLanguage(const std::string &name, int p, int q, int r,
                               double strength) {
  SyntheticLanguage lang = grasslid::UniformLanguage(name, kUnits, 2);
  lang.transition.setConstant((1.0 - strength) / kUnits);
  for (int a = 0; a < kUnits; ++a)
    for (int b = 0; b < kUnits; ++b)
      lang.transition(a * kUnits + b, (p * a + q * b + r) % kUnits) += strength;
  return lang;
}

TaskSpec BaseSpec(std::uint64_t seed) {
  TaskSpec spec;
  spec.train_per_language = 100;
  spec.test_per_language = 50;
  spec.min_length = 120;
  spec.max_length = 200;
  spec.emission.concentration = 10.0;
  spec.emission.floor = 0.1;
  spec.recognizers = {{10, 101}, {8, 202}};
  spec.seed = seed;
  return spec;
}

}  // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make-fixtures <fixtures-dir>\n";
    return 2;
  }
  const std::filesystem::path root = argv[1];
  try {
    TaskSpec a = BaseSpec(20260501);
    a.languages = {RuleLanguage("lang-a", 2, 1, 1, 0.6),
                   RuleLanguage("lang-b", 1, 3, 2, 0.6),
                   RuleLanguage("lang-c", 5, 7, 4, 0.6)};
    grasslid::WriteTaskSpec(root / "fixture-a" / "task.txt", a);

    TaskSpec control = BaseSpec(20260502);
    control.test_per_language = 300;
    control.languages = {RuleLanguage("same-1", 2, 1, 1, 0.6),
                         RuleLanguage("same-2", 2, 1, 1, 0.6)};
    grasslid::WriteTaskSpec(root / "control" / "task.txt", control);

    // p coprime to M keeps every bigram uniform; gcd(q, M) > 1 leaves the
    // lag-2 pair (a, c) informative.
    TaskSpec tri = BaseSpec(20260503);
    tri.languages = {RuleLanguage("tri-a", 1, 0, 1, 0.7),
                     RuleLanguage("tri-b", 1, 5, 3, 0.7),
                     RuleLanguage("tri-c", 9, 2, 7, 0.7)};
    grasslid::WriteTaskSpec(root / "trigram-only" / "task.txt", tri);
  } catch (const grasslid::Error &e) {
    std::cerr << "make-fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
