// grasslid/synthlab.h

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

#ifndef GRASSLID_SYNTHLAB_H_
#define GRASSLID_SYNTHLAB_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grasslid/phonetics.h"

namespace grasslid {

/**
   Markov-chain language over `num_units` phones.  For order n the
   transition table has M^n rows, one per history (h_1, ..., h_n) with the
   oldest symbol most significant: row = h_1 * M^(n-1) + ... + h_n.  The
   initial distribution is over the first n symbols, indexed the same way.
*/
struct SyntheticLanguage {
  std::string name;
  int num_units = 0;
  int order = 1;
  Matrix transition;
  Vector initial;

  /// Throws InputError unless order is 1 or 2, shapes agree, entries are
  /// non-negative and every distribution sums to one within 1e-12.
  void Check() const;
};

/// Every distribution uniform.
SyntheticLanguage UniformLanguage(std::string name, int num_units, int order);

struct EmissionConfig {
  double concentration = 50.0;  // kappa
  double floor = 0.1;           // epsilon
  bool exact = false;           // kappa -> infinity: exact one-hot rows

  void Check() const;
};

/// M_l output units; oracle unit u is reported as perm(u) mod M_l, where
/// perm is a seeded shuffle of 0..M-1.
struct PseudoRecognizer {
  int num_units = 0;
  std::uint64_t permutation_seed = 0;
};

std::vector<int> RecognizerUnitMap(const PseudoRecognizer &rec,
                                   int oracle_units);

struct TaskSpec {
  std::vector<SyntheticLanguage> languages;
  int train_per_language = 0;
  int test_per_language = 0;
  int min_length = 1;
  int max_length = 1;
  EmissionConfig emission;
  std::vector<PseudoRecognizer> recognizers;
  std::uint64_t seed = 0;

  /// Validates everything MakeTask relies on; throws InputError.
  void Check() const;
};

/// K phone indices; deterministic per seed.
std::vector<int> SampleSequence(const SyntheticLanguage &lang, int length,
                                std::uint64_t seed);

/**
   Row k is a Dirichlet draw with parameters kappa * (onehot(u_k) + eps),
   built from independent gamma variates and normalized.  In exact mode
   rows are one-hot.
*/
PhoneticSequence EmitPosteriors(const std::vector<int> &units, int num_units,
                                const EmissionConfig &cfg, std::uint64_t seed,
                                std::string phoneset_id);

/**
   Task spec file (key=value, '#' comments):

     seed = 7
     train_per_language = 100
     test_per_language = 50
     min_length = 120
     max_length = 200
     concentration = 50
     floor = 0.1
     exact = false
     recognizer = <M_l> <permutation seed>          (repeatable)
     language = <name> <order> <table> [<initial>]  (repeatable)

   Table paths are relative to the spec file, in GSM1 format or ".csv".
   Throws FormatError or InputError; nothing is written.
*/
TaskSpec ReadTaskSpec(const std::filesystem::path &path);

/// Writes the spec file plus "<name>.transition.gsm" / "<name>.initial.gsm"
/// next to it.
void WriteTaskSpec(const std::filesystem::path &path, const TaskSpec &spec);

struct TaskSummary {
  int utterances = 0;
  int files = 0;  // posteriorgrams, over both splits and all recognizers
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
};

/**
   Generates both splits under `out_dir`: manifests train.lst and test.lst,
   and posteriorgrams <split>/<utt>.rec<l>.gsm.  Utterance ids are
   "<language>-<split>-<index>"; each utterance draws from the seed derived
   from the global seed and its id.  The spec is validated before anything
   is created.
*/
TaskSummary MakeTask(const TaskSpec &spec, const std::filesystem::path &out_dir);

}  // namespace grasslid

#endif  // GRASSLID_SYNTHLAB_H_
