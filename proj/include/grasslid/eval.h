// grasslid/eval.h

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

#ifndef GRASSLID_EVAL_H_
#define GRASSLID_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "grasslid/matrix-io.h"

namespace grasslid {

/// One detection trial: "is `utterance_id` in language `target`?".
struct Trial {
  std::string utterance_id;
  std::string target;
  double score = 0.0;
  bool is_target = false;
};

/// A (false acceptance, false rejection) operating point.
struct DetPoint {
  double far = 0.0;
  double frr = 0.0;
};

/**
   Operating points of the sweep "accept when score >= theta" over
   theta in {-inf, sorted distinct scores, +inf}.  Starts at (1, 0) and ends
   at (0, 1); FAR is non-increasing and FRR non-decreasing along the list.
   Throws InputError unless both trial kinds are present and every score is
   finite.
*/
std::vector<DetPoint> DetPoints(const std::vector<Trial> &trials);

/// Equal error rate on the pooled trials: linear interpolation between the
/// two sweep points that bracket FAR = FRR.
double Eer(const std::vector<Trial> &trials);

/// EER computed separately on each target's trials.
std::map<std::string, double> PerTargetEer(const std::vector<Trial> &trials);

/**
   Simplified average detection cost: the minimum over a single global
   threshold of mean_t [0.5 P_miss(t) + 0.5 P_fa(t)].  Every target group
   must hold both trial kinds (InputError otherwise).
*/
double AverageCost(const std::vector<Trial> &trials);

/// Expands an N x T score matrix into N*T trials, row-major.
std::vector<Trial> MakeTrials(const std::vector<std::string> &utterance_ids,
                              const std::vector<std::string> &true_labels,
                              const std::vector<std::string> &targets,
                              const Matrix &scores);

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
};

/**
   Stratified k-fold split of items with the given class labels.  Each
   class is shuffled with a seed derived from (seed, label) and dealt
   round-robin into the folds; the starting fold of each class continues
   where the previous class stopped, which keeps fold sizes within one of
   each other.  Index lists are sorted.  Throws InputError if k < 2 or a
   class has fewer than k members.
*/
std::vector<Fold> StratifiedKFold(const std::vector<std::string> &labels,
                                  int k, std::uint64_t seed);

/// Trial file: utterance<TAB>target<TAB>score<TAB>{target|nontarget}.
void WriteTrials(const std::filesystem::path &path,
                 const std::vector<Trial> &trials);
std::vector<Trial> ReadTrials(const std::filesystem::path &path);

/// DET file: FAR<TAB>FRR per line.
void WriteDetPoints(const std::filesystem::path &path,
                    const std::vector<DetPoint> &points);

}  // namespace grasslid

#endif  // GRASSLID_EVAL_H_
