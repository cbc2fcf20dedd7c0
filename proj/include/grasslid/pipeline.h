// grasslid/pipeline.h

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

#ifndef GRASSLID_PIPELINE_H_
#define GRASSLID_PIPELINE_H_

// Stage-level plumbing shared by the command-line tool and the end-to-end
// tests: subspace archives, trained-model directories, scoring and metrics.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "grasslid/construction.h"
#include "grasslid/eval.h"
#include "grasslid/snn.h"
#include "grasslid/svm.h"

namespace grasslid {

struct ArchiveItem {
  std::string utterance_id;
  std::string language;
  std::vector<Subspace> subspaces;  // one per recognizer
};

/**
   Subspaces of a dataset.  On disk: "index.tsv" (utterance, language and
   one relative file per recognizer), "archive.txt" (construction settings)
   and the bases as GSM1 files under rec<l>/.
*/
struct SubspaceArchive {
  SubspaceSpec spec;
  std::uint64_t seed = 0;
  std::vector<ArchiveItem> items;

  int NumRecognizers() const;
  std::vector<std::string> Ids() const;
  std::vector<std::string> Labels() const;
  std::vector<Subspace> Recognizer(int l) const;
};

void SaveArchive(const SubspaceArchive &archive,
                 const std::filesystem::path &dir);
SubspaceArchive LoadArchive(const std::filesystem::path &dir);

struct ConstructReport {
  int succeeded = 0;
  /// One line per skipped utterance, in manifest order.
  std::vector<std::string> warnings;
};

/**
   Builds one subspace per (utterance, recognizer) of a manifest, in
   parallel over utterances.  Utterance u on recognizer l uses the seed
   derived from `seed` and "<u>/rec<l>".  An utterance for which any
   recognizer fails with a library error is skipped and reported.
*/
SubspaceArchive ConstructArchive(const std::filesystem::path &manifest,
                                 const SubspaceSpec &spec, std::uint64_t seed,
                                 ConstructReport *report);

/// One projection-kernel Gram matrix per recognizer.
std::vector<GramMatrix> ArchiveGrams(const SubspaceArchive &archive);
void SaveGrams(const std::vector<GramMatrix> &grams,
               const std::filesystem::path &dir);
std::vector<GramMatrix> LoadGrams(const std::filesystem::path &dir);

/// Trained SVM backend plus the support subspaces it needs for scoring;
/// backend.models[i].support_ids index support[l] of its recognizer.
struct SvmSystem {
  SvmBackend backend;
  std::vector<std::vector<Subspace>> support;
};

/// `grams` may be empty, in which case they are computed from the archive.
SvmSystem TrainSvmSystem(const SubspaceArchive &train,
                         const SvmBackendOptions &options,
                         const std::vector<GramMatrix> &grams = {});
void SaveSvmSystem(const SvmSystem &system, const std::filesystem::path &dir);
SvmSystem LoadSvmSystem(const std::filesystem::path &dir);
/// N x T fused log-posteriors.
Matrix ScoreSvmSystem(const SvmSystem &system, const SubspaceArchive &test);

struct SnnSystem {
  SnnModel model;
  std::vector<std::string> targets;
};

/// Targets are the sorted languages of the training archive.
SnnSystem TrainSnnSystem(const SubspaceArchive &train,
                         const SnnTrainConfig &cfg,
                         std::vector<SnnEpochLog> *log);
void SaveSnnSystem(const SnnSystem &system, const std::filesystem::path &dir);
SnnSystem LoadSnnSystem(const std::filesystem::path &dir);
Matrix ScoreSnnSystem(const SnnSystem &system, const SubspaceArchive &test);

void WriteTrainLog(const std::filesystem::path &path,
                   const std::vector<SnnEpochLog> &log);

/// "svm" or "snn", read from <dir>/model.txt.
std::string ModelType(const std::filesystem::path &model_dir);

/// Scores every (utterance, target) pair with whichever model `model_dir`
/// holds.
std::vector<Trial> ScoreWithModel(const std::filesystem::path &model_dir,
                                  const SubspaceArchive &test);

struct Metrics {
  double eer = 0.0;
  double cavg = 0.0;
  std::map<std::string, double> per_target_eer;
  int trials = 0;
};

Metrics ComputeMetrics(const std::vector<Trial> &trials);
/// Writes metrics.txt and det.txt under `dir`.
void WriteEvalOutputs(const std::vector<Trial> &trials,
                      const std::filesystem::path &dir);

/// Grid for the hyperparameter sweep; empty axes fall back to the base
/// configuration's value.
struct SweepGrid {
  std::vector<int> context_orders;
  std::vector<double> sample_ratios;
  std::vector<double> betas;
  std::vector<int> num_maps;
  std::vector<double> lambdas;
};

struct SweepBase {
  std::string backend = "snn";  // or "svm"
  SubspaceSpec spec;
  SnnTrainConfig snn;
  SvmBackendOptions svm;
  std::uint64_t seed = 0;
};

/**
   Runs construct / train / score / eval for every grid cell in
   lexicographic order (n, alpha, beta, m, lambda) and returns one line per
   cell: "n=.. alpha=.. beta=.. m=.. lambda=.. eer=.. cavg=..".  The SVM
   backend ignores beta, m and lambda but still reports them.
*/
std::vector<std::string> RunSweep(const std::filesystem::path &train_manifest,
                                  const std::filesystem::path &test_manifest,
                                  const SweepGrid &grid, const SweepBase &base);

}  // namespace grasslid

#endif  // GRASSLID_PIPELINE_H_
