// grasslid/phonetics.h

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

#ifndef GRASSLID_PHONETICS_H_
#define GRASSLID_PHONETICS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "grasslid/matrix-io.h"

namespace grasslid {

/// Row-sum tolerance for phonetic vectors.
inline constexpr double kStochasticTolerance = 1e-6;
/// Row-sum tolerance for frame-level state posteriors.
inline constexpr double kFrameStochasticTolerance = 1e-4;

/**
   One utterance as K phonetic vectors over a set of M units: row k is the
   posterior vector of the k-th decoded segment.  Entries are non-negative
   and every row sums to one within kStochasticTolerance.
*/
class PhoneticSequence {
 public:
  /// Throws InputError when the invariants do not hold.
  PhoneticSequence(Matrix posteriors, std::string phoneset_id);

  const Matrix &Posteriors() const { return posteriors_; }
  const std::string &PhonesetId() const { return phoneset_id_; }
  int NumPhones() const { return static_cast<int>(posteriors_.rows()); }
  int NumUnits() const { return static_cast<int>(posteriors_.cols()); }

 private:
  Matrix posteriors_;
  std::string phoneset_id_;
};

/// Half-open frame range [start, end).
struct Segment {
  int start = 0;
  int end = 0;
};

/**
   Collapses frame-level state posteriors (T x num_states) into one phonetic
   vector per segment.  Each frame's state posteriors are summed into their
   units; a segment's vector is the mean of its frames' unit vectors,
   renormalized to sum to one.

   Throws InputError for empty, overlapping, unordered or out-of-range
   segments, for unmapped states, and for frames whose rows are not
   stochastic within kFrameStochasticTolerance.
*/
PhoneticSequence SegmentPosteriors(const Matrix &frame_posteriors,
                                   std::span<const int> state_to_unit,
                                   int num_units,
                                   std::span<const Segment> segments,
                                   std::string phoneset_id);

/// Contextualized sequence: column k is z_k = [y_{k-n+1}; ...; y_k] with
/// zero vectors standing in for indices before the first phone.
struct StackedMatrix {
  Matrix data;  // (n * M) x K
  int context_order = 1;
  int num_units = 0;

  int Dim() const { return static_cast<int>(data.rows()); }
  int NumColumns() const { return static_cast<int>(data.cols()); }
};

/// Throws InputError if n < 1.
StackedMatrix StackContext(const PhoneticSequence &seq, int n);

/**
   Posteriorgram files: the matrix in the binary GSM1 format at `path` and a
   key=value sidecar at `path` + ".meta" holding phoneset_id and num_units.
   On load, rows summing to within kStochasticTolerance of one are rescaled
   to sum to one (rows already exact to 1e-12 are left untouched, so
   save/load round-trips bit for bit); others are rejected.
*/
void SavePosteriorgram(const PhoneticSequence &seq,
                       const std::filesystem::path &path);
PhoneticSequence LoadPosteriorgram(const std::filesystem::path &path);

std::filesystem::path MetaPath(const std::filesystem::path &path);

/// One line of a dataset manifest:
///   utterance_id <TAB> language_label <TAB> path_1 <TAB> ... <TAB> path_L
struct ManifestEntry {
  std::string utterance_id;
  std::string language;
  std::vector<std::string> paths;  // as written; relative to the manifest
};

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path);
void WriteManifest(const std::filesystem::path &path,
                   const std::vector<ManifestEntry> &entries);
/// Resolves a manifest path against the manifest's own directory.
std::filesystem::path ResolveManifestPath(
    const std::filesystem::path &manifest, const std::string &entry_path);

/// Sorted distinct language labels of a manifest.
std::vector<std::string> ManifestLanguages(
    const std::vector<ManifestEntry> &entries);

}  // namespace grasslid

#endif  // GRASSLID_PHONETICS_H_
