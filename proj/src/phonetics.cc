// src/phonetics.cc

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

#include "grasslid/phonetics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "grasslid/error.h"

namespace grasslid {

namespace {

// Rows whose sum is this close to one are treated as exactly stochastic.
constexpr double kExactRowSum = 1e-12;

void ValidateStochastic(const Matrix &p, double tol, const char *what) {
  if (!p.allFinite()) GRASSLID_THROW(InputError, what, ": non-finite entries");
  if (p.size() > 0 && p.minCoeff() < 0.0)
    GRASSLID_THROW(InputError, what, ": negative posterior");
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    double s = p.row(r).sum();
    if (std::abs(s - 1.0) > tol)
      GRASSLID_THROW(InputError, what, ": row ", r, " sums to ", s,
                     " (not stochastic)");
  }
}

}  // namespace

PhoneticSequence::PhoneticSequence(Matrix posteriors, std::string phoneset_id)
    : posteriors_(std::move(posteriors)), phoneset_id_(std::move(phoneset_id)) {
  if (posteriors_.rows() < 1 || posteriors_.cols() < 1)
    GRASSLID_THROW(InputError, "phonetic sequence needs K >= 1 and M >= 1");
  ValidateStochastic(posteriors_, kStochasticTolerance, "phonetic sequence");
}

PhoneticSequence SegmentPosteriors(const Matrix &frame_posteriors,
                                   std::span<const int> state_to_unit,
                                   int num_units,
                                   std::span<const Segment> segments,
                                   std::string phoneset_id) {
  const int num_frames = static_cast<int>(frame_posteriors.rows());
  const int num_states = static_cast<int>(frame_posteriors.cols());
  if (static_cast<int>(state_to_unit.size()) != num_states)
    GRASSLID_THROW(InputError, "state map has ", state_to_unit.size(),
                   " entries for ", num_states, " states");
  if (num_units < 1) GRASSLID_THROW(InputError, "num_units must be positive");
  for (int u : state_to_unit)
    if (u < 0 || u >= num_units)
      GRASSLID_THROW(InputError, "state mapped to invalid unit ", u);
  if (segments.empty()) GRASSLID_THROW(InputError, "no segments");
  ValidateStochastic(frame_posteriors, kFrameStochasticTolerance,
                     "frame posteriors");

  // Summing states into units.
  Matrix unit_frames = Matrix::Zero(num_frames, num_units);
  for (int s = 0; s < num_states; ++s)
    unit_frames.col(state_to_unit[s]) += frame_posteriors.col(s);

  Matrix out(static_cast<Eigen::Index>(segments.size()), num_units);
  int prev_end = 0;
  for (size_t k = 0; k < segments.size(); ++k) {
    const Segment &seg = segments[k];
    if (seg.end <= seg.start)
      GRASSLID_THROW(InputError, "segment ", k, " is empty");
    if (seg.start < prev_end || seg.end > num_frames)
      GRASSLID_THROW(InputError, "segment ", k, " [", seg.start, ", ", seg.end,
                     ") overlaps, is unordered, or exceeds ", num_frames,
                     " frames");
    prev_end = seg.end;
    Vector mean =
        unit_frames.middleRows(seg.start, seg.end - seg.start).colwise().mean();
    out.row(k) = mean.transpose() / mean.sum();
  }
  return PhoneticSequence(std::move(out), std::move(phoneset_id));
}

StackedMatrix StackContext(const PhoneticSequence &seq, int n) {
  if (n < 1) GRASSLID_THROW(InputError, "context order must be >= 1, got ", n);
  const int k_total = seq.NumPhones(), m = seq.NumUnits();
  StackedMatrix z;
  z.context_order = n;
  z.num_units = m;
  z.data = Matrix::Zero(static_cast<Eigen::Index>(n) * m, k_total);
  const Matrix &y = seq.Posteriors();
  // Block b (0 = top) holds y_{k - (n - 1 - b)}, so the current vector is
  // the bottom block.
  for (int k = 0; k < k_total; ++k) {
    for (int b = 0; b < n; ++b) {
      int src = k - (n - 1 - b);
      if (src < 0) continue;
      z.data.block(static_cast<Eigen::Index>(b) * m, k, m, 1) =
          y.row(src).transpose();
    }
  }
  return z;
}

std::filesystem::path MetaPath(const std::filesystem::path &path) {
  std::filesystem::path meta = path;
  meta += ".meta";
  return meta;
}

void SavePosteriorgram(const PhoneticSequence &seq,
                       const std::filesystem::path &path) {
  WriteMatrixFile(path, seq.Posteriors());
  WriteKeyValueFile(MetaPath(path),
                    {{"phoneset_id", seq.PhonesetId()},
                     {"num_units", std::to_string(seq.NumUnits())}});
}

PhoneticSequence LoadPosteriorgram(const std::filesystem::path &path) {
  Matrix m = ReadMatrixFile(path);
  KeyValueList meta = ReadKeyValueFile(MetaPath(path));
  const std::string &phoneset = LookupKey(meta, "phoneset_id");
  long long units = ParseInt(LookupKey(meta, "num_units"));
  if (units != m.cols())
    GRASSLID_THROW(FormatError, path.string(), ": header says ", units,
                   " units but matrix has ", m.cols(), " columns");
  if (!m.allFinite() || (m.size() > 0 && m.minCoeff() < 0.0))
    GRASSLID_THROW(InputError, path.string(),
                   ": negative or non-finite posterior");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double s = m.row(r).sum();
    if (std::abs(s - 1.0) > kStochasticTolerance)
      GRASSLID_THROW(InputError, path.string(), ": row ", r, " sums to ", s,
                     " (not stochastic)");
    if (std::abs(s - 1.0) > kExactRowSum) m.row(r) /= s;
  }
  return PhoneticSequence(std::move(m), phoneset);
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) GRASSLID_THROW(FormatError, "cannot open manifest: ", path);
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitString(line, '\t');
    if (fields.size() < 3 || fields[0].empty() || fields[1].empty())
      GRASSLID_THROW(FormatError, path.string(), ":", lineno,
                     ": expected utterance<TAB>language<TAB>path...");
    ManifestEntry e;
    e.utterance_id = fields[0];
    e.language = fields[1];
    e.paths.assign(fields.begin() + 2, fields.end());
    if (!out.empty() && out.front().paths.size() != e.paths.size())
      GRASSLID_THROW(FormatError, path.string(), ":", lineno,
                     ": inconsistent recognizer count");
    out.push_back(std::move(e));
  }
  return out;
}

void WriteManifest(const std::filesystem::path &path,
                   const std::vector<ManifestEntry> &entries) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (const ManifestEntry &e : entries) {
    os << e.utterance_id << '\t' << e.language;
    for (const std::string &p : e.paths) os << '\t' << p;
    os << '\n';
  }
}

std::filesystem::path ResolveManifestPath(
    const std::filesystem::path &manifest, const std::string &entry_path) {
  std::filesystem::path p(entry_path);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

std::vector<std::string> ManifestLanguages(
    const std::vector<ManifestEntry> &entries) {
  std::set<std::string> langs;
  for (const ManifestEntry &e : entries) langs.insert(e.language);
  return {langs.begin(), langs.end()};
}

}  // namespace grasslid
