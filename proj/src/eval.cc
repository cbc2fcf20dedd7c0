// src/eval.cc

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

#include "grasslid/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "grasslid/error.h"
#include "grasslid/parallel.h"

namespace grasslid {

namespace {

struct SortedScores {
  std::vector<double> targets;
  std::vector<double> nontargets;
};

SortedScores SplitScores(const std::vector<Trial> &trials) {
  SortedScores s;
  for (const Trial &t : trials) {
    if (!std::isfinite(t.score))
      GRASSLID_THROW(InputError, "non-finite score for ", t.utterance_id, "/",
                     t.target);
    (t.is_target ? s.targets : s.nontargets).push_back(t.score);
  }
  if (s.targets.empty() || s.nontargets.empty())
    GRASSLID_THROW(InputError, "need target and non-target trials, got ",
                   s.targets.size(), " and ", s.nontargets.size());
  std::sort(s.targets.begin(), s.targets.end());
  std::sort(s.nontargets.begin(), s.nontargets.end());
  return s;
}

// Fraction of `sorted` strictly below theta.
double FractionBelow(const std::vector<double> &sorted, double theta) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), theta);
  return static_cast<double>(it - sorted.begin()) / sorted.size();
}

std::vector<DetPoint> Sweep(const SortedScores &s) {
  std::vector<double> thresholds;
  thresholds.reserve(s.targets.size() + s.nontargets.size());
  std::merge(s.targets.begin(), s.targets.end(), s.nontargets.begin(),
             s.nontargets.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  std::vector<DetPoint> points;
  points.reserve(thresholds.size() + 2);
  points.push_back({1.0, 0.0});
  for (double theta : thresholds)
    points.push_back({1.0 - FractionBelow(s.nontargets, theta),
                      FractionBelow(s.targets, theta)});
  points.push_back({0.0, 1.0});
  return points;
}

double EerFromPoints(const std::vector<DetPoint> &points) {
  for (size_t i = 1; i < points.size(); ++i) {
    const DetPoint &b = points[i];
    if (b.frr < b.far) continue;
    const DetPoint &a = points[i - 1];
    double da = a.far - a.frr, db = b.far - b.frr;  // da > 0 >= db
    double t = da / (da - db);
    return a.far + t * (b.far - a.far);
  }
  return 1.0;  // unreachable: the last point has FRR = 1 > FAR = 0
}

}  // namespace

std::vector<DetPoint> DetPoints(const std::vector<Trial> &trials) {
  return Sweep(SplitScores(trials));
}

double Eer(const std::vector<Trial> &trials) {
  return EerFromPoints(DetPoints(trials));
}

std::map<std::string, double> PerTargetEer(const std::vector<Trial> &trials) {
  std::map<std::string, std::vector<Trial>> groups;
  for (const Trial &t : trials) groups[t.target].push_back(t);
  std::map<std::string, double> out;
  for (const auto &[target, group] : groups) out[target] = Eer(group);
  return out;
}

double AverageCost(const std::vector<Trial> &trials) {
  std::map<std::string, std::vector<Trial>> groups;
  for (const Trial &t : trials) groups[t.target].push_back(t);
  if (groups.empty()) GRASSLID_THROW(InputError, "no trials");
  std::vector<SortedScores> split;
  for (const auto &[target, group] : groups) split.push_back(SplitScores(group));

  std::set<double> thresholds;
  for (const Trial &t : trials) thresholds.insert(t.score);
  thresholds.insert(std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (double theta : thresholds) {
    double cost = 0.0;
    for (const SortedScores &s : split)
      cost += 0.5 * FractionBelow(s.targets, theta) +
              0.5 * (1.0 - FractionBelow(s.nontargets, theta));
    best = std::min(best, cost / split.size());
  }
  return best;
}

std::vector<Trial> MakeTrials(const std::vector<std::string> &utterance_ids,
                              const std::vector<std::string> &true_labels,
                              const std::vector<std::string> &targets,
                              const Matrix &scores) {
  if (scores.rows() != static_cast<Eigen::Index>(utterance_ids.size()) ||
      true_labels.size() != utterance_ids.size() ||
      scores.cols() != static_cast<Eigen::Index>(targets.size()))
    GRASSLID_THROW(DimensionError, "score matrix ", scores.rows(), "x",
                   scores.cols(), " for ", utterance_ids.size(),
                   " utterances and ", targets.size(), " targets");
  std::vector<Trial> out;
  out.reserve(scores.size());
  for (size_t i = 0; i < utterance_ids.size(); ++i)
    for (size_t t = 0; t < targets.size(); ++t)
      out.push_back({utterance_ids[i], targets[t], scores(i, t),
                     true_labels[i] == targets[t]});
  return out;
}

std::vector<Fold> StratifiedKFold(const std::vector<std::string> &labels,
                                  int k, std::uint64_t seed) {
  if (k < 2) GRASSLID_THROW(InputError, "k-fold needs k >= 2, got ", k);
  std::map<std::string, std::vector<int>> classes;
  for (size_t i = 0; i < labels.size(); ++i)
    classes[labels[i]].push_back(static_cast<int>(i));
  std::vector<Fold> folds(k);
  std::vector<int> fold_of(labels.size());
  size_t offset = 0;
  for (auto &[label, members] : classes) {
    if (static_cast<int>(members.size()) < k)
      GRASSLID_THROW(InputError, "class '", label, "' has ", members.size(),
                     " members, fewer than k = ", k);
    std::mt19937_64 rng(DeriveSeed(seed, label));
    std::shuffle(members.begin(), members.end(), rng);
    for (size_t j = 0; j < members.size(); ++j)
      fold_of[members[j]] = static_cast<int>((offset + j) % k);
    offset = (offset + members.size()) % k;
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < k; ++f)
      (fold_of[i] == f ? folds[f].test : folds[f].train)
          .push_back(static_cast<int>(i));
  }
  return folds;
}

void WriteTrials(const std::filesystem::path &path,
                 const std::vector<Trial> &trials) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (const Trial &t : trials)
    os << t.utterance_id << '\t' << t.target << '\t' << FormatDouble(t.score)
       << '\t' << (t.is_target ? "target" : "nontarget") << '\n';
  if (!os) GRASSLID_THROW(FormatError, "write failed: ", path);
}

std::vector<Trial> ReadTrials(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) GRASSLID_THROW(FormatError, "cannot open trial file: ", path);
  std::vector<Trial> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = SplitString(line, '\t');
    if (f.size() != 4 || (f[3] != "target" && f[3] != "nontarget"))
      GRASSLID_THROW(FormatError, path.string(), ":", lineno,
                     ": expected utterance<TAB>target<TAB>score<TAB>"
                     "{target|nontarget}");
    Trial t{f[0], f[1], 0.0, f[3] == "target"};
    try {
      t.score = ParseDouble(f[2]);
    } catch (const Error &e) {
      GRASSLID_THROW(FormatError, path.string(), ":", lineno, ": ", e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

void WriteDetPoints(const std::filesystem::path &path,
                    const std::vector<DetPoint> &points) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (const DetPoint &p : points)
    os << FormatDouble(p.far) << '\t' << FormatDouble(p.frr) << '\n';
}

}  // namespace grasslid
