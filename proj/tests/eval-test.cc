// tests/eval-test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "grasslid/error.h"
#include "grasslid/eval.h"
#include "test-util.h"

namespace grasslid {
namespace {

std::vector<Trial> Build(const std::vector<double> &targets,
                         const std::vector<double> &nontargets) {
  std::vector<Trial> out;
  for (double s : targets) out.push_back({"u", "t", s, true});
  for (double s : nontargets) out.push_back({"u", "t", s, false});
  return out;
}

std::vector<Trial> RandomTrials(int n, double separation, std::uint64_t seed,
                                int ties = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.3);
  std::vector<Trial> out;
  for (int i = 0; i < n; ++i) {
    bool target = coin(rng);
    double s = normal(rng) + (target ? separation : 0.0);
    if (ties > 0) s = std::round(s * ties) / ties;
    out.push_back({"u" + std::to_string(i), "t", s, target});
  }
  return out;
}

// Brute-force oracle: counts errors at every candidate threshold and
// interpolates where FRR - FAR changes sign.
double OracleEer(const std::vector<Trial> &trials) {
  std::set<double> scores;
  for (const Trial &t : trials) scores.insert(t.score);
  std::vector<double> thresholds = {-INFINITY};
  thresholds.insert(thresholds.end(), scores.begin(), scores.end());
  thresholds.push_back(INFINITY);
  double prev_far = 1.0, prev_frr = 0.0;
  for (double theta : thresholds) {
    int fa = 0, fr = 0, nt = 0, nn = 0;
    for (const Trial &t : trials) {
      if (t.is_target) {
        ++nt;
        fr += t.score < theta;
      } else {
        ++nn;
        fa += t.score >= theta;
      }
    }
    double far = double(fa) / nn, frr = double(fr) / nt;
    if (frr >= far) {
      double a = prev_far - prev_frr, b = far - frr;
      if (a == b) return far;
      return prev_far + a / (a - b) * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
  }
  return -1.0;
}

TEST(Eer, TrivialCases) {
  EXPECT_DOUBLE_EQ(Eer(Build({0.9, 0.8}, {0.2, 0.1})), 0.0);
  EXPECT_DOUBLE_EQ(Eer(Build({0.1, 0.2}, {0.8, 0.9})), 1.0);
  EXPECT_DOUBLE_EQ(Eer(Build({0.5}, {0.5})), 0.5);
  EXPECT_THROW(Eer(Build({0.1}, {})), InputError);
  EXPECT_THROW(Eer(Build({}, {0.1})), InputError);
  EXPECT_THROW(Eer(Build({NAN}, {0.1})), InputError);
}

TEST(Eer, MatchesBruteForceOracle) {
  for (int seed = 0; seed < 20; ++seed) {
    auto trials = RandomTrials(200, 1.0, seed, seed % 2 ? 4 : 0);
    EXPECT_NEAR(Eer(trials), OracleEer(trials), 1e-12) << "seed " << seed;
  }
}

TEST(Eer, ChanceLevelOnUninformativeScores) {
  auto trials = RandomTrials(10000, 0.0, 1234);
  EXPECT_NEAR(Eer(trials), 0.5, 0.02);
}

TEST(Eer, InvariantUnderMonotoneTransform) {
  auto trials = RandomTrials(500, 1.0, 5, 8);
  auto warped = trials;
  for (Trial &t : warped) t.score = std::exp(3.0 * t.score) - 7.0;
  EXPECT_DOUBLE_EQ(Eer(trials), Eer(warped));
}

TEST(Eer, SymmetricUnderNegation) {
  for (int seed = 0; seed < 10; ++seed) {
    auto trials = RandomTrials(300, 0.7, 100 + seed, seed % 3 ? 3 : 0);
    auto flipped = trials;
    for (Trial &t : flipped) {
      t.score = -t.score;
      t.is_target = !t.is_target;
    }
    double e = Eer(trials);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
    EXPECT_NEAR(e, Eer(flipped), 1e-12);
  }
}

TEST(DetPoints, EndpointsAndMonotonicity) {
  auto trials = RandomTrials(400, 1.5, 7, 5);
  auto pts = DetPoints(trials);
  EXPECT_EQ(pts.front().far, 1.0);
  EXPECT_EQ(pts.front().frr, 0.0);
  EXPECT_EQ(pts.back().far, 0.0);
  EXPECT_EQ(pts.back().frr, 1.0);
  for (size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LE(pts[i].far, pts[i - 1].far);
    EXPECT_GE(pts[i].frr, pts[i - 1].frr);
  }
  auto perfect = DetPoints(Build({0.9, 0.8}, {0.2, 0.1}));
  bool origin = false;
  for (const DetPoint &p : perfect) origin |= p.far == 0.0 && p.frr == 0.0;
  EXPECT_TRUE(origin);
}

TEST(DetPoints, EerLiesOnCurve) {
  for (int seed = 0; seed < 10; ++seed) {
    auto trials = RandomTrials(150, 1.0, 50 + seed, 6);
    auto pts = DetPoints(trials);
    double e = Eer(trials);
    bool found = false;
    for (size_t i = 1; i < pts.size() && !found; ++i) {
      const DetPoint &a = pts[i - 1], &b = pts[i];
      // Point (e, e) on segment a-b?
      double dx = b.far - a.far, dy = b.frr - a.frr;
      double t = std::abs(dx) > std::abs(dy) ? (e - a.far) / dx
                                             : (e - a.frr) / dy;
      if (t < -1e-12 || t > 1 + 1e-12) continue;
      found = std::abs(a.far + t * dx - e) < 1e-12 &&
              std::abs(a.frr + t * dy - e) < 1e-12;
    }
    EXPECT_TRUE(found) << "seed " << seed;
  }
}

TEST(AverageCost, Cases) {
  std::vector<Trial> perfect = {{"a", "x", 2.0, true},  {"a", "y", 0.0, false},
                                {"b", "x", 0.0, false}, {"b", "y", 2.0, true}};
  EXPECT_DOUBLE_EQ(AverageCost(perfect), 0.0);

  // Single group: min over thresholds of the half-sum of error rates.
  auto one = Build({0.3, 0.6, 0.9}, {0.1, 0.5, 0.7});
  double best = 1.0;
  for (double theta : {0.1, 0.3, 0.5, 0.6, 0.7, 0.9, 1.0}) {
    int miss = 0, fa = 0;
    for (const Trial &t : one) {
      if (t.is_target) miss += t.score < theta;
      else fa += t.score >= theta;
    }
    best = std::min(best, 0.5 * miss / 3.0 + 0.5 * fa / 3.0);
  }
  EXPECT_DOUBLE_EQ(AverageCost(one), best);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<Trial> random;
  for (int i = 0; i < 6000; ++i)
    random.push_back({"u", i % 3 == 0 ? "p" : i % 3 == 1 ? "q" : "r",
                      normal(rng), (i / 3) % 3 == 0});
  EXPECT_NEAR(AverageCost(random), 0.5, 0.03);
  EXPECT_LE(AverageCost(random), 0.5);

  std::vector<Trial> missing = {{"a", "x", 1.0, true}, {"a", "y", 0.0, false}};
  EXPECT_THROW(AverageCost(missing), InputError);
}

TEST(StratifiedKFold, BalancedDisjointDeterministic) {
  std::vector<std::string> labels;
  for (int i = 0; i < 10; ++i) labels.push_back("a");
  for (int i = 0; i < 10; ++i) labels.push_back("b");
  auto folds = StratifiedKFold(labels, 5, 9);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> seen(labels.size(), 0);
  for (const Fold &f : folds) {
    ASSERT_EQ(f.test.size(), 4u);
    int a = 0;
    for (int i : f.test) {
      ++seen[i];
      a += labels[i] == "a";
    }
    EXPECT_EQ(a, 2);
    EXPECT_EQ(f.train.size() + f.test.size(), labels.size());
  }
  for (int c : seen) EXPECT_EQ(c, 1);
  auto again = StratifiedKFold(labels, 5, 9);
  for (int f = 0; f < 5; ++f) EXPECT_EQ(again[f].test, folds[f].test);
  auto other = StratifiedKFold(labels, 5, 10);
  bool differs = false;
  for (int f = 0; f < 5; ++f) differs |= other[f].test != folds[f].test;
  EXPECT_TRUE(differs);
}

TEST(StratifiedKFold, UnevenClasses) {
  std::vector<std::string> labels;
  for (int i = 0; i < 13; ++i) labels.push_back("x");
  for (int i = 0; i < 7; ++i) labels.push_back("y");
  for (int i = 0; i < 9; ++i) labels.push_back("z");
  auto folds = StratifiedKFold(labels, 4, 1);
  for (const char *cls : {"x", "y", "z"}) {
    int lo = 1 << 30, hi = 0;
    for (const Fold &f : folds) {
      int c = 0;
      for (int i : f.test) c += labels[i] == cls;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    EXPECT_LE(hi - lo, 1) << cls;
  }
  EXPECT_THROW(StratifiedKFold(labels, 8, 1), InputError);
  EXPECT_THROW(StratifiedKFold(labels, 1, 1), InputError);
}

TEST(TrialFile, RoundTrip) {
  auto dir = testing::ScratchDir("trials");
  auto trials = RandomTrials(50, 1.0, 3);
  WriteTrials(dir / "t.txt", trials);
  auto back = ReadTrials(dir / "t.txt");
  ASSERT_EQ(back.size(), trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    EXPECT_EQ(back[i].score, trials[i].score);
    EXPECT_EQ(back[i].is_target, trials[i].is_target);
    EXPECT_EQ(back[i].utterance_id, trials[i].utterance_id);
  }
  std::ofstream(dir / "bad.txt") << "u\tt\tnope\ttarget\n";
  EXPECT_THROW(ReadTrials(dir / "bad.txt"), FormatError);
}

TEST(MakeTrials, Expansion) {
  Matrix s(2, 3);
  s << 1, 2, 3, 4, 5, 6;
  auto trials = MakeTrials({"u1", "u2"}, {"b", "c"}, {"a", "b", "c"}, s);
  ASSERT_EQ(trials.size(), 6u);
  EXPECT_TRUE(trials[1].is_target);
  EXPECT_TRUE(trials[5].is_target);
  EXPECT_EQ(trials[3].score, 4.0);
  EXPECT_THROW(MakeTrials({"u1"}, {"b"}, {"a"}, s), DimensionError);
}

}  // namespace
}  // namespace grasslid
