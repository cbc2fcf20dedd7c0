// tests/acceptance.cc

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

// End-to-end acceptance run.  Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "grasslid/construction.h"
#include "grasslid/manifold.h"
#include "grasslid/parallel.h"
#include "grasslid/pipeline.h"
#include "grasslid/snn.h"
#include "grasslid/synthlab.h"
#include "test-util.h"

namespace grasslid {
namespace {

namespace fs = std::filesystem;
using testing::CompareTrees;
using testing::OracleEigenvalues;
using testing::OracleOrthogonal;
using testing::OracleOrthonormal;
using testing::RandomGaussian;

const fs::path kFixtures = GRASSLID_FIXTURE_DIR;
constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

fs::path WorkDir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("grasslid-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Generated data for a committed fixture, built once per process.
fs::path FixtureData(const std::string &name) {
  fs::path dir = WorkDir() / ("data-" + name);
  if (!fs::exists(dir / "test.lst"))
    MakeTask(ReadTaskSpec(kFixtures / name / "task.txt"), dir);
  return dir;
}

// `count` utterances drawn without replacement from both fixture-A splits,
// alternating recognizers.
std::vector<PhoneticSequence> FixtureUtterances(int count, std::uint64_t seed) {
  fs::path data = FixtureData("fixture-a");
  std::vector<std::pair<fs::path, std::string>> all;
  for (const char *split : {"train.lst", "test.lst"})
    for (const ManifestEntry &e : ReadManifest(data / split))
      all.push_back({data / split, e.paths[all.size() % e.paths.size()]});
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<PhoneticSequence> out;
  for (int i = 0; i < count; ++i)
    out.push_back(LoadPosteriorgram(ResolveManifestPath(all[i].first, all[i].second)));
  return out;
}

Outcome Orthogonality() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<PhoneticSequence> utts = FixtureUtterances(200, 11);
  double worst = 0.0;
  int count = 0;
  for (size_t i = 0; i < utts.size(); ++i) {
    for (ConstructionMethod method :
         {ConstructionMethod::kOlr, ConstructionMethod::kOdl, ConstructionMethod::kDlm}) {
      SubspaceSpec spec;
      spec.method = method;
      spec.context_order = 3;
      Subspace s = Construct(utts[i], spec, DeriveSeed(kSeed, std::to_string(i)));
      worst = std::max(worst, OrthonormalityError(s.Basis()));
      ++count;
    }
  }
  double secs = Seconds(t0);
  return {worst <= 1e-8 && secs < 30.0,
          "max ||S^T S - I||_F " + Sci(worst) + " over " + std::to_string(count) +
              " subspaces (OLR/ODL/DLM, 200 utterances), " + Sci(secs) + " s"};
}

Outcome ManifoldIdentities() {
  auto t0 = std::chrono::steady_clock::now();
  double identity = 0.0, invariance = 0.0, min_eig = INFINITY;
  for (int c = 0; c < 100; ++c) {
    const int d = 2 + c % 4, dim = 8 + c % 7;
    Matrix a = OracleOrthonormal(dim, d, 5000 + 2 * c);
    Matrix b = OracleOrthonormal(dim, d, 5001 + 2 * c);
    Subspace sa(a), sb(b);
    // Three expressions of the squared distance.
    double from_kernel = 2.0 * d - 2.0 * ProjectionKernel(sa, sb);
    double from_projectors = (a * a.transpose() - b * b.transpose()).squaredNorm();
    double from_angles = 0.0;
    for (double cs : PrincipalAngles(sa, sb).cosines) from_angles += 2.0 * (1.0 - cs * cs);
    double dist = SubspaceDistance(sa, sb);
    identity = std::max({identity, std::abs(dist * dist - from_kernel),
                         std::abs(from_kernel - from_projectors),
                         std::abs(from_projectors - from_angles)});
    // Right-orthogonal reparameterization leaves the kernel unchanged.
    Subspace ra(a * OracleOrthogonal(d, 7000 + c)), rb(b * OracleOrthogonal(d, 8000 + c));
    invariance = std::max(invariance,
                          std::abs(ProjectionKernel(ra, rb) - ProjectionKernel(sa, sb)));
    // Gram of a random set is PSD.
    std::vector<Subspace> set;
    for (int i = 0; i < 12; ++i) set.emplace_back(OracleOrthonormal(dim, d, 9000 + 20 * c + i));
    std::vector<std::string> ids(set.size(), "x");
    Matrix gram = ComputeGram(set, ids).Values();
    min_eig = std::min(min_eig, OracleEigenvalues(gram)(0));
  }
  double secs = Seconds(t0);
  return {identity <= 1e-8 && invariance <= 1e-8 && min_eig >= -1e-8 && secs < 30.0,
          "distance identity " + Sci(identity) + ", invariance " + Sci(invariance) +
              ", min Gram eigenvalue " + Sci(min_eig) + " over 100 cases, " +
              Sci(secs) + " s"};
}

Outcome PrincipalAngleOracle() {
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int d = 2 + c % 2, dim = 6 + c % 5;
    Matrix a = OracleOrthonormal(dim, d, 11000 + 2 * c);
    Matrix b = OracleOrthonormal(dim, d, 11001 + 2 * c);
    Matrix p = a.transpose() * b;
    Vector eig = OracleEigenvalues(p * p.transpose());  // ascending cos^2
    std::vector<double> cos = PrincipalAngles(Subspace(a), Subspace(b)).cosines;
    for (int i = 0; i < d; ++i) {
      double oracle = std::sqrt(std::max(0.0, eig(d - 1 - i)));
      worst = std::max(worst, std::abs(cos[i] - oracle));
    }
  }
  return {worst <= 1e-10, "max |cos - eigen oracle| " + Sci(worst) +
                              " over 100 pairs (d = 2, 3)"};
}

Outcome OdlChecks() {
  std::vector<PhoneticSequence> utts = FixtureUtterances(50, 12);
  bool monotone = true, ran = true;
  double min_cos = 1.0;
  int non_monotone = 0;
  for (size_t i = 0; i < utts.size(); ++i) {
    Matrix z = StackContext(utts[i], 3).data;
    const int d = SampleRank(utts[i].NumUnits(), 0.6);
    try {
      OdlResult r = RunOdl(z, d, OdlConfig{1e-4, 50}, i);
      for (size_t j = 1; j < r.objective.size(); ++j) {
        // Relative slack of a few ulps for rounding in the objective sum.
        if (r.objective[j] > r.objective[j - 1] * (1.0 + 1e-12)) {
          monotone = false;
          ++non_monotone;
        }
      }
    } catch (const std::exception &) {
      ran = false;
    }
    Matrix odl = ConstructOdl(z, d, OdlConfig{0.0, 5000}, i).Basis();
    Matrix olr = ConstructOlr(z, d).Basis();
    min_cos = std::min(min_cos, PrincipalAngles(Subspace(odl), Subspace(olr)).cosines.back());
  }
  return {monotone && ran && min_cos >= 1.0 - 1e-6,
          std::string("lambda=1e-4, J=50: ") + (ran ? "ran" : "ERROR") +
              ", non-increasing " + (monotone ? "yes" : "no (" + std::to_string(non_monotone) + " rises)") +
              "; lambda=0 vs OLR min cosine 1 - " + Sci(1.0 - min_cos) +
              " (50 utterances, n = 3)"};
}

Outcome DlmOracle() {
  double recon = 0.0, pred = 0.0, procrustes = 0.0;
  int cases = 0;
  for (int d : {2, 3, 5}) {
    const int systems = d == 5 ? 16 : 17;
    for (int t = 0; t < systems; ++t, ++cases) {
      const int m = 10 + t % 5, k = 40 + 7 * t;
      std::uint64_t seed = 20000 + 10 * cases;
      Matrix a = OracleOrthogonal(d, seed);
      Matrix c = OracleOrthonormal(m, d, seed + 1);
      Matrix x(d, k);
      x.col(0) = RandomGaussian(d, 1, seed + 2).col(0);
      for (int i = 1; i < k; ++i) x.col(i) = a * x.col(i - 1);
      Matrix y = c * x;
      DlmFit fit = FitDlm(y, d);
      const Matrix &xs = fit.states;
      recon = std::max(recon, (y - fit.model.Generator() * xs).norm() / y.norm());
      pred = std::max(pred, (xs.rightCols(k - 1) - fit.model.Transition() * xs.leftCols(k - 1))
                                .norm() / xs.norm());
      Matrix r = OracleOrthogonal(d, seed + 3);
      Matrix from = RandomGaussian(d, 3 * d + 5, seed + 4);
      procrustes = std::max(
          procrustes, (OrthogonalProcrustes(from, r * from) - r).cwiseAbs().maxCoeff());
    }
  }
  return {recon <= 1e-6 && pred <= 1e-8 && procrustes <= 1e-8,
          "reconstruction " + Sci(recon) + ", prediction residual " + Sci(pred) +
              ", Procrustes " + Sci(procrustes) + " over " + std::to_string(cases) +
              " systems (d = 2, 3, 5)"};
}

Outcome SnnGradCheck() {
  double worst = 0.0;
  int tensors = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    for (bool hidden : {false, true})
      for (const GradCheckEntry &e : RandomGradCheck(seed, hidden, 1e-5)) {
        worst = std::max(worst, e.max_relative_error);
        ++tensors;
      }
  return {worst <= 1e-5, "max relative error " + Sci(worst) + " over " +
                             std::to_string(tensors) + " tensors, 10 seeds"};
}

Outcome SnnInvariance() {
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int d1 = 2 + c % 3, d2 = 3;
    SnnModel model = InitSnnModel({{9, 2}, {7, 2}}, 8, 3, c % 2 ? 5 : 0, 0.0, 300 + c);
    SnnSample s{{Subspace(OracleOrthonormal(9, d1, 400 + c)),
                 Subspace(OracleOrthonormal(7, d2, 500 + c))}, 0};
    SnnSample r{{Subspace(s.inputs[0].Basis() * OracleOrthogonal(d1, 600 + c)),
                 Subspace(s.inputs[1].Basis() * OracleOrthogonal(d2, 700 + c))}, 0};
    worst = std::max(worst, (Forward(model, s).logits - Forward(model, r).logits)
                                .cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, "max logit change " + Sci(worst) + " over 20 cases"};
}

struct PipelineMetrics {
  double svm_eer = NAN;
  double snn_eer = NAN;
};

// synth (shared) -> construct -> train -> score -> eval, artifacts under
// `dir`; the SNN training log goes to `dir`/logs.
PipelineMetrics RunPipeline(const fs::path &data, const fs::path &dir, int n,
                            bool svm, bool snn) {
  SubspaceSpec spec;
  spec.context_order = n;
  const std::uint64_t cseed = DeriveSeed(kSeed, "construct");
  SubspaceArchive train = ConstructArchive(data / "train.lst", spec, cseed, nullptr);
  SubspaceArchive test = ConstructArchive(data / "test.lst", spec, cseed, nullptr);
  SaveArchive(train, dir / "arch-train");
  SaveArchive(test, dir / "arch-test");
  PipelineMetrics m;
  if (svm) {
    SvmBackendOptions opts;
    opts.seed = DeriveSeed(kSeed, "train-svm");
    SaveSvmSystem(TrainSvmSystem(train, opts), dir / "svm");
    std::vector<Trial> trials = ScoreWithModel(dir / "svm", test);
    WriteTrials(dir / "svm.trials", trials);
    WriteEvalOutputs(trials, dir / "svm-eval");
    m.svm_eer = ComputeMetrics(trials).eer;
  }
  if (snn) {
    SnnTrainConfig cfg;
    cfg.max_epochs = 60;
    cfg.seed = DeriveSeed(kSeed, "train-snn");
    std::vector<SnnEpochLog> log;
    SaveSnnSystem(TrainSnnSystem(train, cfg, &log), dir / "snn");
    fs::create_directories(dir / "logs");
    WriteTrainLog(dir / "logs" / "snn-train.log", log);
    std::vector<Trial> trials = ScoreWithModel(dir / "snn", test);
    WriteTrials(dir / "snn.trials", trials);
    WriteEvalOutputs(trials, dir / "snn-eval");
    m.snn_eer = ComputeMetrics(trials).eer;
  }
  return m;
}

constexpr int kEndToEndOrder = 3;

Outcome EndToEnd() {
  auto t0 = std::chrono::steady_clock::now();
  PipelineMetrics a = RunPipeline(FixtureData("fixture-a"), WorkDir() / "run-a",
                                  kEndToEndOrder, true, true);
  PipelineMetrics c = RunPipeline(FixtureData("control"), WorkDir() / "run-control",
                                  kEndToEndOrder, true, true);
  double secs = Seconds(t0);
  auto near_half = [](double e) { return std::abs(e - 0.5) <= 0.05; };
  bool pass = a.svm_eer <= 0.10 && a.snn_eer <= 0.10 && near_half(c.svm_eer) &&
              near_half(c.snn_eer) && secs < 600.0;
  return {pass, "fixture-A pooled EER svm " + Sci(a.svm_eer) + ", snn " +
                    Sci(a.snn_eer) + "; control svm " + Sci(c.svm_eer) + ", snn " +
                    Sci(c.snn_eer) + " (n = 3, OLR, alpha = 0.6), " + Sci(secs) + " s"};
}

Outcome ContextOrder() {
  fs::path data = FixtureData("trigram-only");
  double e1 = RunPipeline(data, WorkDir() / "tri-n1", 1, false, true).snn_eer;
  double e3 = RunPipeline(data, WorkDir() / "tri-n3", 3, false, true).snn_eer;
  return {e3 < e1, "trigram-only SNN EER n = 1: " + Sci(e1) + ", n = 3: " + Sci(e3)};
}

Outcome Determinism() {
  // Second full run of the fixture-A pipeline, data regenerated from the spec.
  fs::path data_b = WorkDir() / "data-fixture-a-rerun";
  MakeTask(ReadTaskSpec(kFixtures / "fixture-a" / "task.txt"), data_b);
  RunPipeline(data_b, WorkDir() / "run-b", kEndToEndOrder, true, true);
  std::string diff = CompareTrees(FixtureData("fixture-a"), data_b);
  for (const char *part : {"arch-train", "arch-test", "svm", "snn", "svm-eval", "snn-eval"}) {
    if (!diff.empty()) break;
    diff = CompareTrees(WorkDir() / "run-a" / part, WorkDir() / "run-b" / part);
  }
  for (const char *file : {"svm.trials", "snn.trials"}) {
    if (!diff.empty()) break;
    std::ifstream a(WorkDir() / "run-a" / file), b(WorkDir() / "run-b" / file);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (sa.str() != sb.str()) diff = std::string("contents differ: ") + file;
  }
  return {diff.empty(), diff.empty()
                            ? "posteriorgrams, archives, models, trials and metrics "
                              "byte-identical across reruns"
                            : diff};
}

}  // namespace
}  // namespace grasslid

int main() {
  using grasslid::Outcome;
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
      {"orthogonality", grasslid::Orthogonality},
      {"manifold identities", grasslid::ManifoldIdentities},
      {"principal-angle oracle", grasslid::PrincipalAngleOracle},
      {"ODL monotonicity and lambda=0", grasslid::OdlChecks},
      {"DLM identification", grasslid::DlmOracle},
      {"SNN gradient check", grasslid::SnnGradCheck},
      {"SNN invariance", grasslid::SnnInvariance},
      {"end-to-end discrimination", grasslid::EndToEnd},
      {"context-order sensitivity", grasslid::ContextOrder},
      {"determinism", grasslid::Determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " ["
              << criteria[i].first << "] " << o.detail << std::endl;
  }
  std::error_code ec;
  std::filesystem::remove_all(grasslid::WorkDir(), ec);
  std::cout << (failures == 0 ? "all criteria passed" : "some criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
