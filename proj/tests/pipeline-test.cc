// tests/pipeline-test.cc

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

#include <random>

#include "grasslid/error.h"
#include "grasslid/pipeline.h"
#include "grasslid/synthlab.h"
#include "test-util.h"

namespace grasslid {
namespace {

using testing::CompareTrees;
using testing::ScratchDir;

// Two order-1 languages with different preferred successors.
TaskSpec TwoLanguageTask(int min_length) {
  TaskSpec spec;
  for (int shift : {1, 3}) {
    SyntheticLanguage lang = UniformLanguage("s" + std::to_string(shift), 6, 1);
    lang.transition.setConstant(0.4 / 6);
    for (int u = 0; u < 6; ++u) lang.transition(u, (u + shift) % 6) += 0.6;
    spec.languages.push_back(lang);
  }
  spec.train_per_language = 20;
  spec.test_per_language = 10;
  spec.min_length = min_length;
  spec.max_length = min_length + 40;
  spec.emission.concentration = 20.0;
  spec.recognizers = {{6, 1}, {5, 2}};
  spec.seed = 9;
  return spec;
}

struct Data {
  std::filesystem::path dir;
  SubspaceArchive train, test;
};

Data Build(const std::string &name) {
  Data d;
  d.dir = ScratchDir(name);
  MakeTask(TwoLanguageTask(40), d.dir / "task");
  SubspaceSpec spec;
  spec.context_order = 2;
  d.train = ConstructArchive(d.dir / "task" / "train.lst", spec, 5, nullptr);
  d.test = ConstructArchive(d.dir / "task" / "test.lst", spec, 5, nullptr);
  return d;
}

TEST(Archive, RoundTripIsExact) {
  Data d = Build("pipe-archive");
  ASSERT_EQ(d.train.items.size(), 40u);
  SaveArchive(d.train, d.dir / "arch");
  SubspaceArchive back = LoadArchive(d.dir / "arch");
  ASSERT_EQ(back.items.size(), d.train.items.size());
  EXPECT_EQ(back.Ids(), d.train.Ids());
  EXPECT_EQ(back.Labels(), d.train.Labels());
  EXPECT_EQ(back.spec.context_order, 2);
  for (size_t i = 0; i < back.items.size(); ++i)
    for (int l = 0; l < 2; ++l) {
      EXPECT_TRUE(back.items[i].subspaces[l].Basis() ==
                  d.train.items[i].subspaces[l].Basis());
      EXPECT_EQ(back.items[i].subspaces[l].SourceTag(), "olr");
    }
  SaveArchive(back, d.dir / "arch2");
  EXPECT_EQ(CompareTrees(d.dir / "arch", d.dir / "arch2"), "");
  EXPECT_THROW(LoadArchive(d.dir / "missing"), FormatError);
}

TEST(Archive, ShortUtterancesAreSkippedWithWarnings) {
  auto dir = ScratchDir("pipe-short");
  TaskSpec spec = TwoLanguageTask(2);
  spec.max_length = 30;
  MakeTask(spec, dir);
  SubspaceSpec s;
  s.context_order = 3;  // D = 18 needs K >= 18 on the first recognizer
  ConstructReport report;
  SubspaceArchive a = ConstructArchive(dir / "train.lst", s, 1, &report);
  EXPECT_GT(report.warnings.size(), 0u);
  EXPECT_GT(report.succeeded, 0);
  EXPECT_EQ(report.succeeded + static_cast<int>(report.warnings.size()), 40);
  EXPECT_EQ(static_cast<int>(a.items.size()), report.succeeded);
  EXPECT_NE(report.warnings[0].find("skipping"), std::string::npos);
}

TEST(SvmSystemIo, CompactedSupportScoresMatchFullKernel) {
  Data d = Build("pipe-svm");
  SvmBackendOptions opts;
  opts.seed = 3;
  SvmSystem sys = TrainSvmSystem(d.train, opts);
  // Reference: same backend on full kernels against all training items.
  SvmBackend full = TrainSvmBackend(ArchiveGrams(d.train), d.train.Labels(), opts);
  std::vector<Matrix> kernels;
  for (int l = 0; l < 2; ++l)
    kernels.push_back(CrossKernel(d.test.Recognizer(l), d.train.Recognizer(l)));
  Matrix expected = ScoreSvmBackend(full, kernels);
  Matrix got = ScoreSvmSystem(sys, d.test);
  EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-12);

  SaveSvmSystem(sys, d.dir / "svm");
  EXPECT_EQ(ModelType(d.dir / "svm"), "svm");
  SvmSystem back = LoadSvmSystem(d.dir / "svm");
  EXPECT_TRUE(ScoreSvmSystem(back, d.test) == got);
  SaveSvmSystem(back, d.dir / "svm2");
  EXPECT_EQ(CompareTrees(d.dir / "svm", d.dir / "svm2"), "");

  Metrics m = ComputeMetrics(ScoreWithModel(d.dir / "svm", d.test));
  EXPECT_LE(m.eer, 0.1);
}

TEST(SnnSystemIo, SaveLoadScoresIdentical) {
  Data d = Build("pipe-snn");
  SnnTrainConfig cfg;
  cfg.num_maps = 10;
  cfg.max_epochs = 30;
  cfg.learning_rate = 1e-2;
  cfg.hidden_units = 4;
  std::vector<SnnEpochLog> log;
  SnnSystem sys = TrainSnnSystem(d.train, cfg, &log);
  EXPECT_EQ(sys.targets, (std::vector<std::string>{"s1", "s3"}));
  SaveSnnSystem(sys, d.dir / "snn");
  WriteTrainLog(d.dir / "snn" / "train.log", log);
  EXPECT_EQ(ModelType(d.dir / "snn"), "snn");
  SnnSystem back = LoadSnnSystem(d.dir / "snn");
  EXPECT_TRUE(ScoreSnnSystem(back, d.test) == ScoreSnnSystem(sys, d.test));
  Metrics m = ComputeMetrics(ScoreWithModel(d.dir / "snn", d.test));
  EXPECT_LE(m.eer, 0.15);
  EXPECT_THROW(LoadSvmSystem(d.dir / "snn"), FormatError);
}

TEST(EvalOutputs, MetricsFile) {
  auto dir = ScratchDir("pipe-eval");
  std::vector<Trial> trials = {{"u1", "a", 2.0, true}, {"u1", "b", -1.0, false},
                               {"u2", "a", -3.0, false}, {"u2", "b", 1.0, true}};
  WriteEvalOutputs(trials, dir);
  KeyValueList kv = ReadKeyValueFile(dir / "metrics.txt");
  EXPECT_EQ(LookupKey(kv, "eer"), "0");
  EXPECT_EQ(LookupKey(kv, "cavg"), "0");
  EXPECT_EQ(LookupKey(kv, "trials"), "4");
  EXPECT_TRUE(std::filesystem::exists(dir / "det.txt"));
}

TEST(Sweep, OneLinePerCell) {
  auto dir = ScratchDir("pipe-sweep");
  MakeTask(TwoLanguageTask(40), dir);
  SweepGrid grid;
  grid.context_orders = {1, 2};
  grid.sample_ratios = {0.4, 0.6};
  SweepBase base;
  base.backend = "svm";
  std::vector<std::string> lines =
      RunSweep(dir / "train.lst", dir / "test.lst", grid, base);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("n=1 alpha=0.4 ", 0), 0u);
  EXPECT_NE(lines[3].find(" eer="), std::string::npos);
  grid.context_orders = {0};
  EXPECT_THROW(RunSweep(dir / "train.lst", dir / "test.lst", grid, base),
               InputError);
}

}  // namespace
}  // namespace grasslid
