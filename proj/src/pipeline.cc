// pipeline.cc

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

#include "grasslid/pipeline.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

#include "grasslid/error.h"
#include "grasslid/parallel.h"
#include "grasslid/phonetics.h"

namespace grasslid {

namespace fs = std::filesystem;

namespace {

std::string RecDir(int l) { return "rec" + std::to_string(l + 1); }

std::string Numbered(int i) {
  std::ostringstream os;
  os << std::setw(6) << std::setfill('0') << i << ".gsm";
  return os.str();
}

std::vector<std::string> ReadLines(const fs::path &path) {
  std::ifstream is(path);
  if (!is) GRASSLID_THROW(FormatError, "cannot open ", path);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void WriteLines(const fs::path &path, const std::vector<std::string> &lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) GRASSLID_THROW(FormatError, "cannot open for writing: ", path);
  for (const std::string &l : lines) os << l << '\n';
  if (!os) GRASSLID_THROW(FormatError, "write failed: ", path);
}

void RequireDir(const fs::path &dir, const char *what) {
  if (!fs::is_directory(dir))
    GRASSLID_THROW(FormatError, what, " not found: ", dir);
}

std::vector<std::string> SortedLabels(const std::vector<std::string> &labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

std::vector<SnnSample> ToSamples(const SubspaceArchive &archive,
                                 const std::vector<std::string> &targets,
                                 bool labeled) {
  std::vector<SnnSample> out;
  out.reserve(archive.items.size());
  for (const ArchiveItem &item : archive.items) {
    SnnSample s{item.subspaces, 0};
    if (labeled) {
      auto it = std::lower_bound(targets.begin(), targets.end(), item.language);
      s.label = static_cast<int>(it - targets.begin());
    }
    out.push_back(std::move(s));
  }
  return out;
}

void CheckRecognizers(const SubspaceArchive &test, int expected) {
  if (test.NumRecognizers() != expected)
    GRASSLID_THROW(InputError, "archive has ", test.NumRecognizers(),
                   " recognizers, model expects ", expected);
}

}  // namespace

int SubspaceArchive::NumRecognizers() const {
  return items.empty() ? 0 : static_cast<int>(items[0].subspaces.size());
}

std::vector<std::string> SubspaceArchive::Ids() const {
  std::vector<std::string> out;
  for (const ArchiveItem &i : items) out.push_back(i.utterance_id);
  return out;
}

std::vector<std::string> SubspaceArchive::Labels() const {
  std::vector<std::string> out;
  for (const ArchiveItem &i : items) out.push_back(i.language);
  return out;
}

std::vector<Subspace> SubspaceArchive::Recognizer(int l) const {
  std::vector<Subspace> out;
  for (const ArchiveItem &i : items) out.push_back(i.subspaces.at(l));
  return out;
}

void SaveArchive(const SubspaceArchive &archive, const fs::path &dir) {
  if (archive.items.empty()) GRASSLID_THROW(InputError, "empty archive");
  const int num_rec = archive.NumRecognizers();
  for (int l = 0; l < num_rec; ++l) fs::create_directories(dir / RecDir(l));
  std::vector<std::string> index;
  for (size_t i = 0; i < archive.items.size(); ++i) {
    const ArchiveItem &item = archive.items[i];
    std::string line = item.utterance_id + "\t" + item.language;
    for (int l = 0; l < num_rec; ++l) {
      std::string rel = RecDir(l) + "/" + Numbered(static_cast<int>(i));
      WriteMatrixFile(dir / rel, item.subspaces[l].Basis());
      line += "\t" + rel;
    }
    index.push_back(line);
  }
  WriteLines(dir / "index.tsv", index);
  WriteKeyValueFile(
      dir / "archive.txt",
      {{"method", std::string(MethodName(archive.spec.method))},
       {"context_order", std::to_string(archive.spec.context_order)},
       {"sample_ratio", FormatDouble(archive.spec.sample_ratio)},
       {"odl_lambda", FormatDouble(archive.spec.odl.lambda)},
       {"odl_iterations", std::to_string(archive.spec.odl.iterations)},
       {"seed", std::to_string(archive.seed)},
       {"source_tag", archive.items[0].subspaces[0].SourceTag()},
       {"num_recognizers", std::to_string(num_rec)},
       {"num_items", std::to_string(archive.items.size())}});
}

SubspaceArchive LoadArchive(const fs::path &dir) {
  RequireDir(dir, "subspace archive");
  KeyValueList kv = ReadKeyValueFile(dir / "archive.txt");
  SubspaceArchive archive;
  archive.spec.method = ParseMethod(LookupKey(kv, "method"));
  archive.spec.context_order =
      static_cast<int>(ParseInt(LookupKey(kv, "context_order")));
  archive.spec.sample_ratio = ParseDouble(LookupKey(kv, "sample_ratio"));
  archive.spec.odl.lambda = ParseDouble(LookupKey(kv, "odl_lambda"));
  archive.spec.odl.iterations =
      static_cast<int>(ParseInt(LookupKey(kv, "odl_iterations")));
  archive.seed = static_cast<std::uint64_t>(ParseInt(LookupKey(kv, "seed")));
  const std::string tag = LookupKey(kv, "source_tag");
  const int num_rec = static_cast<int>(ParseInt(LookupKey(kv, "num_recognizers")));

  std::vector<std::string> lines = ReadLines(dir / "index.tsv");
  archive.items.resize(lines.size());
  ParallelFor(static_cast<int>(lines.size()), [&](int i) {
    std::vector<std::string> f = SplitString(lines[i], '\t');
    if (static_cast<int>(f.size()) != 2 + num_rec)
      GRASSLID_THROW(FormatError, dir / "index.tsv", ": line ", i + 1,
                     " has ", f.size(), " fields");
    ArchiveItem &item = archive.items[i];
    item.utterance_id = f[0];
    item.language = f[1];
    for (int l = 0; l < num_rec; ++l)
      item.subspaces.emplace_back(ReadMatrixFile(dir / f[2 + l]), tag);
  });
  if (archive.items.empty())
    GRASSLID_THROW(FormatError, "archive ", dir, " has no items");
  return archive;
}

SubspaceArchive ConstructArchive(const fs::path &manifest,
                                 const SubspaceSpec &spec, std::uint64_t seed,
                                 ConstructReport *report) {
  spec.Check();
  std::vector<ManifestEntry> entries = ReadManifest(manifest);
  const int n = static_cast<int>(entries.size());
  std::vector<std::optional<ArchiveItem>> built(n);
  std::vector<std::string> failures(n);
  ParallelFor(n, [&](int i) {
    const ManifestEntry &e = entries[i];
    ArchiveItem item{e.utterance_id, e.language, {}};
    for (size_t l = 0; l < e.paths.size(); ++l) {
      try {
        PhoneticSequence seq =
            LoadPosteriorgram(ResolveManifestPath(manifest, e.paths[l]));
        item.subspaces.push_back(Construct(
            seq, spec,
            DeriveSeed(seed, e.utterance_id + "/" + RecDir(static_cast<int>(l)))));
      } catch (const Error &err) {
        failures[i] = internal::StrCat("skipping ", e.utterance_id, " (",
                                       RecDir(static_cast<int>(l)),
                                       "): ", err.what());
        return;
      }
    }
    built[i] = std::move(item);
  });
  SubspaceArchive archive;
  archive.spec = spec;
  archive.seed = seed;
  ConstructReport local;
  for (int i = 0; i < n; ++i) {
    if (built[i]) {
      archive.items.push_back(std::move(*built[i]));
      ++local.succeeded;
    } else {
      local.warnings.push_back(failures[i]);
    }
  }
  if (report) *report = std::move(local);
  return archive;
}

std::vector<GramMatrix> ArchiveGrams(const SubspaceArchive &archive) {
  std::vector<GramMatrix> grams;
  for (int l = 0; l < archive.NumRecognizers(); ++l)
    grams.push_back(ComputeGram(archive.Recognizer(l), archive.Ids()));
  return grams;
}

void SaveGrams(const std::vector<GramMatrix> &grams, const fs::path &dir) {
  if (grams.empty()) GRASSLID_THROW(InputError, "no Gram matrices");
  fs::create_directories(dir);
  for (size_t l = 0; l < grams.size(); ++l)
    WriteMatrixFile(dir / ("gram-" + RecDir(static_cast<int>(l)) + ".gsm"),
                    grams[l].Values());
  WriteLines(dir / "ids.txt", grams[0].RowIds());
}

std::vector<GramMatrix> LoadGrams(const fs::path &dir) {
  RequireDir(dir, "Gram directory");
  std::vector<std::string> ids = ReadLines(dir / "ids.txt");
  std::vector<GramMatrix> grams;
  for (int l = 0; fs::exists(dir / ("gram-" + RecDir(l) + ".gsm")); ++l)
    grams.emplace_back(ReadMatrixFile(dir / ("gram-" + RecDir(l) + ".gsm")), ids);
  if (grams.empty()) GRASSLID_THROW(FormatError, "no Gram files in ", dir);
  return grams;
}

SvmSystem TrainSvmSystem(const SubspaceArchive &train,
                         const SvmBackendOptions &options,
                         const std::vector<GramMatrix> &grams) {
  if (train.items.empty()) GRASSLID_THROW(InputError, "empty training archive");
  std::vector<GramMatrix> computed;
  const std::vector<GramMatrix> *use = &grams;
  if (grams.empty()) {
    computed = ArchiveGrams(train);
    use = &computed;
  } else {
    if (static_cast<int>(grams.size()) != train.NumRecognizers())
      GRASSLID_THROW(InputError, "Gram count does not match recognizers");
    for (const GramMatrix &g : grams)
      if (g.RowIds() != train.Ids())
        GRASSLID_THROW(InputError, "Gram row ids do not match the archive");
  }
  SvmSystem system;
  system.backend = TrainSvmBackend(*use, train.Labels(), options);
  const int num_rec = system.backend.num_recognizers;
  const int t_count = static_cast<int>(system.backend.targets.size());
  system.support.resize(num_rec);
  for (int l = 0; l < num_rec; ++l) {
    std::set<int> used;
    for (int t = 0; t < t_count; ++t)
      for (int id : system.backend.models[l * t_count + t].support_ids)
        used.insert(id);
    std::vector<int> remap(train.items.size(), -1);
    for (int id : used) {
      remap[id] = static_cast<int>(system.support[l].size());
      system.support[l].push_back(train.items[id].subspaces[l]);
    }
    for (int t = 0; t < t_count; ++t)
      for (int &id : system.backend.models[l * t_count + t].support_ids)
        id = remap[id];
  }
  return system;
}

void SaveSvmSystem(const SvmSystem &system, const fs::path &dir) {
  const SvmBackend &b = system.backend;
  const int num_rec = b.num_recognizers;
  const int t_count = static_cast<int>(b.targets.size());
  KeyValueList kv = {{"type", "svm"},
                     {"penalty", FormatDouble(b.penalty)},
                     {"num_recognizers", std::to_string(num_rec)},
                     {"num_targets", std::to_string(t_count)},
                     {"fusion_regularization",
                      FormatDouble(b.fusion.regularization)}};
  for (int l = 0; l < num_rec; ++l) {
    const fs::path rd = dir / RecDir(l);
    fs::create_directories(rd);
    const int s = static_cast<int>(system.support[l].size());
    Matrix coefs = Matrix::Zero(s, t_count);
    Matrix bias(1, t_count);
    for (int t = 0; t < t_count; ++t) {
      const SvmModel &m = b.models[l * t_count + t];
      for (size_t i = 0; i < m.support_ids.size(); ++i)
        coefs(m.support_ids[i], t) = m.dual_coefs[i];
      bias(0, t) = m.bias;
    }
    WriteMatrixFile(rd / "coefs.gsm", coefs);
    WriteMatrixFile(rd / "bias.gsm", bias);
    for (int i = 0; i < s; ++i)
      WriteMatrixFile(rd / ("support-" + Numbered(i)), system.support[l][i].Basis());
    kv.push_back({"support_" + RecDir(l), std::to_string(s)});
    kv.push_back({"source_tag_" + RecDir(l),
                  s > 0 ? system.support[l][0].SourceTag() : ""});
  }
  WriteMatrixFile(dir / "fusion.gsm", b.fusion.weights);
  WriteLines(dir / "targets.txt", b.targets);
  WriteKeyValueFile(dir / "model.txt", kv);
}

SvmSystem LoadSvmSystem(const fs::path &dir) {
  RequireDir(dir, "model directory");
  KeyValueList kv = ReadKeyValueFile(dir / "model.txt");
  if (LookupKey(kv, "type") != "svm")
    GRASSLID_THROW(FormatError, dir, " does not hold an SVM model");
  SvmSystem system;
  SvmBackend &b = system.backend;
  b.penalty = ParseDouble(LookupKey(kv, "penalty"));
  b.num_recognizers = static_cast<int>(ParseInt(LookupKey(kv, "num_recognizers")));
  b.targets = ReadLines(dir / "targets.txt");
  const int t_count = static_cast<int>(b.targets.size());
  if (t_count != ParseInt(LookupKey(kv, "num_targets")))
    GRASSLID_THROW(FormatError, "target list does not match model.txt");
  b.fusion.weights = ReadMatrixFile(dir / "fusion.gsm");
  b.fusion.regularization = ParseDouble(LookupKey(kv, "fusion_regularization"));
  b.models.resize(b.num_recognizers * t_count);
  system.support.resize(b.num_recognizers);
  for (int l = 0; l < b.num_recognizers; ++l) {
    const fs::path rd = dir / RecDir(l);
    const int s = static_cast<int>(ParseInt(LookupKey(kv, "support_" + RecDir(l))));
    const std::string tag = LookupKey(kv, "source_tag_" + RecDir(l));
    for (int i = 0; i < s; ++i)
      system.support[l].emplace_back(ReadMatrixFile(rd / ("support-" + Numbered(i))),
                                     tag);
    Matrix coefs = ReadMatrixFile(rd / "coefs.gsm");
    Matrix bias = ReadMatrixFile(rd / "bias.gsm");
    if (coefs.rows() != s || coefs.cols() != t_count || bias.size() != t_count)
      GRASSLID_THROW(FormatError, "coefficient shapes in ", rd);
    for (int t = 0; t < t_count; ++t) {
      SvmModel &m = b.models[l * t_count + t];
      m.penalty = b.penalty;
      m.bias = bias(0, t);
      for (int i = 0; i < s; ++i) {
        if (coefs(i, t) != 0.0) {
          m.support_ids.push_back(i);
          m.dual_coefs.push_back(coefs(i, t));
        }
      }
    }
  }
  return system;
}

Matrix ScoreSvmSystem(const SvmSystem &system, const SubspaceArchive &test) {
  CheckRecognizers(test, system.backend.num_recognizers);
  std::vector<Matrix> kernels;
  for (int l = 0; l < system.backend.num_recognizers; ++l)
    kernels.push_back(CrossKernel(test.Recognizer(l), system.support[l]));
  return ScoreSvmBackend(system.backend, kernels);
}

SnnSystem TrainSnnSystem(const SubspaceArchive &train, const SnnTrainConfig &cfg,
                         std::vector<SnnEpochLog> *log) {
  SnnSystem system;
  system.targets = SortedLabels(train.Labels());
  if (system.targets.size() < 2)
    GRASSLID_THROW(InputError, "need at least two training languages");
  system.model = TrainSnn(ToSamples(train, system.targets, true),
                          static_cast<int>(system.targets.size()), cfg, log);
  return system;
}

void SaveSnnSystem(const SnnSystem &system, const fs::path &dir) {
  const SnnModel &m = system.model;
  fs::create_directories(dir);
  std::string ranks;
  for (int r : m.map_ranks) ranks += (ranks.empty() ? "" : " ") + std::to_string(r);
  WriteKeyValueFile(dir / "model.txt",
                    {{"type", "snn"},
                     {"num_inputs", std::to_string(m.NumInputs())},
                     {"num_maps", std::to_string(m.num_maps)},
                     {"map_ranks", ranks},
                     {"lambda", FormatDouble(m.lambda)},
                     {"hidden", m.HasHidden() ? "1" : "0"}});
  for (int l = 0; l < m.NumInputs(); ++l)
    WriteMatrixFile(dir / ("maps-" + RecDir(l) + ".gsm"), m.weight_maps[l]);
  WriteMatrixFile(dir / "head_weights.gsm", m.head_weights);
  WriteMatrixFile(dir / "head_bias.gsm", Matrix(m.head_bias));
  if (m.HasHidden()) {
    WriteMatrixFile(dir / "hidden_weights.gsm", m.hidden_weights);
    WriteMatrixFile(dir / "hidden_bias.gsm", Matrix(m.hidden_bias));
  }
  WriteLines(dir / "targets.txt", system.targets);
}

SnnSystem LoadSnnSystem(const fs::path &dir) {
  RequireDir(dir, "model directory");
  KeyValueList kv = ReadKeyValueFile(dir / "model.txt");
  if (LookupKey(kv, "type") != "snn")
    GRASSLID_THROW(FormatError, dir, " does not hold an SNN model");
  SnnSystem system;
  SnnModel &m = system.model;
  const int inputs = static_cast<int>(ParseInt(LookupKey(kv, "num_inputs")));
  m.num_maps = static_cast<int>(ParseInt(LookupKey(kv, "num_maps")));
  m.lambda = ParseDouble(LookupKey(kv, "lambda"));
  std::istringstream ranks(LookupKey(kv, "map_ranks"));
  for (std::string r; ranks >> r;) m.map_ranks.push_back(static_cast<int>(ParseInt(r)));
  if (static_cast<int>(m.map_ranks.size()) != inputs)
    GRASSLID_THROW(FormatError, "map_ranks does not match num_inputs");
  for (int l = 0; l < inputs; ++l) {
    m.weight_maps.push_back(ReadMatrixFile(dir / ("maps-" + RecDir(l) + ".gsm")));
    if (m.weight_maps[l].cols() != m.num_maps * m.map_ranks[l])
      GRASSLID_THROW(FormatError, "weight map shape for ", RecDir(l));
  }
  m.head_weights = ReadMatrixFile(dir / "head_weights.gsm");
  m.head_bias = ReadMatrixFile(dir / "head_bias.gsm").reshaped();
  if (LookupKey(kv, "hidden") == "1") {
    m.hidden_weights = ReadMatrixFile(dir / "hidden_weights.gsm");
    m.hidden_bias = ReadMatrixFile(dir / "hidden_bias.gsm").reshaped();
  }
  system.targets = ReadLines(dir / "targets.txt");
  if (static_cast<int>(system.targets.size()) != m.NumTargets() ||
      m.head_weights.cols() != m.NumTargets())
    GRASSLID_THROW(FormatError, "head shape does not match targets");
  return system;
}

Matrix ScoreSnnSystem(const SnnSystem &system, const SubspaceArchive &test) {
  CheckRecognizers(test, system.model.NumInputs());
  return DetectionScores(system.model, ToSamples(test, system.targets, false));
}

void WriteTrainLog(const fs::path &path, const std::vector<SnnEpochLog> &log) {
  std::vector<std::string> lines;
  for (const SnnEpochLog &e : log)
    lines.push_back(internal::StrCat(
        "epoch=", e.epoch, " lr=", FormatDouble(e.learning_rate),
        " loss=", FormatDouble(e.mean_loss), " penalty=",
        FormatDouble(e.penalty), " seconds=", std::fixed,
        std::setprecision(3), e.seconds));
  WriteLines(path, lines);
}

std::string ModelType(const fs::path &model_dir) {
  RequireDir(model_dir, "model directory");
  std::string type = LookupKey(ReadKeyValueFile(model_dir / "model.txt"), "type");
  if (type != "svm" && type != "snn")
    GRASSLID_THROW(FormatError, "unknown model type '", type, "'");
  return type;
}

std::vector<Trial> ScoreWithModel(const fs::path &model_dir,
                                  const SubspaceArchive &test) {
  Matrix scores;
  std::vector<std::string> targets;
  if (ModelType(model_dir) == "svm") {
    SvmSystem s = LoadSvmSystem(model_dir);
    scores = ScoreSvmSystem(s, test);
    targets = s.backend.targets;
  } else {
    SnnSystem s = LoadSnnSystem(model_dir);
    scores = ScoreSnnSystem(s, test);
    targets = s.targets;
  }
  return MakeTrials(test.Ids(), test.Labels(), targets, scores);
}

Metrics ComputeMetrics(const std::vector<Trial> &trials) {
  Metrics m;
  m.eer = Eer(trials);
  m.cavg = AverageCost(trials);
  m.per_target_eer = PerTargetEer(trials);
  m.trials = static_cast<int>(trials.size());
  return m;
}

void WriteEvalOutputs(const std::vector<Trial> &trials, const fs::path &dir) {
  Metrics m = ComputeMetrics(trials);
  fs::create_directories(dir);
  KeyValueList kv = {{"eer", FormatDouble(m.eer)},
                     {"cavg", FormatDouble(m.cavg)},
                     {"trials", std::to_string(m.trials)}};
  for (const auto &[t, e] : m.per_target_eer)
    kv.push_back({"eer." + t, FormatDouble(e)});
  WriteKeyValueFile(dir / "metrics.txt", kv);
  WriteDetPoints(dir / "det.txt", DetPoints(trials));
}

std::vector<std::string> RunSweep(const fs::path &train_manifest,
                                  const fs::path &test_manifest,
                                  const SweepGrid &grid, const SweepBase &base) {
  if (base.backend != "snn" && base.backend != "svm")
    GRASSLID_THROW(InputError, "backend must be snn or svm, got ", base.backend);
  auto axis = [](auto values, auto fallback) {
    return values.empty() ? decltype(values){fallback} : values;
  };
  const auto orders = axis(grid.context_orders, base.spec.context_order);
  const auto ratios = axis(grid.sample_ratios, base.spec.sample_ratio);
  const auto betas = axis(grid.betas, base.snn.beta);
  const auto maps = axis(grid.num_maps, base.snn.num_maps);
  const auto lambdas = axis(grid.lambdas, base.snn.lambda_orth);
  // Validate the whole grid before any work.
  for (int n : orders)
    for (double a : ratios) {
      SubspaceSpec s = base.spec;
      s.context_order = n;
      s.sample_ratio = a;
      s.Check();
    }
  for (double b : betas)
    for (int m : maps)
      for (double l : lambdas) {
        SnnTrainConfig c = base.snn;
        c.beta = b;
        c.num_maps = m;
        c.lambda_orth = l;
        c.Check();
      }

  const std::uint64_t construct_seed = DeriveSeed(base.seed, "construct");
  std::vector<std::string> lines;
  for (int n : orders) {
    for (double a : ratios) {
      SubspaceSpec spec = base.spec;
      spec.context_order = n;
      spec.sample_ratio = a;
      SubspaceArchive train = ConstructArchive(train_manifest, spec, construct_seed, nullptr);
      SubspaceArchive test = ConstructArchive(test_manifest, spec, construct_seed, nullptr);
      std::optional<Metrics> svm_metrics;
      for (double b : betas)
        for (int m : maps)
          for (double l : lambdas) {
            Metrics metrics;
            if (base.backend == "svm") {
              if (!svm_metrics) {
                SvmBackendOptions opts = base.svm;
                opts.seed = DeriveSeed(base.seed, "train-svm");
                SvmSystem sys = TrainSvmSystem(train, opts);
                svm_metrics = ComputeMetrics(MakeTrials(
                    test.Ids(), test.Labels(), sys.backend.targets,
                    ScoreSvmSystem(sys, test)));
              }
              metrics = *svm_metrics;
            } else {
              SnnTrainConfig cfg = base.snn;
              cfg.beta = b;
              cfg.num_maps = m;
              cfg.lambda_orth = l;
              cfg.seed = DeriveSeed(base.seed, "train-snn");
              SnnSystem sys = TrainSnnSystem(train, cfg, nullptr);
              metrics = ComputeMetrics(MakeTrials(test.Ids(), test.Labels(),
                                                  sys.targets,
                                                  ScoreSnnSystem(sys, test)));
            }
            lines.push_back(internal::StrCat(
                "n=", n, " alpha=", FormatDouble(a), " beta=", FormatDouble(b),
                " m=", m, " lambda=", FormatDouble(l),
                " eer=", FormatDouble(metrics.eer),
                " cavg=", FormatDouble(metrics.cavg)));
          }
    }
  }
  return lines;
}

}  // namespace grasslid
