// tools/grasslid.cc

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

// Pipeline driver.  Every stage is a subcommand; options can also come from
// a key=value file given with --config (keys are option names without the
// leading dashes) and explicit flags override the file.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "grasslid/error.h"
#include "grasslid/matrix-io.h"
#include "grasslid/parallel.h"
#include "grasslid/phonetics.h"
#include "grasslid/pipeline.h"
#include "grasslid/synthlab.h"

namespace fs = std::filesystem;
using namespace grasslid;

namespace {

// Bad arguments, bad configuration or missing upstream artifacts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void RequirePath(const std::string &path, const char *what) {
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
}

template <typename T, typename Parse>
std::vector<T> ParseList(const std::string &text, Parse parse) {
  std::vector<T> out;
  if (Trim(text).empty()) return out;
  for (const std::string &f : SplitString(text, ',')) out.push_back(parse(Trim(f)));
  return out;
}

std::vector<double> DoubleList(const std::string &text) {
  return ParseList<double>(text, [](const std::string &s) { return ParseDouble(s); });
}

std::vector<int> IntList(const std::string &text) {
  return ParseList<int>(text, [](const std::string &s) {
    return static_cast<int>(ParseInt(s));
  });
}

// Validation wrapper: module errors raised while checking configuration are
// usage errors.
template <typename Fn>
void Validate(Fn fn) {
  try {
    fn();
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
}

struct ConstructFlags {
  std::string method = "olr";
  int context = 1;
  double ratio = 0.6;
  double odl_lambda = 1e-4;
  int odl_iterations = 50;

  void Add(CLI::App *app) {
    app->add_option("--method", method, "olr, odl or dlm")->capture_default_str();
    app->add_option("--context", context, "context order n")->capture_default_str();
    app->add_option("--ratio", ratio, "sample-rank ratio alpha")->capture_default_str();
    app->add_option("--odl-lambda", odl_lambda)->capture_default_str();
    app->add_option("--odl-iterations", odl_iterations)->capture_default_str();
  }

  SubspaceSpec Spec() const {
    SubspaceSpec spec;
    Validate([&] {
      spec.method = ParseMethod(method);
      spec.context_order = context;
      spec.sample_ratio = ratio;
      spec.odl.lambda = odl_lambda;
      spec.odl.iterations = odl_iterations;
      spec.Check();
    });
    return spec;
  }
};

struct SnnFlags {
  SnnTrainConfig cfg;

  void Add(CLI::App *app) {
    app->add_option("--epochs", cfg.max_epochs)->capture_default_str();
    app->add_option("--lr", cfg.learning_rate)->capture_default_str();
    app->add_option("--lr-period", cfg.lr_halving_period, "epochs per halving")
        ->capture_default_str();
    app->add_option("--batch", cfg.batch_size)->capture_default_str();
    app->add_option("--maps", cfg.num_maps, "weight maps per input")->capture_default_str();
    app->add_option("--beta", cfg.beta, "reference-rank ratio")->capture_default_str();
    app->add_option("--lambda", cfg.lambda_orth, "orthogonality penalty")
        ->capture_default_str();
    app->add_option("--hidden", cfg.hidden_units, "tanh hidden units, 0 for none")
        ->capture_default_str();
  }

  SnnTrainConfig Config(std::uint64_t seed) const {
    SnnTrainConfig c = cfg;
    c.seed = DeriveSeed(seed, "train-snn");
    Validate([&] { c.Check(); });
    return c;
  }
};

struct SvmFlags {
  std::string penalty_grid = "0.1,1,10";
  int folds = 5;
  double fusion_reg = 1e-2;
  double tolerance = 1e-3;

  void Add(CLI::App *app) {
    app->add_option("--penalty-grid", penalty_grid, "comma-separated C values")
        ->capture_default_str();
    app->add_option("--folds", folds)->capture_default_str();
    app->add_option("--fusion-reg", fusion_reg)->capture_default_str();
    app->add_option("--tolerance", tolerance, "KKT tolerance")->capture_default_str();
  }

  SvmBackendOptions Options(std::uint64_t seed) const {
    SvmBackendOptions o;
    Validate([&] {
      o.penalty_grid = DoubleList(penalty_grid);
      if (o.penalty_grid.empty()) throw InputError("empty penalty grid");
      for (double c : o.penalty_grid)
        if (!(c > 0.0)) throw InputError("penalties must be positive");
      if (folds < 2) throw InputError("folds must be >= 2");
      if (!(fusion_reg >= 0.0)) throw InputError("fusion-reg must be >= 0");
      if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
    });
    o.folds = folds;
    o.fusion.regularization = fusion_reg;
    o.svm.tolerance = tolerance;
    o.seed = DeriveSeed(seed, "train-svm");
    return o;
  }
};

// --config FILE is pulled out of argv and its pairs are prepended as
// "--key=value" tokens right after the subcommand; with "take last" option
// semantics the explicit flags win.
std::vector<std::string> ExpandConfig(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return rest;
  RequirePath(config, "config file");
  KeyValueList kv;
  try {
    kv = ReadKeyValueFile(config);
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  std::vector<std::string> out;
  size_t insert = rest.empty() ? 0 : 1;
  out.insert(out.end(), rest.begin(), rest.begin() + insert);
  for (const auto &[k, v] : kv) out.push_back("--" + k + "=" + v);
  out.insert(out.end(), rest.begin() + insert, rest.end());
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"grasslid: subspace language identification pipeline"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::uint64_t seed = 0;
  std::function<void()> run;

  // synth
  std::string spec_path, out;
  CLI::App *synth = app.add_subcommand("synth", "generate a synthetic task");
  synth->add_option("--spec", spec_path, "task spec file")->required();
  synth->add_option("--out", out, "output directory")->required();
  synth->callback([&] {
    run = [&] {
      RequirePath(spec_path, "task spec");
      TaskSpec spec;
      Validate([&] { spec = ReadTaskSpec(spec_path); });
      TaskSummary s = MakeTask(spec, out);
      std::cout << "utterances=" << s.utterances << " files=" << s.files
                << " train=" << s.train_manifest.string()
                << " test=" << s.test_manifest.string() << "\n";
    };
  });

  // featurize
  std::string frames, state_map, segments, phoneset = "default";
  int num_units = 0;
  CLI::App *featurize = app.add_subcommand(
      "featurize", "collapse frame posteriors into a posteriorgram");
  featurize->add_option("--frames", frames, "T x S frame posteriors (.gsm or .csv)")
      ->required();
  featurize->add_option("--state-map", state_map, "unit index of every state")
      ->required();
  featurize->add_option("--segments", segments, "lines of 'start end' frames")
      ->required();
  featurize->add_option("--units", num_units, "number of units M")->required();
  featurize->add_option("--phoneset", phoneset)->capture_default_str();
  featurize->add_option("--out", out, "posteriorgram path")->required();
  featurize->callback([&] {
    run = [&] {
      for (const auto &[p, what] : {std::pair{frames, "frames"},
                                    std::pair{state_map, "state map"},
                                    std::pair{segments, "segments"}})
        RequirePath(p, what);
      Matrix f;
      std::vector<int> map;
      std::vector<Segment> segs;
      Validate([&] {
        f = fs::path(frames).extension() == ".csv" ? ReadCsvMatrix(frames)
                                                   : ReadMatrixFile(frames);
        std::ifstream ms(state_map);
        for (std::string w; ms >> w;) map.push_back(static_cast<int>(ParseInt(w)));
        std::ifstream ss(segments);
        for (std::string a, b; ss >> a >> b;)
          segs.push_back({static_cast<int>(ParseInt(a)), static_cast<int>(ParseInt(b))});
      });
      std::optional<PhoneticSequence> seq;
      Validate([&] { seq = SegmentPosteriors(f, map, num_units, segs, phoneset); });
      if (fs::path(out).has_parent_path())
        fs::create_directories(fs::path(out).parent_path());
      SavePosteriorgram(*seq, out);
      std::cout << "phones=" << seq->NumPhones() << " units=" << seq->NumUnits() << "\n";
    };
  });

  // construct
  std::string manifest;
  ConstructFlags construct_opts;
  CLI::App *construct = app.add_subcommand("construct", "build a subspace archive");
  construct->add_option("--manifest", manifest)->required();
  construct->add_option("--out", out, "archive directory")->required();
  construct->add_option("--seed", seed)->capture_default_str();
  construct_opts.Add(construct);
  construct->callback([&] {
    run = [&] {
      SubspaceSpec spec = construct_opts.Spec();
      RequirePath(manifest, "manifest");
      ConstructReport report;
      SubspaceArchive archive =
          ConstructArchive(manifest, spec, DeriveSeed(seed, "construct"), &report);
      for (const std::string &w : report.warnings) std::cerr << "warning: " << w << "\n";
      if (report.succeeded == 0)
        throw Error("every utterance failed; nothing written");
      SaveArchive(archive, out);
      std::cout << "subspaces=" << report.succeeded * archive.NumRecognizers()
                << " utterances=" << report.succeeded
                << " warnings=" << report.warnings.size() << "\n";
    };
  });

  // gram
  std::string archive_dir;
  CLI::App *gram = app.add_subcommand("gram", "projection-kernel Gram matrices");
  gram->add_option("--archive", archive_dir)->required();
  gram->add_option("--out", out)->required();
  gram->callback([&] {
    run = [&] {
      RequirePath(archive_dir, "archive");
      SaveGrams(ArchiveGrams(LoadArchive(archive_dir)), out);
    };
  });

  // train-svm
  std::string gram_dir;
  SvmFlags svm_opts;
  CLI::App *train_svm = app.add_subcommand("train-svm", "train the SVM backend");
  train_svm->add_option("--archive", archive_dir)->required();
  train_svm->add_option("--gram", gram_dir, "precomputed Gram directory");
  train_svm->add_option("--out", out, "model directory")->required();
  train_svm->add_option("--seed", seed)->capture_default_str();
  svm_opts.Add(train_svm);
  train_svm->callback([&] {
    run = [&] {
      SvmBackendOptions opts = svm_opts.Options(seed);
      RequirePath(archive_dir, "archive");
      if (!gram_dir.empty()) RequirePath(gram_dir, "Gram directory");
      SubspaceArchive train = LoadArchive(archive_dir);
      std::vector<GramMatrix> grams;
      if (!gram_dir.empty()) grams = LoadGrams(gram_dir);
      SvmSystem system = TrainSvmSystem(train, opts, grams);
      SaveSvmSystem(system, out);
      std::cout << "penalty=" << FormatDouble(system.backend.penalty)
                << " models=" << system.backend.models.size() << "\n";
    };
  });

  // train-snn
  SnnFlags snn_opts;
  CLI::App *train_snn = app.add_subcommand("train-snn", "train the subspace network");
  train_snn->add_option("--archive", archive_dir)->required();
  train_snn->add_option("--out", out, "model directory")->required();
  train_snn->add_option("--seed", seed)->capture_default_str();
  snn_opts.Add(train_snn);
  train_snn->callback([&] {
    run = [&] {
      SnnTrainConfig cfg = snn_opts.Config(seed);
      RequirePath(archive_dir, "archive");
      std::vector<SnnEpochLog> log;
      SnnSystem system = TrainSnnSystem(LoadArchive(archive_dir), cfg, &log);
      SaveSnnSystem(system, out);
      WriteTrainLog(fs::path(out) / "train.log", log);
      std::cout << "epochs=" << log.size()
                << " final_loss=" << FormatDouble(log.back().mean_loss) << "\n";
    };
  });

  // score
  std::string model_dir;
  CLI::App *score = app.add_subcommand("score", "score an archive with a model");
  score->add_option("--model", model_dir)->required();
  score->add_option("--archive", archive_dir)->required();
  score->add_option("--out", out, "trial file")->required();
  score->callback([&] {
    run = [&] {
      RequirePath(model_dir, "model directory");
      RequirePath(archive_dir, "archive");
      std::vector<Trial> trials = ScoreWithModel(model_dir, LoadArchive(archive_dir));
      if (fs::path(out).has_parent_path())
        fs::create_directories(fs::path(out).parent_path());
      WriteTrials(out, trials);
      std::cout << "trials=" << trials.size() << "\n";
    };
  });

  // eval
  std::string trials_path;
  CLI::App *eval = app.add_subcommand("eval", "EER, Cavg and DET points");
  eval->add_option("--trials", trials_path)->required();
  eval->add_option("--out", out, "metrics directory")->required();
  eval->callback([&] {
    run = [&] {
      RequirePath(trials_path, "trial file");
      std::vector<Trial> trials;
      Validate([&] { trials = ReadTrials(trials_path); });
      Metrics m;
      Validate([&] { m = ComputeMetrics(trials); });
      WriteEvalOutputs(trials, out);
      std::cout << "eer=" << FormatDouble(m.eer) << " cavg=" << FormatDouble(m.cavg)
                << " trials=" << m.trials << "\n";
    };
  });

  // gradcheck
  bool hidden = false;
  double step = 1e-5, tolerance = 1e-5;
  CLI::App *gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of the network");
  gradcheck->add_option("--seed", seed)->capture_default_str();
  gradcheck->add_flag("--hidden-layer", hidden, "include a tanh hidden layer");
  gradcheck->add_option("--step", step)->capture_default_str();
  gradcheck->add_option("--tolerance", tolerance)->capture_default_str();
  int gradcheck_status = 0;
  gradcheck->callback([&] {
    run = [&] {
      if (!(step > 0.0) || !(tolerance > 0.0))
        throw UsageError("step and tolerance must be positive");
      double worst = 0.0;
      for (const GradCheckEntry &e : RandomGradCheck(seed, hidden, step)) {
        std::cout << e.tensor << " " << FormatDouble(e.max_relative_error) << "\n";
        worst = std::max(worst, e.max_relative_error);
      }
      std::cout << "max_relative_error=" << FormatDouble(worst) << "\n";
      if (!(worst <= tolerance)) gradcheck_status = 1;
    };
  });

  // sweep
  std::string train_manifest, test_manifest, backend = "snn";
  std::string grid_context, grid_ratio, grid_beta, grid_maps, grid_lambda;
  CLI::App *sweep = app.add_subcommand("sweep", "grid search over (n, alpha, beta, m, lambda)");
  sweep->add_option("--train-manifest", train_manifest)->required();
  sweep->add_option("--test-manifest", test_manifest)->required();
  sweep->add_option("--out", out, "results table")->required();
  sweep->add_option("--backend", backend, "snn or svm")->capture_default_str();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--grid-context", grid_context, "comma-separated n values");
  sweep->add_option("--grid-ratio", grid_ratio, "comma-separated alpha values");
  sweep->add_option("--grid-beta", grid_beta);
  sweep->add_option("--grid-maps", grid_maps);
  sweep->add_option("--grid-lambda", grid_lambda);
  ConstructFlags sweep_construct;
  SnnFlags sweep_snn;
  SvmFlags sweep_svm;
  sweep_construct.Add(sweep);
  sweep_snn.Add(sweep);
  sweep_svm.Add(sweep);
  sweep->callback([&] {
    run = [&] {
      SweepBase base;
      SweepGrid grid;
      base.backend = backend;
      base.seed = seed;
      base.spec = sweep_construct.Spec();
      base.snn = sweep_snn.Config(seed);
      base.svm = sweep_svm.Options(seed);
      Validate([&] {
        if (backend != "snn" && backend != "svm")
          throw InputError("backend must be snn or svm");
        grid.context_orders = IntList(grid_context);
        grid.sample_ratios = DoubleList(grid_ratio);
        grid.betas = DoubleList(grid_beta);
        grid.num_maps = IntList(grid_maps);
        grid.lambdas = DoubleList(grid_lambda);
        for (int n : grid.context_orders) {
          SubspaceSpec s = base.spec;
          s.context_order = n;
          s.Check();
        }
        for (double a : grid.sample_ratios) {
          SubspaceSpec s = base.spec;
          s.sample_ratio = a;
          s.Check();
        }
        for (double b : grid.betas) {
          SnnTrainConfig c = base.snn;
          c.beta = b;
          c.Check();
        }
        for (int m : grid.num_maps) {
          SnnTrainConfig c = base.snn;
          c.num_maps = m;
          c.Check();
        }
        for (double l : grid.lambdas) {
          SnnTrainConfig c = base.snn;
          c.lambda_orth = l;
          c.Check();
        }
      });
      RequirePath(train_manifest, "train manifest");
      RequirePath(test_manifest, "test manifest");
      std::vector<std::string> lines = RunSweep(train_manifest, test_manifest, grid, base);
      if (fs::path(out).has_parent_path())
        fs::create_directories(fs::path(out).parent_path());
      std::ofstream os(out, std::ios::trunc);
      for (const std::string &l : lines) os << l << "\n";
      if (!os) throw FormatError("cannot write " + out);
      std::cout << "cells=" << lines.size() << "\n";
    };
  });

  try {
    std::vector<std::string> args = ExpandConfig(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError &e) {
    std::cerr << "grasslid: " << e.what() << "\n";
    return 2;
  }

  try {
    run();
  } catch (const UsageError &e) {
    std::cerr << "grasslid: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "grasslid: " << e.what() << "\n";
    return 1;
  }
  return gradcheck_status;
}
